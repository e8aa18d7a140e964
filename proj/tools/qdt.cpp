// qdt: optimal quantile regression trees from the command line.
//
//   qdt synth      --out data.csv [--truth truth.json] [--n 1000] [--seed 0]
//   qdt binarize   --data raw.csv --out binary.csv [--map map.json] [--bins 4]
//   qdt fit        --data train.csv --out model.json [--num-quantiles k | --quantiles a,b,..]
//   qdt predict    --model model.json --data test.csv --out pred.csv [--rearrange] [--density-out curves.csv]
//   qdt eval       --model model.json --data test.csv [--truth truth.json] [--out report.json]
//   qdt similarity --model model.json --data train.csv --out matrix.csv [--zones-out zones.json]
//   qdt bench      [--data train.csv] --tree-counts 5,25,100 --out bench.csv
//
// Failures exit with status 1 and print one line: `qdt: error code=<code> msg=<message>`.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdt/csv.hpp"
#include "qdt/dataset.hpp"
#include "qdt/density.hpp"
#include "qdt/errors.hpp"
#include "qdt/log.hpp"
#include "qdt/metrics.hpp"
#include "qdt/model.hpp"
#include "qdt/search.hpp"
#include "qdt/synth.hpp"

namespace {

using json = nlohmann::json;

// Removes every registered output unless the command finishes.
class OutputGuard {
public:
    ~OutputGuard() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& p : paths_) std::filesystem::remove(p, ec);
    }
    const std::string& add(const std::string& path) {
        paths_.push_back(path);
        return path;
    }
    void commit() { committed_ = true; }

private:
    std::vector<std::string> paths_;
    bool committed_ = false;
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw qdt::IoError("cannot write '" + path + "'");
    out << content;
    if (!out) throw qdt::IoError("write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qdt::IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::string format_seconds(double s) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << s;
    return os.str();
}

struct DataOptions {
    std::string path;
    std::string target = "y";
    std::string categorical;
    int bins = 4;
    int max_categories = 64;

    qdt::CsvSchema schema(bool target_required = true) const {
        qdt::CsvSchema s;
        s.target = target;
        s.target_required = target_required;
        for (const auto& c : split_list(categorical)) s.overrides[c] = qdt::ColumnKind::Categorical;
        return s;
    }
    qdt::BinarizeConfig binarize() const { return {bins, max_categories}; }
};

void add_data_options(CLI::App* cmd, DataOptions& d, bool required = true) {
    auto* opt = cmd->add_option("--data", d.path, "Input CSV with a header row");
    if (required) opt->required();
    cmd->add_option("--target", d.target, "Target column name")->capture_default_str();
    cmd->add_option("--categorical", d.categorical, "Comma-separated columns forced categorical");
    cmd->add_option("--bins", d.bins, "Thresholds per numeric column")->capture_default_str();
    cmd->add_option("--max-categories", d.max_categories, "Largest accepted categorical cardinality")->capture_default_str();
}

struct SearchOptions {
    std::string quantiles;
    std::size_t num_quantiles = 0;
    int max_depth = 4;
    int min_sup = 1;
    double timeout_s = -1.0;
    std::string leaf_value = "interpolated";
    std::string feature_order = "static";
    bool no_cache = false;

    qdt::QuantileGrid grid() const {
        if (!quantiles.empty() && num_quantiles > 0)
            throw qdt::ConfigError("--quantiles and --num-quantiles are mutually exclusive");
        if (!quantiles.empty()) {
            std::vector<double> levels;
            for (const auto& s : split_list(quantiles)) {
                try {
                    levels.push_back(std::stod(s));
                } catch (const std::exception&) {
                    throw qdt::ConfigError("bad quantile level '" + s + "'");
                }
            }
            return qdt::QuantileGrid(levels);
        }
        return qdt::QuantileGrid::evenly_spaced(num_quantiles > 0 ? num_quantiles : 9);
    }
    qdt::SearchConfig config() const {
        qdt::SearchConfig cfg;
        cfg.max_depth = max_depth;
        cfg.min_sup = min_sup;
        if (timeout_s >= 0.0) cfg.timeout_s = timeout_s;
        cfg.leaf_value = qdt::parse_leaf_value_mode(leaf_value);
        if (feature_order == "static")
            cfg.feature_order = qdt::FeatureOrder::Static;
        else if (feature_order == "variance")
            cfg.feature_order = qdt::FeatureOrder::VarianceReduction;
        else
            throw qdt::ConfigError("unknown feature order '" + feature_order + "'");
        cfg.cache_enabled = !no_cache;
        cfg.validate();
        return cfg;
    }
};

void add_search_options(CLI::App* cmd, SearchOptions& s) {
    cmd->add_option("--quantiles", s.quantiles, "Comma-separated quantile levels");
    cmd->add_option("--num-quantiles", s.num_quantiles, "k evenly spaced levels j/(k+1) (default 9)");
    cmd->add_option("--max-depth", s.max_depth, "Maximum tree depth")->capture_default_str();
    cmd->add_option("--min-sup", s.min_sup, "Minimum samples per leaf")->capture_default_str();
    cmd->add_option("--timeout-s", s.timeout_s, "Search time limit in seconds (anytime result)");
    cmd->add_option("--leaf-value", s.leaf_value, "interpolated | order-statistic")->capture_default_str();
    cmd->add_option("--feature-order", s.feature_order, "static | variance")->capture_default_str();
    cmd->add_flag("--no-cache", s.no_cache, "Disable itemset cache reuse");
}

json run_echo(const std::vector<std::string>& argv) { return {{"argv", argv}}; }

qdt::BinaryDataset load_binarized(const DataOptions& d) {
    return qdt::binarize(qdt::load_csv(d.path, d.schema()), d.binarize());
}

// Rows of a raw table encoded with a fitted model's feature map (input order).
std::vector<std::vector<std::uint8_t>> encode_for(const qdt::QuantileModel& model, const qdt::RawTable& raw) {
    if (model.binarization.empty()) {
        // Model trained on already-binary columns without a map: use columns as-is.
        std::vector<std::vector<std::uint8_t>> rows(raw.n_rows(), std::vector<std::uint8_t>(raw.columns.size()));
        for (std::size_t c = 0; c < raw.columns.size(); ++c)
            for (std::size_t r = 0; r < raw.n_rows(); ++r) rows[r][c] = raw.columns[c].numbers.at(r) != 0.0;
        return rows;
    }
    return qdt::encode_rows(raw, model.binarization);
}

std::vector<std::vector<double>> predictions_for(const qdt::QuantileModel& model, const qdt::RawTable& raw,
                                                 bool rearrange) {
    auto preds = qdt::predict(model, encode_for(model, raw));
    if (rearrange)
        for (auto& p : preds) qdt::rearrange(p);
    return preds;
}

// ---------------------------------------------------------------------------

int cmd_synth(const qdt::SynthConfig& cfg, const std::string& out, std::string truth, const std::vector<std::string>& argv) {
    OutputGuard guard;
    if (truth.empty()) truth = out + ".truth.json";
    const auto data = qdt::generate(cfg);
    qdt::save_csv(data.table, guard.add(out));
    auto sidecar = json::parse(qdt::truth_to_json(data, cfg));
    sidecar["run"] = run_echo(argv);
    write_file(guard.add(truth), sidecar.dump(1));
    guard.commit();
    std::cout << "wrote " << cfg.n_samples << " samples to " << out << " (ground truth: " << truth << ")\n";
    return 0;
}

int cmd_binarize(const DataOptions& d, const std::string& out, std::string map_path, const std::vector<std::string>& argv) {
    OutputGuard guard;
    if (map_path.empty()) map_path = out + ".map.json";
    const auto raw = qdt::load_csv(d.path, d.schema());
    const auto features = qdt::derive_features(raw, d.binarize());
    const auto rows = qdt::encode_rows(raw, features);

    qdt::RawTable binary;
    binary.target_name = raw.target_name;
    binary.target = raw.target;
    for (std::size_t f = 0; f < features.size(); ++f) {
        qdt::Column col{features[f].name(), qdt::ColumnKind::Binary, {}, {}};
        col.numbers.reserve(rows.size());
        for (const auto& r : rows) col.numbers.push_back(r[f]);
        binary.columns.push_back(std::move(col));
    }
    qdt::save_csv(binary, guard.add(out));
    json map = {{"features", json::parse(qdt::features_to_json(features))}, {"run", run_echo(argv)}};
    write_file(guard.add(map_path), map.dump(1));
    guard.commit();
    std::cout << "binarized " << raw.n_rows() << " rows into " << features.size() << " features\n";
    return 0;
}

int cmd_fit(const DataOptions& d, const SearchOptions& s, bool naive, const std::string& out,
            const std::vector<std::string>& argv) {
    OutputGuard guard;
    const auto grid = s.grid();
    const auto cfg = s.config();
    const auto ds = load_binarized(d);
    qdt::log::info("fitting " + std::to_string(grid.size()) + " trees on " + std::to_string(ds.n_samples()) +
                   " samples, " + std::to_string(ds.n_features()) + " features");
    const auto t0 = std::chrono::steady_clock::now();
    qdt::SearchStats stats;
    const auto model = naive ? qdt::fit_naive(ds, grid, cfg) : qdt::fit_simultaneous(ds, grid, cfg, &stats);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    auto doc = json::parse(qdt::serialize(model));
    doc["run"] = run_echo(argv);
    write_file(guard.add(out), doc.dump(1));
    guard.commit();

    const auto losses = qdt::training_losses(model);
    std::cout << "quantile,training_loss,optimal,depth,leaves\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        std::cout << qdt::format_double(grid[i]) << ',' << qdt::format_double(losses[i]) << ','
                  << (model.optimal[i] ? "true" : "false") << ',' << model.trees[i].depth() << ','
                  << model.trees[i].n_leaves() << '\n';
    std::cout << "# " << (naive ? "naive" : "simultaneous") << " search: " << format_seconds(secs) << " s";
    if (!naive) std::cout << ", " << stats.cache_entries << " cached itemsets";
    std::cout << '\n';
    return 0;
}

int cmd_predict(const std::string& model_path, const DataOptions& d, const std::string& out, bool do_rearrange,
                const std::string& density_out, std::size_t density_points) {
    OutputGuard guard;
    const auto model = qdt::deserialize(read_file(model_path));
    const auto raw = qdt::load_csv(d.path, d.schema(false));
    const auto preds = predictions_for(model, raw, do_rearrange);

    std::ofstream os(guard.add(out));
    if (!os) throw qdt::IoError("cannot write '" + out + "'");
    os << "row";
    for (double q : model.grid.levels()) os << ",q" << qdt::format_double(q);
    os << '\n';
    for (std::size_t r = 0; r < preds.size(); ++r) {
        os << r;
        for (double v : preds[r]) os << ',' << qdt::format_double(v);
        os << '\n';
    }
    os.close();

    if (!density_out.empty()) {
        std::ofstream ds(guard.add(density_out));
        if (!ds) throw qdt::IoError("cannot write '" + density_out + "'");
        ds << "row,x,pdf,cdf\n";
        for (std::size_t r = 0; r < preds.size(); ++r) {
            const auto d_r = qdt::kde_from_quantiles(preds[r]);
            for (const auto& p : qdt::density_curve(d_r, density_points))
                ds << r << ',' << qdt::format_double(p.x) << ',' << qdt::format_double(p.pdf) << ','
                   << qdt::format_double(p.cdf) << '\n';
        }
    }
    guard.commit();
    std::cout << "wrote predictions for " << preds.size() << " rows to " << out << '\n';
    return 0;
}

int cmd_eval(const std::string& model_path, const DataOptions& d, const std::string& truth_path, bool do_rearrange,
             const std::string& out, const std::vector<std::string>& argv) {
    OutputGuard guard;
    const auto model = qdt::deserialize(read_file(model_path));
    const auto raw = qdt::load_csv(d.path, d.schema());
    const auto preds = predictions_for(model, raw, false);
    std::vector<qdt::Gaussian> truth;
    if (!truth_path.empty()) {
        truth = qdt::truth_from_json(read_file(truth_path));
        if (truth.size() != raw.n_rows()) throw qdt::DataError("ground truth has a different row count than the data");
    }
    const auto report = qdt::evaluate(preds, raw.target, model.grid, truth, do_rearrange);
    if (!out.empty()) {
        auto doc = json::parse(report.to_json());
        doc["run"] = run_echo(argv);
        write_file(guard.add(out), doc.dump(2));
    }
    guard.commit();
    std::cout << report.to_text();
    return 0;
}

int cmd_similarity(const std::string& model_path, const DataOptions& d, const std::string& out,
                   const std::string& zones_out, double threshold, const std::vector<std::string>& argv) {
    OutputGuard guard;
    const auto model = qdt::deserialize(read_file(model_path));
    const auto raw = qdt::load_csv(d.path, d.schema(false));
    const auto ds = qdt::BinaryDataset::from_rows(encode_for(model, raw), raw.target, model.binarization);
    const auto m = qdt::jaccard_matrix(model, ds);
    const auto zones = qdt::tree_zones(m, threshold);

    std::ofstream os(guard.add(out));
    if (!os) throw qdt::IoError("cannot write '" + out + "'");
    os << "quantile";
    for (double q : model.grid.levels()) os << ",q" << qdt::format_double(q);
    os << '\n';
    double lowest = 1.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        os << qdt::format_double(model.grid[i]);
        for (double v : m[i]) {
            os << ',' << qdt::format_double(v);
            lowest = std::min(lowest, v);
        }
        os << '\n';
    }
    os.close();

    const int n_zones = zones.empty() ? 0 : zones.back() + 1;
    if (!zones_out.empty()) {
        json z = {{"threshold", threshold}, {"zones", zones}, {"n_zones", n_zones}, {"min_jaccard", lowest},
                  {"run", run_echo(argv)}};
        write_file(guard.add(zones_out), z.dump(1));
    }
    guard.commit();
    std::cout << "min jaccard " << lowest << ", " << n_zones << " zones at threshold " << threshold << '\n';
    for (int z = 0; z < n_zones; ++z) {
        std::size_t first = 0, last = 0;
        bool seen = false;
        for (std::size_t i = 0; i < zones.size(); ++i) {
            if (zones[i] != z) continue;
            if (!seen) first = i;
            last = i;
            seen = true;
        }
        std::cout << "zone " << z << ": q" << qdt::format_double(model.grid[first]) << " .. q"
                  << qdt::format_double(model.grid[last]) << '\n';
    }
    return 0;
}

struct BenchOptions {
    std::string tree_counts = "5,25,100";
    int repeats = 1;
    int warmup = 1;
    bool parallel_naive = false;
    std::size_t n = 2000;
    std::uint64_t seed = 0;
};

int cmd_bench(const DataOptions& d, SearchOptions s, const BenchOptions& b, const std::string& out) {
    OutputGuard guard;
    qdt::BinaryDataset ds;
    if (d.path.empty()) {
        qdt::SynthConfig sc;
        sc.n_samples = b.n;
        sc.seed = b.seed;
        ds = qdt::binarize(qdt::generate(sc).table, d.binarize());
    } else {
        ds = load_binarized(d);
    }
    const auto cfg = s.config();
    std::vector<std::size_t> counts;
    for (const auto& c : split_list(b.tree_counts)) counts.push_back(std::stoul(c));
    if (counts.empty()) throw qdt::ConfigError("--tree-counts is empty");

    using clock = std::chrono::steady_clock;
    auto time_of = [&](auto&& fn) {
        double best = 0.0;
        for (int r = 0; r < std::max(1, b.repeats); ++r) {
            const auto t0 = clock::now();
            fn();
            const double t = std::chrono::duration<double>(clock::now() - t0).count();
            best = r == 0 ? t : std::min(best, t);
        }
        return best;
    };

    for (int w = 0; w < b.warmup; ++w) {
        const auto grid = qdt::QuantileGrid::evenly_spaced(counts.front());
        (void)qdt::fit_simultaneous(ds, grid, cfg);
        (void)qdt::fit_naive(ds, grid, cfg, b.parallel_naive);
    }

    std::ofstream os(guard.add(out));
    if (!os) throw qdt::IoError("cannot write '" + out + "'");
    os << "k,t_simultaneous,t_naive,speedup,losses_match,timed_out,parallel\n";
    std::cout << "k,t_simultaneous,t_naive,speedup\n";
    for (std::size_t k : counts) {
        const auto grid = qdt::QuantileGrid::evenly_spaced(k);
        qdt::QuantileModel sim, nai;
        const double ts = time_of([&] { sim = qdt::fit_simultaneous(ds, grid, cfg); });
        const double tn = time_of([&] { nai = qdt::fit_naive(ds, grid, cfg, b.parallel_naive); });
        const bool match = qdt::training_losses(sim) == qdt::training_losses(nai);
        const bool timed_out = std::count(sim.optimal.begin(), sim.optimal.end(), false) > 0 ||
                               std::count(nai.optimal.begin(), nai.optimal.end(), false) > 0;
        const double speedup = ts > 0.0 ? tn / ts : 0.0;
        os << k << ',' << format_seconds(ts) << ',' << format_seconds(tn) << ',' << qdt::format_double(speedup) << ','
           << (match ? "true" : "false") << ',' << (timed_out ? "true" : "false") << ','
           << (b.parallel_naive ? "true" : "false") << '\n';
        std::cout << k << ',' << format_seconds(ts) << ',' << format_seconds(tn) << ',' << std::setprecision(3) << speedup
                  << '\n';
        if (!match && !timed_out) qdt::log::write(qdt::log::Level::Error, "simultaneous and naive losses differ at k=" + std::to_string(k));
    }
    os.close();
    guard.commit();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    CLI::App app{"Optimal quantile regression trees"};
    app.require_subcommand(1);

    // synth
    qdt::SynthConfig synth_cfg;
    std::string synth_out, synth_truth;
    auto* synth = app.add_subcommand("synth", "Generate the synthetic categorical-Gaussian benchmark");
    synth->add_option("--out", synth_out, "Output CSV")->required();
    synth->add_option("--truth", synth_truth, "Ground-truth sidecar JSON (default <out>.truth.json)");
    synth->add_option("--n", synth_cfg.n_samples, "Number of samples")->capture_default_str();
    synth->add_option("--seed", synth_cfg.seed, "PRNG seed")->capture_default_str();
    synth->add_option("--categories", synth_cfg.n_categories, "Number of categories")->capture_default_str();
    synth->add_option("--category-features", synth_cfg.n_category_features)->capture_default_str();
    synth->add_option("--noise-features", synth_cfg.n_noise_features)->capture_default_str();

    // binarize
    DataOptions bin_data;
    std::string bin_out, bin_map;
    auto* bin = app.add_subcommand("binarize", "Binarize a CSV and export the feature map");
    add_data_options(bin, bin_data);
    bin->add_option("--out", bin_out, "Binary dataset CSV")->required();
    bin->add_option("--map", bin_map, "Binarization map JSON (default <out>.map.json)");

    // fit
    DataOptions fit_data;
    SearchOptions fit_search;
    bool fit_naive = false;
    std::string fit_out;
    auto* fit = app.add_subcommand("fit", "Learn one optimal tree per quantile");
    add_data_options(fit, fit_data);
    add_search_options(fit, fit_search);
    fit->add_flag("--naive", fit_naive, "One independent search per quantile");
    fit->add_option("--out", fit_out, "Model JSON")->required();

    // predict
    DataOptions pred_data;
    std::string pred_model, pred_out, pred_density;
    std::size_t pred_points = 256;
    bool pred_rearrange = false;
    auto* pred = app.add_subcommand("predict", "Per-sample quantile vectors for a CSV");
    add_data_options(pred, pred_data);
    pred->add_option("--model", pred_model, "Model JSON")->required();
    pred->add_option("--out", pred_out, "Predictions CSV")->required();
    pred->add_flag("--rearrange", pred_rearrange, "Sort each quantile vector ascending");
    pred->add_option("--density-out", pred_density, "Density curves CSV (row,x,pdf,cdf)");
    pred->add_option("--density-points", pred_points, "Curve points per row")->capture_default_str();

    // eval
    DataOptions eval_data;
    std::string eval_model, eval_truth, eval_out;
    bool eval_rearrange = false;
    auto* ev = app.add_subcommand("eval", "MQE, NLL, CRPS and optional MISE of a model on a CSV");
    add_data_options(ev, eval_data);
    ev->add_option("--model", eval_model, "Model JSON")->required();
    ev->add_option("--truth", eval_truth, "Ground-truth sidecar JSON (enables MISE)");
    ev->add_option("--out", eval_out, "Report JSON");
    ev->add_flag("--rearrange", eval_rearrange, "Sort each quantile vector before density estimation");

    // similarity
    DataOptions sim_data;
    std::string sim_model, sim_out, sim_zones;
    double sim_threshold = 0.1;
    auto* sim = app.add_subcommand("similarity", "Pairwise partition Jaccard matrix of the trees");
    add_data_options(sim, sim_data);
    sim->add_option("--model", sim_model, "Model JSON")->required();
    sim->add_option("--out", sim_out, "Matrix CSV")->required();
    sim->add_option("--zones-out", sim_zones, "Zone summary JSON");
    sim->add_option("--zone-threshold", sim_threshold, "Similarity drop that opens a new zone")->capture_default_str();

    // bench
    DataOptions bench_data;
    SearchOptions bench_search;
    bench_search.max_depth = 3;
    bench_search.min_sup = 16;
    BenchOptions bench_opts;
    std::string bench_out;
    auto* bench = app.add_subcommand("bench", "Time simultaneous vs naive search over tree counts");
    add_data_options(bench, bench_data, false);
    bench->add_option("--max-depth", bench_search.max_depth)->capture_default_str();
    bench->add_option("--min-sup", bench_search.min_sup)->capture_default_str();
    bench->add_option("--timeout-s", bench_search.timeout_s, "Per-fit time limit; timed-out fits are marked");
    bench->add_option("--leaf-value", bench_search.leaf_value)->capture_default_str();
    bench->add_option("--tree-counts", bench_opts.tree_counts, "Comma-separated tree counts")->capture_default_str();
    bench->add_option("--repeats", bench_opts.repeats, "Timed runs per point (minimum kept)")->capture_default_str();
    bench->add_option("--warmup", bench_opts.warmup, "Untimed warm-up runs")->capture_default_str();
    bench->add_flag("--parallel-naive", bench_opts.parallel_naive, "Run the naive searches concurrently");
    bench->add_option("--n", bench_opts.n, "Synthetic samples when --data is absent")->capture_default_str();
    bench->add_option("--seed", bench_opts.seed, "Synthetic seed when --data is absent")->capture_default_str();
    bench->add_option("--out", bench_out, "Bench CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "qdt: error code=usage msg=" << e.what() << '\n';
        return 2;
    }

    try {
        if (*synth) return cmd_synth(synth_cfg, synth_out, synth_truth, args);
        if (*bin) return cmd_binarize(bin_data, bin_out, bin_map, args);
        if (*fit) return cmd_fit(fit_data, fit_search, fit_naive, fit_out, args);
        if (*pred) return cmd_predict(pred_model, pred_data, pred_out, pred_rearrange, pred_density, pred_points);
        if (*ev) return cmd_eval(eval_model, eval_data, eval_truth, eval_rearrange, eval_out, args);
        if (*sim) return cmd_similarity(sim_model, sim_data, sim_out, sim_zones, sim_threshold, args);
        if (*bench) return cmd_bench(bench_data, bench_search, bench_opts, bench_out);
    } catch (const qdt::Error& e) {
        std::cerr << "qdt: error code=" << e.code() << " msg=" << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "qdt: error code=internal msg=" << e.what() << '\n';
        return 1;
    }
    return 0;
}
