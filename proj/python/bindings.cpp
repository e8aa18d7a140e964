#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qdt/csv.hpp"
#include "qdt/dataset.hpp"
#include "qdt/density.hpp"
#include "qdt/errors.hpp"
#include "qdt/metrics.hpp"
#include "qdt/model.hpp"
#include "qdt/quantile.hpp"
#include "qdt/search.hpp"
#include "qdt/synth.hpp"

namespace py = pybind11;
using namespace qdt;

namespace {

using Rows = std::vector<std::vector<std::uint8_t>>;

SearchConfig make_config(int max_depth, int min_sup, std::optional<double> timeout_s, const std::string& leaf_value,
                         bool cache) {
    SearchConfig cfg;
    cfg.max_depth = max_depth;
    cfg.min_sup = min_sup;
    cfg.timeout_s = timeout_s;
    cfg.leaf_value = parse_leaf_value_mode(leaf_value);
    cfg.cache_enabled = cache;
    cfg.validate();
    return cfg;
}

QuantileGrid make_grid(const std::vector<double>& levels) { return QuantileGrid(levels); }

py::dict stats_dict(const SearchStats& s) {
    py::dict d;
    d["cache_hits"] = s.cache_hits;
    d["cache_misses"] = s.cache_misses;
    d["cache_entries"] = s.cache_entries;
    d["recursions"] = s.recursions;
    d["timed_out"] = s.timed_out;
    d["seconds"] = s.seconds;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Optimal quantile regression trees";
    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    m.def("evenly_spaced", [](std::size_t k) { return QuantileGrid::evenly_spaced(k).levels(); }, py::arg("k"),
          "k levels j/(k+1).");
    m.def("empirical_quantile", [](std::vector<double> values, double q) {
        std::sort(values.begin(), values.end());
        return empirical_quantile(values, q);
    }, py::arg("values"), py::arg("q"));
    m.def("pinball_loss", [](const std::vector<double>& values, double v, double q) { return pinball_loss(values, v, q); },
          py::arg("values"), py::arg("v"), py::arg("q"));

    py::class_<BinaryDataset>(m, "Dataset")
        .def_static("from_rows", [](const Rows& rows, const std::vector<double>& targets) {
            return BinaryDataset::from_rows(rows, targets);
        }, py::arg("rows"), py::arg("targets"))
        .def_static("from_csv", [](const std::string& path, const std::string& target, int bins) {
            CsvSchema schema;
            schema.target = target;
            return binarize(load_csv(path, schema), {bins, 64});
        }, py::arg("path"), py::arg("target") = "y", py::arg("bins") = 4)
        .def_property_readonly("n_samples", &BinaryDataset::n_samples)
        .def_property_readonly("n_features", &BinaryDataset::n_features)
        .def_property_readonly("targets", &BinaryDataset::targets)
        .def_property_readonly("original_index", &BinaryDataset::original_index)
        .def_property_readonly("feature_names", [](const BinaryDataset& ds) {
            std::vector<std::string> names;
            for (const auto& f : ds.features()) names.push_back(f.name());
            return names;
        })
        .def("row", &BinaryDataset::row, py::arg("i"))
        .def("leaf_losses", [](const BinaryDataset& ds, const std::vector<double>& levels, const std::string& mode) {
            return evaluate_leaf(ds, ds.all(), make_grid(levels), parse_leaf_value_mode(mode)).losses;
        }, py::arg("levels"), py::arg("leaf_value") = "interpolated", "Leaf losses of the whole dataset.");

    py::class_<Tree>(m, "Tree")
        .def_property_readonly("depth", &Tree::depth)
        .def_property_readonly("n_leaves", &Tree::n_leaves)
        .def_property_readonly("total_loss", &Tree::total_loss)
        .def("predict", [](const Tree& t, const std::vector<std::uint8_t>& x) { return t.predict(x); }, py::arg("x"))
        .def("dump", [](const Tree& t) { return t.dump(); });

    py::class_<QuantileModel>(m, "Model")
        .def_property_readonly("quantiles", [](const QuantileModel& mo) { return mo.grid.levels(); })
        .def_property_readonly("trees", [](const QuantileModel& mo) { return mo.trees; })
        .def_property_readonly("optimal", [](const QuantileModel& mo) { return mo.optimal; })
        .def_property_readonly("training_losses", [](const QuantileModel& mo) { return training_losses(mo); })
        .def("predict", [](const QuantileModel& mo, const Rows& rows) { return predict(mo, rows); }, py::arg("rows"))
        .def("jaccard_matrix", [](const QuantileModel& mo, const BinaryDataset& ds) { return jaccard_matrix(mo, ds); },
             py::arg("dataset"))
        .def("to_json", [](const QuantileModel& mo) { return serialize(mo); })
        .def_static("from_json", [](const std::string& text) { return deserialize(text); }, py::arg("text"));

    py::class_<SingleFit>(m, "SingleFit")
        .def_readonly("tree", &SingleFit::tree)
        .def_readonly("error", &SingleFit::error)
        .def_readonly("optimal", &SingleFit::optimal)
        .def_property_readonly("stats", [](const SingleFit& f) { return stats_dict(f.stats); });

    m.def("fit_single", [](const BinaryDataset& ds, double q, int max_depth, int min_sup, std::optional<double> timeout_s,
                           const std::string& leaf_value, bool cache) {
        py::gil_scoped_release nogil;
        return fit_single(ds, q, make_config(max_depth, min_sup, timeout_s, leaf_value, cache));
    }, py::arg("dataset"), py::arg("q"), py::arg("max_depth") = 4, py::arg("min_sup") = 1, py::arg("timeout_s") = py::none(),
       py::arg("leaf_value") = "interpolated", py::arg("cache") = true);

    m.def("fit_simultaneous", [](const BinaryDataset& ds, const std::vector<double>& levels, int max_depth, int min_sup,
                                 std::optional<double> timeout_s, const std::string& leaf_value, bool cache) {
        const auto grid = make_grid(levels);
        const auto cfg = make_config(max_depth, min_sup, timeout_s, leaf_value, cache);
        py::gil_scoped_release nogil;
        return fit_simultaneous(ds, grid, cfg);
    }, py::arg("dataset"), py::arg("quantiles"), py::arg("max_depth") = 4, py::arg("min_sup") = 1,
       py::arg("timeout_s") = py::none(), py::arg("leaf_value") = "interpolated", py::arg("cache") = true);

    m.def("fit_naive", [](const BinaryDataset& ds, const std::vector<double>& levels, int max_depth, int min_sup,
                          const std::string& leaf_value, bool parallel) {
        const auto grid = make_grid(levels);
        const auto cfg = make_config(max_depth, min_sup, std::nullopt, leaf_value, true);
        py::gil_scoped_release nogil;
        return fit_naive(ds, grid, cfg, parallel);
    }, py::arg("dataset"), py::arg("quantiles"), py::arg("max_depth") = 4, py::arg("min_sup") = 1,
       py::arg("leaf_value") = "interpolated", py::arg("parallel") = false);

    py::class_<Density>(m, "Density")
        .def(py::init<std::vector<double>, double>(), py::arg("centers"), py::arg("bandwidth"))
        .def_property_readonly("bandwidth", &Density::bandwidth)
        .def_property_readonly("centers", &Density::centers)
        .def("pdf", &Density::pdf, py::arg("x"))
        .def("cdf", &Density::cdf, py::arg("x"));
    m.def("kde_from_quantiles", [](const std::vector<double>& values) { return kde_from_quantiles(values); },
          py::arg("values"));
    m.def("scott_bandwidth", [](const std::vector<double>& values) { return scott_bandwidth(values); }, py::arg("values"));

    m.def("mqe", [](const std::vector<std::vector<double>>& preds, const std::vector<double>& y,
                    const std::vector<double>& levels) { return mqe(preds, y, make_grid(levels)); },
          py::arg("predictions"), py::arg("targets"), py::arg("quantiles"));
    m.def("nll", [](const std::vector<Density>& d, const std::vector<double>& y) { return nll(d, y); },
          py::arg("densities"), py::arg("targets"));
    m.def("crps", [](const std::vector<Density>& d, const std::vector<double>& y) { return crps(d, y); },
          py::arg("densities"), py::arg("targets"));
    m.def("evaluate", [](const std::vector<std::vector<double>>& preds, const std::vector<double>& y,
                         const std::vector<double>& levels, const std::vector<std::pair<double, double>>& truth,
                         bool rearrange) {
        std::vector<Gaussian> g;
        for (const auto& [mu, sd] : truth) g.push_back({mu, sd});
        const auto r = evaluate(preds, y, make_grid(levels), g, rearrange);
        py::dict d;
        d["mqe"] = r.mqe;
        d["nll"] = r.nll;
        d["crps"] = r.crps;
        d["mise"] = r.mise ? py::cast(*r.mise) : py::none();
        d["per_quantile"] = r.per_quantile;
        d["n_samples"] = r.n_samples;
        return d;
    }, py::arg("predictions"), py::arg("targets"), py::arg("quantiles"),
       py::arg("truth") = std::vector<std::pair<double, double>>{}, py::arg("rearrange") = false);

    m.def("synth", [](std::size_t n, std::uint64_t seed) {
        SynthConfig cfg;
        cfg.n_samples = n;
        cfg.seed = seed;
        const auto data = generate(cfg);
        Rows rows(n, std::vector<std::uint8_t>(data.table.columns.size()));
        std::vector<std::string> names;
        for (std::size_t c = 0; c < data.table.columns.size(); ++c) {
            names.push_back(data.table.columns[c].name);
            for (std::size_t r = 0; r < n; ++r) rows[r][c] = data.table.columns[c].numbers[r] != 0.0;
        }
        std::vector<std::pair<double, double>> truth;
        for (const auto& g : data.truth) truth.emplace_back(g.mean, g.stddev);
        py::dict d;
        d["columns"] = names;
        d["rows"] = rows;
        d["targets"] = data.table.target;
        d["truth"] = truth;
        d["category"] = data.category;
        return d;
    }, py::arg("n") = 1000, py::arg("seed") = 0,
       "Synthetic benchmark: rows of binary features, targets and per-sample (mean, stddev).");
}
