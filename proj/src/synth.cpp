#include "qdt/synth.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "qdt/errors.hpp"

namespace qdt {

void SynthConfig::validate() const {
    if (n_samples == 0) throw ConfigError("synthetic dataset needs at least one sample");
    if (n_categories == 0) throw ConfigError("synthetic dataset needs at least one category");
    if (n_category_features >= 63 || n_categories > (std::size_t{1} << n_category_features))
        throw ConfigError(std::to_string(n_categories) + " categories cannot be encoded in " +
                          std::to_string(n_category_features) + " binary features");
    if (!means.empty() && means.size() != n_categories) throw ConfigError("means must list one value per category");
    if (!stddevs.empty() && stddevs.size() != n_categories) throw ConfigError("stddevs must list one value per category");
    for (std::size_t c = 0; c < n_categories; ++c)
        if (!(category(c).stddev > 0.0)) throw ConfigError("category stddev must be positive");
}

Gaussian SynthConfig::category(std::size_t c) const {
    const double mean = means.empty() ? static_cast<double>(c) : means[c];
    const double sd = stddevs.empty() ? 0.5 + 0.1 * static_cast<double>(c) : stddevs[c];
    return {mean, sd};
}

double SynthRng::uniform() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

double SynthRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::size_t SynthRng::below(std::size_t n) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;  // [0, 1)
    return std::min(static_cast<std::size_t>(u * static_cast<double>(n)), n - 1);
}

SynthData generate(const SynthConfig& cfg) {
    cfg.validate();
    SynthRng rng(cfg.seed);
    SynthData out;
    auto& table = out.table;
    table.target_name = "y";
    for (std::size_t b = 0; b < cfg.n_category_features; ++b)
        table.columns.push_back({"c" + std::to_string(b), ColumnKind::Binary, {}, {}});
    for (std::size_t b = 0; b < cfg.n_noise_features; ++b)
        table.columns.push_back({"n" + std::to_string(b), ColumnKind::Binary, {}, {}});
    for (auto& c : table.columns) c.numbers.reserve(cfg.n_samples);
    table.target.reserve(cfg.n_samples);

    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
        const std::size_t c = rng.below(cfg.n_categories);
        for (std::size_t b = 0; b < cfg.n_category_features; ++b)
            table.columns[b].numbers.push_back(static_cast<double>((c >> b) & 1U));
        for (std::size_t b = 0; b < cfg.n_noise_features; ++b)
            table.columns[cfg.n_category_features + b].numbers.push_back(rng.coin() ? 1.0 : 0.0);
        const Gaussian g = cfg.category(c);
        table.target.push_back(g.mean + g.stddev * rng.normal());
        out.truth.push_back(g);
        out.category.push_back(c);
    }
    return out;
}

std::string truth_to_json(const SynthData& data, const SynthConfig& cfg) {
    nlohmann::json samples = nlohmann::json::array();
    for (std::size_t i = 0; i < data.truth.size(); ++i)
        samples.push_back({{"mean", data.truth[i].mean}, {"stddev", data.truth[i].stddev}, {"category", data.category[i]}});
    nlohmann::json params = nlohmann::json::array();
    for (std::size_t c = 0; c < cfg.n_categories; ++c)
        params.push_back({{"mean", cfg.category(c).mean}, {"stddev", cfg.category(c).stddev}});
    nlohmann::json j = {
        {"config",
         {{"n_samples", cfg.n_samples},
          {"n_category_features", cfg.n_category_features},
          {"n_noise_features", cfg.n_noise_features},
          {"n_categories", cfg.n_categories},
          {"seed", cfg.seed},
          {"categories", params},
          {"prng", "mt19937_64 + Box-Muller"}}},
        {"samples", samples},
    };
    return j.dump(1);
}

std::vector<Gaussian> truth_from_json(const std::string& text) {
    std::vector<Gaussian> out;
    try {
        const auto j = nlohmann::json::parse(text);
        for (const auto& s : j.at("samples")) out.push_back({s.at("mean").get<double>(), s.at("stddev").get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed ground-truth sidecar: ") + e.what());
    }
    return out;
}

}  // namespace qdt
