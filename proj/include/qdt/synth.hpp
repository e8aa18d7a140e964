#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qdt/dataset.hpp"
#include "qdt/density.hpp"

namespace qdt {

struct SynthConfig {
    std::size_t n_samples = 1000;
    std::size_t n_category_features = 4;
    std::size_t n_noise_features = 5;
    std::size_t n_categories = 15;
    std::uint64_t seed = 0;
    // Per-category parameters; empty means mean c and stddev 0.5 + 0.1 c.
    std::vector<double> means;
    std::vector<double> stddevs;

    // Throws ConfigError when the categories do not fit the feature bits or a
    // stddev is not positive.
    void validate() const;
    Gaussian category(std::size_t c) const;
};

struct SynthData {
    RawTable table;                  // columns c0.., n0.., target y
    std::vector<Gaussian> truth;     // per-sample generating distribution
    std::vector<std::size_t> category;
};

// Seeded portable generator: mt19937_64 for bits, Box-Muller for normals.
class SynthRng {
public:
    explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in (0, 1].
    double uniform();
    double normal();
    std::size_t below(std::size_t n);
    bool coin() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

SynthData generate(const SynthConfig& cfg);

// Sidecar with per-sample (mean, stddev), category and the config echo.
std::string truth_to_json(const SynthData& data, const SynthConfig& cfg);
std::vector<Gaussian> truth_from_json(const std::string& text);

}  // namespace qdt
