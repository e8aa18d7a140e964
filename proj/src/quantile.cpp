#include "qdt/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "qdt/dataset.hpp"
#include "qdt/errors.hpp"

namespace qdt {

namespace {
constexpr double kMinLevelGap = 1e-9;
}

QuantileGrid::QuantileGrid(std::vector<double> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) throw ConfigError("quantile grid is empty");
    for (std::size_t j = 0; j < levels_.size(); ++j) {
        const double q = levels_[j];
        if (!(q > 0.0 && q < 1.0))
            throw ConfigError("quantile level " + std::to_string(q) + " outside (0, 1)");
        if (j > 0 && !(q - levels_[j - 1] >= kMinLevelGap))
            throw ConfigError("quantile levels must be strictly increasing and at least 1e-9 apart");
    }
}

QuantileGrid QuantileGrid::evenly_spaced(std::size_t k) {
    if (k == 0) throw ConfigError("number of quantiles must be positive");
    std::vector<double> levels(k);
    for (std::size_t j = 0; j < k; ++j)
        levels[j] = static_cast<double>(j + 1) / static_cast<double>(k + 1);
    return QuantileGrid(std::move(levels));
}

LeafValueMode parse_leaf_value_mode(std::string_view text) {
    if (text == "interpolated") return LeafValueMode::Interpolated;
    if (text == "order-statistic") return LeafValueMode::OrderStatistic;
    throw ConfigError("unknown leaf value mode '" + std::string(text) + "'");
}

std::string_view to_string(LeafValueMode mode) {
    return mode == LeafValueMode::Interpolated ? "interpolated" : "order-statistic";
}

double empirical_quantile(std::span<const double> sorted_values, double q) {
    if (sorted_values.empty()) throw DataError("empirical_quantile of an empty sequence");
    const double h = q * static_cast<double>(sorted_values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(static_cast<std::size_t>(std::ceil(h)), sorted_values.size() - 1);
    return sorted_values[lo] + (h - static_cast<double>(lo)) * (sorted_values[hi] - sorted_values[lo]);
}

double pinball_loss(std::span<const double> values, double v, double q) {
    double total = 0.0;
    for (double y : values) {
        const double d = y - v;
        total += std::max(q * d, (q - 1.0) * d);
    }
    return total;
}

namespace {

// Fills the thread-local sweep buffers for a cover. Targets are shifted by the
// cover minimum so that constant covers give exact zeros and large offsets do
// not cancel. prefix[r] is the shifted sum of ranks 0..r; vals[n] repeats the
// maximum so vals[lo + 1] is always readable.
struct Sweep {
    std::size_t n;
    double base, total;
    const double* vals;
    const double* prefix;
};

Sweep sweep(std::span<const double> sorted_targets, const Bitset& cover) {
    const std::size_t n = cover.count();
    if (n == 0) throw DataError("evaluate_leaf on an empty cover");
    std::size_t first = 0;
    for (std::size_t w = 0; w < cover.n_words(); ++w) {
        if (const auto word = cover.words()[w]; word != 0) {
            first = w * 64 + static_cast<std::size_t>(std::countr_zero(word));
            break;
        }
    }
    const double base = sorted_targets[first];
    thread_local std::vector<double> vals, prefix;
    vals.resize(n + 1);
    prefix.resize(n);
    std::size_t rank = 0;
    double running = 0.0;
    cover.for_each([&](std::size_t i) {
        const double y = sorted_targets[i];
        running += y - base;
        vals[rank] = y;
        prefix[rank] = running;
        ++rank;
    });
    vals[n] = vals[n - 1];
    return {n, base, running, vals.data(), prefix.data()};
}

// Rank of the lower neighbour, interpolation weight and loss slope for level q
// in a cover of n targets. Order statistics are interpolation with weight 0.
struct Step {
    std::int64_t lo;
    double frac, slope;
};

Step leaf_step(double q, std::size_t n, LeafValueMode mode) {
    const auto top = static_cast<std::int64_t>(n - 1);
    std::int64_t lo;
    double frac = 0.0;
    if (mode == LeafValueMode::Interpolated) {
        const double h = q * static_cast<double>(n - 1);
        lo = std::min(static_cast<std::int64_t>(h), top);  // h >= 0, so truncation is floor
        frac = h - static_cast<double>(lo);
    } else {
        const double r = std::ceil(q * static_cast<double>(n) - 1e-9);
        lo = std::min(static_cast<std::int64_t>(std::max(r, 1.0)) - 1, top);
    }
    return {lo, frac, static_cast<double>(lo + 1) - q * static_cast<double>(n)};
}

// Positions <= lo hold targets <= v, the rest hold targets >= v, so with
// S = sum of ranks <= lo the loss is
//   q (total - S - v n_above) + (1 - q)(v n_below - S) = q total - S + v (n_below - q n).
inline void finish(const Sweep& s, double q, std::int64_t lo, double frac, double slope, double& value,
                   double& loss) {
    const double a = s.vals[lo], b = s.vals[lo + 1];
    const double v = std::min(a + frac * (b - a), b);
    value = v;
    loss = std::max(q * s.total - s.prefix[lo] + (v - s.base) * slope, 0.0);
}

}  // namespace

void evaluate_leaf(std::span<const double> sorted_targets, const Bitset& cover,
                   std::span<const double> levels, LeafValueMode mode, LeafEval& out) {
    const Sweep s = sweep(sorted_targets, cover);
    const std::size_t k = levels.size();
    out.n = s.n;
    out.values.resize(k);
    out.losses.resize(k);
    auto run = [&]<LeafValueMode M>() {
        for (std::size_t j = 0; j < k; ++j) {
            const Step st = leaf_step(levels[j], s.n, M);
            finish(s, levels[j], st.lo, st.frac, st.slope, out.values[j], out.losses[j]);
        }
    };
    if (mode == LeafValueMode::Interpolated)
        run.operator()<LeafValueMode::Interpolated>();
    else
        run.operator()<LeafValueMode::OrderStatistic>();
}

LeafEval evaluate_leaf(const BinaryDataset& ds, const Bitset& cover, const QuantileGrid& grid,
                       LeafValueMode mode) {
    LeafEval out;
    evaluate_leaf(ds.targets(), cover, grid.levels(), mode, out);
    return out;
}

}  // namespace qdt
