#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "qdt/bitset.hpp"

namespace qdt {

class BinaryDataset;

// Strictly increasing quantile levels in the open interval (0, 1).
class QuantileGrid {
public:
    QuantileGrid() = default;
    explicit QuantileGrid(std::vector<double> levels);

    // q_j = j / (k + 1), j = 1..k
    static QuantileGrid evenly_spaced(std::size_t k);

    std::size_t size() const noexcept { return levels_.size(); }
    double operator[](std::size_t j) const { return levels_[j]; }
    const std::vector<double>& levels() const noexcept { return levels_; }

    friend bool operator==(const QuantileGrid&, const QuantileGrid&) = default;

private:
    std::vector<double> levels_;
};

// Interpolated: linear-interpolation empirical quantile.
// OrderStatistic: the smallest order statistic minimising the pinball loss.
enum class LeafValueMode { Interpolated, OrderStatistic };

LeafValueMode parse_leaf_value_mode(std::string_view text);
std::string_view to_string(LeafValueMode mode);

// Per-quantile prediction and unnormalised pinball loss of one leaf.
struct LeafEval {
    std::size_t n = 0;
    std::vector<double> values;
    std::vector<double> losses;
};

// h = q (N - 1), zero-based; linear interpolation between neighbours.
double empirical_quantile(std::span<const double> sorted_values, double q);

// Sum of max{q (y - v), (q - 1)(y - v)}; underprediction costs q per unit.
double pinball_loss(std::span<const double> values, double v, double q);

// Single ascending sweep over the cover computing all quantile values and
// losses in O(|cover| + |levels|). `sorted_targets` must be nondecreasing.
void evaluate_leaf(std::span<const double> sorted_targets, const Bitset& cover,
                   std::span<const double> levels, LeafValueMode mode, LeafEval& out);

LeafEval evaluate_leaf(const BinaryDataset& ds, const Bitset& cover, const QuantileGrid& grid,
                       LeafValueMode mode = LeafValueMode::Interpolated);

}  // namespace qdt
