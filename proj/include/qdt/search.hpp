#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "qdt/dataset.hpp"
#include "qdt/model.hpp"
#include "qdt/quantile.hpp"

namespace qdt {

enum class FeatureOrder { Static, VarianceReduction };

struct SearchConfig {
    int max_depth = 4;
    int min_sup = 1;
    std::optional<double> timeout_s;  // wall clock, checked at every recursion entry
    FeatureOrder feature_order = FeatureOrder::Static;
    bool cache_enabled = true;
    LeafValueMode leaf_value = LeafValueMode::Interpolated;

    // Throws ConfigError on max_depth < 1, min_sup < 1 or a negative timeout.
    void validate() const;
    TrainingConfig training() const { return {max_depth, min_sup, leaf_value}; }
};

struct SearchStats {
    std::size_t cache_hits = 0;
    std::size_t cache_misses = 0;
    std::size_t cache_entries = 0;
    std::size_t recursions = 0;
    bool timed_out = false;
    double seconds = 0.0;
};

// Slot markers stored in CacheEntry::choice; values >= 0 are split features.
inline constexpr std::int32_t kNoTree = -2;
inline constexpr std::int32_t kLeafChoice = -1;

// Per-itemset record of the simultaneous search. For every quantile slot:
// a lower bound on the best achievable error, the best error found, and how
// the best tree starts (kNoTree, kLeafChoice or a split feature whose
// children are found through `splits`). A slot holding a tree is final.
struct CacheEntry {
    struct Split {
        std::uint32_t feature;
        const CacheEntry* negative;
        const CacheEntry* positive;
    };

    // errors[i] stays +inf while slot i has no tree.
    std::vector<double> lbs;
    std::vector<double> errors;
    std::vector<std::int32_t> choice;
    LeafEval leaf;
    std::vector<Split> splits;
    std::size_t unsolved = 0;

    bool has_tree(std::size_t i) const { return choice[i] != kNoTree; }
    const Split* split_for(std::uint32_t feature) const;
};

// True when no quantile slot needs further search: each slot has a tree, or
// its bound cannot be beaten (ub <= lb), or the leaf already attains lb.
bool can_return(const CacheEntry& entry, std::span<const double> ubs, std::span<const double> leaf_errors);

// Simultaneous multi-quantile branch-and-bound search with a shared itemset
// cache. One instance runs one search.
class SimultaneousSearch {
public:
    SimultaneousSearch(const BinaryDataset& ds, QuantileGrid grid, SearchConfig cfg);

    QuantileModel run();
    const SearchStats& stats() const noexcept { return stats_; }

    // Visits every cached itemset (cache-enabled runs only).
    void for_each_entry(const std::function<void(const Itemset&, const CacheEntry&)>& fn) const;

private:
    struct Frame {
        Bitset negative, positive;
        std::vector<double> bound, ub_positive;
        std::vector<std::uint32_t> active;
    };

    CacheEntry& obtain(const Bitset& cover, std::size_t depth);
    CacheEntry& recurse(const Bitset& cover, std::size_t depth, std::span<const double> ubs);
    bool out_of_time();
    Tree build_tree(const CacheEntry& root, std::size_t slot) const;

    const BinaryDataset& ds_;
    QuantileGrid grid_;
    SearchConfig cfg_;
    std::vector<std::uint32_t> order_;
    std::unordered_map<Itemset, CacheEntry, ItemsetHash> cache_;
    std::deque<CacheEntry> arena_;
    std::vector<Frame> frames_;
    Itemset items_;
    std::optional<std::chrono::steady_clock::time_point> deadline_;
    SearchStats stats_;
};

// Scalar counterpart of CacheEntry for the single-quantile search.
struct SingleCacheEntry {
    struct Split {
        std::uint32_t feature;
        const SingleCacheEntry* negative;
        const SingleCacheEntry* positive;
    };

    double lb = 0.0;
    double error = 0.0;
    std::int32_t choice = kNoTree;
    double leaf_value = 0.0;
    double leaf_loss = 0.0;
    std::size_t n = 0;
    std::vector<Split> splits;

    bool has_tree() const { return choice != kNoTree; }
};

// Branch-and-bound search for one quantile level.
class SingleSearch {
public:
    SingleSearch(const BinaryDataset& ds, double level, SearchConfig cfg);

    struct Result {
        Tree tree;
        double error = 0.0;
        bool optimal = true;
    };

    Result run();
    const SearchStats& stats() const noexcept { return stats_; }
    void for_each_entry(const std::function<void(const Itemset&, const SingleCacheEntry&)>& fn) const;

private:
    struct Frame {
        Bitset negative, positive;
    };

    SingleCacheEntry& obtain(const Bitset& cover, std::size_t depth);
    SingleCacheEntry& recurse(const Bitset& cover, std::size_t depth, double ub);
    bool out_of_time();

    const BinaryDataset& ds_;
    double level_;
    SearchConfig cfg_;
    std::vector<std::uint32_t> order_;
    std::unordered_map<Itemset, SingleCacheEntry, ItemsetHash> cache_;
    std::deque<SingleCacheEntry> arena_;
    std::vector<Frame> frames_;
    Itemset items_;
    LeafEval scratch_;
    std::optional<std::chrono::steady_clock::time_point> deadline_;
    SearchStats stats_;
};

// Feature exploration order for a dataset under the configured strategy.
std::vector<std::uint32_t> feature_order(const BinaryDataset& ds, FeatureOrder order);

struct SingleFit {
    Tree tree;
    double error = 0.0;
    bool optimal = true;
    SearchStats stats;
};

SingleFit fit_single(const BinaryDataset& ds, double level, const SearchConfig& cfg);

QuantileModel fit_simultaneous(const BinaryDataset& ds, const QuantileGrid& grid, const SearchConfig& cfg,
                               SearchStats* stats = nullptr);

// One independent single-quantile search per level, each with a fresh cache.
// With `parallel`, the searches run on separate threads.
QuantileModel fit_naive(const BinaryDataset& ds, const QuantileGrid& grid, const SearchConfig& cfg,
                        bool parallel = false);

// Total training loss of each tree, summed in tree order (left + right).
std::vector<double> training_losses(const QuantileModel& model);

}  // namespace qdt
