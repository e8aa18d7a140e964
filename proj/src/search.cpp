#include "qdt/search.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <numeric>
#include <string>

#include "qdt/errors.hpp"
#include "qdt/log.hpp"

namespace qdt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bound handed to the positive branch once the negative one scored e1 < bound.
// bound - e1 is rounded, so a subtree with e2 just above it could still give
// e1 + e2 < bound in floating point and be wrongly pruned. Widening by a few
// ulps of bound keeps every such subtree reachable; the final e1 + e2 < bound
// test stays exact.
inline double positive_bound(double bound, double e1) { return (bound - e1) + bound * 0x1p-51; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double sse(std::span<const double> targets, const Bitset& cover) {
    double n = 0.0, sum = 0.0, sq = 0.0;
    cover.for_each([&](std::size_t i) {
        n += 1.0;
        sum += targets[i];
        sq += targets[i] * targets[i];
    });
    return n > 0.0 ? sq - sum * sum / n : 0.0;
}

std::optional<std::chrono::steady_clock::time_point> make_deadline(const SearchConfig& cfg) {
    if (!cfg.timeout_s) return std::nullopt;
    return std::chrono::steady_clock::now() +
           std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(*cfg.timeout_s));
}

}  // namespace

void SearchConfig::validate() const {
    if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
    if (min_sup < 1) throw ConfigError("min_sup must be >= 1");
    if (timeout_s && !(*timeout_s >= 0.0)) throw ConfigError("timeout must be non-negative");
}

std::vector<std::uint32_t> feature_order(const BinaryDataset& ds, FeatureOrder order) {
    std::vector<std::uint32_t> out(ds.n_features());
    std::iota(out.begin(), out.end(), 0U);
    if (order == FeatureOrder::Static) return out;

    const Bitset all = ds.all();
    const double root = sse(ds.targets(), all);
    std::vector<double> gain(ds.n_features());
    for (std::size_t f = 0; f < ds.n_features(); ++f) {
        const Bitset& pos = ds.feature_cover(f);
        gain[f] = root - sse(ds.targets(), pos) - sse(ds.targets(), ~pos);
    }
    std::stable_sort(out.begin(), out.end(), [&](std::uint32_t a, std::uint32_t b) { return gain[a] > gain[b]; });
    return out;
}

const CacheEntry::Split* CacheEntry::split_for(std::uint32_t feature) const {
    for (const auto& s : splits)
        if (s.feature == feature) return &s;
    return nullptr;
}

bool can_return(const CacheEntry& entry, std::span<const double> ubs, std::span<const double> leaf_errors) {
    const std::size_t k = entry.choice.size();
    if (ubs.size() != k || leaf_errors.size() != k || entry.lbs.size() != k)
        throw ConfigError("can_return: bound vectors differ in length from the grid");
    for (std::size_t i = 0; i < k; ++i) {
        if (entry.has_tree(i)) continue;
        if (ubs[i] <= entry.lbs[i]) continue;
        if (leaf_errors[i] <= entry.lbs[i]) continue;
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Simultaneous search

SimultaneousSearch::SimultaneousSearch(const BinaryDataset& ds, QuantileGrid grid, SearchConfig cfg)
    : ds_(ds), grid_(std::move(grid)), cfg_(cfg) {
    cfg_.validate();
    if (ds_.n_samples() == 0) throw DataError("cannot search on an empty dataset");
    if (grid_.size() == 0) throw ConfigError("quantile grid is empty");
    if (grid_.size() > static_cast<std::size_t>(cfg_.min_sup))
        log::warn("grid has " + std::to_string(grid_.size()) + " quantiles, more than min_sup=" +
                  std::to_string(cfg_.min_sup) + "; leaf estimates may be skewed");
    order_ = feature_order(ds_, cfg_.feature_order);
    const std::size_t k = grid_.size();
    frames_.resize(static_cast<std::size_t>(cfg_.max_depth) + 1);
    for (auto& fr : frames_) {
        fr.negative = Bitset(ds_.n_samples());
        fr.positive = Bitset(ds_.n_samples());
        fr.bound.assign(k, 0.0);
        fr.ub_positive.assign(k, 0.0);
        fr.active.reserve(k);
    }
}

bool SimultaneousSearch::out_of_time() {
    if (stats_.timed_out) return true;
    if (deadline_ && std::chrono::steady_clock::now() >= *deadline_) stats_.timed_out = true;
    return stats_.timed_out;
}

CacheEntry& SimultaneousSearch::obtain(const Bitset& cover, std::size_t depth) {
    CacheEntry* e = nullptr;
    if (cfg_.cache_enabled) {
        auto [it, inserted] = cache_.try_emplace(items_);
        if (!inserted) {
            ++stats_.cache_hits;
            return it->second;
        }
        e = &it->second;
    } else {
        e = &arena_.emplace_back();
    }
    ++stats_.cache_misses;

    const std::size_t k = grid_.size();
    e->lbs.assign(k, 0.0);
    e->unsolved = k;
    evaluate_leaf(ds_.targets(), cover, grid_.levels(), cfg_.leaf_value, e->leaf);
    if (depth == static_cast<std::size_t>(cfg_.max_depth)) {
        e->choice.assign(k, kLeafChoice);
        e->errors = e->leaf.losses;
        e->unsolved = 0;
    } else {
        e->choice.assign(k, kNoTree);
        e->errors.assign(k, kInf);
    }
    return *e;
}

CacheEntry& SimultaneousSearch::recurse(const Bitset& cover, std::size_t depth, std::span<const double> ubs) {
    ++stats_.recursions;
    CacheEntry& e = obtain(cover, depth);
    if (e.unsolved == 0) return e;

    const std::size_t k = grid_.size();
    const double* leaf = e.leaf.losses.data();
    double* lbs = e.lbs.data();
    double* errors = e.errors.data();
    std::int32_t* choice = e.choice.data();
    if (out_of_time()) {
        for (std::size_t i = 0; i < k; ++i) {
            if (e.has_tree(i)) continue;
            choice[i] = kLeafChoice;
            errors[i] = leaf[i];
        }
        e.unsolved = 0;
        return e;
    }

    // Inactive slots keep bound 0, so fr.bound doubles as the negative child's
    // bounds and no comparison against it can succeed.
    Frame& fr = frames_[depth];
    double* bound = fr.bound.data();
    double* ub_pos = fr.ub_positive.data();
    fr.active.clear();
    std::size_t n_open = 0;
    for (std::size_t i = 0; i < k; ++i) {
        bound[i] = 0.0;
        if (choice[i] != kNoTree) continue;
        if (leaf[i] <= lbs[i]) {
            // The leaf attains the lower bound, so it is optimal.
            choice[i] = kLeafChoice;
            errors[i] = leaf[i];
            continue;
        }
        if (ubs[i] <= lbs[i]) continue;
        fr.active.push_back(static_cast<std::uint32_t>(i));
        ++n_open;
        bound[i] = ubs[i];
        if (leaf[i] < ubs[i]) {
            choice[i] = kLeafChoice;
            errors[i] = leaf[i];
            bound[i] = leaf[i];
        }
    }

    if (n_open > 0) {
        const std::size_t min_sup = static_cast<std::size_t>(cfg_.min_sup);
        const std::size_t n = e.leaf.n;
        for (const std::uint32_t f : order_) {
            if (items_.contains_feature(f)) continue;
            const std::size_t n_pos = Bitset::assign_and(fr.positive, cover, ds_.feature_cover(f));
            if (n_pos < min_sup || n - n_pos < min_sup) continue;
            Bitset::assign_and_not(fr.negative, cover, ds_.feature_cover(f));

            const Literal neg{f, false};
            items_.push(neg);
            const CacheEntry& s1 = recurse(fr.negative, depth + 1, fr.bound);
            items_.pop(neg);

            // A slot is a candidate when the negative branch leaves room under its bound;
            // ub 0 marks a slot the positive branch need not solve. A missing
            // subtree has error +inf and never qualifies.
            const double* e1 = s1.errors.data();
            // bound - e1 > 0 exactly when e1 < bound. Branch-free so it vectorizes;
            // the bounds are >= 0, so a positive sum means some slot is open.
            double open = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                const double room = bound[i] - e1[i];
                const double widened = positive_bound(bound[i], e1[i]);
                ub_pos[i] = room > 0.0 ? widened : 0.0;
                open += ub_pos[i];
            }
            if (!(open > 0.0)) continue;

            const Literal pos{f, true};
            items_.push(pos);
            const CacheEntry& s2 = recurse(fr.positive, depth + 1, fr.ub_positive);
            items_.pop(pos);

            const double* e2 = s2.errors.data();
            double gains = 0.0;
            for (std::size_t i = 0; i < k; ++i) gains += e1[i] + e2[i] < bound[i] ? 1.0 : 0.0;
            if (gains == 0.0) continue;
            for (std::size_t i = 0; i < k; ++i) {
                const double feature_error = e1[i] + e2[i];
                if (!(feature_error < bound[i])) continue;
                if (feature_error <= lbs[i] && !(errors[i] <= lbs[i])) --n_open;
                choice[i] = static_cast<std::int32_t>(f);
                errors[i] = feature_error;
                bound[i] = feature_error;
            }
            auto it = std::find_if(e.splits.begin(), e.splits.end(),
                                   [&](const CacheEntry::Split& s) { return s.feature == f; });
            if (it != e.splits.end())
                *it = {f, &s1, &s2};
            else
                e.splits.push_back({f, &s1, &s2});
            // Every active slot sits at its lower bound.
            if (n_open == 0) break;
        }
    }

    // A failed slot certifies that nothing beats its incoming bound.
    e.unsolved = 0;
    for (const std::uint32_t i : fr.active)
        if (!e.has_tree(i)) lbs[i] = std::max(lbs[i], ubs[i]);
    for (std::size_t i = 0; i < k; ++i)
        if (!e.has_tree(i)) ++e.unsolved;
    return e;
}

Tree SimultaneousSearch::build_tree(const CacheEntry& root, std::size_t slot) const {
    std::vector<TreeNode> nodes;
    auto rec = [&](auto&& self, const CacheEntry& e) -> int {
        const int idx = static_cast<int>(nodes.size());
        nodes.emplace_back();
        const std::int32_t c = e.choice[slot];
        if (c == kLeafChoice) {
            nodes[idx].value = e.leaf.values[slot];
            nodes[idx].n = e.leaf.n;
            nodes[idx].loss = e.leaf.losses[slot];
            return idx;
        }
        const auto* split = e.split_for(static_cast<std::uint32_t>(c));
        if (c == kNoTree || split == nullptr) throw Error("internal", "cache lost a subtree during reconstruction");
        const int left = self(self, *split->negative);
        const int right = self(self, *split->positive);
        nodes[idx].feature = c;
        nodes[idx].left = left;
        nodes[idx].right = right;
        return idx;
    };
    rec(rec, root);
    return Tree(std::move(nodes));
}

QuantileModel SimultaneousSearch::run() {
    const auto t0 = std::chrono::steady_clock::now();
    deadline_ = make_deadline(cfg_);
    const std::vector<double> ubs(grid_.size(), kInf);
    items_ = Itemset();
    const CacheEntry& root = recurse(ds_.all(), 0, ubs);

    QuantileModel model;
    model.grid = grid_;
    model.n_features = ds_.n_features();
    model.binarization = ds_.features();
    model.config = cfg_.training();
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        model.trees.push_back(build_tree(root, i));
        model.optimal.push_back(!stats_.timed_out);
    }
    stats_.cache_entries = cfg_.cache_enabled ? cache_.size() : arena_.size();
    stats_.seconds = seconds_since(t0);
    return model;
}

void SimultaneousSearch::for_each_entry(const std::function<void(const Itemset&, const CacheEntry&)>& fn) const {
    for (const auto& [items, entry] : cache_) fn(items, entry);
}

// ---------------------------------------------------------------------------
// Single-quantile search

SingleSearch::SingleSearch(const BinaryDataset& ds, double level, SearchConfig cfg) : ds_(ds), level_(level), cfg_(cfg) {
    cfg_.validate();
    if (ds_.n_samples() == 0) throw DataError("cannot search on an empty dataset");
    if (!(level_ > 0.0 && level_ < 1.0)) throw ConfigError("quantile level must lie in (0, 1)");
    order_ = feature_order(ds_, cfg_.feature_order);
    frames_.resize(static_cast<std::size_t>(cfg_.max_depth) + 1);
    for (auto& fr : frames_) {
        fr.negative = Bitset(ds_.n_samples());
        fr.positive = Bitset(ds_.n_samples());
    }
}

bool SingleSearch::out_of_time() {
    if (stats_.timed_out) return true;
    if (deadline_ && std::chrono::steady_clock::now() >= *deadline_) stats_.timed_out = true;
    return stats_.timed_out;
}

SingleCacheEntry& SingleSearch::obtain(const Bitset& cover, std::size_t depth) {
    SingleCacheEntry* e = nullptr;
    if (cfg_.cache_enabled) {
        auto [it, inserted] = cache_.try_emplace(items_);
        if (!inserted) {
            ++stats_.cache_hits;
            return it->second;
        }
        e = &it->second;
    } else {
        e = &arena_.emplace_back();
    }
    ++stats_.cache_misses;

    const double levels[1] = {level_};
    evaluate_leaf(ds_.targets(), cover, levels, cfg_.leaf_value, scratch_);
    e->n = scratch_.n;
    e->leaf_value = scratch_.values[0];
    e->leaf_loss = scratch_.losses[0];
    e->error = kInf;
    // A pure leaf or the depth limit ends the branch.
    if (e->leaf_loss == 0.0 || depth == static_cast<std::size_t>(cfg_.max_depth)) {
        e->choice = kLeafChoice;
        e->error = e->leaf_loss;
    }
    return *e;
}

SingleCacheEntry& SingleSearch::recurse(const Bitset& cover, std::size_t depth, double ub) {
    ++stats_.recursions;
    SingleCacheEntry& e = obtain(cover, depth);
    if (e.has_tree()) return e;
    if (out_of_time()) {
        e.choice = kLeafChoice;
        e.error = e.leaf_loss;
        return e;
    }
    if (ub <= e.lb) return e;

    double bound = ub;
    if (e.leaf_loss < ub) {
        e.choice = kLeafChoice;
        e.error = e.leaf_loss;
        bound = e.leaf_loss;
    }

    Frame& fr = frames_[depth];
    const std::size_t min_sup = static_cast<std::size_t>(cfg_.min_sup);
    for (const std::uint32_t f : order_) {
        if (items_.contains_feature(f)) continue;
        const std::size_t n_pos = Bitset::assign_and(fr.positive, cover, ds_.feature_cover(f));
        if (n_pos < min_sup || e.n - n_pos < min_sup) continue;
        Bitset::assign_and_not(fr.negative, cover, ds_.feature_cover(f));

        const Literal neg{f, false};
        items_.push(neg);
        const SingleCacheEntry& s1 = recurse(fr.negative, depth + 1, bound);
        items_.pop(neg);
        if (!s1.has_tree() || !(s1.error < bound)) continue;

        const Literal pos{f, true};
        items_.push(pos);
        const SingleCacheEntry& s2 = recurse(fr.positive, depth + 1, positive_bound(bound, s1.error));
        items_.pop(pos);
        if (!s2.has_tree()) continue;

        const double feature_error = s1.error + s2.error;
        if (feature_error < bound) {
            e.choice = static_cast<std::int32_t>(f);
            e.error = feature_error;
            bound = feature_error;
            auto it = std::find_if(e.splits.begin(), e.splits.end(),
                                   [&](const SingleCacheEntry::Split& s) { return s.feature == f; });
            if (it != e.splits.end())
                *it = {f, &s1, &s2};
            else
                e.splits.push_back({f, &s1, &s2});
        }
        if (e.has_tree() && e.error <= e.lb) break;
    }

    if (!e.has_tree()) e.lb = std::max(e.lb, ub);
    return e;
}

SingleSearch::Result SingleSearch::run() {
    const auto t0 = std::chrono::steady_clock::now();
    deadline_ = make_deadline(cfg_);
    items_ = Itemset();
    const SingleCacheEntry& root = recurse(ds_.all(), 0, kInf);

    std::vector<TreeNode> nodes;
    auto rec = [&](auto&& self, const SingleCacheEntry& e) -> int {
        const int idx = static_cast<int>(nodes.size());
        nodes.emplace_back();
        if (e.choice == kLeafChoice) {
            nodes[idx].value = e.leaf_value;
            nodes[idx].n = e.n;
            nodes[idx].loss = e.leaf_loss;
            return idx;
        }
        const SingleCacheEntry::Split* split = nullptr;
        for (const auto& s : e.splits)
            if (static_cast<std::int32_t>(s.feature) == e.choice) split = &s;
        if (split == nullptr) throw Error("internal", "cache lost a subtree during reconstruction");
        const int left = self(self, *split->negative);
        const int right = self(self, *split->positive);
        nodes[idx].feature = e.choice;
        nodes[idx].left = left;
        nodes[idx].right = right;
        return idx;
    };
    rec(rec, root);

    Result result{Tree(std::move(nodes)), root.error, !stats_.timed_out};
    stats_.cache_entries = cfg_.cache_enabled ? cache_.size() : arena_.size();
    stats_.seconds = seconds_since(t0);
    return result;
}

void SingleSearch::for_each_entry(const std::function<void(const Itemset&, const SingleCacheEntry&)>& fn) const {
    for (const auto& [items, entry] : cache_) fn(items, entry);
}

// ---------------------------------------------------------------------------

SingleFit fit_single(const BinaryDataset& ds, double level, const SearchConfig& cfg) {
    SingleSearch search(ds, level, cfg);
    auto r = search.run();
    return {std::move(r.tree), r.error, r.optimal, search.stats()};
}

QuantileModel fit_simultaneous(const BinaryDataset& ds, const QuantileGrid& grid, const SearchConfig& cfg,
                               SearchStats* stats) {
    SimultaneousSearch search(ds, grid, cfg);
    auto model = search.run();
    if (stats != nullptr) *stats = search.stats();
    return model;
}

QuantileModel fit_naive(const BinaryDataset& ds, const QuantileGrid& grid, const SearchConfig& cfg, bool parallel) {
    cfg.validate();
    if (grid.size() > static_cast<std::size_t>(cfg.min_sup))
        log::warn("grid has " + std::to_string(grid.size()) + " quantiles, more than min_sup=" +
                  std::to_string(cfg.min_sup) + "; leaf estimates may be skewed");
    std::vector<SingleFit> fits(grid.size());
    if (parallel) {
        std::vector<std::future<SingleFit>> pending;
        pending.reserve(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            pending.push_back(std::async(std::launch::async, [&, i] { return fit_single(ds, grid[i], cfg); }));
        for (std::size_t i = 0; i < grid.size(); ++i) fits[i] = pending[i].get();
    } else {
        for (std::size_t i = 0; i < grid.size(); ++i) fits[i] = fit_single(ds, grid[i], cfg);
    }

    QuantileModel model;
    model.grid = grid;
    model.n_features = ds.n_features();
    model.binarization = ds.features();
    model.config = cfg.training();
    for (auto& fit : fits) {
        model.trees.push_back(std::move(fit.tree));
        model.optimal.push_back(fit.optimal);
    }
    return model;
}

std::vector<double> training_losses(const QuantileModel& model) {
    std::vector<double> out;
    out.reserve(model.trees.size());
    for (const auto& t : model.trees) out.push_back(t.total_loss());
    return out;
}

}  // namespace qdt
