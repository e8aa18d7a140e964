#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qdt/bitset.hpp"

namespace qdt {

enum class ColumnKind { Numeric, Categorical, Binary };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    std::vector<double> numbers;      // Numeric and Binary columns
    std::vector<std::string> labels;  // Categorical columns

    std::size_t size() const { return kind == ColumnKind::Categorical ? labels.size() : numbers.size(); }

    friend bool operator==(const Column&, const Column&) = default;
};

// Pre-binarization input: feature columns plus a numeric target.
struct RawTable {
    std::vector<Column> columns;
    std::string target_name = "y";
    std::vector<double> target;

    std::size_t n_rows() const { return target.size(); }
    const Column* find(const std::string& name) const;
    // Throws DataError when lengths disagree or the table is empty.
    void validate() const;

    friend bool operator==(const RawTable&, const RawTable&) = default;
};

enum class FeatureKind { LeThreshold, OneHot, Passthrough };

// Provenance of one binary feature: which raw column and which test produced it.
struct FeatureInfo {
    std::string source_column;
    FeatureKind kind = FeatureKind::Passthrough;
    double threshold = 0.0;  // LeThreshold
    std::string value;       // OneHot

    std::string name() const;
    bool evaluate(const Column& column, std::size_t row) const;

    friend bool operator==(const FeatureInfo&, const FeatureInfo&) = default;
};

struct BinarizeConfig {
    int bins = 4;             // thresholds per numeric column
    int max_categories = 64;  // categorical cardinality guard
};

struct Literal {
    std::uint32_t feature = 0;
    bool positive = true;

    std::int64_t key() const { return 2 * static_cast<std::int64_t>(feature) + (positive ? 1 : 0); }
    friend auto operator<=>(const Literal& a, const Literal& b) { return a.key() <=> b.key(); }
    friend bool operator==(const Literal&, const Literal&) = default;
};

// Canonical (sorted) set of signed feature literals; no feature appears twice.
class Itemset {
public:
    Itemset() = default;
    // Sorts the literals; throws ConfigError if a feature repeats.
    explicit Itemset(std::vector<Literal> literals);

    const std::vector<Literal>& literals() const noexcept { return literals_; }
    std::size_t size() const noexcept { return literals_.size(); }
    bool empty() const noexcept { return literals_.empty(); }
    bool contains_feature(std::uint32_t feature) const noexcept;

    // In-place extension used by the search; the caller guarantees the feature is new.
    void push(Literal lit);
    void pop(Literal lit);

    Itemset with(Literal lit) const;

    std::size_t hash() const noexcept;
    friend bool operator==(const Itemset&, const Itemset&) = default;

private:
    std::vector<Literal> literals_;
};

struct ItemsetHash {
    std::size_t operator()(const Itemset& s) const noexcept { return s.hash(); }
};

// Binarized samples, reindexed so that targets are nondecreasing. Immutable
// after construction.
class BinaryDataset {
public:
    BinaryDataset() = default;

    // rows[r][f] in {0,1} in input order; reindexes by (target, input row).
    static BinaryDataset from_rows(const std::vector<std::vector<std::uint8_t>>& rows,
                                   std::span<const double> targets,
                                   std::vector<FeatureInfo> features = {});

    std::size_t n_samples() const noexcept { return targets_.size(); }
    std::size_t n_features() const noexcept { return covers_.size(); }

    const Bitset& feature_cover(std::size_t f) const { return covers_.at(f); }
    const std::vector<double>& targets() const noexcept { return targets_; }
    const std::vector<std::size_t>& original_index() const noexcept { return original_index_; }
    const std::vector<FeatureInfo>& features() const noexcept { return features_; }

    // Binary feature vector of the sample at internal index i.
    std::vector<std::uint8_t> row(std::size_t i) const;
    Bitset all() const { return Bitset(n_samples(), true); }

    // Samples matching every literal of the itemset.
    Bitset cover(const Itemset& items) const;

private:
    std::vector<Bitset> covers_;
    std::vector<double> targets_;
    std::vector<std::size_t> original_index_;
    std::vector<FeatureInfo> features_;
};

// Derives the feature map (thresholds, one-hot values, passthroughs).
std::vector<FeatureInfo> derive_features(const RawTable& raw, const BinarizeConfig& config);

// Applies a feature map to a raw table; rows stay in input order.
std::vector<std::vector<std::uint8_t>> encode_rows(const RawTable& raw,
                                                   const std::vector<FeatureInfo>& features);

BinaryDataset binarize(const RawTable& raw, const BinarizeConfig& config);

// Binarization map in the exchange format:
// [{"feature":k,"source_column":..,"kind":..,"threshold"|"value":..}]
std::string features_to_json(const std::vector<FeatureInfo>& features);
std::vector<FeatureInfo> features_from_json(const std::string& text);

}  // namespace qdt
