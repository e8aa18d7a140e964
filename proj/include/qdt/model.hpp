#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qdt/dataset.hpp"
#include "qdt/quantile.hpp"

namespace qdt {

// feature < 0 marks a leaf. `left` is taken when the feature is absent
// (negative literal), `right` when it is present.
struct TreeNode {
    int feature = -1;
    int left = -1;
    int right = -1;
    double value = 0.0;   // leaf prediction
    std::size_t n = 0;    // training cover size of the leaf
    double loss = 0.0;    // training pinball loss of the leaf

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Binary decision tree stored as a flat node array, root at index 0.
class Tree {
public:
    Tree() = default;
    // Validates child indices, acyclicity and that no feature repeats on a path.
    explicit Tree(std::vector<TreeNode> nodes);

    static Tree leaf(double value, std::size_t n, double loss);

    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    const TreeNode& root() const { return nodes_.front(); }

    int depth() const;
    std::size_t n_leaves() const;
    double total_loss() const;

    // Index of the leaf reached by a binary feature vector.
    int leaf_index(std::span<const std::uint8_t> sample) const;
    double predict(std::span<const std::uint8_t> sample) const { return nodes_[leaf_index(sample)].value; }

    std::string dump(const std::vector<FeatureInfo>& features = {}) const;

    friend bool operator==(const Tree&, const Tree&) = default;

private:
    std::vector<TreeNode> nodes_;
};

struct TrainingConfig {
    int max_depth = 4;
    int min_sup = 1;
    LeafValueMode leaf_value = LeafValueMode::Interpolated;

    friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

// One tree per quantile level.
struct QuantileModel {
    QuantileGrid grid;
    std::vector<Tree> trees;
    std::vector<bool> optimal;
    std::size_t n_features = 0;
    std::vector<FeatureInfo> binarization;
    TrainingConfig config;

    // Throws ConfigError when sizes disagree.
    void validate() const;

    friend bool operator==(const QuantileModel&, const QuantileModel&) = default;
};

// Per-quantile predictions for one binary feature vector (length |grid|).
std::vector<double> predict(const QuantileModel& model, std::span<const std::uint8_t> sample);
std::vector<std::vector<double>> predict(const QuantileModel& model, const std::vector<std::vector<std::uint8_t>>& rows);

// Sorts a per-sample quantile vector ascending (quantile-crossing fix).
void rearrange(std::vector<double>& values);

// Leaf group id of every sample of `ds` (internal order); ids are dense 0..L-1.
std::vector<std::size_t> partition(const Tree& tree, const BinaryDataset& ds);

// Jaccard index between the sets of unordered sample pairs that two
// labelings place in the same group, from contingency counts. Both pair sets
// empty gives 1.
double partition_jaccard(std::span<const std::size_t> a, std::span<const std::size_t> b);

// Symmetric |grid| x |grid| matrix of partition_jaccard over the trees.
std::vector<std::vector<double>> jaccard_matrix(const QuantileModel& model, const BinaryDataset& ds);

// Zone id per tree: a new zone starts where similarity between successive
// trees drops by more than `threshold` (fraction, e.g. 0.1) below 1.
std::vector<int> tree_zones(const std::vector<std::vector<double>>& matrix, double threshold = 0.1);

constexpr int kModelFormatVersion = 1;

std::string serialize(const QuantileModel& model);
QuantileModel deserialize(const std::string& text);

}  // namespace qdt
