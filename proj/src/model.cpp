#include "qdt/model.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "qdt/errors.hpp"

namespace qdt {

using json = nlohmann::json;

Tree::Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw ConfigError("tree has no nodes");
    std::vector<int> referenced(nodes_.size(), 0);
    for (const auto& node : nodes_) {
        if (node.is_leaf()) continue;
        for (int child : {node.left, node.right}) {
            if (child <= 0 || child >= static_cast<int>(nodes_.size()))
                throw ConfigError("tree node has an invalid child index");
            ++referenced[child];
        }
    }
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (referenced[i] != 1) throw ConfigError("tree nodes do not form a tree");

    // Walk from the root: every node reachable once and no feature repeats on a path.
    std::vector<int> path;
    std::size_t visited = 0;
    auto walk = [&](auto&& self, int idx) -> void {
        ++visited;
        if (visited > nodes_.size()) throw ConfigError("tree contains a cycle");
        const auto& node = nodes_[idx];
        if (node.is_leaf()) return;
        if (std::find(path.begin(), path.end(), node.feature) != path.end())
            throw ConfigError("feature " + std::to_string(node.feature) + " repeats on a root-to-leaf path");
        path.push_back(node.feature);
        self(self, node.left);
        self(self, node.right);
        path.pop_back();
    };
    walk(walk, 0);
    if (visited != nodes_.size()) throw ConfigError("tree has unreachable nodes");
}

Tree Tree::leaf(double value, std::size_t n, double loss) {
    TreeNode node;
    node.value = value;
    node.n = n;
    node.loss = loss;
    return Tree({node});
}

int Tree::depth() const {
    auto rec = [&](auto&& self, int idx) -> int {
        const auto& node = nodes_[idx];
        if (node.is_leaf()) return 0;
        return 1 + std::max(self(self, node.left), self(self, node.right));
    };
    return rec(rec, 0);
}

std::size_t Tree::n_leaves() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

double Tree::total_loss() const {
    // Same association as the search: left subtree + right subtree.
    auto rec = [&](auto&& self, int idx) -> double {
        const auto& node = nodes_[idx];
        if (node.is_leaf()) return node.loss;
        return self(self, node.left) + self(self, node.right);
    };
    return rec(rec, 0);
}

int Tree::leaf_index(std::span<const std::uint8_t> sample) const {
    int idx = 0;
    while (!nodes_[idx].is_leaf()) {
        const auto& node = nodes_[idx];
        if (static_cast<std::size_t>(node.feature) >= sample.size())
            throw DataError("sample has " + std::to_string(sample.size()) + " features, tree tests feature " +
                            std::to_string(node.feature));
        idx = sample[node.feature] ? node.right : node.left;
    }
    return idx;
}

std::string Tree::dump(const std::vector<FeatureInfo>& features) const {
    std::ostringstream os;
    auto name = [&](int f) {
        return static_cast<std::size_t>(f) < features.size() ? features[f].name() : "f" + std::to_string(f);
    };
    auto rec = [&](auto&& self, int idx, int indent) -> void {
        const auto& node = nodes_[idx];
        const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
        if (node.is_leaf()) {
            os << pad << "leaf value=" << node.value << " n=" << node.n << " loss=" << node.loss << '\n';
            return;
        }
        os << pad << "if not " << name(node.feature) << ":\n";
        self(self, node.left, indent + 1);
        os << pad << "else:\n";
        self(self, node.right, indent + 1);
    };
    rec(rec, 0, 0);
    return os.str();
}

void QuantileModel::validate() const {
    if (trees.size() != grid.size()) throw ConfigError("model has " + std::to_string(trees.size()) + " trees for " +
                                                       std::to_string(grid.size()) + " quantiles");
    if (optimal.size() != trees.size()) throw ConfigError("model optimality flags do not match tree count");
    if (!binarization.empty() && binarization.size() != n_features)
        throw ConfigError("binarization map size does not match feature count");
    for (const auto& t : trees)
        for (const auto& node : t.nodes())
            if (!node.is_leaf() && static_cast<std::size_t>(node.feature) >= n_features)
                throw ConfigError("tree tests a feature outside the model's feature space");
}

std::vector<double> predict(const QuantileModel& model, std::span<const std::uint8_t> sample) {
    if (sample.size() != model.n_features)
        throw DataError("sample has " + std::to_string(sample.size()) + " features, model expects " +
                        std::to_string(model.n_features));
    std::vector<double> out;
    out.reserve(model.trees.size());
    for (const auto& t : model.trees) out.push_back(t.predict(sample));
    return out;
}

std::vector<std::vector<double>> predict(const QuantileModel& model, const std::vector<std::vector<std::uint8_t>>& rows) {
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(predict(model, r));
    return out;
}

void rearrange(std::vector<double>& values) { std::sort(values.begin(), values.end()); }

std::vector<std::size_t> partition(const Tree& tree, const BinaryDataset& ds) {
    std::vector<std::size_t> dense(tree.nodes().size(), 0);
    std::size_t next = 0;
    for (std::size_t i = 0; i < tree.nodes().size(); ++i)
        if (tree.nodes()[i].is_leaf()) dense[i] = next++;
    std::vector<std::size_t> labels(ds.n_samples());
    for (std::size_t i = 0; i < ds.n_samples(); ++i) labels[i] = dense[tree.leaf_index(ds.row(i))];
    return labels;
}

namespace {

double pairs(double c) { return c * (c - 1.0) / 2.0; }

}  // namespace

double partition_jaccard(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    if (a.size() != b.size()) throw DataError("partitions cover different sample counts");
    if (a.empty()) return 1.0;
    const std::size_t la = *std::max_element(a.begin(), a.end()) + 1;
    const std::size_t lb = *std::max_element(b.begin(), b.end()) + 1;
    std::vector<double> table(la * lb, 0.0), row_sum(la, 0.0), col_sum(lb, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        table[a[i] * lb + b[i]] += 1.0;
        row_sum[a[i]] += 1.0;
        col_sum[b[i]] += 1.0;
    }
    double both = 0.0, in_a = 0.0, in_b = 0.0;
    for (double c : table) both += pairs(c);
    for (double c : row_sum) in_a += pairs(c);
    for (double c : col_sum) in_b += pairs(c);
    const double uni = in_a + in_b - both;
    if (uni == 0.0) return 1.0;
    return both / uni;
}

std::vector<std::vector<double>> jaccard_matrix(const QuantileModel& model, const BinaryDataset& ds) {
    if (model.n_features != ds.n_features())
        throw DataError("dataset feature count does not match the model");
    const std::size_t k = model.trees.size();
    std::vector<std::vector<std::size_t>> labels;
    labels.reserve(k);
    for (const auto& t : model.trees) labels.push_back(partition(t, ds));
    std::vector<std::vector<double>> m(k, std::vector<double>(k, 1.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) m[i][j] = m[j][i] = partition_jaccard(labels[i], labels[j]);
    return m;
}

std::vector<int> tree_zones(const std::vector<std::vector<double>>& matrix, double threshold) {
    std::vector<int> zones(matrix.size(), 0);
    for (std::size_t i = 1; i < matrix.size(); ++i)
        zones[i] = zones[i - 1] + (matrix[i - 1][i] < 1.0 - threshold ? 1 : 0);
    return zones;
}

namespace {

json tree_to_json(const Tree& tree, int idx) {
    const auto& node = tree.nodes()[idx];
    if (node.is_leaf()) return {{"leaf", {{"value", node.value}, {"n", node.n}, {"loss", node.loss}}}};
    return {{"feature", node.feature}, {"left", tree_to_json(tree, node.left)}, {"right", tree_to_json(tree, node.right)}};
}

int tree_from_json(const json& j, std::vector<TreeNode>& nodes) {
    const int idx = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (j.contains("leaf")) {
        const auto& l = j.at("leaf");
        nodes[idx].value = l.at("value").get<double>();
        nodes[idx].n = l.at("n").get<std::size_t>();
        nodes[idx].loss = l.at("loss").get<double>();
        return idx;
    }
    const int feature = j.at("feature").get<int>();
    if (feature < 0) throw ParseError("negative feature id in tree");
    const int left = tree_from_json(j.at("left"), nodes);
    const int right = tree_from_json(j.at("right"), nodes);
    nodes[idx].feature = feature;
    nodes[idx].left = left;
    nodes[idx].right = right;
    return idx;
}

}  // namespace

std::string serialize(const QuantileModel& model) {
    model.validate();
    json trees = json::array();
    for (const auto& t : model.trees) trees.push_back(tree_to_json(t, 0));
    json optimal = json::array();
    for (bool b : model.optimal) optimal.push_back(b);
    json out = {
        {"version", kModelFormatVersion},
        {"quantiles", model.grid.levels()},
        {"optimal", optimal},
        {"n_features", model.n_features},
        {"trees", trees},
        {"binarization", json::parse(features_to_json(model.binarization))},
        {"config",
         {{"max_depth", model.config.max_depth},
          {"min_sup", model.config.min_sup},
          {"leaf_value", std::string(to_string(model.config.leaf_value))}}},
    };
    return out.dump(1);
}

QuantileModel deserialize(const std::string& text) {
    QuantileModel model;
    try {
        const json j = json::parse(text);
        if (!j.is_object()) throw ParseError("model payload is not a JSON object");
        const int version = j.at("version").get<int>();
        if (version != kModelFormatVersion)
            throw ParseError("unsupported model format version " + std::to_string(version));
        model.grid = QuantileGrid(j.at("quantiles").get<std::vector<double>>());
        for (const auto& b : j.at("optimal")) model.optimal.push_back(b.get<bool>());
        for (const auto& t : j.at("trees")) {
            std::vector<TreeNode> nodes;
            tree_from_json(t, nodes);
            model.trees.emplace_back(std::move(nodes));
        }
        model.binarization = features_from_json(j.at("binarization").dump());
        model.n_features = j.contains("n_features") ? j.at("n_features").get<std::size_t>() : model.binarization.size();
        const auto& cfg = j.at("config");
        model.config.max_depth = cfg.at("max_depth").get<int>();
        model.config.min_sup = cfg.at("min_sup").get<int>();
        if (cfg.contains("leaf_value"))
            model.config.leaf_value = parse_leaf_value_mode(cfg.at("leaf_value").get<std::string>());
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed model: ") + e.what());
    } catch (const ConfigError& e) {
        throw ParseError(std::string("invalid model: ") + e.what());
    }
    try {
        model.validate();
    } catch (const ConfigError& e) {
        throw ParseError(std::string("invalid model: ") + e.what());
    }
    return model;
}

}  // namespace qdt
