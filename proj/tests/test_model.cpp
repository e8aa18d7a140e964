#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "qdt/errors.hpp"
#include "qdt/model.hpp"
#include "qdt/search.hpp"
#include "qdt/synth.hpp"

using namespace qdt;

namespace {

QuantileModel root_leaves(std::vector<double> values) {
    QuantileModel m;
    m.grid = QuantileGrid::evenly_spaced(values.size());
    for (double v : values) m.trees.push_back(Tree::leaf(v, 4, 0.0));
    m.optimal.assign(values.size(), true);
    m.n_features = 2;
    return m;
}

Tree stump(int feature, double left, double right) {
    return Tree({{feature, 1, 2, 0, 0, 0}, {-1, -1, -1, left, 2, 0}, {-1, -1, -1, right, 2, 0}});
}

}  // namespace

TEST_CASE("root-leaf model predicts its leaf values") {
    const auto m = root_leaves({1, 2, 3});
    const std::vector<std::uint8_t> a = {0, 1}, b = {1, 1};
    CHECK(predict(m, a) == std::vector<double>{1, 2, 3});
    CHECK(predict(m, b) == std::vector<double>{1, 2, 3});
}

TEST_CASE("depth-1 tree routes on its feature") {
    const auto t = stump(1, -1.0, 7.0);
    const std::vector<std::uint8_t> on = {0, 1}, off = {1, 0};
    CHECK(t.predict(on) == 7.0);
    CHECK(t.predict(off) == -1.0);
    CHECK(t.depth() == 1);
    CHECK(t.n_leaves() == 2);
}

TEST_CASE("malformed trees are rejected") {
    CHECK_THROWS_AS(Tree({{0, 1, 2, 0, 0, 0}, {-1, -1, -1, 0, 0, 0}}), ConfigError);
    CHECK_THROWS_AS(Tree({{0, 1, 2, 0, 0, 0}, {0, 3, 4, 0, 0, 0}, {-1, -1, -1, 0, 0, 0},
                          {-1, -1, -1, 0, 0, 0}, {-1, -1, -1, 0, 0, 0}}),
                    ConfigError);
    CHECK_THROWS_AS(Tree({{0, 0, 1, 0, 0, 0}, {-1, -1, -1, 0, 0, 0}}), ConfigError);
}

TEST_CASE("training predictions replay the recorded leaves") {
    const auto data = generate({.n_samples = 400, .seed = 2});
    const auto ds = binarize(data.table, {});
    SearchConfig cfg;
    cfg.max_depth = 3;
    cfg.min_sup = 5;
    const auto grid = QuantileGrid::evenly_spaced(7);
    const auto m = fit_simultaneous(ds, grid, cfg);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const auto groups = partition(m.trees[j], ds);
        std::map<std::size_t, std::vector<double>> members;
        for (std::size_t i = 0; i < ds.n_samples(); ++i) members[groups[i]].push_back(ds.targets()[i]);
        for (std::size_t i = 0; i < ds.n_samples(); ++i) {
            const auto row = ds.row(i);
            const auto& leaf = m.trees[j].nodes()[m.trees[j].leaf_index(row)];
            const auto& ys = members[groups[i]];
            CHECK(leaf.n == ys.size());
            CHECK(leaf.value == doctest::Approx(oracle::quantile_of(ys, grid[j])));
            CHECK(leaf.loss == doctest::Approx(oracle::pinball(ys, leaf.value, grid[j])));
        }
    }
}

TEST_CASE("partitions are exhaustive and disjoint") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 10; ++rep) {
        const auto inst = oracle::random_instance(rng, 6, 100, 20);
        SearchConfig cfg;
        cfg.max_depth = 3;
        const auto m = fit_simultaneous(inst.ds, QuantileGrid::evenly_spaced(3), cfg);
        for (const auto& t : m.trees) {
            const auto g = partition(t, inst.ds);
            REQUIRE(g.size() == inst.ds.n_samples());
            std::set<std::size_t> ids(g.begin(), g.end());
            CHECK(ids.size() == t.n_leaves());
            CHECK(*ids.rbegin() == ids.size() - 1);
        }
    }
    const std::vector<std::vector<std::uint8_t>> rows = {{1, 0}, {0, 0}, {1, 1}, {0, 1}};
    const std::vector<double> y = {0, 1, 2, 3};
    const auto ds = BinaryDataset::from_rows(rows, y);
    const auto g = partition(stump(0, 0, 1), ds);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t k = 0; k < 4; ++k)
            CHECK((g[i] == g[k]) == (ds.feature_cover(0).test(i) == ds.feature_cover(0).test(k)));
    const auto one = partition(Tree::leaf(0, 4, 0), ds);
    CHECK(std::set<std::size_t>(one.begin(), one.end()).size() == 1);
}

TEST_CASE("partition jaccard") {
    const std::vector<std::size_t> a = {0, 0, 1, 1}, b = {0, 0, 0, 0};
    CHECK(partition_jaccard(a, b) == doctest::Approx(1.0 / 3.0));
    CHECK(partition_jaccard(a, a) == 1.0);
    const std::vector<std::size_t> s1 = {0, 1, 2}, s2 = {2, 0, 1};
    CHECK(partition_jaccard(s1, s2) == 1.0);

    std::mt19937_64 rng(32);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 1 + rng() % 200;
        std::vector<std::size_t> x(n), z(n);
        const std::size_t kx = 1 + rng() % 8, kz = 1 + rng() % 8;
        for (std::size_t i = 0; i < n; ++i) x[i] = rng() % kx, z[i] = rng() % kz;
        CHECK(partition_jaccard(x, z) == doctest::Approx(oracle::pair_jaccard(x, z)).epsilon(1e-12));
        CHECK(partition_jaccard(x, z) == partition_jaccard(z, x));
    }
}

TEST_CASE("jaccard matrix properties") {
    const auto data = generate({.n_samples = 150, .seed = 8});
    const auto ds = binarize(data.table, {});
    SearchConfig cfg;
    cfg.max_depth = 3;
    cfg.min_sup = 4;
    const auto m = fit_simultaneous(ds, QuantileGrid::evenly_spaced(9), cfg);
    const auto mat = jaccard_matrix(m, ds);
    for (std::size_t i = 0; i < mat.size(); ++i) {
        CHECK(mat[i][i] == 1.0);
        for (std::size_t j = 0; j < mat.size(); ++j) {
            CHECK(mat[i][j] == mat[j][i]);
            CHECK(mat[i][j] >= 0.0);
            CHECK(mat[i][j] <= 1.0);
            CHECK(mat[i][j] == doctest::Approx(oracle::pair_jaccard(partition(m.trees[i], ds), partition(m.trees[j], ds))));
        }
    }
    const auto same = root_leaves({1, 2});
    const std::vector<std::vector<std::uint8_t>> rows = {{0, 0}, {1, 1}};
    const std::vector<double> y = {0, 1};
    for (const auto& row : jaccard_matrix(same, BinaryDataset::from_rows(rows, y)))
        for (double v : row) CHECK(v == 1.0);
}

TEST_CASE("tree zones follow similarity drops") {
    const std::vector<std::vector<double>> m = {{1, 0.95, 0.5}, {0.95, 1, 0.6}, {0.5, 0.6, 1}};
    CHECK(tree_zones(m, 0.1) == std::vector<int>{0, 0, 1});
}

TEST_CASE("model serialization round trips") {
    auto root = root_leaves({1, 2, 3});
    root.binarization = {{"x", FeatureKind::LeThreshold, 2.5, {}}, {"c", FeatureKind::OneHot, 0, "A"}};
    CHECK(deserialize(serialize(root)) == root);

    const auto data = generate({.n_samples = 300, .seed = 12});
    const auto ds = binarize(data.table, {});
    SearchConfig cfg;
    cfg.max_depth = 4;
    cfg.min_sup = 3;
    auto big = fit_simultaneous(ds, QuantileGrid::evenly_spaced(100), cfg);
    big.binarization = ds.features();
    const auto text = serialize(big);
    CHECK(deserialize(text) == big);
    CHECK(serialize(deserialize(text)) == text);

    CHECK_THROWS_AS(deserialize(text.substr(0, text.size() / 2)), ParseError);
    CHECK_THROWS_AS(deserialize(""), ParseError);
    CHECK_THROWS_AS(deserialize("{\"version\": 99}"), ParseError);
}

TEST_CASE("rearrange sorts quantile vectors") {
    std::vector<double> v = {3, 1, 2};
    rearrange(v);
    CHECK(v == std::vector<double>{1, 2, 3});
}
