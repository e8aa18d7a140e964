#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "qdt/csv.hpp"
#include "qdt/dataset.hpp"
#include "qdt/errors.hpp"
#include "qdt/synth.hpp"

using namespace qdt;

namespace {

RawTable one_column(Column c) {
    RawTable t;
    t.target.assign(c.size(), 0.0);
    t.columns.push_back(std::move(c));
    return t;
}

std::vector<std::size_t> original_cover(const BinaryDataset& ds, std::size_t f) {
    std::vector<std::size_t> out;
    ds.feature_cover(f).for_each([&](std::size_t i) { out.push_back(ds.original_index()[i]); });
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("binary column passes through") {
    const auto ds = binarize(one_column({"b", ColumnKind::Binary, {0, 1, 1, 0}, {}}), {});
    REQUIRE(ds.n_features() == 1);
    CHECK(original_cover(ds, 0) == std::vector<std::size_t>{1, 2});
}

TEST_CASE("categorical column is one-hot encoded") {
    const auto ds = binarize(one_column({"c", ColumnKind::Categorical, {}, {"A", "B", "A", "C"}}), {});
    REQUIRE(ds.n_features() == 3);
    CHECK(original_cover(ds, 0) == std::vector<std::size_t>{0, 2});
    CHECK(original_cover(ds, 1) == std::vector<std::size_t>{1});
    CHECK(original_cover(ds, 2) == std::vector<std::size_t>{3});
}

TEST_CASE("numeric column with one bin splits at the median") {
    const auto ds = binarize(one_column({"x", ColumnKind::Numeric, {1, 2, 3, 4}, {}}), {.bins = 1});
    REQUIRE(ds.n_features() == 1);
    CHECK(ds.features()[0].threshold == doctest::Approx(2.5));
    CHECK(original_cover(ds, 0) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("too many categories is rejected") {
    CHECK_THROWS_AS(binarize(one_column({"c", ColumnKind::Categorical, {}, {"a", "b", "c"}}), {.max_categories = 2}),
                    DataError);
}

TEST_CASE("cover of itemsets") {
    // a = {0,1,3}, d = {1,3}, g = {0,1,2,3}
    const std::vector<std::vector<std::uint8_t>> rows = {{1, 0, 1}, {1, 1, 1}, {0, 0, 1}, {1, 1, 1}};
    const std::vector<double> y = {0, 1, 2, 3};
    const auto ds = BinaryDataset::from_rows(rows, y);
    CHECK(ds.cover(Itemset{}).count() == 4);
    const auto c = ds.cover(Itemset({{0, true}, {1, false}, {2, true}}));
    CHECK(c.indices() == std::vector<std::size_t>{0});
    CHECK_THROWS_AS(Itemset({{1, true}, {1, false}}), ConfigError);
}

TEST_CASE("cover invariants on random data") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 30; ++rep) {
        const auto inst = oracle::random_instance(rng, 8, 120);
        const auto& ds = inst.ds;
        for (std::size_t i = 1; i < ds.n_samples(); ++i) CHECK(ds.targets()[i - 1] <= ds.targets()[i]);

        Itemset items;
        std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(ds.n_features() - 1));
        for (int step = 0; step < 3; ++step) {
            const std::uint32_t f = pick(rng);
            if (items.contains_feature(f)) continue;
            const auto base = ds.cover(items);
            const auto pos = ds.cover(items.with({f, true}));
            const auto neg = ds.cover(items.with({f, false}));
            Bitset both = pos;
            both &= neg;
            CHECK_FALSE(both.any());
            Bitset u = pos;
            u |= neg;
            CHECK(u == base);
            const bool take = rng() & 1;
            items = items.with({f, take});
            CHECK(ds.cover(items).count() <= base.count());
        }
    }
}

TEST_CASE("stable reindex keeps ties in input order") {
    const std::vector<std::vector<std::uint8_t>> rows = {{0}, {1}, {0}, {1}};
    const std::vector<double> y = {2, 1, 1, 0};
    const auto ds = BinaryDataset::from_rows(rows, y);
    CHECK(ds.original_index() == std::vector<std::size_t>{3, 1, 2, 0});
}

TEST_CASE("binarize is deterministic") {
    const auto data = generate({.n_samples = 300, .seed = 4});
    const auto a = binarize(data.table, {});
    const auto b = binarize(data.table, {});
    CHECK(a.targets() == b.targets());
    CHECK(a.original_index() == b.original_index());
    REQUIRE(a.n_features() == b.n_features());
    for (std::size_t f = 0; f < a.n_features(); ++f) CHECK(a.feature_cover(f) == b.feature_cover(f));
}

TEST_CASE("feature map json round trip") {
    RawTable t;
    t.target = {1, 2, 3, 4};
    t.columns.push_back({"x", ColumnKind::Numeric, {1, 5, 2, 8}, {}});
    t.columns.push_back({"c", ColumnKind::Categorical, {}, {"u", "v", "u", "w"}});
    const auto f = derive_features(t, {.bins = 2});
    CHECK(features_from_json(features_to_json(f)) == f);
    CHECK_THROWS_AS(features_from_json("[{\"feature\":0"), ParseError);
}

TEST_CASE("csv: smallest input") {
    std::istringstream in("x,y\n1,2\n");
    const auto t = read_csv(in, {});
    REQUIRE(t.columns.size() == 1);
    CHECK(t.columns[0].name == "x");
    CHECK(t.columns[0].kind != ColumnKind::Categorical);
    CHECK(t.target == std::vector<double>{2});
}

TEST_CASE("csv: missing target names the row") {
    std::istringstream in("x,y\n1,2\n3,\n");
    try {
        read_csv(in, {});
        FAIL("expected an error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
}

TEST_CASE("csv: synthetic data round trips exactly") {
    const auto data = generate({.n_samples = 500, .seed = 9});
    std::ostringstream out;
    write_csv(out, data.table);
    std::istringstream in(out.str());
    CsvSchema schema;
    for (const auto& c : data.table.columns) schema.overrides[c.name] = c.kind;
    const auto back = read_csv(in, schema);
    CHECK(back == data.table);
    std::ostringstream again;
    write_csv(again, back);
    CHECK(again.str() == out.str());
}

TEST_CASE("csv: quoted fields") {
    CHECK(split_csv_line("a,\"b,c\",\"d\"\"e\"") == std::vector<std::string>{"a", "b,c", "d\"e"});
    CHECK(csv_escape("p,q") == "\"p,q\"");
}

TEST_CASE("csv: missing file is an io error") {
    CHECK_THROWS_AS(load_csv("/nonexistent/definitely/missing.csv", {}), IoError);
}
