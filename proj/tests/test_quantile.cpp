#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qdt/errors.hpp"
#include "qdt/quantile.hpp"

using namespace qdt;

TEST_CASE("quantile grid validation") {
    CHECK(QuantileGrid::evenly_spaced(3).levels() == std::vector<double>{0.25, 0.5, 0.75});
    CHECK_THROWS_AS(QuantileGrid({0.5, 0.5}), ConfigError);
    CHECK_THROWS_AS(QuantileGrid({0.0, 0.5}), ConfigError);
    CHECK_THROWS_AS(QuantileGrid({0.5, 1.0}), ConfigError);
    CHECK_THROWS_AS(QuantileGrid(std::vector<double>{}), ConfigError);
    CHECK(parse_leaf_value_mode(to_string(LeafValueMode::OrderStatistic)) == LeafValueMode::OrderStatistic);
}

TEST_CASE("empirical quantile by hand") {
    const std::vector<double> one = {7}, four = {1, 2, 3, 4}, two = {10, 20}, three = {1, 2, 3};
    CHECK(empirical_quantile(one, 0.3) == 7);
    CHECK(empirical_quantile(four, 0.5) == doctest::Approx(2.5));
    CHECK(empirical_quantile(two, 0.25) == doctest::Approx(12.5));
    CHECK(empirical_quantile(three, 0.0) == 1);
    CHECK(empirical_quantile(three, 1.0) == 3);
}

TEST_CASE("pinball loss by hand") {
    const std::vector<double> y = {0, 10};
    CHECK(pinball_loss(y, 0, 0.5) == doctest::Approx(5));
    CHECK(pinball_loss(y, 0, 0.9) == doctest::Approx(9));
    CHECK(pinball_loss(y, 10, 0.9) == doctest::Approx(1));
    const std::vector<double> flat = {3, 3, 3};
    CHECK(pinball_loss(flat, 3, 0.2) == 0);
}

TEST_CASE("leaf evaluation by hand") {
    const std::vector<double> y = {1, 2, 3, 4};
    const std::vector<double> levels = {0.25, 0.5, 0.75};
    LeafEval le;
    evaluate_leaf(y, Bitset(4, true), levels, LeafValueMode::Interpolated, le);
    CHECK(le.n == 4);
    CHECK(le.values[0] == doctest::Approx(1.75));
    CHECK(le.values[1] == doctest::Approx(2.5));
    CHECK(le.values[2] == doctest::Approx(3.25));
    for (std::size_t j = 0; j < 3; ++j) CHECK(le.losses[j] == doctest::Approx(pinball_loss(y, le.values[j], levels[j])));

    const std::vector<double> single = {5};
    evaluate_leaf(single, Bitset(1, true), levels, LeafValueMode::Interpolated, le);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(le.values[j] == 5);
        CHECK(le.losses[j] == 0);
    }
}

TEST_CASE("leaf evaluation matches the naive computation on random covers") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t n = 1 + rng() % 400;
        std::vector<double> y(n);
        std::normal_distribution<double> nd(unit(rng) * 100 - 50, 0.1 + unit(rng) * 30);
        const bool ties = rep % 3 == 0;
        for (auto& v : y) v = ties ? std::round(nd(rng) / 5) : nd(rng);
        std::sort(y.begin(), y.end());
        Bitset cover(n);
        const double keep = 0.05 + 0.95 * unit(rng);
        for (std::size_t i = 0; i < n; ++i)
            if (unit(rng) < keep) cover.set(i);
        if (!cover.any()) cover.set(rng() % n);
        std::vector<double> sub;
        cover.for_each([&](std::size_t i) { sub.push_back(y[i]); });

        const auto grid = rep % 2 ? QuantileGrid::evenly_spaced(1 + rng() % 64) : QuantileGrid({0.01, 0.3, 0.99});
        const auto mode = rep % 4 == 1 ? LeafValueMode::OrderStatistic : LeafValueMode::Interpolated;
        LeafEval le;
        evaluate_leaf(y, cover, grid.levels(), mode, le);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double q = grid[j];
            const double expect_v = mode == LeafValueMode::Interpolated ? oracle::quantile_of(sub, q)
                                                                        : oracle::order_statistic(sub, q);
            CAPTURE(le.values[j]);
            CAPTURE(expect_v);
            CHECK(oracle::close(le.values[j], expect_v, 1e-12));
            CHECK(oracle::close(le.losses[j], oracle::pinball(sub, le.values[j], q), 1e-9));
            if (j > 0) CHECK(le.values[j - 1] <= le.values[j]);
        }
    }
}

TEST_CASE("leaf loss invariants") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd(0, 4);
    const auto grid = QuantileGrid::evenly_spaced(9);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 1 + rng() % 50;
        std::vector<double> y(n);
        for (auto& v : y) v = std::round(nd(rng));
        std::sort(y.begin(), y.end());
        const Bitset all(n, true);
        LeafEval le;
        evaluate_leaf(y, all, grid.levels(), LeafValueMode::Interpolated, le);

        // zero loss iff constant
        const bool constant = y.front() == y.back();
        for (double l : le.losses) CHECK((l == 0) == constant);

        // positive homogeneity
        std::vector<double> scaled = y;
        for (auto& v : scaled) v *= 3.5;
        LeafEval ls;
        evaluate_leaf(scaled, all, grid.levels(), LeafValueMode::Interpolated, ls);
        for (std::size_t j = 0; j < grid.size(); ++j) CHECK(ls.losses[j] == doctest::Approx(3.5 * le.losses[j]));

        // the best data point is a global minimizer of the piecewise-linear loss
        for (double q : grid.levels()) {
            double best = std::numeric_limits<double>::infinity();
            for (double v : y) best = std::min(best, pinball_loss(y, v, q));
            for (double v = y.front() - 2; v <= y.back() + 2; v += 0.125)
                CHECK(pinball_loss(y, v, q) >= best - 1e-9);
        }

        // order-statistic leaves never lose to interpolated ones
        LeafEval lo;
        evaluate_leaf(y, all, grid.levels(), LeafValueMode::OrderStatistic, lo);
        for (std::size_t j = 0; j < grid.size(); ++j) CHECK(lo.losses[j] <= le.losses[j] + 1e-9);
    }
}
