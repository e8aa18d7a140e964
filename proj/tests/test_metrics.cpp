#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "qdt/metrics.hpp"

using namespace qdt;

namespace {

Density uniform_emulation() {
    // F(x) ~ x on [0,1]: many narrow kernels spread evenly.
    std::vector<double> c(2000);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = (static_cast<double>(i) + 0.5) / 2000.0;
    return Density(c, 1e-4);
}

}  // namespace

TEST_CASE("mqe") {
    const QuantileGrid g({0.5});
    const std::vector<double> y = {10};
    CHECK(mqe({{8}}, y, g) == doctest::Approx(1.0));
    CHECK(mqe({{10}}, y, g) == 0.0);

    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd(0, 1);
    const auto grid = QuantileGrid::evenly_spaced(5);
    std::vector<std::vector<double>> preds(30, std::vector<double>(5));
    std::vector<double> t(30);
    for (std::size_t i = 0; i < 30; ++i) {
        t[i] = nd(rng);
        for (auto& v : preds[i]) v = nd(rng);
    }
    double ref = 0;
    for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t i = 0; i < 30; ++i) {
            const double r = t[i] - preds[i][j];
            ref += std::max(grid[j] * r, (grid[j] - 1) * r);
        }
    CHECK(mqe(preds, t, grid) == doctest::Approx(ref / 150.0));
    CHECK(mqe(preds, t, grid) > 0);

    auto rp = preds;
    auto rt = t;
    std::reverse(rp.begin(), rp.end());
    std::reverse(rt.begin(), rt.end());
    CHECK(mqe(rp, rt, grid) == doctest::Approx(mqe(preds, t, grid)));
}

TEST_CASE("nll") {
    const std::vector<Density> one = {Density({3.0}, 1.0)};
    const std::vector<double> at = {3.0}, far = {1e4};
    CHECK(nll(one, at) == doctest::Approx(0.9189).epsilon(1e-4));
    CHECK(nll(one, far) == doctest::Approx(-std::log(kNllFloor)));
    CHECK(nll(one, far) == doctest::Approx(27.63).epsilon(1e-3));

    const std::vector<Density> two = {Density({0.0}, 1.0), Density({1.0, 2.0}, 0.5)};
    const std::vector<Density> owt = {two[1], two[0]};
    const std::vector<double> y = {0.3, 1.7}, yr = {1.7, 0.3};
    CHECK(nll(two, y) == doctest::Approx(nll(owt, yr)));
}

TEST_CASE("crps") {
    CHECK(crps(uniform_emulation(), 0.0) == doctest::Approx(1.0 / 3.0).epsilon(0.02));
    CHECK(crps(Density({5.0}, 1e-6), 5.0) < 1e-2);
    const Density d({0.0}, 1.0);
    CHECK(crps(d, 2.0) > crps(d, 1.0));
    CHECK(crps(d, -2.0) > crps(d, -1.0));
    CHECK(crps(d, 1.0) == doctest::Approx(crps(d, -1.0)));
    // Closed form for a normal forecast.
    const double z = 1.0;
    const double exact = z * (2 * normal_cdf(z) - 1) + 2 * normal_pdf(z) - 1 / std::sqrt(std::numbers::pi);
    CHECK(crps(d, 1.0) == doctest::Approx(exact).epsilon(1e-3));
}

TEST_CASE("mise closed forms") {
    const std::vector<Density> d = {Density({0.0}, 1.0)};
    const std::vector<Gaussian> same = {{0.0, 1.0}}, shifted = {{1.0, 1.0}};
    CHECK(mise(d, same) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(mise(d, same) < 1e-6);
    const double expect = (1 - std::exp(-0.25)) / std::sqrt(std::numbers::pi);
    CHECK(mise(d, shifted) == doctest::Approx(expect).epsilon(0.01));
    CHECK(expect == doctest::Approx(0.12478).epsilon(1e-4));

    const Density mix({-1.0, 0.5, 2.0}, 0.8);
    const std::vector<Density> dm = {mix};
    const std::vector<std::function<double(double)>> pdfs = {[&](double x) { return mix.pdf(x); }};
    CHECK(mise(dm, pdfs, {-10.0, 10.0}) < 1e-9);
}

TEST_CASE("metrics are nonnegative and stable under grid refinement") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd(0, 2);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<Density> ds;
        std::vector<double> y;
        std::vector<Gaussian> truth;
        std::vector<std::function<double(double)>> pdfs;
        for (int i = 0; i < 5; ++i) {
            std::vector<double> c(2 + rng() % 9);
            for (auto& v : c) v = nd(rng);
            std::sort(c.begin(), c.end());
            ds.push_back(kde_from_quantiles(c));
            y.push_back(nd(rng));
            truth.push_back({nd(rng), 0.5 + std::abs(nd(rng))});
        }
        for (const auto& g : truth) pdfs.push_back([g](double x) { return g.pdf(x); });
        const double c1 = crps(ds, y, {.points = 1024}), c2 = crps(ds, y, {.points = 2048});
        const double m1 = mise(ds, pdfs, {-40.0, 40.0}, 1024), m2 = mise(ds, pdfs, {-40.0, 40.0}, 2048);
        const double exact = mise(ds, truth);
        CHECK(c1 >= 0);
        CHECK(m1 >= 0);
        CHECK(exact >= 0);
        CHECK(std::abs(c1 - c2) <= 0.005 * c2);
        CHECK(std::abs(m1 - m2) <= 0.005 * m2);
        CHECK(mise(ds, pdfs, {-40.0, 40.0}, 20000) == doctest::Approx(exact).epsilon(1e-6));
    }
}

TEST_CASE("closed-form mise copes with degenerate kernels") {
    // A constant leaf yields a fallback bandwidth far below the truth's scale.
    const std::vector<double> flat = {1.0, 1.0, 1.0};
    const std::vector<Density> d = {kde_from_quantiles(flat)};
    const std::vector<Gaussian> g = {{1.0, 0.5}};
    const double h = d[0].bandwidth();
    const double expect = 1 / (2 * std::sqrt(std::numbers::pi)) * (1 / h + 1 / 0.5) -
                          2 * normal_pdf(0) / std::hypot(h, 0.5);
    CHECK(mise(d, g) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("evaluate report") {
    const QuantileGrid g({0.25, 0.5, 0.75});
    const std::vector<std::vector<double>> preds = {{1, 2, 3}, {3, 2, 1}};
    const std::vector<double> y = {2, 2};
    const auto r = evaluate(preds, y, g, {}, true);
    CHECK(r.rearranged);
    CHECK(r.n_samples == 2);
    CHECK_FALSE(r.mise.has_value());
    CHECK(r.per_quantile.size() == 3);
    // rearrangement only feeds density estimation
    const auto raw = evaluate(preds, y, g);
    CHECK(raw.mqe == r.mqe);
    CHECK(raw.nll == doctest::Approx(r.nll));
    const std::vector<Gaussian> truth = {{2, 1}, {2, 1}};
    CHECK(evaluate(preds, y, g, truth).mise.has_value());
    const std::vector<std::vector<double>> exact = {{2, 2, 2}, {2, 2, 2}};
    CHECK(evaluate(exact, y, g).mqe == 0.0);
    CHECK(r.to_json().find("\"mqe\"") != std::string::npos);
}
