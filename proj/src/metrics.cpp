#include "qdt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "qdt/errors.hpp"

namespace qdt {

namespace {

template <class F>
double trapezoid(F&& f, double lo, double hi, std::size_t points) {
    if (points < 2 || !(hi > lo)) return 0.0;
    const double dx = (hi - lo) / static_cast<double>(points - 1);
    double s = 0.5 * (f(lo) + f(hi));
    for (std::size_t i = 1; i + 1 < points; ++i) s += f(lo + dx * static_cast<double>(i));
    return s * dx;
}

void require_same(std::size_t a, std::size_t b, const char* what) {
    if (a == 0) throw DataError(std::string(what) + " on empty input");
    if (a != b) throw DataError(std::string(what) + ": sample counts differ");
}

}  // namespace

std::vector<double> per_quantile_losses(const std::vector<std::vector<double>>& predictions,
                                        std::span<const double> targets, const QuantileGrid& grid) {
    require_same(predictions.size(), targets.size(), "mqe");
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t s = 0; s < predictions.size(); ++s) {
        if (predictions[s].size() != grid.size()) throw DataError("prediction width does not match the grid");
        const double y = targets[s];
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double d = y - predictions[s][j];
            out[j] += std::max(grid[j] * d, (grid[j] - 1.0) * d);
        }
    }
    for (auto& v : out) v /= static_cast<double>(predictions.size());
    return out;
}

double mqe(const std::vector<std::vector<double>>& predictions, std::span<const double> targets,
           const QuantileGrid& grid) {
    const auto per_q = per_quantile_losses(predictions, targets, grid);
    double s = 0.0;
    for (double v : per_q) s += v;
    return s / static_cast<double>(per_q.size());
}

double nll(std::span<const Density> densities, std::span<const double> targets) {
    require_same(densities.size(), targets.size(), "nll");
    double s = 0.0;
    for (std::size_t i = 0; i < densities.size(); ++i) s -= std::log(std::max(densities[i].pdf(targets[i]), kNllFloor));
    return s / static_cast<double>(densities.size());
}

double crps(const Density& d, double y, const IntegrationOptions& opts) {
    const double pad = opts.pad_bandwidths * d.bandwidth();
    const double lo = std::min(d.min_center(), y) - pad;
    const double hi = std::max(d.max_center(), y) + pad;
    // Integrate each side of the step separately so the jump at y is exact.
    const double frac = (y - lo) / (hi - lo);
    const auto left_points = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(frac * opts.points)));
    const auto right_points = std::max<std::size_t>(2, opts.points + 1 - std::min(left_points, opts.points - 1));
    const double below = trapezoid([&](double x) { const double f = d.cdf(x); return f * f; }, lo, y, left_points);
    const double above = trapezoid([&](double x) { const double f = 1.0 - d.cdf(x); return f * f; }, y, hi, right_points);
    return below + above;
}

double crps(std::span<const Density> densities, std::span<const double> targets, const IntegrationOptions& opts) {
    require_same(densities.size(), targets.size(), "crps");
    double s = 0.0;
    for (std::size_t i = 0; i < densities.size(); ++i) s += crps(densities[i], targets[i], opts);
    return s / static_cast<double>(densities.size());
}

double ise(const Density& density, const std::function<double(double)>& true_pdf, double lo, double hi,
           std::size_t points) {
    return trapezoid(
        [&](double x) {
            const double diff = density.pdf(x) - true_pdf(x);
            return diff * diff;
        },
        lo, hi, points);
}

double mise(std::span<const Density> densities, std::span<const std::function<double(double)>> true_pdfs,
            std::pair<double, double> range, std::size_t points) {
    if (true_pdfs.size() != densities.size()) throw DataError("mise: missing true density for some samples");
    require_same(densities.size(), true_pdfs.size(), "mise");
    double s = 0.0;
    for (std::size_t i = 0; i < densities.size(); ++i) s += ise(densities[i], true_pdfs[i], range.first, range.second, points);
    return s / static_cast<double>(densities.size());
}

double ise(const Density& density, const Gaussian& truth) {
    // Products of Gaussians integrate in closed form:
    // int N(x; a, s) N(x; b, t) dx = N(a - b; 0, sqrt(s^2 + t^2)).
    const auto& c = density.centers();
    const double h = density.bandwidth();
    const double k = static_cast<double>(c.size());
    const double self_scale = std::numbers::sqrt2 * h;
    double self = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        double row = 0.5 * normal_pdf(0.0);
        for (std::size_t j = i + 1; j < c.size(); ++j) row += normal_pdf((c[i] - c[j]) / self_scale);
        self += 2.0 * row;
    }
    self /= self_scale * k * k;
    const double cross_scale = std::hypot(h, truth.stddev);
    double cross = 0.0;
    for (double ci : c) cross += normal_pdf((ci - truth.mean) / cross_scale);
    cross /= cross_scale * k;
    const double truth_self = 1.0 / (2.0 * truth.stddev * std::sqrt(std::numbers::pi));
    return std::max(self - 2.0 * cross + truth_self, 0.0);
}

double mise(std::span<const Density> densities, std::span<const Gaussian> truths) {
    if (truths.size() != densities.size()) throw DataError("mise: missing true density for some samples");
    require_same(densities.size(), truths.size(), "mise");
    double s = 0.0;
    for (std::size_t i = 0; i < densities.size(); ++i) s += ise(densities[i], truths[i]);
    return s / static_cast<double>(densities.size());
}

EvalReport evaluate(const std::vector<std::vector<double>>& predictions, std::span<const double> targets,
                    const QuantileGrid& grid, std::span<const Gaussian> truths, bool rearrange,
                    const IntegrationOptions& opts) {
    EvalReport r;
    r.n_samples = predictions.size();
    r.quantiles = grid.levels();
    r.rearranged = rearrange;
    r.per_quantile = per_quantile_losses(predictions, targets, grid);
    double s = 0.0;
    for (double v : r.per_quantile) s += v;
    r.mqe = s / static_cast<double>(r.per_quantile.size());

    std::vector<Density> densities;
    densities.reserve(predictions.size());
    for (const auto& p : predictions) {
        if (rearrange) {
            auto sorted = p;
            std::sort(sorted.begin(), sorted.end());
            densities.push_back(kde_from_quantiles(sorted));
        } else {
            densities.push_back(kde_from_quantiles(p));
        }
    }
    r.nll = nll(densities, targets);
    r.crps = crps(densities, targets, opts);
    if (!truths.empty()) r.mise = mise(densities, truths);
    return r;
}

std::string EvalReport::to_json() const {
    nlohmann::json j = {
        {"mqe", mqe},
        {"nll", nll},
        {"crps", crps},
        {"mise", mise ? nlohmann::json(*mise) : nlohmann::json(nullptr)},
        {"per_quantile_loss", per_quantile},
        {"quantiles", quantiles},
        {"n_samples", n_samples},
        {"rearranged", rearranged},
        {"normalization", {{"mqe", "mean over samples, then mean over quantiles"}, {"nll_floor", kNllFloor}}},
    };
    return j.dump(2);
}

std::string EvalReport::to_text() const {
    std::ostringstream os;
    os << std::left << std::setw(8) << "metric" << std::right << std::setw(16) << "value" << '\n';
    auto line = [&](const char* name, double v) {
        os << std::left << std::setw(8) << name << std::right << std::setw(16) << std::setprecision(6) << v << '\n';
    };
    line("MQE", mqe);
    line("NLL", nll);
    line("CRPS", crps);
    if (mise) line("MISE", *mise);
    os << "samples " << n_samples << ", quantiles " << quantiles.size() << '\n';
    return os.str();
}

}  // namespace qdt
