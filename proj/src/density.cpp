#include "qdt/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "qdt/csv.hpp"
#include "qdt/errors.hpp"

namespace qdt {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double Gaussian::pdf(double x) const { return normal_pdf((x - mean) / stddev) / stddev; }

double Gaussian::cdf(double x) const { return normal_cdf((x - mean) / stddev); }

Density::Density(std::vector<double> centers, double bandwidth) : centers_(std::move(centers)), bandwidth_(bandwidth) {
    if (centers_.empty()) throw ConfigError("density needs at least one center");
    if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) throw ConfigError("density bandwidth must be positive");
    const auto [lo, hi] = std::minmax_element(centers_.begin(), centers_.end());
    min_ = *lo;
    max_ = *hi;
}

double Density::pdf(double x) const {
    double s = 0.0;
    for (double c : centers_) s += normal_pdf((x - c) / bandwidth_);
    return s / (bandwidth_ * static_cast<double>(centers_.size()));
}

double Density::cdf(double x) const {
    double s = 0.0;
    for (double c : centers_) s += normal_cdf((x - c) / bandwidth_);
    return s / static_cast<double>(centers_.size());
}

double scott_bandwidth(std::span<const double> values) {
    if (values.empty()) throw DataError("bandwidth of an empty sample");
    const double k = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= k;
    const double fallback = std::max(1e-3 * (1.0 + std::abs(mean)), 1e-6);
    if (values.size() < 2) return fallback;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (k - 1.0));
    const double h = sd * std::pow(k, -0.2);
    return h > 0.0 && std::isfinite(h) ? h : fallback;
}

Density kde_from_quantiles(std::span<const double> values) {
    if (values.empty()) throw DataError("cannot build a density from no quantile values");
    return Density(std::vector<double>(values.begin(), values.end()), scott_bandwidth(values));
}

std::vector<CurvePoint> density_curve(const Density& d, std::size_t points, double pad_bandwidths) {
    if (points < 2) throw ConfigError("density curve needs at least 2 points");
    const double lo = d.min_center() - pad_bandwidths * d.bandwidth();
    const double hi = d.max_center() + pad_bandwidths * d.bandwidth();
    std::vector<CurvePoint> out(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        out[i] = {x, d.pdf(x), d.cdf(x)};
    }
    return out;
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
    out << "x,pdf,cdf\n";
    for (const auto& p : curve) out << format_double(p.x) << ',' << format_double(p.pdf) << ',' << format_double(p.cdf) << '\n';
}

}  // namespace qdt
