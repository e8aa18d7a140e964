#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace qdt {

struct Gaussian {
    double mean = 0.0;
    double stddev = 1.0;

    double pdf(double x) const;
    double cdf(double x) const;
};

double normal_pdf(double z);
double normal_cdf(double z);

// Equal-weight Gaussian mixture with one kernel per center.
class Density {
public:
    // Throws ConfigError on empty centers or non-positive bandwidth.
    Density(std::vector<double> centers, double bandwidth);

    const std::vector<double>& centers() const noexcept { return centers_; }
    double bandwidth() const noexcept { return bandwidth_; }
    double min_center() const noexcept { return min_; }
    double max_center() const noexcept { return max_; }

    double pdf(double x) const;
    double cdf(double x) const;

private:
    std::vector<double> centers_;
    double bandwidth_;
    double min_, max_;
};

// Scott's rule: h = sd * k^(-1/5) with the (k-1) sample standard deviation.
// A single value or zero spread falls back to max(1e-3 (1 + |mean|), 1e-6).
double scott_bandwidth(std::span<const double> values);

Density kde_from_quantiles(std::span<const double> values);

struct CurvePoint {
    double x, pdf, cdf;
};

// Evenly spaced samples over [min center - pad h, max center + pad h].
std::vector<CurvePoint> density_curve(const Density& d, std::size_t points = 512, double pad_bandwidths = 6.0);

// CSV with header x,pdf,cdf.
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);

}  // namespace qdt
