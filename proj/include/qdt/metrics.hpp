#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qdt/density.hpp"
#include "qdt/quantile.hpp"

namespace qdt {

struct IntegrationOptions {
    std::size_t points = 1024;
    double pad_bandwidths = 6.0;
};

inline constexpr double kNllFloor = 1e-12;

// Mean over samples of the pinball loss at each quantile.
std::vector<double> per_quantile_losses(const std::vector<std::vector<double>>& predictions,
                                        std::span<const double> targets, const QuantileGrid& grid);

// Mean over quantiles of per_quantile_losses.
double mqe(const std::vector<std::vector<double>>& predictions, std::span<const double> targets,
           const QuantileGrid& grid);

// Mean of -log(max(pdf(y), 1e-12)).
double nll(std::span<const Density> densities, std::span<const double> targets);

// CRPS of one density against one observation, trapezoid rule on
// [min(center, y) - pad h, max(center, y) + pad h] split at y.
double crps(const Density& density, double y, const IntegrationOptions& opts = {});
double crps(std::span<const Density> densities, std::span<const double> targets, const IntegrationOptions& opts = {});

// Integrated squared difference between a density and a reference pdf over [lo, hi].
double ise(const Density& density, const std::function<double(double)>& true_pdf, double lo, double hi,
           std::size_t points = 1024);

// Mean ISE over samples with caller-supplied pdfs on a common range
// (trapezoid rule; the grid must resolve the narrowest kernel).
double mise(std::span<const Density> densities, std::span<const std::function<double(double)>> true_pdfs,
            std::pair<double, double> range, std::size_t points = 1024);

// Exact ISE of a Gaussian mixture against a Gaussian. No quadrature, so
// narrow fallback kernels are handled without resolution loss.
double ise(const Density& density, const Gaussian& truth);

// Mean exact ISE against Gaussian ground truth.
double mise(std::span<const Density> densities, std::span<const Gaussian> truths);

struct EvalReport {
    double mqe = 0.0;
    double nll = 0.0;
    double crps = 0.0;
    std::optional<double> mise;
    std::vector<double> per_quantile;
    std::vector<double> quantiles;
    std::size_t n_samples = 0;
    bool rearranged = false;

    std::string to_json() const;
    std::string to_text() const;
};

// Builds one density per sample from its quantile vector (sorted first when
// `rearrange`), then computes every metric.
EvalReport evaluate(const std::vector<std::vector<double>>& predictions, std::span<const double> targets,
                    const QuantileGrid& grid, std::span<const Gaussian> truths = {}, bool rearrange = false,
                    const IntegrationOptions& opts = {});

}  // namespace qdt
