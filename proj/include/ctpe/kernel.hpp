#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <variant>

namespace ctpe {

/// Per-dimension parameters of one basis kernel.
struct ContinuousKernelParams {
  double h;  ///< Gaussian bandwidth in the dimension's own units
};
struct CategoricalKernelParams {
  double h;  ///< Aitchison-Aitken bandwidth, 0 < h <= C - 1
};
struct MetricKernelParams {
  double beta;      ///< effective scale (after the exploration modification, if enabled)
  double b;         ///< exploration base
  double max_dist;  ///< max distance from this basis to any category
};
/// Flat kernel used by the prior basis.
struct UniformKernelParams {};

using KernelParams =
    std::variant<ContinuousKernelParams, CategoricalKernelParams, MetricKernelParams, UniformKernelParams>;

/// exp(-((x - x')/h)^2 / 2).
double gaussian_kernel(double x, double x_prime, double h);

/// 1 if x == x', otherwise h / (C - 1).
double aitchison_aitken_kernel(std::size_t x, std::size_t x_prime, double h, std::size_t count);

/// Scale of the metric kernel chosen so a pair at distance `max_dist`
/// receives the Aitchison-Aitken off-diagonal weight h / (C - 1).
double compute_beta(double max_dist, std::size_t count, double h);

/// beta / sqrt(log_b C). Shrinks the kernel when C > b.
double modified_beta(double beta, std::size_t count, double b);

/// exp(-(dist/beta)^2 / 2).
double combinatorial_kernel(double dist, double beta);

/// log_b C, the factor by which the modification scales the kernel exponent.
double exploration_scale(std::size_t count, double b);

/// Log of the metric kernel written in terms of the quantities it is built from:
///   -(dist / max_dist)^2 * log((C - 1) / h) * scale
/// which equals log combinatorial_kernel(dist, beta) for beta from compute_beta
/// (scale = 1) or modified_beta (scale = exploration_scale). With a 0/1 distance
/// and max_dist = 1 it reproduces the Aitchison-Aitken kernel bit for bit.
/// A zero max_dist means every category coincides; the kernel is then flat.
double combinatorial_log_kernel(double dist, double max_dist, double log_ratio, double scale);

/// Sum of a kernel row over all `count` categories.
double categorical_normalizer(const std::function<double(std::size_t)>& kernel_row, std::size_t count);

/// Integral of the Gaussian kernel centered at `center` over [low, high].
double continuous_normalizer(double center, double h, double low, double high);
double log_continuous_normalizer(double center, double h, double low, double high);

/// Categorical bandwidth (C - 1) / (n + 1) for an estimator with n observations.
double categorical_bandwidth(std::size_t count, std::size_t n_observations);

/// Scott's rule on the [0, 1]-normalized coordinate, clipped to
/// [0.01, 1] of the range and returned in the dimension's units.
/// Falls back to the full range for fewer than two observations.
double scott_bandwidth(std::span<const double> values, std::size_t continuous_dims, double low, double high);

/// Standard normal CDF.
double normal_cdf(double z);

/// Inverse CDF of N(mean, sd^2) truncated to [low, high] at probability u in [0, 1).
double truncated_normal_quantile(double u, double mean, double sd, double low, double high);

}  // namespace ctpe
