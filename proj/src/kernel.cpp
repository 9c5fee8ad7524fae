#include "ctpe/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <utility>

#include <boost/math/special_functions/erf.hpp>

namespace ctpe {
namespace {

// Probability mass of the standard normal on [a, b], evaluated on whichever
// tail avoids cancellation.
double standard_normal_mass(double a, double b) {
  constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
  if (a >= 0.0) {
    return 0.5 * (std::erfc(a * kInvSqrt2) - std::erfc(b * kInvSqrt2));
  }
  if (b <= 0.0) {
    return 0.5 * (std::erfc(-b * kInvSqrt2) - std::erfc(-a * kInvSqrt2));
  }
  return 1.0 - 0.5 * std::erfc(-a * kInvSqrt2) - 0.5 * std::erfc(b * kInvSqrt2);
}

}  // namespace

double gaussian_kernel(double x, double x_prime, double h) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("gaussian_kernel: bandwidth must be positive");
  }
  const double z = (x - x_prime) / h;
  return std::exp(-0.5 * z * z);
}

double aitchison_aitken_kernel(std::size_t x, std::size_t x_prime, double h, std::size_t count) {
  if (count < 2 || x >= count || x_prime >= count) {
    throw std::out_of_range("aitchison_aitken_kernel: category index out of range");
  }
  if (!(h > 0.0) || h > static_cast<double>(count - 1)) {
    throw std::invalid_argument("aitchison_aitken_kernel: bandwidth must lie in (0, C - 1]");
  }
  return x == x_prime ? 1.0 : h / static_cast<double>(count - 1);
}

double compute_beta(double max_dist, std::size_t count, double h) {
  if (count < 2) {
    throw std::invalid_argument("compute_beta: need at least 2 categories");
  }
  if (!(h > 0.0) || !(h < static_cast<double>(count - 1))) {
    throw std::domain_error("compute_beta: bandwidth must lie in (0, C - 1)");
  }
  if (!(max_dist > 0.0)) {
    throw std::domain_error("compute_beta: max distance must be positive");
  }
  return max_dist / std::sqrt(2.0 * std::log(static_cast<double>(count - 1) / h));
}

double exploration_scale(std::size_t count, double b) {
  if (!(b > 1.0)) {
    throw std::invalid_argument("exploration base b must be > 1");
  }
  if (count < 2) {
    throw std::invalid_argument("exploration scale needs at least 2 categories");
  }
  return std::log(static_cast<double>(count)) / std::log(b);
}

double modified_beta(double beta, std::size_t count, double b) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("modified_beta: beta must be positive");
  }
  return beta / std::sqrt(exploration_scale(count, b));
}

double combinatorial_kernel(double dist, double beta) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("combinatorial_kernel: beta must be positive");
  }
  if (dist < 0.0) {
    throw std::invalid_argument("combinatorial_kernel: distance must be nonnegative");
  }
  const double z = dist / beta;
  return std::exp(-0.5 * z * z);
}

double combinatorial_log_kernel(double dist, double max_dist, double log_ratio, double scale) {
  if (max_dist <= 0.0) {
    return 0.0;
  }
  const double r = dist / max_dist;
  return -(r * r) * log_ratio * scale;
}

double categorical_normalizer(const std::function<double(std::size_t)>& kernel_row, std::size_t count) {
  if (count < 2) {
    throw std::invalid_argument("categorical_normalizer: need at least 2 categories");
  }
  double z = 0.0;
  for (std::size_t x = 0; x < count; ++x) {
    z += kernel_row(x);
  }
  return z;
}

double continuous_normalizer(double center, double h, double low, double high) {
  if (!(h > 0.0) || !(low < high)) {
    throw std::invalid_argument("continuous_normalizer: need h > 0 and low < high");
  }
  const double mass = standard_normal_mass((low - center) / h, (high - center) / h);
  return h * std::sqrt(2.0 * std::numbers::pi) * mass;
}

double log_continuous_normalizer(double center, double h, double low, double high) {
  return std::log(continuous_normalizer(center, h, low, high));
}

double categorical_bandwidth(std::size_t count, std::size_t n_observations) {
  return static_cast<double>(count - 1) / static_cast<double>(n_observations + 1);
}

double scott_bandwidth(std::span<const double> values, std::size_t continuous_dims, double low,
                       double high) {
  const double range = high - low;
  const std::size_t n = values.size();
  if (n < 2) {
    return range;
  }
  double mean = 0.0;
  for (const double v : values) {
    mean += (v - low) / range;
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const double v : values) {
    const double z = (v - low) / range - mean;
    ss += z * z;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const double exponent = -1.0 / (static_cast<double>(continuous_dims) + 4.0);
  const double h = sd * std::pow(static_cast<double>(n), exponent);
  return std::clamp(h, 0.01, 1.0) * range;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double truncated_normal_quantile(double u, double mean, double sd, double low, double high) {
  if (!(sd > 0.0) || !(low < high)) {
    throw std::invalid_argument("truncated_normal_quantile: need sd > 0 and low < high");
  }
  double a = (low - mean) / sd;
  double b = (high - mean) / sd;
  // Work in the lower tail, where CDF values keep full relative precision.
  const bool reflect = a > 0.0;
  if (reflect) {
    std::tie(a, b) = std::pair{-b, -a};
    u = 1.0 - u;
  }
  const double cdf_a = normal_cdf(a);
  const double p = cdf_a + u * standard_normal_mass(a, b);
  double z = a;
  if (p > 0.0 && p < 1.0) {
    z = -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
  } else if (p >= 1.0) {
    z = b;
  }
  z = std::clamp(z, a, b);
  if (reflect) {
    z = -z;
  }
  return std::clamp(mean + sd * z, low, high);
}

}  // namespace ctpe
