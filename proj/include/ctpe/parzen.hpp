#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "ctpe/core.hpp"
#include "ctpe/kernel.hpp"
#include "ctpe/random.hpp"
#include "ctpe/tpe_config.hpp"

namespace ctpe {

/// Number of observations placed in the good set: min(ceil(0.1 N), 25).
std::size_t gamma_count(std::size_t n);

struct SplitResult {
  std::vector<Observation> good;
  std::vector<Observation> bad;
};

/// The gamma_count(N) best observations by (value, trial index) go to `good`,
/// the rest to `bad`; both keep trial order.
SplitResult split_observations(std::span<const Observation> history);

/// Weighted mixture of product kernels, one basis per observation plus a
/// flat prior basis. Immutable once built.
class ParzenEstimator {
 public:
  static ParzenEstimator build(std::span<const Observation> observations, const SearchSpace& space,
                               const TpeConfig& config);

  const SearchSpace& space() const { return space_; }
  std::size_t basis_count() const { return weights_.size(); }
  /// Observation bases come first in input order; the prior basis is last.
  bool includes_prior() const { return true; }
  std::span<const double> weights() const { return weights_; }
  const KernelParams& kernel_params(std::size_t basis, std::size_t dim) const;
  /// Center of a basis; empty for the prior basis.
  const ParamVector& center(std::size_t basis) const { return centers_[basis]; }

  /// Normalized pmf of one basis over the categories of a discrete dimension.
  std::span<const double> category_pmf(std::size_t basis, std::size_t dim) const;
  /// Mixture pmf over the categories of a discrete dimension.
  std::vector<double> marginal_pmf(std::size_t dim) const;

  /// Validates `x`, then returns log sum_b w_b prod_d k_d(x_d | basis_b) / Z_d.
  double log_pdf(std::span<const double> x) const;
  /// Same without validation, for points known to lie in the space.
  double log_pdf_unchecked(std::span<const double> x) const;

  std::vector<ParamVector> sample(Rng& rng, std::size_t n) const;

 private:
  struct DiscreteRow {
    std::vector<double> pmf;
    std::vector<double> log_pmf;
  };
  struct DimensionBasis {
    KernelParams params;
    // Continuous: truncated Gaussian center and log normalizer.
    double center = 0.0;
    double log_norm = 0.0;
    // Discrete: row in `rows_[dim]`.
    std::size_t row = 0;
  };

  explicit ParzenEstimator(const SearchSpace& space) : space_(space) {}

  double sample_dimension(Rng& rng, std::size_t basis, std::size_t dim) const;

  SearchSpace space_;
  std::vector<double> weights_;
  std::vector<ParamVector> centers_;
  // bases_[basis][dim]
  std::vector<std::vector<DimensionBasis>> bases_;
  // rows_[dim] holds the distinct category pmfs for that dimension.
  std::vector<std::vector<std::shared_ptr<const DiscreteRow>>> rows_;
};

}  // namespace ctpe
