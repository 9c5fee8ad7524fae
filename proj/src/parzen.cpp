#include "ctpe/parzen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "ctpe/metric.hpp"

namespace ctpe {
namespace {

constexpr std::size_t kMaxGood = 25;

std::shared_ptr<const std::vector<double>> delta_row(std::size_t count, std::size_t center) {
  auto row = std::make_shared<std::vector<double>>(count, 1.0);
  (*row)[center] = 0.0;
  return row;
}

}  // namespace

void TpeConfig::validate() const {
  if (n_candidates < 1) {
    throw std::invalid_argument("n_candidates must be >= 1");
  }
  if (!(b > 1.0) || !std::isfinite(b)) {
    throw std::invalid_argument("exploration base b must be a finite value > 1");
  }
}

std::size_t gamma_count(std::size_t n) {
  return std::min<std::size_t>((n + 9) / 10, kMaxGood);
}

SplitResult split_observations(std::span<const Observation> history) {
  std::vector<std::size_t> order(history.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return history[a].value < history[b].value; });
  const std::size_t n_good = gamma_count(history.size());
  std::vector<bool> is_good(history.size(), false);
  for (std::size_t k = 0; k < n_good; ++k) {
    is_good[order[k]] = true;
  }
  SplitResult split;
  split.good.reserve(n_good);
  split.bad.reserve(history.size() - n_good);
  for (std::size_t i = 0; i < history.size(); ++i) {
    (is_good[i] ? split.good : split.bad).push_back(history[i]);
  }
  return split;
}

ParzenEstimator ParzenEstimator::build(std::span<const Observation> observations, const SearchSpace& space,
                                       const TpeConfig& config) {
  for (const auto& obs : observations) {
    validate(space, obs.params);
  }
  ParzenEstimator est(space);
  const std::size_t n = observations.size();
  const std::size_t n_bases = n + 1;
  const std::size_t prior = n;
  est.weights_.assign(n_bases, 1.0 / static_cast<double>(n_bases));
  est.centers_.reserve(n_bases);
  for (const auto& obs : observations) {
    est.centers_.push_back(obs.params);
  }
  est.centers_.emplace_back();
  est.bases_.assign(n_bases, std::vector<DimensionBasis>(space.size()));
  est.rows_.resize(space.size());

  const std::size_t continuous_dims = space.continuous_count();
  std::vector<double> column(n);

  for (std::size_t d = 0; d < space.size(); ++d) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = observations[i].params[d];
    }

    if (const auto* c = std::get_if<Continuous>(&space[d].kind())) {
      const double h = scott_bandwidth(column, continuous_dims, c->low, c->high);
      for (std::size_t i = 0; i < n; ++i) {
        auto& basis = est.bases_[i][d];
        basis.params = ContinuousKernelParams{h};
        basis.center = column[i];
        basis.log_norm = log_continuous_normalizer(column[i], h, c->low, c->high);
      }
      est.bases_[prior][d].params = UniformKernelParams{};
      est.bases_[prior][d].log_norm = std::log(c->high - c->low);
      continue;
    }

    const std::size_t count = space[d].category_count();
    auto& rows = est.rows_[d];

    auto uniform = std::make_shared<DiscreteRow>();
    uniform->pmf.assign(count, 1.0 / static_cast<double>(count));
    uniform->log_pmf.assign(count, -std::log(static_cast<double>(count)));
    rows.push_back(std::move(uniform));
    est.bases_[prior][d].params = UniformKernelParams{};
    est.bases_[prior][d].row = 0;
    if (n == 0) {
      continue;
    }

    const auto* metric_dim = std::get_if<MetricCategorical>(&space[d].kind());
    const bool use_metric = metric_dim != nullptr && config.metric_kernel_enabled;
    const double h = categorical_bandwidth(count, n);
    const double log_ratio = std::log(static_cast<double>(count - 1) / h);
    const double b = (metric_dim && metric_dim->b) ? *metric_dim->b : config.b;
    const double scale = (use_metric && config.modification_enabled) ? exploration_scale(count, b) : 1.0;

    std::vector<std::size_t> unique;
    std::unordered_map<std::size_t, std::size_t> row_of;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t cat = category_of(column[i]);
      if (row_of.emplace(cat, rows.size() + unique.size()).second) {
        unique.push_back(cat);
      }
    }

    MaxDistanceEstimate max_dist;
    if (use_metric) {
      max_dist = approx_max_distance(*metric_dim->metric, unique);
    }
    std::unordered_map<std::size_t, KernelParams> params_of;
    for (const std::size_t cat : unique) {
      const auto dist = use_metric ? metric_dim->metric->row(cat) : delta_row(count, cat);
      const double max = use_metric ? max_dist.per_basis.at(cat) : 1.0;

      auto row = std::make_shared<DiscreteRow>();
      row->log_pmf.resize(count);
      row->pmf.resize(count);
      double z = 0.0;
      for (std::size_t x = 0; x < count; ++x) {
        const double log_k = combinatorial_log_kernel((*dist)[x], max, log_ratio, scale);
        row->log_pmf[x] = log_k;
        row->pmf[x] = std::exp(log_k);
        z += row->pmf[x];
      }
      const double log_z = std::log(z);
      for (std::size_t x = 0; x < count; ++x) {
        row->pmf[x] /= z;
        row->log_pmf[x] -= log_z;
      }
      rows.push_back(std::move(row));

      if (use_metric) {
        double beta = std::numeric_limits<double>::infinity();
        if (max > 0.0) {
          beta = compute_beta(max, count, h);
          if (config.modification_enabled) {
            beta = modified_beta(beta, count, b);
          }
        }
        params_of.emplace(cat, MetricKernelParams{beta, b, max});
      } else {
        params_of.emplace(cat, CategoricalKernelParams{h});
      }
    }

    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t cat = category_of(column[i]);
      est.bases_[i][d].row = row_of.at(cat);
      est.bases_[i][d].params = params_of.at(cat);
    }
  }
  return est;
}

const KernelParams& ParzenEstimator::kernel_params(std::size_t basis, std::size_t dim) const {
  return bases_.at(basis).at(dim).params;
}

std::span<const double> ParzenEstimator::category_pmf(std::size_t basis, std::size_t dim) const {
  if (space_[dim].is_continuous()) {
    throw std::invalid_argument("category_pmf: dimension is continuous");
  }
  return rows_[dim][bases_.at(basis)[dim].row]->pmf;
}

std::vector<double> ParzenEstimator::marginal_pmf(std::size_t dim) const {
  std::vector<double> mixture(space_[dim].category_count(), 0.0);
  for (std::size_t b = 0; b < basis_count(); ++b) {
    const auto pmf = category_pmf(b, dim);
    for (std::size_t x = 0; x < mixture.size(); ++x) {
      mixture[x] += weights_[b] * pmf[x];
    }
  }
  return mixture;
}

double ParzenEstimator::log_pdf(std::span<const double> x) const {
  validate(space_, x);
  return log_pdf_unchecked(x);
}

double ParzenEstimator::log_pdf_unchecked(std::span<const double> x) const {
  const std::size_t n_bases = basis_count();
  std::vector<double> terms(n_bases);
  for (std::size_t b = 0; b < n_bases; ++b) {
    double log_term = std::log(weights_[b]);
    for (std::size_t d = 0; d < space_.size(); ++d) {
      const auto& basis = bases_[b][d];
      if (space_[d].is_continuous()) {
        if (const auto* p = std::get_if<ContinuousKernelParams>(&basis.params)) {
          const double z = (x[d] - basis.center) / p->h;
          log_term += -0.5 * z * z - basis.log_norm;
        } else {
          log_term -= basis.log_norm;
        }
      } else {
        log_term += rows_[d][basis.row]->log_pmf[category_of(x[d])];
      }
    }
    terms[b] = log_term;
  }
  const double peak = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (const double t : terms) {
    sum += std::exp(t - peak);
  }
  return peak + std::log(sum);
}

double ParzenEstimator::sample_dimension(Rng& rng, std::size_t basis, std::size_t dim) const {
  const auto& b = bases_[basis][dim];
  if (const auto* c = std::get_if<Continuous>(&space_[dim].kind())) {
    if (const auto* p = std::get_if<ContinuousKernelParams>(&b.params)) {
      return truncated_normal_quantile(uniform01(rng), b.center, p->h, c->low, c->high);
    }
    return uniform_real(rng, c->low, c->high);
  }
  const auto& pmf = rows_[dim][b.row]->pmf;
  const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  const double target = uniform01(rng) * total;
  double cumulative = 0.0;
  for (std::size_t x = 0; x < pmf.size(); ++x) {
    cumulative += pmf[x];
    if (target < cumulative) {
      return static_cast<double>(x);
    }
  }
  // Rounding left `target` past the last partial sum; take the last category with mass.
  for (std::size_t x = pmf.size(); x > 0; --x) {
    if (pmf[x - 1] > 0.0) {
      return static_cast<double>(x - 1);
    }
  }
  return 0.0;
}

std::vector<ParamVector> ParzenEstimator::sample(Rng& rng, std::size_t n) const {
  if (n < 1) {
    throw std::invalid_argument("sample: n must be >= 1");
  }
  std::vector<double> cumulative(weights_.size());
  std::partial_sum(weights_.begin(), weights_.end(), cumulative.begin());
  std::vector<ParamVector> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double target = uniform01(rng) * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    const auto basis = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                             weights_.size() - 1);
    ParamVector x(space_.size());
    for (std::size_t d = 0; d < space_.size(); ++d) {
      x[d] = sample_dimension(rng, basis, d);
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace ctpe
