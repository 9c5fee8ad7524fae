#include "ctpe/metric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ctpe/random.hpp"

namespace ctpe {
namespace {

// Memory budget for memoized rows, in doubles (64 MiB).
constexpr std::size_t kRowCacheDoubles = std::size_t{8} << 20;

}  // namespace

Metric::Metric(std::size_t count, DistanceFn dist, std::optional<CachePolicy> policy)
    : count_(count), dist_(std::move(dist)) {
  if (count_ < 1) {
    throw std::invalid_argument("metric requires at least one category");
  }
  if (!dist_) {
    throw std::invalid_argument("metric requires a distance function");
  }
  policy_ = policy.value_or(count_ <= kFullMatrixLimit ? CachePolicy::FullMatrix : CachePolicy::PerRow);
  if (policy_ == CachePolicy::FullMatrix) {
    matrix_.resize(count_ * count_);
    for (std::size_t i = 0; i < count_; ++i) {
      for (std::size_t j = 0; j < count_; ++j) {
        matrix_[i * count_ + j] = dist_(i, j);
      }
    }
  } else if (policy_ == CachePolicy::PerRow) {
    row_capacity_ = std::max<std::size_t>(16, kRowCacheDoubles / count_);
  }
}

double Metric::distance(std::size_t i, std::size_t j) const {
  if (i >= count_ || j >= count_) {
    throw std::out_of_range("metric: category index out of range");
  }
  if (policy_ == CachePolicy::FullMatrix) {
    return matrix_[i * count_ + j];
  }
  if (policy_ == CachePolicy::PerRow) {
    std::lock_guard lock(mutex_);
    if (auto it = rows_.find(i); it != rows_.end()) {
      return (*it->second)[j];
    }
  }
  return dist_(i, j);
}

Metric::Row Metric::compute_row(std::size_t i) const {
  auto row = std::make_shared<std::vector<double>>(count_);
  if (policy_ == CachePolicy::FullMatrix) {
    std::copy_n(matrix_.begin() + static_cast<std::ptrdiff_t>(i * count_), count_, row->begin());
  } else {
    for (std::size_t j = 0; j < count_; ++j) {
      (*row)[j] = dist_(i, j);
    }
  }
  return row;
}

Metric::Row Metric::row(std::size_t i) const {
  if (i >= count_) {
    throw std::out_of_range("metric: category index out of range");
  }
  if (policy_ != CachePolicy::PerRow) {
    return compute_row(i);
  }
  {
    std::lock_guard lock(mutex_);
    if (auto it = rows_.find(i); it != rows_.end()) {
      return it->second;
    }
  }
  Row row = compute_row(i);
  std::lock_guard lock(mutex_);
  if (rows_.size() >= row_capacity_) {
    rows_.clear();
  }
  rows_.emplace(i, row);
  return row;
}

std::uint64_t factorial(std::size_t n) {
  std::uint64_t f = 1;
  for (std::size_t k = 2; k <= n; ++k) {
    f *= k;
  }
  return f;
}

std::vector<int> unrank_permutation(std::uint64_t rank, std::size_t p) {
  if (p == 0 || p > 20) {
    throw std::invalid_argument("unrank_permutation: length must be in [1, 20]");
  }
  if (rank >= factorial(p)) {
    throw std::out_of_range("unrank_permutation: rank out of range");
  }
  std::vector<int> pool(p);
  std::iota(pool.begin(), pool.end(), 1);
  std::vector<int> perm;
  perm.reserve(p);
  for (std::size_t k = p; k > 0; --k) {
    const std::uint64_t block = factorial(k - 1);
    const auto pick = static_cast<std::size_t>(rank / block);
    rank %= block;
    perm.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return perm;
}

std::uint64_t rank_permutation(std::span<const int> perm) {
  const std::size_t p = perm.size();
  std::uint64_t rank = 0;
  for (std::size_t k = 0; k < p; ++k) {
    std::uint64_t smaller = 0;
    for (std::size_t j = k + 1; j < p; ++j) {
      smaller += perm[j] < perm[k] ? 1 : 0;
    }
    rank += smaller * factorial(p - 1 - k);
  }
  return rank;
}

MetricHandle hamming_metric(std::size_t length, std::size_t arity) {
  if (length < 1 || arity < 2) {
    throw std::invalid_argument("hamming_metric: need length >= 1 and arity >= 2");
  }
  constexpr std::size_t kMaxCount = std::size_t{1} << 32;
  std::size_t count = 1;
  for (std::size_t k = 0; k < length; ++k) {
    if (count > kMaxCount / arity) {
      throw std::overflow_error("hamming_metric: arity^length exceeds the supported category count");
    }
    count *= arity;
  }
  return std::make_shared<Metric>(count, [length, arity](std::size_t i, std::size_t j) {
    double d = 0.0;
    for (std::size_t k = 0; k < length; ++k) {
      d += (i % arity != j % arity) ? 1.0 : 0.0;
      i /= arity;
      j /= arity;
    }
    return d;
  });
}

MetricHandle permutation_l1_metric(std::size_t p) {
  if (p < 2 || p > kMaxPermutationLength) {
    throw std::invalid_argument("permutation_l1_metric: p must be in [2, 12]");
  }
  const std::uint64_t count = factorial(p);
  // Unranked table for spaces small enough to hold in memory; rank on the fly otherwise.
  constexpr std::uint64_t kTableLimit = 40320;
  if (count <= kTableLimit) {
    auto table = std::make_shared<std::vector<int>>();
    table->reserve(count * p);
    for (std::uint64_t r = 0; r < count; ++r) {
      const auto perm = unrank_permutation(r, p);
      table->insert(table->end(), perm.begin(), perm.end());
    }
    return std::make_shared<Metric>(count, [table, p](std::size_t i, std::size_t j) {
      const int* a = table->data() + i * p;
      const int* b = table->data() + j * p;
      int d = 0;
      for (std::size_t k = 0; k < p; ++k) {
        d += std::abs(a[k] - b[k]);
      }
      return static_cast<double>(d);
    });
  }
  return std::make_shared<Metric>(count, [p](std::size_t i, std::size_t j) {
    const auto a = unrank_permutation(i, p);
    const auto b = unrank_permutation(j, p);
    int d = 0;
    for (std::size_t k = 0; k < p; ++k) {
      d += std::abs(a[k] - b[k]);
    }
    return static_cast<double>(d);
  });
}

MetricHandle embedding_cosine_metric(std::vector<std::vector<double>> vectors) {
  if (vectors.size() < 2) {
    throw std::invalid_argument("embedding_cosine_metric: need at least 2 vectors");
  }
  const std::size_t dim = vectors.front().size();
  std::vector<double> norms;
  norms.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (v.size() != dim) {
      throw std::invalid_argument("embedding_cosine_metric: vectors differ in length");
    }
    const double n = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw std::invalid_argument("embedding_cosine_metric: zero-norm vector");
    }
    norms.push_back(n);
  }
  auto data = std::make_shared<const std::vector<std::vector<double>>>(std::move(vectors));
  auto norm_data = std::make_shared<const std::vector<double>>(std::move(norms));
  return std::make_shared<Metric>(data->size(), [data, norm_data](std::size_t i, std::size_t j) {
    if (i == j) {
      return 0.0;
    }
    const auto& a = (*data)[i];
    const auto& b = (*data)[j];
    const double cosine =
        std::inner_product(a.begin(), a.end(), b.begin(), 0.0) / ((*norm_data)[i] * (*norm_data)[j]);
    return std::max(0.0, 1.0 - cosine);
  });
}

MetricHandle delta_metric(std::size_t count) {
  if (count < 2) {
    throw std::invalid_argument("delta_metric: need at least 2 categories");
  }
  return std::make_shared<Metric>(count,
                                  [](std::size_t i, std::size_t j) { return i == j ? 0.0 : 1.0; });
}

void check_metric_axioms(const Metric& metric, std::size_t triples, std::uint64_t seed,
                         double tolerance) {
  Rng rng(seed);
  const std::size_t n = metric.count();
  for (std::size_t t = 0; t < triples; ++t) {
    const auto i = static_cast<std::size_t>(uniform_index(rng, n));
    const auto j = static_cast<std::size_t>(uniform_index(rng, n));
    const auto k = static_cast<std::size_t>(uniform_index(rng, n));
    const double dij = metric.distance(i, j);
    const double dji = metric.distance(j, i);
    const double djk = metric.distance(j, k);
    const double dik = metric.distance(i, k);
    const double scale = std::max({1.0, dij, djk, dik});
    std::ostringstream where;
    where << " (indices " << i << ", " << j << ", " << k << ")";
    if (!std::isfinite(dij) || dij < 0.0 || !std::isfinite(djk) || djk < 0.0 || !std::isfinite(dik) ||
        dik < 0.0) {
      throw std::invalid_argument("metric axiom violated: nonnegativity" + where.str());
    }
    if (metric.distance(i, i) != 0.0) {
      throw std::invalid_argument("metric axiom violated: dist(i, i) = 0" + where.str());
    }
    if (std::abs(dij - dji) > tolerance * scale) {
      throw std::invalid_argument("metric axiom violated: symmetry" + where.str());
    }
    if (dik > dij + djk + tolerance * scale) {
      throw std::invalid_argument("metric axiom violated: triangle inequality" + where.str());
    }
  }
}

MetricHandle custom_metric(std::size_t count, Metric::DistanceFn dist, std::optional<CachePolicy> policy,
                           std::size_t triples, std::uint64_t seed) {
  auto metric = std::make_shared<Metric>(count, std::move(dist), policy);
  check_metric_axioms(*metric, triples, seed);
  return metric;
}

MetricHandle matrix_metric(std::vector<std::vector<double>> matrix, std::size_t triples,
                           std::uint64_t seed) {
  const std::size_t n = matrix.size();
  for (const auto& row : matrix) {
    if (row.size() != n) {
      throw std::invalid_argument("distance matrix must be square");
    }
  }
  auto data = std::make_shared<const std::vector<std::vector<double>>>(std::move(matrix));
  return custom_metric(
      n, [data](std::size_t i, std::size_t j) { return (*data)[i][j]; }, CachePolicy::None, triples, seed);
}

MetricHandle load_distance_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open distance matrix file: " + path.string());
  }
  long long count = 0;
  if (!(in >> count) || count < 1) {
    throw std::runtime_error("distance matrix file: first line must hold a positive count");
  }
  const auto n = static_cast<std::size_t>(count);
  std::vector<std::vector<double>> matrix(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!(in >> matrix[i][j])) {
        throw std::runtime_error("distance matrix file: expected " + std::to_string(n * n) + " entries");
      }
    }
  }
  std::string extra;
  if (in >> extra) {
    throw std::runtime_error("distance matrix file: trailing content after " + std::to_string(n) + " rows");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i][i] != 0.0) {
      throw std::invalid_argument("distance matrix file: nonzero diagonal at row " + std::to_string(i));
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (matrix[i][j] < 0.0 || matrix[i][j] != matrix[j][i]) {
        throw std::invalid_argument("distance matrix file: matrix must be symmetric and nonnegative");
      }
    }
  }
  return matrix_metric(std::move(matrix));
}

MaxDistanceEstimate approx_max_distance(const Metric& metric, std::span<const std::size_t> bases) {
  if (bases.empty()) {
    throw std::invalid_argument("approx_max_distance: empty basis set");
  }
  MaxDistanceEstimate estimate;
  for (const std::size_t basis : bases) {
    if (basis >= metric.count()) {
      throw std::out_of_range("approx_max_distance: basis index out of range");
    }
    if (estimate.per_basis.contains(basis)) {
      continue;
    }
    const auto row = metric.row(basis);
    estimate.per_basis.emplace(basis, *std::max_element(row->begin(), row->end()));
  }
  return estimate;
}

double brute_force_max_distance(const Metric& metric) {
  double best = 0.0;
  for (std::size_t i = 0; i < metric.count(); ++i) {
    for (std::size_t j = 0; j < metric.count(); ++j) {
      best = std::max(best, metric.distance(i, j));
    }
  }
  return best;
}

}  // namespace ctpe
