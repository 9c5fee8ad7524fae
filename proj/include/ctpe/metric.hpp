#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "ctpe/core.hpp"

namespace ctpe {

enum class CachePolicy {
  FullMatrix,  ///< all C x C distances materialized at construction
  PerRow,      ///< rows memoized on first request, bounded memory
  None,        ///< every request re-evaluates the distance function
};

/// Categories that fit in a dense matrix; larger spaces fall back to per-row caching.
inline constexpr std::size_t kFullMatrixLimit = 1024;

/// A distance over the category indices [0, count).
///
/// Immutable after construction. The per-row memo is guarded by a mutex so a
/// single handle may be shared by studies running on different threads.
class Metric {
 public:
  using DistanceFn = std::function<double(std::size_t, std::size_t)>;
  using Row = std::shared_ptr<const std::vector<double>>;

  /// `policy` defaults to FullMatrix when count <= kFullMatrixLimit, else PerRow.
  Metric(std::size_t count, DistanceFn dist, std::optional<CachePolicy> policy = std::nullopt);

  std::size_t count() const { return count_; }
  CachePolicy cache_policy() const { return policy_; }

  double distance(std::size_t i, std::size_t j) const;

  /// Distances from category i to every category, in index order.
  Row row(std::size_t i) const;

 private:
  Row compute_row(std::size_t i) const;

  std::size_t count_;
  DistanceFn dist_;
  CachePolicy policy_;
  std::vector<double> matrix_;
  std::size_t row_capacity_ = 0;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::size_t, Row> rows_;
};

/// Hamming distance between base-`arity` digit strings of length `length`.
/// Category i decodes to the digits of i, least significant first.
MetricHandle hamming_metric(std::size_t length, std::size_t arity);

/// Permutations of {1..p} ranked lexicographically, with L1 distance.
inline constexpr std::size_t kMaxPermutationLength = 12;
MetricHandle permutation_l1_metric(std::size_t p);

/// 1 - cosine similarity between embedding vectors. This is not a true
/// metric: it can violate the triangle inequality.
MetricHandle embedding_cosine_metric(std::vector<std::vector<double>> vectors);

/// 0 on the diagonal, 1 elsewhere.
MetricHandle delta_metric(std::size_t count);

/// User-supplied metrics are checked against the metric axioms on
/// `triples` random index triples before use.
MetricHandle custom_metric(std::size_t count, Metric::DistanceFn dist,
                           std::optional<CachePolicy> policy = std::nullopt,
                           std::size_t triples = 1000, std::uint64_t seed = 0);
MetricHandle matrix_metric(std::vector<std::vector<double>> matrix, std::size_t triples = 1000,
                           std::uint64_t seed = 0);

/// Reads the plain-text distance matrix format: a first line holding C,
/// then C rows of C whitespace-separated nonnegative reals.
MetricHandle load_distance_matrix(const std::filesystem::path& path);

/// Samples `triples` random index triples and throws std::invalid_argument
/// naming the first violated axiom. `tolerance` is relative to the largest
/// distance in the triple.
void check_metric_axioms(const Metric& metric, std::size_t triples, std::uint64_t seed,
                         double tolerance = 1e-9);

/// Per-basis maximum distance max_x dist(x, basis) for each basis.
struct MaxDistanceEstimate {
  std::map<std::size_t, double> per_basis;
};

/// Costs count() distance evaluations per distinct basis (fewer when rows are cached).
MaxDistanceEstimate approx_max_distance(const Metric& metric, std::span<const std::size_t> bases);

/// Exact max over all pairs. Quadratic; used as a reference.
double brute_force_max_distance(const Metric& metric);

/// Lexicographic rank <-> permutation of {1..p}.
std::vector<int> unrank_permutation(std::uint64_t rank, std::size_t p);
std::uint64_t rank_permutation(std::span<const int> perm);
std::uint64_t factorial(std::size_t n);

}  // namespace ctpe
