#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ctpe/core.hpp"
#include "ctpe/random.hpp"

namespace ctpe {

/// Minimize 1 - cosine(v_x, v_opt) over C random embeddings in [0, 1]^K.
/// The single dimension carries the same cosine distance as its metric.
struct EmbeddingCosineProblem {
  std::vector<std::vector<double>> vectors;
  std::size_t opt_index;
  SearchSpace space;
};

/// Minimize || s - s_opt + (a - a_opt) 1_p ||_1 over permutations s of
/// {1..p} and shifts a in [-p, p]. The permutation dimension uses L1 distance.
struct PermutationShiftProblem {
  std::size_t p;
  std::uint64_t opt_perm_index;
  double opt_shift;
  std::vector<int> opt_perm;
  SearchSpace space;
};

EmbeddingCosineProblem generate_embedding_problem(std::size_t count, std::size_t dim, Rng& rng);
PermutationShiftProblem generate_permutation_problem(std::size_t p, Rng& rng);

double embedding_cosine_eval(const EmbeddingCosineProblem& problem, std::size_t index);
double permutation_shift_eval(const PermutationShiftProblem& problem, std::size_t perm_index, double shift);

/// Compact, serializable recipe for a problem instance.
struct ProblemDescriptor {
  enum class Family { EmbeddingCosine, PermutationShiftL1 };
  Family family;
  std::size_t count = 0;  ///< C, embedding cosine only
  std::size_t dim = 0;    ///< K, embedding cosine only
  std::size_t p = 0;      ///< permutation shift only
  std::uint64_t problem_seed = 0;

  /// e.g. "embedding-cosine-C500-K8" or "permutation-shift-l1-p6".
  std::string label() const;
};

using Problem = std::variant<EmbeddingCosineProblem, PermutationShiftProblem>;

/// Rebuilds the instance from its descriptor; pure in (parameters, seed).
Problem make_problem(const ProblemDescriptor& descriptor);
const SearchSpace& problem_space(const Problem& problem);
/// Objective on a full parameter vector of the problem's space.
double evaluate(const Problem& problem, const ParamVector& x);
/// Analytic optimum value (0 for both families).
double problem_optimum(const Problem& problem);

}  // namespace ctpe
