#include "ctpe/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ctpe/metric.hpp"

namespace ctpe {

EmbeddingCosineProblem generate_embedding_problem(std::size_t count, std::size_t dim, Rng& rng) {
  if (count < 2 || dim < 1) {
    throw std::invalid_argument("embedding problem needs C >= 2 and K >= 1");
  }
  std::vector<std::vector<double>> vectors(count, std::vector<double>(dim));
  for (auto& v : vectors) {
    do {
      for (auto& component : v) {
        component = uniform01(rng);
      }
    } while (std::all_of(v.begin(), v.end(), [](double c) { return c == 0.0; }));
  }
  const auto opt = static_cast<std::size_t>(uniform_index(rng, count));
  auto metric = embedding_cosine_metric(vectors);
  return EmbeddingCosineProblem{std::move(vectors), opt,
                                SearchSpace({Dimension::metric_categorical(std::move(metric))})};
}

PermutationShiftProblem generate_permutation_problem(std::size_t p, Rng& rng) {
  auto metric = permutation_l1_metric(p);
  const std::uint64_t opt_index = uniform_index(rng, factorial(p));
  const double bound = static_cast<double>(p);
  const double opt_shift = uniform_real(rng, -bound, bound);
  return PermutationShiftProblem{
      p, opt_index, opt_shift, unrank_permutation(opt_index, p),
      SearchSpace({Dimension::metric_categorical(std::move(metric)), Dimension::continuous(-bound, bound)})};
}

double embedding_cosine_eval(const EmbeddingCosineProblem& problem, std::size_t index) {
  if (index >= problem.vectors.size()) {
    throw std::out_of_range("embedding_cosine_eval: category index out of range");
  }
  if (index == problem.opt_index) {
    return 0.0;
  }
  const auto& a = problem.vectors[index];
  const auto& b = problem.vectors[problem.opt_index];
  const double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
  const double nb = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
  return std::max(0.0, 1.0 - dot / (na * nb));
}

double permutation_shift_eval(const PermutationShiftProblem& problem, std::size_t perm_index, double shift) {
  if (perm_index >= factorial(problem.p)) {
    throw std::out_of_range("permutation_shift_eval: permutation index out of range");
  }
  const double bound = static_cast<double>(problem.p);
  if (!(shift >= -bound && shift <= bound)) {
    throw std::out_of_range("permutation_shift_eval: shift outside [-p, p]");
  }
  const auto perm = unrank_permutation(perm_index, problem.p);
  const double offset = shift - problem.opt_shift;
  double total = 0.0;
  for (std::size_t k = 0; k < problem.p; ++k) {
    total += std::abs(static_cast<double>(perm[k] - problem.opt_perm[k]) + offset);
  }
  return total;
}

std::string ProblemDescriptor::label() const {
  std::ostringstream out;
  if (family == Family::EmbeddingCosine) {
    out << "embedding-cosine-C" << count << "-K" << dim;
  } else {
    out << "permutation-shift-l1-p" << p;
  }
  return out.str();
}

Problem make_problem(const ProblemDescriptor& descriptor) {
  Rng rng(descriptor.problem_seed);
  if (descriptor.family == ProblemDescriptor::Family::EmbeddingCosine) {
    return generate_embedding_problem(descriptor.count, descriptor.dim, rng);
  }
  return generate_permutation_problem(descriptor.p, rng);
}

const SearchSpace& problem_space(const Problem& problem) {
  return std::visit([](const auto& p) -> const SearchSpace& { return p.space; }, problem);
}

double evaluate(const Problem& problem, const ParamVector& x) {
  validate(problem_space(problem), x);
  if (const auto* e = std::get_if<EmbeddingCosineProblem>(&problem)) {
    return embedding_cosine_eval(*e, category_of(x[0]));
  }
  const auto& s = std::get<PermutationShiftProblem>(problem);
  return permutation_shift_eval(s, category_of(x[0]), x[1]);
}

double problem_optimum(const Problem&) { return 0.0; }

}  // namespace ctpe
