#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ctpe/bench.hpp"
#include "ctpe/metric.hpp"

using namespace ctpe;

namespace {

PermutationShiftProblem shift_problem(std::vector<int> opt, double opt_shift) {
  const std::size_t p = opt.size();
  return PermutationShiftProblem{p, rank_permutation(opt), opt_shift, opt,
                                 SearchSpace({Dimension::metric_categorical(permutation_l1_metric(p)),
                                              Dimension::continuous(-static_cast<double>(p), static_cast<double>(p))})};
}

}  // namespace

TEST_CASE("embedding problem generation") {
  Rng rng(1);
  const auto problem = generate_embedding_problem(500, 8, rng);
  CHECK(problem.vectors.size() == 500);
  CHECK(problem.opt_index < 500);
  for (const auto& v : problem.vectors) {
    REQUIRE(v.size() == 8);
    for (double c : v) {
      REQUIRE(c >= 0.0);
      REQUIRE(c <= 1.0);
    }
  }
  CHECK(problem.space.size() == 1);
  CHECK(problem.space[0].category_count() == 500);

  Rng a(9);
  Rng b(9);
  const auto pa = generate_embedding_problem(2, 1, a);
  const auto pb = generate_embedding_problem(2, 1, b);
  CHECK(pa.vectors == pb.vectors);
  CHECK(pa.opt_index == pb.opt_index);

  Rng big(3);
  const auto wide = generate_embedding_problem(1000, 1000, big);
  for (const auto& v : wide.vectors) {
    for (double c : v) {
      REQUIRE((c >= 0.0 && c <= 1.0));
    }
  }
  CHECK_THROWS_AS(generate_embedding_problem(1, 3, rng), std::invalid_argument);
}

TEST_CASE("embedding cosine objective") {
  const EmbeddingCosineProblem problem{{{1, 0}, {0, 1}, {1, 1}}, 0,
                                       SearchSpace({Dimension::metric_categorical(
                                           embedding_cosine_metric({{1, 0}, {0, 1}, {1, 1}}))})};
  CHECK(embedding_cosine_eval(problem, 0) == 0.0);
  CHECK(embedding_cosine_eval(problem, 1) == doctest::Approx(1.0));
  CHECK(embedding_cosine_eval(problem, 2) == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(embedding_cosine_eval(problem, 3), std::out_of_range);
}

TEST_CASE("embedding objective equals the attached metric to the optimum") {
  Rng rng(4);
  const auto problem = generate_embedding_problem(200, 5, rng);
  const auto& metric = *std::get<MetricCategorical>(problem.space[0].kind()).metric;
  for (std::size_t i = 0; i < 200; ++i) {
    REQUIRE(embedding_cosine_eval(problem, i) == metric.distance(i, problem.opt_index));
    REQUIRE(embedding_cosine_eval(problem, i) >= 0.0);
    REQUIRE(embedding_cosine_eval(problem, i) <= 1.0);
  }
}

TEST_CASE("permutation shift objective") {
  CHECK(permutation_shift_eval(shift_problem({3, 2, 1}, 0.5), rank_permutation(std::vector<int>{3, 2, 1}), 0.5) ==
        0.0);
  CHECK(permutation_shift_eval(shift_problem({3, 2, 1}, 0.5), rank_permutation(std::vector<int>{1, 2, 3}), 0.5) ==
        4.0);
  CHECK(permutation_shift_eval(shift_problem({1, 2}, 0.25), 0, 0.75) == 1.0);
  CHECK_THROWS_AS(permutation_shift_eval(shift_problem({1, 2}, 0), 2, 0.0), std::out_of_range);
  CHECK_THROWS_AS(permutation_shift_eval(shift_problem({1, 2}, 0), 0, 2.5), std::out_of_range);
}

TEST_CASE("permutation problem generation") {
  Rng rng(2);
  const auto problem = generate_permutation_problem(6, rng);
  CHECK(problem.opt_perm_index < 720);
  CHECK(std::abs(problem.opt_shift) <= 6.0);
  CHECK(problem.opt_perm == unrank_permutation(problem.opt_perm_index, 6));
  CHECK(problem.space.size() == 2);
  CHECK(problem.space[0].category_count() == 720);
  CHECK(permutation_shift_eval(problem, problem.opt_perm_index, problem.opt_shift) == 0.0);
}

TEST_CASE("problem optimum is zero and attained") {
  for (std::size_t p = 2; p <= 5; ++p) {
    const Problem problem = make_problem({ProblemDescriptor::Family::PermutationShiftL1, 0, 0, p, 11});
    const auto& shift = std::get<PermutationShiftProblem>(problem);
    // Exhaustive over permutations and a shift grid that contains a_opt.
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t r = 0; r < factorial(p); ++r) {
      for (int g = -20; g <= 20; ++g) {
        const double s = std::clamp(shift.opt_shift + 0.25 * g, -static_cast<double>(p), static_cast<double>(p));
        const double v = evaluate(problem, ParamVector{static_cast<double>(r), s});
        REQUIRE(v >= 0.0);
        best = std::min(best, v);
      }
    }
    CHECK(best == problem_optimum(problem));
  }
  const Problem emb = make_problem({ProblemDescriptor::Family::EmbeddingCosine, 50, 4, 0, 3});
  double best = 1.0;
  for (std::size_t i = 0; i < 50; ++i) {
    best = std::min(best, evaluate(emb, ParamVector{static_cast<double>(i)}));
  }
  CHECK(best == problem_optimum(emb));
}

TEST_CASE("descriptors rebuild identical instances") {
  const ProblemDescriptor desc{ProblemDescriptor::Family::EmbeddingCosine, 100, 3, 0, 77};
  const auto a = std::get<EmbeddingCosineProblem>(make_problem(desc));
  const auto b = std::get<EmbeddingCosineProblem>(make_problem(desc));
  CHECK(a.vectors == b.vectors);
  CHECK(a.opt_index == b.opt_index);
  CHECK(desc.label() == "embedding-cosine-C100-K3");
  CHECK(ProblemDescriptor{ProblemDescriptor::Family::PermutationShiftL1, 0, 0, 7, 0}.label() ==
        "permutation-shift-l1-p7");
  CHECK_THROWS_AS(evaluate(make_problem(desc), ParamVector{100}), ValidationError);
}
