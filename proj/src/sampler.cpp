#include "ctpe/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "ctpe/parzen.hpp"

namespace ctpe {

ParamVector random_ask(const SearchSpace& space, Rng& rng) {
  ParamVector x(space.size());
  for (std::size_t d = 0; d < space.size(); ++d) {
    if (const auto* c = std::get_if<Continuous>(&space[d].kind())) {
      x[d] = uniform_real(rng, c->low, c->high);
    } else {
      x[d] = static_cast<double>(uniform_index(rng, space[d].category_count()));
    }
  }
  return x;
}

Sampler::Sampler(SearchSpace space, TpeConfig config)
    : space_(std::move(space)), config_(config), rng_(config.seed) {
  config_.validate();
}

ParamVector Sampler::ask() {
  if (pending_) {
    throw std::logic_error("ask called while a previous suggestion awaits tell");
  }
  ParamVector x = suggest();
  pending_ = x;
  return x;
}

void Sampler::tell(const ParamVector& params, double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("tell: objective value must be finite");
  }
  validate(space_, params);
  history_.push_back(Observation{params, value});
  pending_.reset();
}

ParamVector TpeSampler::suggest() {
  const auto& observed = history();
  if (observed.size() < config().n_startup) {
    return random_ask(space(), rng());
  }
  const auto split = split_observations(observed);
  const auto good = ParzenEstimator::build(split.good, space(), config());
  const auto bad = ParzenEstimator::build(split.bad, space(), config());
  auto candidates = good.sample(rng(), config().n_candidates);

  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double score = good.log_pdf_unchecked(candidates[i]) - bad.log_pdf_unchecked(candidates[i]);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return std::move(candidates[best]);
}

std::vector<StudyTrial> run_study(const SearchSpace& space, const Objective& objective, std::size_t budget,
                                  const TpeConfig& config, Algorithm algorithm) {
  if (budget < 1) {
    throw std::invalid_argument("run_study: budget must be >= 1");
  }
  std::unique_ptr<Sampler> sampler;
  if (algorithm == Algorithm::Random) {
    sampler = std::make_unique<RandomSampler>(space, config);
  } else {
    sampler = std::make_unique<TpeSampler>(space, config);
  }
  std::vector<StudyTrial> trials;
  trials.reserve(budget);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < budget; ++t) {
    ParamVector x = sampler->ask();
    const double value = objective(x);
    if (!std::isfinite(value)) {
      throw ObjectiveError(t, "objective returned a non-finite value at trial " + std::to_string(t));
    }
    sampler->tell(x, value);
    best = std::min(best, value);
    trials.push_back(StudyTrial{t, std::move(x), value, best});
  }
  return trials;
}

}  // namespace ctpe
