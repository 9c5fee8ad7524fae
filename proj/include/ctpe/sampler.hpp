#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ctpe/core.hpp"
#include "ctpe/random.hpp"
#include "ctpe/tpe_config.hpp"

namespace ctpe {

/// Uniform draw over every dimension.
ParamVector random_ask(const SearchSpace& space, Rng& rng);

/// Sequential ask/tell optimizer state shared by the TPE and random samplers.
class Sampler {
 public:
  Sampler(SearchSpace space, TpeConfig config);
  virtual ~Sampler() = default;

  /// Throws std::logic_error if the previous suggestion has not been told.
  ParamVector ask();
  /// Rejects non-finite values and invalid points without touching the history.
  void tell(const ParamVector& params, double value);

  const SearchSpace& space() const { return space_; }
  const TpeConfig& config() const { return config_; }
  const std::vector<Observation>& history() const { return history_; }
  bool has_pending() const { return pending_.has_value(); }

 protected:
  virtual ParamVector suggest() = 0;
  Rng& rng() { return rng_; }

 private:
  SearchSpace space_;
  TpeConfig config_;
  std::vector<Observation> history_;
  Rng rng_;
  std::optional<ParamVector> pending_;
};

class RandomSampler final : public Sampler {
 public:
  using Sampler::Sampler;

 protected:
  ParamVector suggest() override { return random_ask(space(), rng()); }
};

/// Random points for the first n_startup trials, then the candidate from the
/// good estimator with the largest log p_good - log p_bad.
class TpeSampler final : public Sampler {
 public:
  using Sampler::Sampler;

 protected:
  ParamVector suggest() override;
};

enum class Algorithm { Random, Tpe };

struct StudyTrial {
  std::size_t trial;
  ParamVector params;
  double value;
  double best_value;
};

class ObjectiveError : public std::runtime_error {
 public:
  ObjectiveError(std::size_t trial, const std::string& what) : std::runtime_error(what), trial_(trial) {}
  std::size_t trial() const { return trial_; }

 private:
  std::size_t trial_;
};

using Objective = std::function<double(const ParamVector&)>;

/// Runs `budget` ask/tell rounds. Throws ObjectiveError if the objective
/// returns a non-finite value.
std::vector<StudyTrial> run_study(const SearchSpace& space, const Objective& objective, std::size_t budget,
                                  const TpeConfig& config, Algorithm algorithm = Algorithm::Tpe);

}  // namespace ctpe
