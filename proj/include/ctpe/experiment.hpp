#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctpe/bench.hpp"
#include "ctpe/sampler.hpp"
#include "ctpe/tpe_config.hpp"

namespace ctpe {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OptimizerKind { Random, Tpe, MetricTpe, MetricTpeNoMod };

std::string_view optimizer_name(OptimizerKind kind);
OptimizerKind parse_optimizer_name(std::string_view name);

struct OptimizerSpec {
  OptimizerKind kind;
  /// Overrides on top of the defaults; seed and the two kernel flags are
  /// set from `kind` and the seed list.
  std::optional<std::size_t> n_startup;
  std::optional<std::size_t> n_candidates;
  std::optional<double> b;

  TpeConfig tpe_config(std::uint64_t seed) const;
  Algorithm algorithm() const { return kind == OptimizerKind::Random ? Algorithm::Random : Algorithm::Tpe; }
};

struct ExperimentConfig {
  std::vector<ProblemDescriptor> problems;
  std::vector<OptimizerSpec> optimizers;
  std::vector<std::uint64_t> seeds;
  std::size_t budget = 100;
  std::filesystem::path output_dir = "results";
  std::vector<double> b_grid;
  /// 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

/// Parses the JSON config format; see README for the schema.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct TrialRecord {
  std::string run_id;
  OptimizerKind optimizer;
  ProblemDescriptor problem;
  std::uint64_t seed;
  std::size_t trial;
  ParamVector params;
  double value;
  double best_value;
  /// Exploration base; present only in ablation logs.
  std::optional<double> b;

  /// Optimizer column used when summarizing, e.g. "metric-tpe" or "metric-tpe(b=2)".
  std::string optimizer_label() const;
};

/// One JSON object per line with fixed key order and 17-significant-digit numbers.
std::string format_record(const TrialRecord& record);
TrialRecord parse_record(std::string_view line);

struct SummaryRow {
  std::string optimizer;
  std::string problem;
  std::size_t trial;
  double mean_best;
  double std_err;
};

/// Mean and standard error (sample std / sqrt(n)) of best_value over seeds,
/// per (optimizer, problem, trial), sorted by (problem, optimizer, trial).
/// Throws std::invalid_argument when the seed sets disagree across trials.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);

std::string format_summary_csv(const std::vector<SummaryRow>& rows);

struct ExperimentResult {
  std::vector<TrialRecord> records;
  std::vector<SummaryRow> summary;
};

/// Every (problem, optimizer, seed) study, records in that nesting order.
ExperimentResult run_experiment(const ExperimentConfig& config, std::int64_t seed_offset = 0);
/// metric-tpe with the modification enabled, once per (problem, b, seed).
ExperimentResult run_ablation(const ExperimentConfig& config, std::int64_t seed_offset = 0);

void write_trial_log(const std::filesystem::path& path, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_trial_log(const std::filesystem::path& path);
void write_summary(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);

/// Runs and writes `<output_dir>/trials.jsonl` and `<output_dir>/summary.csv`
/// (`ablation_trials.jsonl` / `ablation_summary.csv` for the ablation).
ExperimentResult run_experiment_to_disk(const ExperimentConfig& config, std::int64_t seed_offset = 0);
ExperimentResult run_ablation_to_disk(const ExperimentConfig& config, std::int64_t seed_offset = 0);

}  // namespace ctpe
