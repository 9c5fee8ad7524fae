#include "ctpe/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

namespace ctpe {
namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view family_key(ProblemDescriptor::Family family) {
  return family == ProblemDescriptor::Family::EmbeddingCosine ? "embedding_cosine" : "permutation_shift_l1";
}

void reject_unknown_keys(const json& object, std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
  for (const auto& [key, _] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
T get_required(const json& object, const char* key, std::string_view where) {
  if (!object.contains(key)) {
    throw ConfigError("missing key '" + std::string(key) + "' in " + std::string(where));
  }
  try {
    return object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + std::string(where) + ": " + e.what());
  }
}

std::size_t get_count(const json& object, const char* key, std::string_view where) {
  const auto value = get_required<long long>(object, key, where);
  if (value < 0) {
    throw ConfigError("'" + std::string(key) + "' in " + std::string(where) + " must be nonnegative");
  }
  return static_cast<std::size_t>(value);
}

ProblemDescriptor parse_problem(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("each problem must be an object");
  }
  const auto family = get_required<std::string>(j, "family", "problem");
  ProblemDescriptor desc{};
  if (family == "embedding_cosine") {
    reject_unknown_keys(j, {"family", "C", "K", "problem_seed"}, "embedding_cosine problem");
    desc.family = ProblemDescriptor::Family::EmbeddingCosine;
    desc.count = get_count(j, "C", "embedding_cosine problem");
    desc.dim = get_count(j, "K", "embedding_cosine problem");
    if (desc.count < 2 || desc.dim < 1) {
      throw ConfigError("embedding_cosine problem needs C >= 2 and K >= 1");
    }
  } else if (family == "permutation_shift_l1") {
    reject_unknown_keys(j, {"family", "p", "problem_seed"}, "permutation_shift_l1 problem");
    desc.family = ProblemDescriptor::Family::PermutationShiftL1;
    desc.p = get_count(j, "p", "permutation_shift_l1 problem");
    if (desc.p < 2 || desc.p > 12) {
      throw ConfigError("permutation_shift_l1 problem needs 2 <= p <= 12");
    }
  } else {
    throw ConfigError("unknown problem family '" + family + "'");
  }
  desc.problem_seed = j.contains("problem_seed") ? get_required<std::uint64_t>(j, "problem_seed", "problem") : 0;
  return desc;
}

std::string problem_fragment(const ProblemDescriptor& desc) {
  std::ostringstream out;
  out << "{\"family\":\"" << family_key(desc.family) << "\",";
  if (desc.family == ProblemDescriptor::Family::EmbeddingCosine) {
    out << "\"C\":" << desc.count << ",\"K\":" << desc.dim << ",";
  } else {
    out << "\"p\":" << desc.p << ",";
  }
  out << "\"problem_seed\":" << desc.problem_seed << "}";
  return out.str();
}

OptimizerSpec parse_optimizer(const json& j) {
  if (j.is_string()) {
    return OptimizerSpec{parse_optimizer_name(j.get<std::string>()), {}, {}, {}};
  }
  if (!j.is_object()) {
    throw ConfigError("each optimizer must be a name or an object");
  }
  reject_unknown_keys(j, {"name", "n_startup", "n_candidates", "b"}, "optimizer");
  OptimizerSpec spec{parse_optimizer_name(get_required<std::string>(j, "name", "optimizer")), {}, {}, {}};
  if (j.contains("n_startup")) {
    spec.n_startup = get_count(j, "n_startup", "optimizer");
  }
  if (j.contains("n_candidates")) {
    spec.n_candidates = get_count(j, "n_candidates", "optimizer");
  }
  if (j.contains("b")) {
    spec.b = get_required<double>(j, "b", "optimizer");
  }
  try {
    spec.tpe_config(0).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("optimizer '") + std::string(optimizer_name(spec.kind)) + "': " + e.what());
  }
  return spec;
}

std::uint64_t shifted_seed(std::uint64_t seed, std::int64_t offset) {
  return seed + static_cast<std::uint64_t>(offset);
}

struct StudyTask {
  const ProblemDescriptor* descriptor;
  const Problem* problem;
  OptimizerSpec spec;
  std::uint64_t seed;
  std::string run_id;
  std::optional<double> b;
};

std::vector<TrialRecord> execute(const StudyTask& task, std::size_t budget) {
  const auto& space = problem_space(*task.problem);
  const Objective objective = [&](const ParamVector& x) { return evaluate(*task.problem, x); };
  std::vector<StudyTrial> trials;
  try {
    trials = run_study(space, objective, budget, task.spec.tpe_config(task.seed), task.spec.algorithm());
  } catch (const std::exception& e) {
    throw std::runtime_error("study failed for problem " + task.descriptor->label() + ", optimizer " +
                             std::string(optimizer_name(task.spec.kind)) + ", seed " + std::to_string(task.seed) +
                             ": " + e.what());
  }
  std::vector<TrialRecord> records;
  records.reserve(trials.size());
  for (auto& t : trials) {
    records.push_back(TrialRecord{task.run_id, task.spec.kind, *task.descriptor, task.seed, t.trial,
                                  std::move(t.params), t.value, t.best_value, task.b});
  }
  return records;
}

// Studies are independent; each writes only its own result slot, and the
// records are concatenated in task order so output never depends on scheduling.
std::vector<TrialRecord> execute_all(const std::vector<StudyTask>& tasks, std::size_t budget,
                                     std::size_t threads) {
  std::vector<std::vector<TrialRecord>> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        results[i] = execute(tasks[i], budget);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = std::min(threads, tasks.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
  }
  for (const auto& error : errors) {
    if (error) {
      std::rethrow_exception(error);
    }
  }
  std::vector<TrialRecord> records;
  for (auto& r : results) {
    std::move(r.begin(), r.end(), std::back_inserter(records));
  }
  return records;
}

void ensure_parent(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw std::runtime_error("cannot create output directory " + path.parent_path().string() + ": " +
                               ec.message());
    }
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
  if (!out.flush()) {
    throw std::runtime_error("error writing " + path.string());
  }
}

}  // namespace

std::string_view optimizer_name(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::Random:
      return "random";
    case OptimizerKind::Tpe:
      return "tpe";
    case OptimizerKind::MetricTpe:
      return "metric-tpe";
    case OptimizerKind::MetricTpeNoMod:
      return "metric-tpe-nomod";
  }
  return "unknown";
}

OptimizerKind parse_optimizer_name(std::string_view name) {
  for (auto kind : {OptimizerKind::Random, OptimizerKind::Tpe, OptimizerKind::MetricTpe,
                    OptimizerKind::MetricTpeNoMod}) {
    if (optimizer_name(kind) == name) {
      return kind;
    }
  }
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

TpeConfig OptimizerSpec::tpe_config(std::uint64_t seed) const {
  TpeConfig config;
  config.seed = seed;
  config.n_startup = n_startup.value_or(config.n_startup);
  config.n_candidates = n_candidates.value_or(config.n_candidates);
  config.b = b.value_or(config.b);
  config.metric_kernel_enabled = kind == OptimizerKind::MetricTpe || kind == OptimizerKind::MetricTpeNoMod;
  config.modification_enabled = kind == OptimizerKind::MetricTpe;
  return config;
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  reject_unknown_keys(j, {"budget", "seeds", "n_seeds", "output_dir", "threads", "problems", "optimizers", "b_grid"},
                      "config");
  ExperimentConfig config;
  if (j.contains("budget")) {
    config.budget = get_count(j, "budget", "config");
  }
  if (config.budget < 1) {
    throw ConfigError("budget must be >= 1");
  }
  if (j.contains("seeds") && j.contains("n_seeds")) {
    throw ConfigError("give either 'seeds' or 'n_seeds', not both");
  }
  if (j.contains("seeds")) {
    config.seeds = get_required<std::vector<std::uint64_t>>(j, "seeds", "config");
  } else {
    const std::size_t n = j.contains("n_seeds") ? get_count(j, "n_seeds", "config") : 10;
    for (std::size_t s = 0; s < n; ++s) {
      config.seeds.push_back(s);
    }
  }
  if (config.seeds.empty()) {
    throw ConfigError("seed list must not be empty");
  }
  if (std::set(config.seeds.begin(), config.seeds.end()).size() != config.seeds.size()) {
    throw ConfigError("seed list contains duplicates");
  }
  if (j.contains("output_dir")) {
    config.output_dir = get_required<std::string>(j, "output_dir", "config");
  }
  if (j.contains("threads")) {
    config.threads = get_count(j, "threads", "config");
  }
  if (!j.contains("problems") || !j["problems"].is_array() || j["problems"].empty()) {
    throw ConfigError("config needs a non-empty 'problems' array");
  }
  for (const auto& p : j["problems"]) {
    config.problems.push_back(parse_problem(p));
  }
  if (j.contains("optimizers")) {
    if (!j["optimizers"].is_array()) {
      throw ConfigError("'optimizers' must be an array");
    }
    for (const auto& o : j["optimizers"]) {
      config.optimizers.push_back(parse_optimizer(o));
    }
  }
  if (j.contains("b_grid")) {
    config.b_grid = get_required<std::vector<double>>(j, "b_grid", "config");
    for (const double b : config.b_grid) {
      if (!(b > 1.0) || !std::isfinite(b)) {
        throw ConfigError("b_grid values must be finite and > 1, got " + format_double(b));
      }
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string TrialRecord::optimizer_label() const {
  std::string label(optimizer_name(optimizer));
  if (b) {
    label += "(b=" + format_double(*b) + ")";
  }
  return label;
}

std::string format_record(const TrialRecord& r) {
  std::string line;
  line += "{\"run_id\":" + json(r.run_id).dump();
  line += ",\"optimizer\":\"" + std::string(optimizer_name(r.optimizer)) + "\"";
  line += ",\"problem\":" + problem_fragment(r.problem);
  line += ",\"seed\":" + std::to_string(r.seed);
  line += ",\"trial\":" + std::to_string(r.trial);
  line += ",\"params\":[";
  for (std::size_t i = 0; i < r.params.size(); ++i) {
    line += (i ? "," : "") + format_double(r.params[i]);
  }
  line += "],\"value\":" + format_double(r.value);
  line += ",\"best_value\":" + format_double(r.best_value);
  if (r.b) {
    line += ",\"b\":" + format_double(*r.b);
  }
  line += "}";
  return line;
}

TrialRecord parse_record(std::string_view line) {
  try {
    const json j = json::parse(line);
    TrialRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.optimizer = parse_optimizer_name(j.at("optimizer").get<std::string>());
    r.problem = parse_problem(j.at("problem"));
    r.seed = j.at("seed").get<std::uint64_t>();
    r.trial = j.at("trial").get<std::size_t>();
    r.params = j.at("params").get<std::vector<double>>();
    r.value = j.at("value").get<double>();
    r.best_value = j.at("best_value").get<double>();
    if (j.contains("b")) {
      r.b = j.at("b").get<double>();
    }
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed trial record: ") + e.what());
  }
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  using Group = std::pair<std::string, std::string>;  // (problem, optimizer)
  std::map<Group, std::map<std::size_t, std::map<std::uint64_t, double>>> groups;
  for (const auto& r : records) {
    auto& by_seed = groups[{r.problem.label(), r.optimizer_label()}][r.trial];
    if (!by_seed.emplace(r.seed, r.best_value).second) {
      throw std::invalid_argument("summarize: duplicate record for seed " + std::to_string(r.seed) + ", trial " +
                                  std::to_string(r.trial));
    }
  }
  std::vector<SummaryRow> rows;
  for (const auto& [group, trials] : groups) {
    std::set<std::uint64_t> seeds;
    for (const auto& [seed, _] : trials.begin()->second) {
      seeds.insert(seed);
    }
    for (const auto& [trial, by_seed] : trials) {
      std::set<std::uint64_t> here;
      for (const auto& [seed, _] : by_seed) {
        here.insert(seed);
      }
      if (here != seeds) {
        throw std::invalid_argument("summarize: inconsistent seed sets for " + group.second + " on " +
                                    group.first + " at trial " + std::to_string(trial));
      }
      const auto n = static_cast<double>(by_seed.size());
      double mean = 0.0;
      for (const auto& [_, v] : by_seed) {
        mean += v;
      }
      mean /= n;
      double ss = 0.0;
      for (const auto& [_, v] : by_seed) {
        ss += (v - mean) * (v - mean);
      }
      const double std_err = by_seed.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
      rows.push_back(SummaryRow{group.second, group.first, trial, mean, std_err});
    }
  }
  return rows;
}

std::string format_summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "optimizer,problem,trial,mean_best,std_err\n";
  for (const auto& row : rows) {
    out += row.optimizer + "," + row.problem + "," + std::to_string(row.trial) + "," + format_double(row.mean_best) +
           "," + format_double(row.std_err) + "\n";
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::int64_t seed_offset) {
  if (config.optimizers.empty()) {
    throw ConfigError("run needs at least one optimizer");
  }
  std::vector<Problem> problems;
  problems.reserve(config.problems.size());
  for (const auto& desc : config.problems) {
    problems.push_back(make_problem(desc));
  }
  std::vector<StudyTask> tasks;
  for (std::size_t p = 0; p < problems.size(); ++p) {
    for (const auto& spec : config.optimizers) {
      for (const auto seed : config.seeds) {
        const std::string run_id = config.problems[p].label() + "/" + std::string(optimizer_name(spec.kind));
        tasks.push_back(StudyTask{&config.problems[p], &problems[p], spec, shifted_seed(seed, seed_offset), run_id, {}});
      }
    }
  }
  ExperimentResult result;
  result.records = execute_all(tasks, config.budget, config.threads);
  result.summary = summarize(result.records);
  return result;
}

ExperimentResult run_ablation(const ExperimentConfig& config, std::int64_t seed_offset) {
  if (config.b_grid.empty()) {
    throw ConfigError("ablation needs a non-empty 'b_grid'");
  }
  OptimizerSpec base{OptimizerKind::MetricTpe, {}, {}, {}};
  for (const auto& spec : config.optimizers) {
    if (spec.kind == OptimizerKind::MetricTpe) {
      base = spec;
    }
  }
  std::vector<Problem> problems;
  problems.reserve(config.problems.size());
  for (const auto& desc : config.problems) {
    problems.push_back(make_problem(desc));
  }
  std::vector<StudyTask> tasks;
  for (std::size_t p = 0; p < problems.size(); ++p) {
    for (const double b : config.b_grid) {
      OptimizerSpec spec = base;
      spec.b = b;
      const std::string run_id = config.problems[p].label() + "/metric-tpe/b=" + format_double(b);
      for (const auto seed : config.seeds) {
        tasks.push_back(StudyTask{&config.problems[p], &problems[p], spec, shifted_seed(seed, seed_offset), run_id, b});
      }
    }
  }
  ExperimentResult result;
  result.records = execute_all(tasks, config.budget, config.threads);
  result.summary = summarize(result.records);
  return result;
}

void write_trial_log(const std::filesystem::path& path, const std::vector<TrialRecord>& records) {
  std::string text;
  for (const auto& r : records) {
    text += format_record(r);
    text += '\n';
  }
  write_text(path, text);
}

std::vector<TrialRecord> read_trial_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open trial log " + path.string());
  }
  std::vector<TrialRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      records.push_back(parse_record(line));
    }
  }
  return records;
}

void write_summary(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
  write_text(path, format_summary_csv(rows));
}

ExperimentResult run_experiment_to_disk(const ExperimentConfig& config, std::int64_t seed_offset) {
  auto result = run_experiment(config, seed_offset);
  write_trial_log(config.output_dir / "trials.jsonl", result.records);
  write_summary(config.output_dir / "summary.csv", result.summary);
  return result;
}

ExperimentResult run_ablation_to_disk(const ExperimentConfig& config, std::int64_t seed_offset) {
  auto result = run_ablation(config, seed_offset);
  write_trial_log(config.output_dir / "ablation_trials.jsonl", result.records);
  write_summary(config.output_dir / "ablation_summary.csv", result.summary);
  return result;
}

}  // namespace ctpe
