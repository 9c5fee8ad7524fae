// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//
//   acceptance [--work-dir DIR] [--only N]...

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctpe/experiment.hpp"
#include "ctpe/metric.hpp"
#include "ctpe/parzen.hpp"
#include "ctpe/sampler.hpp"

using namespace ctpe;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

ExperimentConfig paper_config(const std::filesystem::path& out, std::size_t n_seeds) {
  ExperimentConfig config;
  config.problems = {
      {ProblemDescriptor::Family::EmbeddingCosine, 500, 8, 0, 1},
      {ProblemDescriptor::Family::EmbeddingCosine, 1000, 16, 0, 1},
      {ProblemDescriptor::Family::PermutationShiftL1, 0, 0, 6, 1},
      {ProblemDescriptor::Family::PermutationShiftL1, 0, 0, 7, 1},
  };
  for (auto kind : {OptimizerKind::Random, OptimizerKind::Tpe, OptimizerKind::MetricTpe,
                    OptimizerKind::MetricTpeNoMod}) {
    config.optimizers.push_back(OptimizerSpec{kind, {}, {}, {}});
  }
  for (std::size_t s = 0; s < n_seeds; ++s) {
    config.seeds.push_back(s);
  }
  config.budget = 100;
  config.output_dir = out;
  config.b_grid = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  return config;
}

// (problem label, optimizer label) -> final-trial summary row
std::map<std::pair<std::string, std::string>, SummaryRow> final_rows(const std::vector<SummaryRow>& summary,
                                                                     std::size_t budget) {
  std::map<std::pair<std::string, std::string>, SummaryRow> out;
  for (const auto& row : summary) {
    if (row.trial + 1 == budget) {
      out[{row.problem, row.optimizer}] = row;
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

ParamVector random_point(const SearchSpace& space, Rng& rng) { return random_ask(space, rng); }

// 1. Delta-metric TPE without the modification behaves exactly like plain categorical TPE.
Outcome fallback_equivalence() {
  Rng rng(20240601);
  std::size_t compared = 0;
  for (int c = 0; c < 1000; ++c) {
    const std::size_t count = 2 + uniform_index(rng, 49);
    const std::size_t n = 1 + uniform_index(rng, 30);
    TpeConfig config;
    config.seed = rng();
    config.modification_enabled = false;
    config.n_startup = uniform_index(rng, n + 1);
    const SearchSpace plain({Dimension::categorical(count)});
    const SearchSpace delta({Dimension::metric_categorical(delta_metric(count))});
    TpeSampler a(plain, config);
    TpeSampler b(delta, config);
    std::vector<double> table(count);
    for (auto& v : table) {
      v = uniform01(rng);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = random_point(plain, rng);
      const double v = uniform01(rng);
      a.tell(x, v);
      b.tell(x, v);
    }
    for (int round = 0; round < 5; ++round) {
      const auto xa = a.ask();
      const auto xb = b.ask();
      if (xa != xb) {
        return {false, "case " + std::to_string(c) + " diverged at round " + std::to_string(round)};
      }
      const double v = table[category_of(xa[0])];
      a.tell(xa, v);
      b.tell(xb, v);
      ++compared;
    }
  }
  return {true, "1000 cases, " + std::to_string(compared) + " suggestions identical"};
}

// 2. per_basis <= M^max <= 2 per_basis on random embedding metrics.
Outcome approximation_bound() {
  Rng rng(7);
  std::map<std::string, int> failures;
  std::map<std::string, int> cases;
  double worst_ratio = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t count = 2 + uniform_index(rng, 199);
    const std::size_t dim = 1 + uniform_index(rng, 8);
    std::vector<std::vector<double>> v(count, std::vector<double>(dim));
    for (auto& row : v) {
      for (auto& x : row) {
        x = uniform_real(rng, 0.01, 1.0);
      }
    }
    const int kind = t % 3;
    MetricHandle metric;
    std::string name;
    if (kind == 0) {
      name = "L1";
      metric = std::make_shared<Metric>(count, [v](std::size_t i, std::size_t j) {
        double d = 0.0;
        for (std::size_t k = 0; k < v[i].size(); ++k) {
          d += std::abs(v[i][k] - v[j][k]);
        }
        return d;
      });
    } else if (kind == 1) {
      name = "L2";
      metric = std::make_shared<Metric>(count, [v](std::size_t i, std::size_t j) {
        double d = 0.0;
        for (std::size_t k = 0; k < v[i].size(); ++k) {
          d += (v[i][k] - v[j][k]) * (v[i][k] - v[j][k]);
        }
        return std::sqrt(d);
      });
    } else {
      name = "cosine";
      metric = embedding_cosine_metric(v);
    }
    ++cases[name];
    const double global = brute_force_max_distance(*metric);
    std::vector<std::size_t> all(count);
    std::iota(all.begin(), all.end(), 0);
    const auto est = approx_max_distance(*metric, all);
    bool ok = true;
    for (const auto& [basis, value] : est.per_basis) {
      if (value > global + 1e-12 || global > 2.0 * value + 1e-12) {
        ok = false;
      }
      if (value > 0.0) {
        worst_ratio = std::max(worst_ratio, global / value);
      }
    }
    failures[name] += ok ? 0 : 1;
  }
  std::string detail;
  bool pass = true;
  for (const auto& [name, n] : cases) {
    detail += name + " " + std::to_string(n - failures[name]) + "/" + std::to_string(n) + " ok; ";
    pass = pass && failures[name] == 0;
  }
  detail += "max M^max/per_basis = " + fmt(worst_ratio);
  return {pass, detail};
}

// 3. Discrete mixtures sum to 1; with a continuous dimension the density integrates to 1.
Outcome density_normalization() {
  Rng rng(11);
  double worst_discrete = 0.0;
  double worst_continuous = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<Dimension> dims;
    std::size_t combos = 1;
    const std::size_t n_dims = 1 + uniform_index(rng, 3);
    for (std::size_t d = 0; d < n_dims; ++d) {
      const std::size_t limit = 500 / combos;
      if (limit < 2) {
        break;
      }
      const std::size_t count = 2 + uniform_index(rng, std::min<std::size_t>(limit, 60) - 1);
      combos *= count;
      switch (uniform_index(rng, 3)) {
        case 0:
          dims.push_back(Dimension::categorical(count));
          break;
        case 1: {
          std::vector<std::vector<double>> v(count, std::vector<double>(3));
          for (auto& row : v) {
            for (auto& x : row) {
              x = uniform_real(rng, 0.01, 1.0);
            }
          }
          dims.push_back(Dimension::metric_categorical(embedding_cosine_metric(v)));
          break;
        }
        default:
          dims.push_back(Dimension::metric_categorical(delta_metric(count)));
      }
    }
    TpeConfig config;
    config.modification_enabled = uniform_index(rng, 2) == 0;
    const std::size_t n_obs = uniform_index(rng, 11);

    auto enumerate = [](const SearchSpace& space, const std::function<void(const ParamVector&)>& visit) {
      std::vector<std::size_t> idx(space.size(), 0);
      while (true) {
        ParamVector x(space.size());
        for (std::size_t d = 0; d < space.size(); ++d) {
          x[d] = static_cast<double>(idx[d]);
        }
        visit(x);
        std::size_t d = 0;
        while (d < space.size() && ++idx[d] == space[d].category_count()) {
          idx[d++] = 0;
        }
        if (d == space.size()) {
          return;
        }
      }
    };

    const SearchSpace discrete(dims);
    std::vector<Observation> obs;
    for (std::size_t i = 0; i < n_obs; ++i) {
      obs.push_back(Observation{random_point(discrete, rng), uniform01(rng)});
    }
    const auto est = ParzenEstimator::build(obs, discrete, config);
    double total = 0.0;
    enumerate(discrete, [&](const ParamVector& x) { total += std::exp(est.log_pdf(x)); });
    worst_discrete = std::max(worst_discrete, std::abs(total - 1.0));

    // Same discrete part plus one continuous dimension.
    auto with_cont = dims;
    with_cont.push_back(Dimension::continuous(-1.0, 3.0));
    const SearchSpace mixed(with_cont);
    std::vector<Observation> mixed_obs;
    for (const auto& o : obs) {
      auto x = o.params;
      x.push_back(uniform_real(rng, -1.0, 3.0));
      mixed_obs.push_back(Observation{x, o.value});
    }
    const auto mixed_est = ParzenEstimator::build(mixed_obs, mixed, config);
    const int points = 10000;
    const double step = 4.0 / points;
    double integral = 0.0;
    enumerate(discrete, [&](const ParamVector& x) {
      ParamVector y = x;
      y.push_back(0.0);
      for (int i = 0; i <= points; ++i) {
        y.back() = -1.0 + i * step;
        const double w = (i == 0 || i == points) ? 0.5 : 1.0;
        integral += w * step * std::exp(mixed_est.log_pdf_unchecked(y));
      }
    });
    worst_continuous = std::max(worst_continuous, std::abs(integral - 1.0));
  }
  const bool pass = worst_discrete < 1e-9 && worst_continuous < 1e-3;
  return {pass, "max |sum - 1| = " + fmt(worst_discrete, 3) + " (tol 1e-9); max |integral - 1| = " +
                    fmt(worst_continuous, 3) + " (tol 1e-3)"};
}

// 4. 1e5 draws from a fixed 20-category estimator match its analytic pmf.
Outcome sampling_oracle() {
  Rng rng(5);
  std::vector<std::vector<double>> v(20, std::vector<double>(4));
  for (auto& row : v) {
    for (auto& x : row) {
      x = uniform_real(rng, 0.01, 1.0);
    }
  }
  const SearchSpace space({Dimension::metric_categorical(embedding_cosine_metric(v))});
  std::vector<Observation> obs;
  for (int i = 0; i < 6; ++i) {
    obs.push_back(Observation{random_point(space, rng), uniform01(rng)});
  }
  const auto est = ParzenEstimator::build(obs, space, TpeConfig{});
  const auto pmf = est.marginal_pmf(0);
  const std::size_t n = 100000;
  std::vector<double> freq(20, 0.0);
  for (const auto& x : est.sample(rng, n)) {
    freq[category_of(x[0])] += 1.0 / static_cast<double>(n);
  }
  double tv = 0.0;
  for (std::size_t c = 0; c < 20; ++c) {
    tv += 0.5 * std::abs(freq[c] - pmf[c]);
  }
  return {tv < 0.02, "total variation = " + fmt(tv, 4) + " (tol 0.02)"};
}

struct ProtocolChecks {
  Outcome superiority;
  Outcome non_degradation;
};

ProtocolChecks protocol_checks(const ExperimentResult& result, const ExperimentConfig& config) {
  const auto rows = final_rows(result.summary, config.budget);
  int better = 0;
  int separated = 0;
  int no_worse = 0;
  bool strictly_better_large = false;
  std::string detail5;
  std::string detail6;
  for (const auto& desc : config.problems) {
    const auto label = desc.label();
    const auto& metric = rows.at({label, "metric-tpe"});
    const auto& tpe = rows.at({label, "tpe"});
    const auto& nomod = rows.at({label, "metric-tpe-nomod"});
    better += metric.mean_best < tpe.mean_best ? 1 : 0;
    const bool apart = metric.mean_best + metric.std_err < tpe.mean_best - tpe.std_err;
    separated += apart ? 1 : 0;
    detail5 += label + ": " + fmt(metric.mean_best, 4) + "+-" + fmt(metric.std_err, 3) + " vs tpe " +
               fmt(tpe.mean_best, 4) + "+-" + fmt(tpe.std_err, 3) + (apart ? " (apart); " : " (overlap); ");
    no_worse += metric.mean_best <= nomod.mean_best + nomod.std_err ? 1 : 0;
    const bool large = (desc.family == ProblemDescriptor::Family::EmbeddingCosine && desc.count == 1000) ||
                       (desc.family == ProblemDescriptor::Family::PermutationShiftL1 && desc.p == 7);
    if (large && metric.mean_best < nomod.mean_best) {
      strictly_better_large = true;
    }
    detail6 += label + ": " + fmt(metric.mean_best, 4) + " vs nomod " + fmt(nomod.mean_best, 4) + "+-" +
               fmt(nomod.std_err, 3) + "; ";
  }
  const int n = static_cast<int>(config.problems.size());
  ProtocolChecks checks;
  checks.superiority = {better == n && separated >= 3,
                        std::to_string(better) + "/" + std::to_string(n) + " lower means, " +
                            std::to_string(separated) + "/" + std::to_string(n) + " separated bands. " + detail5};
  checks.non_degradation = {no_worse == n && strictly_better_large,
                            std::to_string(no_worse) + "/" + std::to_string(n) +
                                " within 1 SE, strictly better on a large problem: " +
                                (strictly_better_large ? "yes. " : "no. ") + detail6};
  return checks;
}

Outcome ablation_check(const std::filesystem::path& work_dir) {
  std::string detail;
  for (std::size_t n_seeds : {10u, 30u}) {
    auto config = paper_config(work_dir / ("ablation_" + std::to_string(n_seeds)), n_seeds);
    const auto result = run_ablation_to_disk(config);
    const auto rows = final_rows(result.summary, config.budget);
    const std::string big = ProblemDescriptor{ProblemDescriptor::Family::EmbeddingCosine, 1000, 16, 0, 1}.label();
    const double b2 = rows.at({big, "metric-tpe(b=2)"}).mean_best;
    const double b10 = rows.at({big, "metric-tpe(b=10)"}).mean_best;
    const std::size_t expected = config.problems.size() * config.b_grid.size() * n_seeds;
    const std::size_t studies = result.records.size() / config.budget;
    detail += std::to_string(n_seeds) + " seeds: " + std::to_string(studies) + "/" + std::to_string(expected) +
              " studies, b=2 " + fmt(b2, 4) + " vs b=10 " + fmt(b10, 4) + "; ";
    if (studies == expected && b2 < b10) {
      return {true, detail};
    }
  }
  return {false, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::filesystem::path work_dir = "acceptance_runs";
  std::vector<int> only;
  app.add_option("--work-dir", work_dir, "Directory for experiment outputs");
  app.add_option("--only", only, "Run only these criterion numbers");
  CLI11_PARSE(app, argc, argv);

  auto wanted = [&](int n) { return only.empty() || std::find(only.begin(), only.end(), n) != only.end(); };
  int failures = 0;
  auto report = [&](int n, const std::string& name, const Outcome& outcome, double seconds) {
    std::printf("[%s] criterion %d: %s (%.1fs) -- %s\n", outcome.pass ? "PASS" : "FAIL", n, name.c_str(), seconds,
                outcome.detail.c_str());
    std::fflush(stdout);
    failures += outcome.pass ? 0 : 1;
  };
  auto timed = [&](int n, const std::string& name, const std::function<Outcome()>& check) {
    if (!wanted(n)) {
      return;
    }
    const auto start = std::chrono::steady_clock::now();
    const Outcome outcome = check();
    report(n, name, outcome, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  };

  timed(1, "fallback equivalence", fallback_equivalence);
  timed(2, "approximation bound", approximation_bound);
  timed(3, "density normalization", density_normalization);
  timed(4, "sampling oracle", sampling_oracle);

  if (wanted(5) || wanted(6) || wanted(8)) {
    const auto start = std::chrono::steady_clock::now();
    const auto config = paper_config(work_dir / "paper_a", 10);
    const auto result = run_experiment_to_disk(config);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto checks = protocol_checks(result, config);
    const std::size_t expected_records =
        config.problems.size() * config.optimizers.size() * config.seeds.size() * config.budget;
    if (wanted(5)) {
      Outcome outcome = checks.superiority;
      if (result.records.size() != expected_records) {
        outcome.pass = false;
      }
      outcome.detail = std::to_string(result.records.size()) + " records. " + outcome.detail;
      report(5, "paper protocol: metric-tpe beats tpe", outcome, seconds);
    }
    if (wanted(6)) {
      report(6, "modification non-degradation", checks.non_degradation, 0.0);
    }
    if (wanted(8)) {
      const auto again_start = std::chrono::steady_clock::now();
      auto again = config;
      again.output_dir = work_dir / "paper_b";
      run_experiment_to_disk(again);
      const bool same = read_file(config.output_dir / "trials.jsonl") == read_file(again.output_dir / "trials.jsonl");
      report(8, "determinism", {same, same ? "trial logs byte-identical" : "trial logs differ"},
             std::chrono::duration<double>(std::chrono::steady_clock::now() - again_start).count());
    }
  }
  timed(7, "ablation harness", [&] { return ablation_check(work_dir); });

  std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
