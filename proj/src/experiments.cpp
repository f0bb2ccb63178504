#include "dbt/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace dbt {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(seed ^ splitmix64(a + 0x6b43)) ^ splitmix64(b + 0x2f17));
}

constexpr StrategyTag kTagOrder[] = {StrategyTag::truthful, StrategyTag::heuristic,
                                     StrategyTag::permutation, StrategyTag::mixed};

WorkerStrategy strategy_for(StrategyTag tag, int k, Rng& rng) {
  switch (tag) {
    case StrategyTag::truthful: return truthful_strategy(k);
    case StrategyTag::heuristic: return uniform_heuristic_strategy(k);
    case StrategyTag::permutation: return permutation_strategy(k);
    case StrategyTag::mixed: return mixed_strategy(k, rng);
  }
  throw std::logic_error("unreachable");
}

// Diagonal-heavy symmetric trust: t on the diagonal, the rest uniform.
StochasticMatrix diagonal_trust(int k, double t) {
  const std::size_t n = static_cast<std::size_t>(k);
  Matrix m(n, n, (1.0 - t) / (k - 1));
  for (std::size_t i = 0; i < n; ++i) m(i, i) = t;
  return StochasticMatrix(std::move(m));
}

}  // namespace

MeanStd mean_std(std::span<const double> xs) {
  MeanStd out;
  out.n = static_cast<std::int64_t>(xs.size());
  if (out.n == 0) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(out.n);
  if (out.n > 1) {
    double sq = 0.0;
    for (double x : xs) sq += (x - out.mean) * (x - out.mean);
    out.stddev = std::sqrt(sq / static_cast<double>(out.n - 1));
  }
  return out;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Full mechanism run with simulated workers.

namespace {

class SimulatedWorkerStream final : public WorkerStream {
 public:
  SimulatedWorkerStream(const ExperimentConfig& config, GroundTruthTable& truths, Rng& rng)
      : config_(config), truths_(truths), rng_(rng), remaining_(config.total_workers()) {}

  std::optional<WorkerHandle> next() override {
    if (remaining_ <= 0) return std::nullopt;
    --remaining_;
    const int index = index_++;
    const StrategyTag tag =
        kTagOrder[static_cast<std::size_t>(rng_.categorical(config_.strategy_mix))];
    const int k = config_.mechanism.answer_space.k;
    auto spec = std::make_shared<WorkerSpec>(
        WorkerSpec{"w" + std::to_string(index), sample_proficiency(config_.proficiency, rng_),
                   strategy_for(tag, k, rng_), tag});
    return WorkerHandle{
        spec->id, to_string(tag), [this, spec](const Batch& batch) {
          truths_.ensure(batch.fresh_tasks, config_.mechanism.prior, rng_);
          return simulate_submission(*spec, batch, truths_, rng_);
        }};
  }

 private:
  const ExperimentConfig& config_;
  GroundTruthTable& truths_;
  Rng& rng_;
  int remaining_;
  int index_ = 0;
};

}  // namespace

SimulationOutput run_simulation(const ExperimentConfig& config, std::uint64_t seed,
                                bool keep_exports) {
  config.validate();
  Rng rng(derive_seed(seed, 0x0a11));
  const Prior& prior = config.mechanism.prior;
  const int k = config.mechanism.answer_space.k;

  TaskSupply supply;
  GroundTruthTable truths;

  // Gold seed: the oracle solves s_o tasks with identity trust, so its
  // stored answers are the ground truths themselves.
  std::vector<TaskAnswer> oracle_answers;
  oracle_answers.reserve(static_cast<std::size_t>(config.mechanism.s_o));
  for (int i = 0; i < config.mechanism.s_o; ++i) {
    const TaskId id = *supply.next();
    const TaskId ids[] = {id};
    truths.ensure(ids, prior, rng);
    oracle_answers.push_back({id, truths.label(id)});
  }

  Mechanism mechanism(config.mechanism, std::move(oracle_answers),
                      StochasticMatrix::identity(k));
  SimulatedWorkerStream stream(config, truths, rng);
  const RunReport report = run_mechanism(mechanism, stream, supply);

  SimulationOutput out{mechanism.ledger().evaluations(), report, "", ""};
  if (keep_exports) {
    out.ledger_csv = mechanism.ledger().to_csv();
    out.pool_json = mechanism.export_pool_json();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reward distribution experiment.

RewardDistributionResult run_reward_distribution(const ExperimentConfig& config) {
  config.validate();
  std::vector<SimulationOutput> outputs(static_cast<std::size_t>(config.repeats));
  parallel_for(outputs.size(), [&](std::size_t r) {
    outputs[r] = run_simulation(config, derive_seed(config.seed, 0xd157, r));
  });

  RewardDistributionResult result;
  std::map<std::string, std::vector<double>> by_tag;
  for (std::size_t r = 0; r < outputs.size(); ++r)
    for (const LedgerEvaluation& eval : outputs[r].evaluations) {
      result.samples.push_back({static_cast<int>(r), eval});
      by_tag[eval.strategy_tag].push_back(eval.reward);
    }
  for (StrategyTag tag : kTagOrder) {
    const auto it = by_tag.find(to_string(tag));
    if (it == by_tag.end()) continue;
    const MeanStd ms = mean_std(it->second);
    result.summary.push_back({it->first, config.mechanism.s_o, ms.mean, ms.stddev, ms.n});
  }
  return result;
}

// ---------------------------------------------------------------------------
// Shared-task robustness sweep.

SweepResult run_shared_task_sweep(const ExperimentConfig& config) {
  config.validate();
  SweepResult result;
  for (std::size_t si = 0; si < config.shared_task_sweep.size(); ++si) {
    const int s = config.shared_task_sweep[si];
    ExperimentConfig point = config;
    point.mechanism.s_o = s;
    if (point.mechanism.s_n < s) point.mechanism.s_n = s;

    std::vector<SimulationOutput> outputs(static_cast<std::size_t>(config.repeats));
    parallel_for(outputs.size(), [&](std::size_t r) {
      outputs[r] = run_simulation(point, derive_seed(config.seed, 0x5000 + si, r));
    });

    std::map<std::string, std::vector<double>> run_means;
    for (std::size_t r = 0; r < outputs.size(); ++r) {
      std::map<std::string, std::vector<double>> by_tag;
      for (const LedgerEvaluation& eval : outputs[r].evaluations)
        by_tag[eval.strategy_tag].push_back(eval.reward);
      for (StrategyTag tag : kTagOrder) {
        const auto it = by_tag.find(to_string(tag));
        if (it == by_tag.end()) continue;
        const MeanStd ms = mean_std(it->second);
        result.runs.push_back({s, static_cast<int>(r), it->first, ms.mean, ms.n});
        run_means[it->first].push_back(ms.mean);
      }
    }
    for (StrategyTag tag : kTagOrder) {
      const auto it = run_means.find(to_string(tag));
      if (it == run_means.end()) continue;
      const MeanStd ms = mean_std(it->second);
      result.summary.push_back({it->first, s, ms.mean, ms.stddev, ms.n});
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Dominance check.

namespace {

// A synthetic pool entry on freshly generated tasks: ground truths, the
// source's stored answers, and the trust the mechanism would assign it.
struct SyntheticEntry {
  TrustworthinessMatrix trust;
  std::vector<int> truths;        // per shared task
  std::vector<int> peer_answers;  // per shared task
};

std::vector<int> draw_truths(int n, const Prior& prior, Rng& rng) {
  std::vector<int> g(static_cast<std::size_t>(n));
  for (int& x : g) x = rng.categorical(prior.probs());
  return g;
}

std::vector<int> answer_tasks(const StochasticMatrix& trust, std::span<const int> truths,
                              Rng& rng) {
  std::vector<int> a(truths.size());
  for (std::size_t i = 0; i < truths.size(); ++i)
    a[i] = rng.categorical(trust.row(truths[i]));
  return a;
}

// Margin by which each diagonal entry dominates the rest of its row and
// of its column. Positive means the ability condition for dominance holds.
double dominance_margin(const StochasticMatrix& a) {
  double margin = 1.0;
  for (int g = 0; g < a.dim(); ++g) {
    double best_other = 0.0;
    for (int gp = 0; gp < a.dim(); ++gp)
      if (gp != g) best_other = std::max({best_other, a(gp, g), a(g, gp)});
    margin = std::min(margin, a(g, g) - best_other);
  }
  return margin;
}

StochasticMatrix sample_dominant_proficiency(const ProficiencySpec& spec, double margin,
                                             Rng& rng) {
  for (int tries = 0; tries < 100000; ++tries) {
    StochasticMatrix a = sample_proficiency(spec, rng);
    if (dominance_margin(a) >= margin) return a;
  }
  throw std::runtime_error("could not sample a column-dominant proficiency matrix");
}

// Builds the peer entry a probe is evaluated against, with the population
// fixed at one strategy profile. A heuristic population cannot enter the
// pool, so the probe meets the oracle entry directly.
SyntheticEntry build_population_entry(StrategyTag profile, const ExperimentConfig& config,
                                      int shared_tasks, Rng& rng) {
  const Prior& prior = config.mechanism.prior;
  const int k = config.mechanism.answer_space.k;
  if (profile == StrategyTag::heuristic) {
    SyntheticEntry entry{StochasticMatrix::identity(k), draw_truths(shared_tasks, prior, rng), {}};
    entry.peer_answers = entry.truths;  // gold answers
    return entry;
  }
  for (int tries = 0; tries < 1000; ++tries) {
    const WorkerSpec member{"pop", sample_proficiency(config.proficiency, rng),
                            strategy_for(profile, k, rng), profile};
    // Evaluate the population member against gold to get its assigned trust.
    const std::vector<int> gold_truths = draw_truths(shared_tasks, prior, rng);
    std::vector<int> member_answers(gold_truths.size());
    Rng& r = rng;
    for (std::size_t i = 0; i < gold_truths.size(); ++i) {
      const int g = gold_truths[i];
      if (member.strategy.effort()) {
        const int x = r.categorical(member.proficiency.row(g));
        member_answers[i] = apply_strategy(x, member.strategy, r);
      } else {
        member_answers[i] = apply_strategy(std::nullopt, member.strategy, r);
      }
    }
    std::vector<std::pair<int, int>> pairs(gold_truths.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
      pairs[i] = {member_answers[i], gold_truths[i]};
    const EstimateOutcome outcome =
        estimate_trust(pairs, StochasticMatrix::identity(k), prior,
                       config.mechanism.condition_threshold, config.mechanism.marginal_source);
    if (!outcome.estimate) continue;
    StochasticMatrix projected = project_stochastic(outcome.estimate->raw);
    if (!is_informative(
            build_coefficients(projected, prior, model_marginal(projected, prior)),
            config.mechanism.condition_threshold))
      continue;
    // The entry's stored answers are the member's answers on fresh tasks.
    SyntheticEntry entry{std::move(projected), draw_truths(shared_tasks, prior, rng), {}};
    for (std::size_t i = 0; i < entry.truths.size(); ++i) {
      const int g = entry.truths[i];
      if (member.strategy.effort()) {
        const int x = rng.categorical(member.proficiency.row(g));
        entry.peer_answers.push_back(apply_strategy(x, member.strategy, rng));
      } else {
        entry.peer_answers.push_back(apply_strategy(std::nullopt, member.strategy, rng));
      }
    }
    return entry;
  }
  throw std::runtime_error("could not build an informative population entry");
}

struct PanelStrategy {
  std::string label;
  WorkerStrategy strategy;
};

std::vector<PanelStrategy> build_panel(int k, const DominanceOptions& options, Rng& rng) {
  std::vector<PanelStrategy> panel;
  // every non-identity permutation
  std::vector<int> perm(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = i;
  int index = 0;
  do {
    bool identity = true;
    for (int i = 0; i < k; ++i)
      if (perm[static_cast<std::size_t>(i)] != i) identity = false;
    if (!identity) {
      Matrix p(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
      for (int x = 0; x < k; ++x)
        p(static_cast<std::size_t>(x), static_cast<std::size_t>(perm[static_cast<std::size_t>(x)])) = 1.0;
      panel.push_back({"perm" + std::to_string(index),
                       WorkerStrategy::with_effort(StochasticMatrix(std::move(p)))});
    }
    ++index;
  } while (std::next_permutation(perm.begin(), perm.end()));
  // 5 random mixtures, kept away from the identity so finite-sample
  // margins are resolvable
  for (int m = 0; m < 5; ++m) {
    for (int tries = 0; tries < 100000; ++tries) {
      WorkerStrategy s = mixed_strategy(k, rng);
      double max_diag = 0.0;
      for (int i = 0; i < k; ++i) max_diag = std::max(max_diag, s.report_matrix()(i, i));
      if (max_diag <= 1.0 - options.mixture_offdiag_min) {
        panel.push_back({"mix" + std::to_string(m), std::move(s)});
        break;
      }
    }
  }
  // 3 heuristics: uniform, constant label, random distribution
  panel.push_back({"heur_uniform", uniform_heuristic_strategy(k)});
  std::vector<double> point(static_cast<std::size_t>(k), 0.0);
  point[0] = 1.0;
  panel.push_back({"heur_point0", heuristic_strategy(std::move(point))});
  std::vector<double> random_vec(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (double& v : random_vec) {
    v = rng.exponential();
    sum += v;
  }
  for (double& v : random_vec) v /= sum;
  panel.push_back({"heur_random", heuristic_strategy(std::move(random_vec))});
  return panel;
}

}  // namespace

DominanceResult run_dominance_check(const ExperimentConfig& config,
                                    const DominanceOptions& options,
                                    std::span<const StochasticMatrix> explicit_probes) {
  config.validate();
  const int probe_count =
      explicit_probes.empty() ? options.probes : static_cast<int>(explicit_probes.size());
  const int k = config.mechanism.answer_space.k;
  const Prior& prior = config.mechanism.prior;
  const double beta = config.mechanism.beta;

  const StrategyTag populations[] = {StrategyTag::truthful, StrategyTag::permutation,
                                     StrategyTag::mixed, StrategyTag::heuristic};

  std::vector<std::vector<DominanceRow>> per_probe(static_cast<std::size_t>(probe_count));
  parallel_for(per_probe.size(), [&](std::size_t p) {
    Rng rng(derive_seed(config.seed, 0xd0a1, p));
    const StochasticMatrix probe =
        explicit_probes.empty()
            ? sample_dominant_proficiency(config.proficiency, options.dominance_margin, rng)
            : explicit_probes[p];
    const double probe_trace = trace(probe.entries());
    const bool condition_ok = dominance_margin(probe) > 0.0;
    const double bound = config.mechanism.cost_of_effort / std::max(probe_trace - 1.0, 1e-12);
    const bool beta_ok = probe_trace > 1.0 && beta > bound;

    std::vector<PanelStrategy> panel = build_panel(k, options, rng);

    for (std::size_t pop_i = 0; pop_i < std::size(populations); ++pop_i) {
      const StrategyTag profile = populations[pop_i];
      const SyntheticEntry entry =
          build_population_entry(profile, config, options.shared_tasks, rng);

      std::vector<std::vector<double>> rewards(panel.size() + 1);
      for (int rep = 0; rep < options.repeats; ++rep) {
        // Common random numbers: one observation pass through the probe's
        // proficiency, shared by every effortful reporting alternative.
        Rng obs_rng = Rng::derive(derive_seed(config.seed, 0xc100 + pop_i, p), rep);
        std::vector<int> observed(entry.truths.size());
        for (std::size_t i = 0; i < observed.size(); ++i)
          observed[i] = obs_rng.categorical(probe.row(entry.truths[i]));

        for (std::size_t s = 0; s < panel.size() + 1; ++s) {
          Rng strat_rng = Rng::derive(derive_seed(config.seed, 0xc200 + pop_i, p),
                                      static_cast<std::uint64_t>(rep) * 64 + s);
          std::vector<std::pair<int, int>> pairs(entry.truths.size());
          if (s == 0) {  // truthful: report the observation as obtained
            for (std::size_t i = 0; i < pairs.size(); ++i)
              pairs[i] = {observed[i], entry.peer_answers[i]};
          } else {
            const WorkerStrategy& strat = panel[s - 1].strategy;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
              const int y = strat.effort()
                                ? apply_strategy(observed[i], strat, strat_rng)
                                : apply_strategy(std::nullopt, strat, strat_rng);
              pairs[i] = {y, entry.peer_answers[i]};
            }
          }
          const EstimateOutcome outcome =
              estimate_trust(pairs, entry.trust, prior, config.mechanism.condition_threshold,
                             config.mechanism.marginal_source);
          if (outcome.estimate)
            rewards[s].push_back(beta * reward_score(outcome.estimate->raw));
        }
      }

      const MeanStd truthful_ms = mean_std(rewards[0]);
      const std::string pop_label = to_string(profile);
      std::string note;
      if (k == 2)
        note = probe_trace > 1.0 ? "binary condition A00+A11>1 holds"
                                 : "binary condition A00+A11>1 violated";
      if (!beta_ok)
        note = "beta at or below incentive bound; truthful net utility may be negative";
      per_probe[p].push_back({static_cast<int>(p), probe_trace, pop_label, "truthful",
                              truthful_ms.mean,
                              truthful_ms.mean - config.mechanism.cost_of_effort, 0.0,
                              static_cast<int>(truthful_ms.n), condition_ok, beta_ok, note});
      for (std::size_t s = 0; s < panel.size(); ++s) {
        const MeanStd ms = mean_std(rewards[s + 1]);
        const bool effortful = panel[s].strategy.effort();
        per_probe[p].push_back(
            {static_cast<int>(p), probe_trace, pop_label, panel[s].label, ms.mean,
             ms.mean - (effortful ? config.mechanism.cost_of_effort : 0.0),
             truthful_ms.mean - ms.mean, static_cast<int>(ms.n), condition_ok, beta_ok, ""});
      }
    }
  });

  DominanceResult result;
  for (const auto& rows : per_probe)
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  return result;
}

// ---------------------------------------------------------------------------
// Fairness check.

FairnessResult run_fairness_check(const ExperimentConfig& config,
                                  const FairnessOptions& options) {
  config.validate();
  const int k = config.mechanism.answer_space.k;
  const Prior& prior = config.mechanism.prior;
  const double beta = config.mechanism.beta;

  // Probe: a truthful worker of middling ability.
  const StochasticMatrix probe = diagonal_trust(k, 0.75);

  struct Archetype {
    std::string label;
    TrustworthinessMatrix trust;
  };
  std::vector<Archetype> archetypes;
  for (double t : {0.6, 0.75, 0.9, 1.0}) {
    char label[32];
    std::snprintf(label, sizeof(label), "sym-%.2f", t);
    archetypes.push_back({label, diagonal_trust(k, t)});
  }
  // same trust, independent stream: seed-to-seed sanity of the means
  archetypes.push_back({"sym-0.75-b", diagonal_trust(k, 0.75)});
  // a permutation-playing peer of middling ability
  {
    const WorkerStrategy perm = permutation_strategy(k);
    archetypes.push_back(
        {"perm-0.75", compose_trust(diagonal_trust(k, 0.75), perm)});
  }
  // a heuristic peer: uninformative, recorded as not applicable
  archetypes.push_back(
      {"heuristic", compose_trust(diagonal_trust(k, 0.75), uniform_heuristic_strategy(k))});

  std::vector<FairnessRow> rows(archetypes.size());
  parallel_for(archetypes.size(), [&](std::size_t a) {
    const Archetype& arch = archetypes[a];
    const double peer_trace = trace(arch.trust.entries());
    const bool informative = is_informative(
        build_coefficients(arch.trust, prior, model_marginal(arch.trust, prior)),
        config.mechanism.condition_threshold);
    if (!informative) {
      rows[a] = {arch.label, peer_trace, "not_applicable", 0.0, 0.0, 0};
      return;
    }
    std::vector<double> rewards;
    rewards.reserve(static_cast<std::size_t>(options.repeats));
    for (int rep = 0; rep < options.repeats; ++rep) {
      Rng rng(derive_seed(config.seed, 0xfa10 + a, rep));
      const std::vector<int> truths = draw_truths(options.shared_tasks, prior, rng);
      const std::vector<int> peer_answers = answer_tasks(arch.trust, truths, rng);
      const std::vector<int> probe_answers = answer_tasks(probe, truths, rng);
      std::vector<std::pair<int, int>> pairs(truths.size());
      for (std::size_t i = 0; i < pairs.size(); ++i)
        pairs[i] = {probe_answers[i], peer_answers[i]};
      const EstimateOutcome outcome =
          estimate_trust(pairs, arch.trust, prior, config.mechanism.condition_threshold,
                         config.mechanism.marginal_source);
      if (outcome.estimate) rewards.push_back(beta * reward_score(outcome.estimate->raw));
    }
    const MeanStd ms = mean_std(rewards);
    rows[a] = {arch.label, peer_trace, "ok", ms.mean, ms.stddev, static_cast<int>(ms.n)};
  });

  FairnessResult result{std::move(rows), 0.0};
  for (const FairnessRow& x : result.rows) {
    if (x.status != "ok") continue;
    for (const FairnessRow& y : result.rows) {
      if (y.status != "ok") continue;
      result.max_spread = std::max(result.max_spread, std::abs(x.mean_reward - y.mean_reward));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// File emission.

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::vector<std::string> finish(const ExperimentConfig& config, const std::string& command,
                                std::uint64_t seed, const std::string& out_dir,
                                std::vector<std::pair<std::string, std::string>> files) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> names;
  names.reserve(files.size() + 1);
  for (const auto& [name, content] : files) names.push_back(name);
  names.push_back("manifest.json");
  for (const auto& [name, content] : files)
    write_file(std::filesystem::path(out_dir) / name, content);
  write_file(std::filesystem::path(out_dir) / "manifest.json",
             manifest_json(config, command, seed, names));
  return names;
}

std::string summary_csv(const std::vector<SummaryRow>& summary) {
  std::string csv = "strategy_tag,shared_tasks,mean_reward,std_reward,n\n";
  for (const SummaryRow& row : summary) {
    csv += row.strategy_tag;
    csv += ',';
    csv += std::to_string(row.shared_tasks);
    csv += ',';
    csv += fmt(row.mean_reward);
    csv += ',';
    csv += fmt(row.std_reward);
    csv += ',';
    csv += std::to_string(row.n);
    csv += '\n';
  }
  return csv;
}

}  // namespace

std::vector<std::string> write_simulation_files(const SimulationOutput& output,
                                                const ExperimentConfig& config,
                                                std::uint64_t seed,
                                                const std::string& out_dir) {
  std::map<std::string, std::vector<double>> by_tag;
  for (const LedgerEvaluation& eval : output.evaluations)
    by_tag[eval.strategy_tag].push_back(eval.reward);
  std::vector<SummaryRow> summary;
  for (const auto& [tag, rewards] : by_tag) {
    const MeanStd ms = mean_std(rewards);
    summary.push_back({tag, config.mechanism.s_o, ms.mean, ms.stddev, ms.n});
  }
  return finish(config, "simulate", seed, out_dir,
                {{"ledger.csv", output.ledger_csv},
                 {"pool.json", output.pool_json},
                 {"summary.csv", summary_csv(summary)}});
}

std::vector<std::string> write_reward_files(const RewardDistributionResult& result,
                                            const ExperimentConfig& config, std::uint64_t seed,
                                            const std::string& out_dir) {
  std::string raw =
      "run,seq,worker_id,strategy_tag,peer_source_id,reward,trace_raw,informative,"
      "shared_task_count\n";
  for (const RewardSample& s : result.samples) {
    raw += std::to_string(s.run);
    raw += ',';
    raw += std::to_string(s.eval.seq);
    raw += ',';
    raw += s.eval.worker_id;
    raw += ',';
    raw += s.eval.strategy_tag;
    raw += ',';
    raw += s.eval.peer_source_id;
    raw += ',';
    raw += fmt(s.eval.reward);
    raw += ',';
    raw += fmt(s.eval.trace_raw);
    raw += ',';
    raw += s.eval.informative ? '1' : '0';
    raw += ',';
    raw += std::to_string(s.eval.shared_task_count);
    raw += '\n';
  }
  return finish(config, "experiment rewards", seed, out_dir,
                {{"rewards.csv", std::move(raw)}, {"summary.csv", summary_csv(result.summary)}});
}

std::vector<std::string> write_sweep_files(const SweepResult& result,
                                           const ExperimentConfig& config, std::uint64_t seed,
                                           const std::string& out_dir) {
  std::string raw = "shared_tasks,run,strategy_tag,mean_reward,n_evaluations\n";
  for (const SweepRunRow& row : result.runs) {
    raw += std::to_string(row.shared_tasks);
    raw += ',';
    raw += std::to_string(row.run);
    raw += ',';
    raw += row.strategy_tag;
    raw += ',';
    raw += fmt(row.mean_reward);
    raw += ',';
    raw += std::to_string(row.n_evaluations);
    raw += '\n';
  }
  return finish(config, "experiment sweep", seed, out_dir,
                {{"sweep_runs.csv", std::move(raw)}, {"sweep.csv", summary_csv(result.summary)}});
}

std::vector<std::string> write_dominance_files(const DominanceResult& result,
                                               const ExperimentConfig& config,
                                               std::uint64_t seed, const std::string& out_dir) {
  std::string csv =
      "probe,probe_trace,population,strategy,mean_reward,mean_net_utility,margin_vs_truthful,"
      "repeats_used,dominance_condition_ok,beta_bound_ok,note\n";
  for (const DominanceRow& row : result.rows) {
    csv += std::to_string(row.probe);
    csv += ',';
    csv += fmt(row.probe_trace);
    csv += ',';
    csv += row.population;
    csv += ',';
    csv += row.strategy;
    csv += ',';
    csv += fmt(row.mean_reward);
    csv += ',';
    csv += fmt(row.mean_net_utility);
    csv += ',';
    csv += fmt(row.margin_vs_truthful);
    csv += ',';
    csv += std::to_string(row.repeats_used);
    csv += ',';
    csv += row.dominance_condition_ok ? '1' : '0';
    csv += ',';
    csv += row.beta_bound_ok ? '1' : '0';
    csv += ',';
    csv += row.note;
    csv += '\n';
  }
  return finish(config, "experiment dominance", seed, out_dir, {{"dominance.csv", std::move(csv)}});
}

std::vector<std::string> write_fairness_files(const FairnessResult& result,
                                              const ExperimentConfig& config,
                                              std::uint64_t seed, const std::string& out_dir) {
  std::string csv = "archetype,peer_trace,status,mean_reward,std_reward,n\n";
  for (const FairnessRow& row : result.rows) {
    csv += row.archetype;
    csv += ',';
    csv += fmt(row.peer_trace);
    csv += ',';
    csv += row.status;
    csv += ',';
    csv += fmt(row.mean_reward);
    csv += ',';
    csv += fmt(row.std_reward);
    csv += ',';
    csv += std::to_string(row.n);
    csv += '\n';
  }
  std::string spread = "max_spread\n" + fmt(result.max_spread) + "\n";
  return finish(config, "experiment fairness", seed, out_dir,
                {{"fairness.csv", std::move(csv)}, {"fairness_summary.csv", std::move(spread)}});
}

}  // namespace dbt
