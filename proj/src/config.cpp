#include "dbt/config.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dbt {

using nlohmann::json;

ExperimentConfig::ExperimentConfig() {
  // Simulation-layer gate: tight enough that pool entries whose estimated
  // trust is statistically indistinguishable from a heuristic's stay out.
  // A heuristic entry that slips in poisons its whole subtree: evaluations
  // against it have expected reward ~0 whatever the worker's real quality.
  // For binary spaces this demands a trace gap |trace(T)-1| of about 1/6.
  mechanism.condition_threshold = 6.0;
}

int ExperimentConfig::total_workers() const {
  return std::accumulate(rounds.begin(), rounds.end(), 0);
}

void ExperimentConfig::validate() const {
  mechanism.validate();
  if (proficiency.k != mechanism.answer_space.k)
    throw std::invalid_argument("proficiency k must match the answer space");
  if (rounds.empty()) throw std::invalid_argument("rounds must be non-empty");
  for (int r : rounds)
    if (r < 1) throw std::invalid_argument("round worker counts must be >= 1");
  if (strategy_mix.size() != 4)
    throw std::invalid_argument("strategy_mix must cover the four tags");
  double sum = 0.0;
  for (double p : strategy_mix) {
    if (p < 0.0) throw std::invalid_argument("strategy_mix entries must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("strategy_mix must sum to 1");
  if (shared_task_sweep.empty()) throw std::invalid_argument("shared_task_sweep non-empty");
  for (int s : shared_task_sweep)
    if (s < 1) throw std::invalid_argument("sweep entries must be >= 1");
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
}

namespace {

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const std::string& a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw std::invalid_argument("unknown config key '" + where + key + "'");
  }
}

PoolPolicy parse_policy(const std::string& s) {
  if (s == "fifo") return PoolPolicy::fifo;
  if (s == "least-used") return PoolPolicy::least_used;
  throw std::invalid_argument("pool_policy must be 'fifo' or 'least-used'");
}

MarginalSource parse_marginal(const std::string& s) {
  if (s == "empirical") return MarginalSource::empirical;
  if (s == "model") return MarginalSource::model;
  throw std::invalid_argument("marginal_source must be 'empirical' or 'model'");
}

ProficiencySpec::Kind parse_kind(const std::string& s) {
  if (s == "beta-diagonal") return ProficiencySpec::Kind::beta_diagonal;
  if (s == "uniform-diagonal") return ProficiencySpec::Kind::uniform_diagonal;
  throw std::invalid_argument("proficiency kind must be 'beta-diagonal' or 'uniform-diagonal'");
}

void parse_mechanism(const json& m, MechanismConfig& out) {
  require_keys(m,
               {"k", "prior", "k_fanout", "s_o", "s_n", "beta", "cost_of_effort",
                "target_answers", "condition_threshold", "pool_policy", "marginal_source",
                "floor_rewards_at_zero", "max_retries"},
               "mechanism.");
  if (m.contains("k")) out.answer_space = AnswerSpace(m.at("k").get<int>());
  if (m.contains("prior"))
    out.prior = Prior(m.at("prior").get<std::vector<double>>());
  else if (m.contains("k"))
    out.prior = Prior::uniform(out.answer_space.k);
  if (m.contains("k_fanout")) out.k_fanout = m.at("k_fanout").get<int>();
  if (m.contains("s_o")) out.s_o = m.at("s_o").get<int>();
  if (m.contains("s_n")) out.s_n = m.at("s_n").get<int>();
  if (m.contains("beta")) out.beta = m.at("beta").get<double>();
  if (m.contains("cost_of_effort")) out.cost_of_effort = m.at("cost_of_effort").get<double>();
  if (m.contains("target_answers")) out.target_answers = m.at("target_answers").get<int>();
  if (m.contains("condition_threshold"))
    out.condition_threshold = m.at("condition_threshold").get<double>();
  if (m.contains("pool_policy")) out.pool_policy = parse_policy(m.at("pool_policy"));
  if (m.contains("marginal_source"))
    out.marginal_source = parse_marginal(m.at("marginal_source"));
  if (m.contains("floor_rewards_at_zero"))
    out.floor_rewards_at_zero = m.at("floor_rewards_at_zero").get<bool>();
  if (m.contains("max_retries")) out.max_retries = m.at("max_retries").get<int>();
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
  json root = json::parse(text);
  if (!root.is_object()) throw std::invalid_argument("config root must be an object");
  require_keys(root,
               {"mechanism", "proficiency", "rounds", "strategy_mix", "shared_task_sweep",
                "repeats", "seed"},
               "");
  ExperimentConfig cfg;
  if (root.contains("mechanism")) parse_mechanism(root.at("mechanism"), cfg.mechanism);
  if (root.contains("proficiency")) {
    const json& p = root.at("proficiency");
    require_keys(p, {"kind", "k"}, "proficiency.");
    if (p.contains("kind")) cfg.proficiency.kind = parse_kind(p.at("kind"));
    if (p.contains("k")) cfg.proficiency.k = p.at("k").get<int>();
  }
  if (!root.contains("proficiency") || !root.at("proficiency").contains("k"))
    cfg.proficiency.k = cfg.mechanism.answer_space.k;
  if (root.contains("rounds")) cfg.rounds = root.at("rounds").get<std::vector<int>>();
  if (root.contains("strategy_mix")) {
    std::vector<double> mix = root.at("strategy_mix").get<std::vector<double>>();
    if (mix.size() == 3) mix.push_back(0.0);
    cfg.strategy_mix = std::move(mix);
  }
  if (root.contains("shared_task_sweep"))
    cfg.shared_task_sweep = root.at("shared_task_sweep").get<std::vector<int>>();
  if (root.contains("repeats")) cfg.repeats = root.at("repeats").get<int>();
  if (root.contains("seed")) cfg.seed = root.at("seed").get<std::uint64_t>();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

std::string config_to_json(const ExperimentConfig& config) {
  json m{{"k", config.mechanism.answer_space.k},
         {"prior", config.mechanism.prior.probs()},
         {"k_fanout", config.mechanism.k_fanout},
         {"s_o", config.mechanism.s_o},
         {"s_n", config.mechanism.s_n},
         {"beta", config.mechanism.beta},
         {"cost_of_effort", config.mechanism.cost_of_effort},
         {"target_answers", config.mechanism.target_answers},
         {"condition_threshold", config.mechanism.condition_threshold},
         {"pool_policy",
          config.mechanism.pool_policy == PoolPolicy::fifo ? "fifo" : "least-used"},
         {"marginal_source",
          config.mechanism.marginal_source == MarginalSource::empirical ? "empirical" : "model"},
         {"floor_rewards_at_zero", config.mechanism.floor_rewards_at_zero},
         {"max_retries", config.mechanism.max_retries}};
  json p{{"kind", config.proficiency.kind == ProficiencySpec::Kind::beta_diagonal
                      ? "beta-diagonal"
                      : "uniform-diagonal"},
         {"k", config.proficiency.k}};
  json root{{"mechanism", std::move(m)},
            {"proficiency", std::move(p)},
            {"rounds", config.rounds},
            {"strategy_mix", config.strategy_mix},
            {"shared_task_sweep", config.shared_task_sweep},
            {"repeats", config.repeats},
            {"seed", config.seed}};
  return root.dump(2);
}

std::string manifest_json(const ExperimentConfig& config, const std::string& command,
                          std::uint64_t seed, const std::vector<std::string>& files) {
  json root{{"artifact_version", kArtifactVersion},
            {"command", command},
            {"seed", seed},
            {"config", json::parse(config_to_json(config))},
            {"files", files}};
  return root.dump(2);
}

}  // namespace dbt
