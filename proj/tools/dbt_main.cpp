// Command-line front end: solve a single trust system from files, run one
// simulated mechanism round, or reproduce the experiment datasets.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbt/experiments.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<double> parse_prob_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

// Answer-pairs file: one "worker_label,peer_label" pair per line.
std::vector<std::pair<int, int>> read_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open pairs file: " + path);
  std::vector<std::pair<int, int>> pairs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::stringstream ss(line);
    int worker = 0, peer = 0;
    if (!(ss >> worker >> peer)) throw std::invalid_argument("bad pairs line: " + line);
    pairs.emplace_back(worker, peer);
  }
  return pairs;
}

dbt::TrustworthinessMatrix read_trust(const std::string& path) {
  const nlohmann::json j = nlohmann::json::parse(read_file(path));
  const auto rows = j.get<std::vector<std::vector<double>>>();
  return dbt::TrustworthinessMatrix(dbt::Matrix::from_rows(rows));
}

int run_solve(const std::string& pairs_path, const std::string& trust_path,
              const std::string& prior_text, double threshold, const std::string& marginal) {
  const std::vector<std::pair<int, int>> pairs = read_pairs(pairs_path);
  const dbt::TrustworthinessMatrix peer_trust = read_trust(trust_path);
  const dbt::Prior prior(parse_prob_list(prior_text));
  const dbt::MarginalSource source =
      marginal == "model" ? dbt::MarginalSource::model : dbt::MarginalSource::empirical;

  const dbt::EstimateOutcome outcome =
      dbt::estimate_trust(pairs, peer_trust, prior, threshold, source);
  if (!outcome.estimate) {
    std::cerr << "error: trust estimation failed ("
              << dbt::to_string(static_cast<dbt::AbortReason>(*outcome.error)) << ")\n";
    return 1;
  }
  const dbt::Matrix& raw = outcome.estimate->raw;
  std::printf("condition_estimate %.12g\n", outcome.estimate->condition_estimate);
  std::printf("reward_score %.12g\n", dbt::reward_score(raw));
  std::printf("solved_trust\n");
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    for (std::size_t c = 0; c < raw.cols(); ++c)
      std::printf("%s%.12g", c == 0 ? "" : " ", raw(r, c));
    std::printf("\n");
  }
  const dbt::StochasticMatrix projected = dbt::project_stochastic(raw);
  std::printf("projected_trust\n");
  for (int r = 0; r < projected.dim(); ++r) {
    for (int c = 0; c < projected.dim(); ++c)
      std::printf("%s%.12g", c == 0 ? "" : " ", projected(r, c));
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep Bayesian Trust mechanism simulator"};
  app.require_subcommand(1);

  // solve
  std::string pairs_path, trust_path, prior_text = "0.5,0.5", marginal = "empirical";
  double threshold = 1e6;
  CLI::App* solve = app.add_subcommand("solve", "solve one trust system from answer pairs");
  solve->add_option("--pairs", pairs_path, "answer-pairs file, worker_label,peer_label per line")
      ->required();
  solve->add_option("--trust", trust_path, "peer trust matrix (JSON rows)")->required();
  solve->add_option("--prior", prior_text, "prior probabilities, comma separated");
  solve->add_option("--threshold", threshold, "informativeness condition-number threshold");
  solve->add_option("--marginal", marginal, "marginal source: empirical|model")
      ->check(CLI::IsMember({"empirical", "model"}));

  // shared flags for simulate / experiment
  std::string config_path, out_dir = "out";
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  int repeats_override = 0;

  CLI::App* simulate = app.add_subcommand("simulate", "one mechanism run from a config");
  CLI::App* experiment = app.add_subcommand("experiment", "reproduce an experiment dataset");
  experiment->require_subcommand(1);
  CLI::App* ex_rewards = experiment->add_subcommand("rewards", "reward distribution by strategy");
  CLI::App* ex_sweep = experiment->add_subcommand("sweep", "robustness to shared-task count");
  CLI::App* ex_dom = experiment->add_subcommand("dominance", "truthful vs alternative strategies");
  CLI::App* ex_fair = experiment->add_subcommand("fairness", "reward independence from the peer");

  for (CLI::App* cmd : {simulate, ex_rewards, ex_sweep, ex_dom, ex_fair}) {
    cmd->add_option("--config", config_path, "experiment config JSON")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed_override, "seed override")->each([&](const std::string&) {
      seed_set = true;
    });
    cmd->add_option("--repeats", repeats_override, "repeats override");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return run_solve(pairs_path, trust_path, prior_text, threshold, marginal);

    dbt::ExperimentConfig config = dbt::load_config(config_path);
    if (seed_set) config.seed = seed_override;
    if (repeats_override > 0) config.repeats = repeats_override;
    const std::uint64_t seed = config.seed;

    std::vector<std::string> files;
    if (simulate->parsed()) {
      const dbt::SimulationOutput output = dbt::run_simulation(config, seed, true);
      files = dbt::write_simulation_files(output, config, seed, out_dir);
      std::printf("workers evaluated %d, unevaluated %d, pool starved %s\n",
                  output.report.evaluated, output.report.unevaluated,
                  output.report.pool_starved ? "yes" : "no");
    } else if (ex_rewards->parsed()) {
      files = dbt::write_reward_files(dbt::run_reward_distribution(config), config, seed, out_dir);
    } else if (ex_sweep->parsed()) {
      files = dbt::write_sweep_files(dbt::run_shared_task_sweep(config), config, seed, out_dir);
    } else if (ex_dom->parsed()) {
      dbt::DominanceOptions options;
      if (repeats_override > 0) options.repeats = repeats_override;
      files = dbt::write_dominance_files(dbt::run_dominance_check(config, options), config, seed,
                                         out_dir);
    } else if (ex_fair->parsed()) {
      dbt::FairnessOptions options;
      if (repeats_override > 0) options.repeats = repeats_override;
      files = dbt::write_fairness_files(dbt::run_fairness_check(config, options), config, seed,
                                        out_dir);
    }
    for (const std::string& f : files) std::printf("wrote %s/%s\n", out_dir.c_str(), f.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
