#include "dbt/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

namespace dbt {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool rows_identical(const TrustworthinessMatrix& t) {
  for (int r = 1; r < t.dim(); ++r)
    for (int c = 0; c < t.dim(); ++c)
      if (std::abs(t(r, c) - t(0, c)) > kRowSumTolerance) return false;
  return true;
}

AbortReason to_abort(EstimateError e) {
  switch (e) {
    case EstimateError::support_hole: return AbortReason::support_hole;
    case EstimateError::not_well_defined: return AbortReason::not_well_defined;
    case EstimateError::ill_conditioned: return AbortReason::ill_conditioned;
    case EstimateError::solver_failure: return AbortReason::solver_failure;
  }
  throw std::logic_error("unreachable");
}

}  // namespace

const char* to_string(AbortReason r) {
  switch (r) {
    case AbortReason::support_hole: return "support_hole";
    case AbortReason::not_well_defined: return "not_well_defined";
    case AbortReason::ill_conditioned: return "ill_conditioned";
    case AbortReason::solver_failure: return "solver_failure";
  }
  return "unknown";
}

void MechanismConfig::validate() const {
  if (prior.size() != answer_space.k)
    throw std::invalid_argument("prior and answer space dimension mismatch");
  if (k_fanout < 1) throw std::invalid_argument("k_fanout must be >= 1");
  if (s_o < 1) throw std::invalid_argument("s_o must be >= 1");
  if (s_n < s_o) throw std::invalid_argument("s_n must be >= s_o");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  if (cost_of_effort < 0.0) throw std::invalid_argument("cost_of_effort must be >= 0");
  if (target_answers < 1) throw std::invalid_argument("target_answers must be >= 1");
  if (!(condition_threshold > 0.0))
    throw std::invalid_argument("condition_threshold must be > 0");
  if (max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
}

std::uint64_t Ledger::append(LedgerEvaluation e) {
  e.seq = next_seq_++;
  events_.emplace_back(std::move(e));
  return next_seq_ - 1;
}

std::uint64_t Ledger::append(LedgerAdmission e) {
  e.seq = next_seq_++;
  events_.emplace_back(std::move(e));
  return next_seq_ - 1;
}

std::uint64_t Ledger::append(LedgerAbort e) {
  e.seq = next_seq_++;
  events_.emplace_back(std::move(e));
  return next_seq_ - 1;
}

std::vector<LedgerEvaluation> Ledger::evaluations() const {
  std::vector<LedgerEvaluation> out;
  for (const Event& e : events_)
    if (const auto* row = std::get_if<LedgerEvaluation>(&e)) out.push_back(*row);
  return out;
}

std::vector<LedgerAdmission> Ledger::admissions() const {
  std::vector<LedgerAdmission> out;
  for (const Event& e : events_)
    if (const auto* row = std::get_if<LedgerAdmission>(&e)) out.push_back(*row);
  return out;
}

std::vector<LedgerAbort> Ledger::aborts() const {
  std::vector<LedgerAbort> out;
  for (const Event& e : events_)
    if (const auto* row = std::get_if<LedgerAbort>(&e)) out.push_back(*row);
  return out;
}

std::string Ledger::to_csv() const {
  std::string csv =
      "seq,worker_id,strategy_tag,peer_source_id,reward,trace_raw,informative,shared_task_count\n";
  for (const Event& e : events_) {
    const auto* row = std::get_if<LedgerEvaluation>(&e);
    if (!row) continue;
    csv += std::to_string(row->seq);
    csv += ',';
    csv += row->worker_id;
    csv += ',';
    csv += row->strategy_tag;
    csv += ',';
    csv += row->peer_source_id;
    csv += ',';
    csv += format_double(row->reward);
    csv += ',';
    csv += format_double(row->trace_raw);
    csv += ',';
    csv += row->informative ? '1' : '0';
    csv += ',';
    csv += std::to_string(row->shared_task_count);
    csv += '\n';
  }
  return csv;
}

std::optional<TaskId> TaskSupply::next() {
  if (limit_ >= 0 && next_id_ >= limit_) return std::nullopt;
  return next_id_++;
}

Mechanism::Mechanism(MechanismConfig config, std::vector<TaskAnswer> oracle_answers,
                     TrustworthinessMatrix t_oracle, std::string oracle_id)
    : config_(std::move(config)) {
  config_.validate();
  if (oracle_answers.empty()) throw std::invalid_argument("oracle answers must be non-empty");
  if (t_oracle.dim() != config_.answer_space.k)
    throw std::invalid_argument("oracle trust dimension mismatch");
  if (rows_identical(t_oracle))
    throw std::invalid_argument("oracle trust has identical rows (not informative)");
  pool_.push_back(PoolEntry{std::move(oracle_id), std::move(t_oracle), std::move(oracle_answers), 0});
  ledger_.append(LedgerAdmission{0, pool_[0].source_id, 0,
                                 static_cast<int>(pool_[0].answers.size())});
}

std::optional<Batch> Mechanism::draft_batch(TaskSupply& supply,
                                            std::span<const std::size_t> exclude_entries) {
  const auto excluded = [&](std::size_t i) {
    return std::find(exclude_entries.begin(), exclude_entries.end(), i) != exclude_entries.end();
  };
  std::optional<std::size_t> chosen;
  for (std::size_t i = 0; i < pool_.size(); ++i) {
    const PoolEntry& entry = pool_[i];
    if (entry.fanout_used >= config_.k_fanout) continue;
    if (static_cast<int>(entry.answers.size()) < config_.s_o) continue;
    if (excluded(i)) continue;
    if (!chosen) {
      chosen = i;
      continue;
    }
    if (config_.pool_policy == PoolPolicy::least_used &&
        entry.fanout_used < pool_[*chosen].fanout_used)
      chosen = i;
    // fifo keeps the first (oldest) candidate
  }
  if (!chosen) return std::nullopt;

  Batch batch;
  batch.peer_index = *chosen;
  batch.shared_tasks.reserve(static_cast<std::size_t>(config_.s_o));
  for (int i = 0; i < config_.s_o; ++i)
    batch.shared_tasks.push_back(pool_[*chosen].answers[static_cast<std::size_t>(i)].task);
  batch.fresh_tasks.reserve(static_cast<std::size_t>(config_.s_n));
  for (int i = 0; i < config_.s_n; ++i) {
    std::optional<TaskId> id = supply.next();
    if (!id) return std::nullopt;  // task supply empty: drafting stops
    batch.fresh_tasks.push_back(*id);
  }
  pool_[*chosen].fanout_used += 1;
  return batch;
}

EvalOutcome Mechanism::evaluate_submission(const Batch& batch,
                                           std::span<const TaskAnswer> submitted,
                                           const std::string& worker_id,
                                           const std::string& strategy_tag) {
  if (batch.peer_index >= pool_.size()) throw std::invalid_argument("batch peer out of range");
  const PoolEntry& peer = pool_[batch.peer_index];

  // The submission must cover every batch task exactly once.
  std::unordered_map<TaskId, int> answer_of;
  answer_of.reserve(submitted.size());
  for (const TaskAnswer& a : submitted)
    if (!answer_of.emplace(a.task, a.label).second)
      throw std::invalid_argument("duplicate task in submission");
  const std::size_t batch_size = batch.shared_tasks.size() + batch.fresh_tasks.size();
  if (submitted.size() != batch_size)
    throw std::invalid_argument("submission does not match batch size");
  for (TaskId t : batch.shared_tasks)
    if (!answer_of.count(t)) throw std::invalid_argument("submission missing a shared task");
  for (TaskId t : batch.fresh_tasks)
    if (!answer_of.count(t)) throw std::invalid_argument("submission missing a fresh task");

  // Pair the worker's shared-task answers with the peer's stored answers.
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(batch.shared_tasks.size());
  std::unordered_map<TaskId, int> peer_answer;
  peer_answer.reserve(peer.answers.size());
  for (const TaskAnswer& a : peer.answers) peer_answer.emplace(a.task, a.label);
  for (TaskId t : batch.shared_tasks) pairs.emplace_back(answer_of.at(t), peer_answer.at(t));

  const EstimateOutcome outcome =
      estimate_trust(pairs, peer.trust, config_.prior, config_.condition_threshold,
                     config_.marginal_source);
  if (!outcome.estimate) {
    ledger_.append(LedgerAbort{0, worker_id, peer.source_id, to_abort(*outcome.error)});
    return {std::nullopt, to_abort(*outcome.error)};
  }

  const Matrix& raw = outcome.estimate->raw;
  const double reward = config_.beta * reward_score(raw);
  StochasticMatrix projected = project_stochastic(raw);

  // Admission gate: the worker's own answers are informative when the
  // posterior coefficients built from her projected trust are well
  // conditioned under the model-implied marginal.
  const std::vector<double> own_marginal = model_marginal(projected, config_.prior);
  const bool informative =
      is_informative(build_coefficients(projected, config_.prior, own_marginal),
                     config_.condition_threshold);

  Evaluation eval{worker_id,
                  raw,
                  std::move(projected),
                  reward,
                  config_.floor_rewards_at_zero ? std::max(0.0, reward) : reward,
                  informative,
                  peer.source_id,
                  static_cast<int>(pairs.size())};
  ledger_.append(LedgerEvaluation{0, worker_id, strategy_tag, peer.source_id, eval.reward,
                                  trace(raw), informative, eval.shared_task_count, raw});
  record_coverage(submitted);
  return {std::move(eval), std::nullopt};
}

bool Mechanism::admit_to_pool(const Evaluation& evaluation,
                              std::vector<TaskAnswer> fresh_answers) {
  if (!evaluation.informative) return false;
  pool_.push_back(PoolEntry{evaluation.worker_id, evaluation.projected_trust,
                            std::move(fresh_answers), 0});
  ledger_.append(LedgerAdmission{0, evaluation.worker_id, pool_.size() - 1,
                                 static_cast<int>(pool_.back().answers.size())});
  return true;
}

bool Mechanism::pool_starved() const {
  for (const PoolEntry& entry : pool_)
    if (entry.fanout_used < config_.k_fanout &&
        static_cast<int>(entry.answers.size()) >= config_.s_o)
      return false;
  return true;
}

std::int64_t Mechanism::answers_collected(TaskId task) const {
  const auto it = coverage_.find(task);
  return it == coverage_.end() ? 0 : it->second;
}

std::int64_t Mechanism::tasks_covered() const {
  std::int64_t n = 0;
  for (const auto& [task, count] : coverage_)
    if (count >= config_.target_answers) ++n;
  return n;
}

void Mechanism::record_coverage(std::span<const TaskAnswer> submitted) {
  // Counts answers toward each task's target; extra answers beyond the
  // target (shared-task re-asks) do not accumulate past it.
  for (const TaskAnswer& a : submitted) {
    std::int64_t& c = coverage_[a.task];
    if (c < config_.target_answers) ++c;
  }
}

std::string Mechanism::export_pool_json() const {
  nlohmann::json pool = nlohmann::json::array();
  for (const PoolEntry& entry : pool_) {
    nlohmann::json trust = nlohmann::json::array();
    for (int r = 0; r < entry.trust.dim(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < entry.trust.dim(); ++c) row.push_back(entry.trust(r, c));
      trust.push_back(std::move(row));
    }
    nlohmann::json answers = nlohmann::json::array();
    for (const TaskAnswer& a : entry.answers)
      answers.push_back(nlohmann::json::array({a.task, a.label}));
    pool.push_back({{"source", entry.source_id},
                    {"trust", std::move(trust)},
                    {"fanout_used", entry.fanout_used},
                    {"answers", std::move(answers)}});
  }
  return nlohmann::json{{"pool", std::move(pool)}}.dump(2);
}

RunReport run_mechanism(Mechanism& mechanism, WorkerStream& workers, TaskSupply& supply) {
  RunReport report;
  const int attempts_allowed = 1 + mechanism.config().max_retries;
  while (std::optional<WorkerHandle> worker = workers.next()) {
    ++report.workers_seen;
    std::vector<std::size_t> tried;
    bool done = false;
    for (int attempt = 0; attempt < attempts_allowed && !done; ++attempt) {
      std::optional<Batch> batch = mechanism.draft_batch(supply, tried);
      if (!batch) {
        if (attempt == 0) {
          // Nothing draftable at all: the pool starved or the task supply
          // dried up. The run ends with partial coverage.
          report.pool_starved = mechanism.pool_starved();
          ++report.unevaluated;
          report.tasks_created = supply.created();
          report.tasks_covered = mechanism.tasks_covered();
          return report;
        }
        break;  // only the excluded entries remain; give up on this worker
      }
      std::vector<TaskAnswer> answers = worker->solve(*batch);
      EvalOutcome outcome =
          mechanism.evaluate_submission(*batch, answers, worker->id, worker->strategy_tag);
      if (outcome.ok()) {
        ++report.evaluated;
        std::vector<TaskAnswer> fresh;
        fresh.reserve(batch->fresh_tasks.size());
        std::unordered_set<TaskId> fresh_ids(batch->fresh_tasks.begin(),
                                             batch->fresh_tasks.end());
        for (const TaskAnswer& a : answers)
          if (fresh_ids.count(a.task)) fresh.push_back(a);
        if (mechanism.admit_to_pool(*outcome.evaluation, std::move(fresh))) ++report.admitted;
        done = true;
      } else {
        tried.push_back(batch->peer_index);  // re-match against a different entry
      }
    }
    if (!done) ++report.unevaluated;
  }
  report.pool_starved = mechanism.pool_starved();
  report.tasks_created = supply.created();
  report.tasks_covered = mechanism.tasks_covered();
  return report;
}

}  // namespace dbt
