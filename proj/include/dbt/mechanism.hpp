#pragma once
// The incentive mechanism proper: the informative answer pool, batch
// drafting against pool entries, submission evaluation and reward, pool
// admission, and an append-only ledger of everything that happened.
// Pool and ledger form one serialized state machine; evaluations read an
// immutable snapshot of their peer entry.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "dbt/model.hpp"
#include "dbt/solver.hpp"

namespace dbt {

using TaskId = std::int64_t;

struct TaskAnswer {
  TaskId task;
  int label;
};

enum class PoolPolicy { fifo, least_used };

struct MechanismConfig {
  AnswerSpace answer_space{2};
  Prior prior = Prior::uniform(2);
  int k_fanout = 5;   // batches published against one pool entry
  int s_o = 500;      // shared tasks per batch
  int s_n = 500;      // fresh tasks per batch; must be >= s_o
  double beta = 1.0;  // reward scale
  double cost_of_effort = 0.0;
  int target_answers = 1;
  double condition_threshold = 1e6;
  PoolPolicy pool_policy = PoolPolicy::fifo;
  MarginalSource marginal_source = MarginalSource::empirical;
  bool floor_rewards_at_zero = false;
  int max_retries = 2;  // re-matches after an aborted evaluation

  void validate() const;
};

// One entry of the informative answer pool: a source, its (projected)
// trustworthiness, and the task-answer pairs it contributed.
struct PoolEntry {
  std::string source_id;
  TrustworthinessMatrix trust;
  std::vector<TaskAnswer> answers;
  int fanout_used = 0;
};

struct Batch {
  std::vector<TaskId> shared_tasks;  // s_o tasks drawn from the peer entry
  std::vector<TaskId> fresh_tasks;   // s_n previously unserved tasks
  std::size_t peer_index = 0;        // pool entry the shared tasks come from
};

struct Evaluation {
  std::string worker_id;
  Matrix raw_trust;
  StochasticMatrix projected_trust;
  double reward;  // always beta * (trace(raw) - 1)
  double payout;  // reward, optionally floored at zero
  bool informative;
  std::string peer_source_id;
  int shared_task_count;
};

enum class AbortReason { support_hole, not_well_defined, ill_conditioned, solver_failure };

const char* to_string(AbortReason r);

struct EvalOutcome {
  std::optional<Evaluation> evaluation;
  std::optional<AbortReason> abort;
  bool ok() const { return evaluation.has_value(); }
};

// Ledger events, stamped with strictly increasing sequence numbers.
struct LedgerEvaluation {
  std::uint64_t seq;
  std::string worker_id;
  std::string strategy_tag;
  std::string peer_source_id;
  double reward;
  double trace_raw;
  bool informative;
  int shared_task_count;
  Matrix raw_trust;  // the solved matrix behind reward and trace_raw
};

struct LedgerAdmission {
  std::uint64_t seq;
  std::string source_id;
  std::size_t entry_index;
  int answer_count;
};

struct LedgerAbort {
  std::uint64_t seq;
  std::string worker_id;
  std::string peer_source_id;
  AbortReason reason;
};

class Ledger {
 public:
  using Event = std::variant<LedgerEvaluation, LedgerAdmission, LedgerAbort>;

  std::uint64_t append(LedgerEvaluation e);
  std::uint64_t append(LedgerAdmission e);
  std::uint64_t append(LedgerAbort e);

  const std::vector<Event>& events() const { return events_; }
  std::vector<LedgerEvaluation> evaluations() const;
  std::vector<LedgerAdmission> admissions() const;
  std::vector<LedgerAbort> aborts() const;

  // Delimiter-separated export, one row per evaluation:
  // seq,worker_id,strategy_tag,peer_source_id,reward,trace_raw,informative,shared_task_count
  std::string to_csv() const;

 private:
  std::vector<Event> events_;
  std::uint64_t next_seq_ = 0;
};

// Supplies fresh task ids. A negative limit means unbounded.
class TaskSupply {
 public:
  explicit TaskSupply(std::int64_t limit = -1) : limit_(limit) {}
  std::optional<TaskId> next();
  std::int64_t created() const { return next_id_; }

 private:
  std::int64_t limit_;
  TaskId next_id_ = 0;
};

class Mechanism {
 public:
  // Seeds the pool with the oracle's answers. The oracle's trust must not
  // have identical rows.
  Mechanism(MechanismConfig config, std::vector<TaskAnswer> oracle_answers,
            TrustworthinessMatrix t_oracle, std::string oracle_id = "oracle");

  const MechanismConfig& config() const { return config_; }
  const std::vector<PoolEntry>& pool() const { return pool_; }
  const Ledger& ledger() const { return ledger_; }

  // Selects a pool entry per policy (skipping excluded/capped entries),
  // takes s_o of its answered tasks as the shared portion and s_n fresh
  // tasks from the supply. Nothing to draft -> nullopt.
  std::optional<Batch> draft_batch(TaskSupply& supply,
                                   std::span<const std::size_t> exclude_entries = {});

  // Pairs shared-task answers with the peer entry's stored answers and
  // runs the estimation pipeline. Malformed submissions are rejected with
  // an exception; estimation failures come back as aborts.
  EvalOutcome evaluate_submission(const Batch& batch, std::span<const TaskAnswer> submitted,
                                  const std::string& worker_id,
                                  const std::string& strategy_tag = "");

  // Appends the worker's fresh-task answers as a new pool entry when the
  // evaluation was informative. Returns true when admitted.
  bool admit_to_pool(const Evaluation& evaluation, std::vector<TaskAnswer> fresh_answers);

  bool pool_starved() const;  // every entry at its fanout cap

  std::int64_t answers_collected(TaskId task) const;
  std::int64_t tasks_covered() const;  // tasks with answers_collected >= target

  std::string export_pool_json() const;

 private:
  MechanismConfig config_;
  std::vector<PoolEntry> pool_;
  Ledger ledger_;
  std::unordered_map<TaskId, std::int64_t> coverage_;

  void record_coverage(std::span<const TaskAnswer> submitted);
};

// Drives the draft/submit/evaluate/admit loop over a worker stream until
// the stream ends or the pool starves.
struct WorkerHandle {
  std::string id;
  std::string strategy_tag;
  std::function<std::vector<TaskAnswer>(const Batch&)> solve;
};

class WorkerStream {
 public:
  virtual ~WorkerStream() = default;
  virtual std::optional<WorkerHandle> next() = 0;
};

struct RunReport {
  int workers_seen = 0;
  int evaluated = 0;
  int admitted = 0;
  int unevaluated = 0;
  bool pool_starved = false;
  std::int64_t tasks_created = 0;
  std::int64_t tasks_covered = 0;
};

RunReport run_mechanism(Mechanism& mechanism, WorkerStream& workers, TaskSupply& supply);

}  // namespace dbt
