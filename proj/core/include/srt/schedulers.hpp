#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srt/model.hpp"

namespace srt {

struct Interval {
  double start = 0.0;
  double end = 0.0;
  double length() const { return end - start; }
};

/// One released task. `trueWorkload` is hidden from non-clairvoyant schedulers;
/// `believedWorkload` is what estimate-based schedulers plan with.
struct TaskInstance {
  std::size_t user = 0;
  double release = 0.0;
  double deadline = 0.0;
  double trueWorkload = 0.0;
  std::optional<double> believedWorkload;
  double processed = 0.0;
  std::optional<double> completedAt;
};

struct Segment {
  double start;
  double end;
  std::size_t user;
  std::size_t task;  ///< index into PeriodOutcome::tasks
};

struct ScheduleTrace {
  Interval interval;
  std::vector<std::vector<Segment>> perCore;
};

/// Everything observed in one scheduling interval (a period, or a super period).
/// Work quantities are in work units, i.e. time units on unit-speed cores.
struct PeriodOutcome {
  std::vector<std::size_t> released;
  std::vector<std::size_t> completions;  ///< Y_i
  std::vector<double> busy;              ///< work performed for user i (U_{i})
  std::vector<std::size_t> unfinished;   ///< A_i: started but missed the deadline
  std::vector<double> residual;          ///< E_i: remaining work of unfinished tasks
  ScheduleTrace trace;
  std::vector<TaskInstance> tasks;

  double total_busy() const;
};

enum class GreedyMode { preemptive, nonPreemptive };

/// Greedy list scheduling of `tasks`, given in priority order (highest first).
///
/// Identical cores: the first m tasks start at the interval start and each
/// freed core takes the highest-priority waiting task. With differing speeds,
/// preemptive mode keeps the k-th highest-priority available task on the k-th
/// fastest core at every instant; non-preemptive mode places tasks fastest-core
/// first and never migrates them.
///
/// `budgets`, when non-empty, caps the work spent on each task; a task that
/// hits its cap without completing is abandoned.
PeriodOutcome greedy_schedule(std::span<const TaskInstance> tasks, std::span<const CoreSpec> cores,
                              Interval interval, GreedyMode mode, std::size_t users,
                              std::span<const double> budgets = {});

/// Per-task rank (lower runs first) recomputed at reprioritization boundaries.
using RankFunction = std::function<std::vector<double>(double now, std::span<const TaskInstance> tasks)>;

struct PriorityScheduleOptions {
  GreedyMode mode = GreedyMode::preemptive;
  RankFunction rank;
  /// Times inside the interval at which `rank` is re-evaluated (the start is implied).
  std::vector<double> boundaries;
  std::vector<double> budgets;
};

/// Event-driven priority scheduling for tasks with arbitrary releases and
/// deadlines. Events are releases, deadlines, completions and boundaries.
PeriodOutcome priority_schedule(std::vector<TaskInstance> tasks, std::span<const CoreSpec> cores,
                                Interval interval, std::size_t users,
                                const PriorityScheduleOptions& options);

/// LLREF on identical cores for tasks sharing one release and deadline: at the
/// start and whenever a running task completes or a waiting task reaches zero
/// laxity, the m tasks with largest local remaining execution time run.
/// Remaining time and laxity are computed from believedWorkload when present;
/// a task whose believed budget runs out before it truly completes is stopped.
/// Throws DomainError if the cores differ in speed or the believed workloads
/// exceed the interval's capacity.
PeriodOutcome llref_schedule(std::span<const TaskInstance> selected, std::span<const CoreSpec> cores,
                             Interval interval, std::size_t users);

/// Longest prefix d_1..d_j of `decision` whose workloads sum to at most `capacity`.
std::vector<std::size_t> ts_select(const PriorityDecision& decision, std::span<const double> workloads,
                                   double capacity);

/// Task selection on `estimates` against capacity S_m * length, then LLREF on
/// the selected tasks with believed workloads set to the estimates.
PeriodOutcome heuristic_ts_llref(std::span<const TaskInstance> tasks, const PriorityDecision& decision,
                                 std::span<const CoreSpec> cores, Interval interval,
                                 std::span<const double> estimates);

/// LLREF over a super period: the interval is cut at `boundaries` and each
/// selected task receives local budget (piece length / its period) x believed
/// workload in every piece of its window. Unselected tasks are not processed.
PeriodOutcome llref_super_period(std::span<const TaskInstance> tasks, std::span<const bool> selectedUser,
                                 std::span<const double> periods, std::span<const CoreSpec> cores,
                                 Interval interval, std::span<const double> boundaries, std::size_t users);

/// Earliest absolute deadline first, ties by task index.
PriorityDecision edf_order(std::span<const TaskInstance> tasks);

/// Sorted distinct release/deadline instants in [0, Δ].
std::vector<double> fine_grained_ldf_intervals(const SystemSpec& system);

// --- reservation-based static sharing ---------------------------------------

/// Reason a set of per-period reservations (work units) cannot be packed onto
/// `cores`, or nullopt when they fit.
std::optional<std::string> check_reservation(std::span<const double> reservations,
                                             std::span<const double> periods,
                                             std::span<const CoreSpec> cores);

struct Allotment {
  double start;
  double end;
  std::size_t core;
};

/// Static per-interval allotments guaranteeing each user its reservation in
/// every one of its periods.
struct ReservationPlan {
  Interval interval;
  std::vector<double> reservation;  ///< w_i(q_i), work units per task
  std::vector<double> speeds;
  std::vector<std::vector<Allotment>> perUser;  ///< time-ordered
};

/// Reservations w_i = quantile(W_i, q_i) (0 when q_i = 0), validated with
/// check_reservation (InfeasibleReservation on failure) and packed: wrap-around
/// on identical cores with a common period, local-workload LLREF for differing
/// periods, and the level algorithm for cores with different speeds.
ReservationPlan plan_reservation(const SystemSpec& system, const QuantileOptions& opts = {});

/// Runs each task inside its user's allotments within its window; a task gets
/// exactly min(trueWorkload, reservation) work.
PeriodOutcome reservation_schedule(const ReservationPlan& plan, std::span<const TaskInstance> tasks,
                                   std::size_t users);

/// Convenience: plan and execute in one step.
PeriodOutcome reservation_schedule(const SystemSpec& system, std::span<const TaskInstance> tasks);

// --- validation -------------------------------------------------------------

/// Checks segments lie in the interval, do not overlap on a core, and that no
/// task runs on two cores at once. Returns a description of the first problem.
std::optional<std::string> validate_trace(const ScheduleTrace& trace);

/// Checks the outcome's accounting against its tasks and the capacity bound.
std::optional<std::string> validate_outcome(const PeriodOutcome& outcome,
                                            std::span<const CoreSpec> cores);

}  // namespace srt
