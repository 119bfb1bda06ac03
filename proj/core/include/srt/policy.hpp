#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srt/model.hpp"
#include "srt/schedulers.hpp"

namespace srt {

enum class SchedulerKind {
  reservation,
  ldfGreedy,      ///< LDF priorities, preemptive greedy (speed-aware on uniform cores)
  ldfGreedyNp,    ///< LDF priorities, non-preemptive greedy
  ldfTsLlref,     ///< LDF + task selection on mean workloads + LLREF
  ldfTsLlrefEst,  ///< LDF + task selection on per-user estimates + LLREF
  edfGreedy,      ///< earliest deadline first over a super period
  ldfFineGrained  ///< LDF re-sorted at every release/deadline inside a super period
};

/// Accepts the identifiers used in scenario files, e.g. `ldf-ts-llref`.
/// Throws ConfigError for unknown names.
SchedulerKind parse_scheduler(std::string_view name);
std::string scheduler_name(SchedulerKind kind);

/// A scheduler bound to one system: validates that it suits the period and
/// core structure (ConfigError otherwise) and precomputes what it can.
class IntervalScheduler {
 public:
  IntervalScheduler(const SystemSpec& system, SchedulerKind kind, const QuantileOptions& opts = {});

  SchedulerKind kind() const { return kind_; }

  /// Schedules the tasks released in `iv` (one period, or one super period).
  PeriodOutcome run(std::span<const TaskInstance> tasks, const PriorityDecision& decision,
                    const DeficitVector& deficit, Interval iv) const;

 private:
  const SystemSpec* system_;
  SchedulerKind kind_;
  std::vector<double> periods_;
  std::vector<double> estimates_;
  std::vector<double> boundaries_;  // fine-grained cut points relative to the interval start
  std::optional<ReservationPlan> plan_;
};

/// Draws every task released in `iv` (iv.start is a multiple of the super
/// period). User i's workloads come from `userRngs[i]`. When `parts` is given,
/// it receives the sub-task draws of each task, in task order.
std::vector<TaskInstance> release_tasks(const SystemSpec& system, Interval iv, std::span<Rng> userRngs,
                                        std::vector<std::vector<double>>* parts = nullptr);

}  // namespace srt
