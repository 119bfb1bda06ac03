#pragma once

// Shared bookkeeping for the scheduler engines; not installed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "srt/schedulers.hpp"

namespace srt::detail {

inline double time_eps(const Interval& iv) { return 1e-9 * std::max(1.0, iv.length()); }

inline double work_eps(double work) { return 1e-9 * std::max(1.0, std::abs(work)); }

inline bool is_done(const TaskInstance& t) {
  return t.trueWorkload - t.processed <= work_eps(t.trueWorkload);
}

class TraceBuilder {
 public:
  TraceBuilder(Interval iv, std::size_t cores) : trace_{iv, std::vector<std::vector<Segment>>(cores)} {}

  /// Appends [start, end) of `task` on `core`, extending the previous segment
  /// when it is contiguous and belongs to the same task.
  void add(std::size_t core, double start, double end, std::size_t user, std::size_t task) {
    if (!(end > start)) return;
    auto& segs = trace_.perCore[core];
    if (!segs.empty() && segs.back().task == task && segs.back().end == start) {
      segs.back().end = end;
      return;
    }
    segs.push_back({start, end, user, task});
  }

  ScheduleTrace take() {
    for (auto& segs : trace_.perCore) {
      std::sort(segs.begin(), segs.end(),
                [](const Segment& a, const Segment& b) { return a.start < b.start; });
    }
    return std::move(trace_);
  }

 private:
  ScheduleTrace trace_;
};

/// Fills the per-user counters from final task states; a task counts as
/// completed iff the engine stamped `completedAt`.
inline PeriodOutcome finalize(std::vector<TaskInstance> tasks, ScheduleTrace trace, std::size_t users) {
  PeriodOutcome out;
  out.released.assign(users, 0);
  out.completions.assign(users, 0);
  out.busy.assign(users, 0.0);
  out.unfinished.assign(users, 0);
  out.residual.assign(users, 0.0);
  for (auto& t : tasks) {
    const std::size_t u = t.user;
    ++out.released[u];
    if (t.completedAt) {
      t.processed = t.trueWorkload;
      ++out.completions[u];
    } else {
      if (t.processed > 0.0) {
        ++out.unfinished[u];
        out.residual[u] += t.trueWorkload - t.processed;
      }
    }
    out.busy[u] += t.processed;
  }
  out.tasks = std::move(tasks);
  out.trace = std::move(trace);
  return out;
}

}  // namespace srt::detail
