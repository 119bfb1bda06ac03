#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "schedule_detail.hpp"
#include "srt/errors.hpp"
#include "srt/schedulers.hpp"

namespace srt {

using detail::time_eps;

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Job {
  std::size_t task;
  double lre;   // local remaining execution time, from the believed budget
  double rank;  // lower wins ties and zero-laxity overload
  bool active = true;
};

void require_identical(std::span<const CoreSpec> cores, const char* who) {
  if (cores.empty()) throw DomainError(std::string(who) + ": no cores");
  for (const auto& c : cores) {
    if (c.speed != cores.front().speed) throw DomainError(std::string(who) + ": cores must be identical");
  }
}

// One LLREF piece: every job shares the piece [iv.start, iv.end] as its window.
void run_piece(std::vector<TaskInstance>& tasks, std::vector<Job>& jobs, std::size_t m, double speed,
               Interval iv, detail::TraceBuilder& tb) {
  const double eps = time_eps(iv);
  auto true_left = [&](const Job& j) {
    const auto& t = tasks[j.task];
    return (t.trueWorkload - t.processed) / speed;
  };
  auto true_eps = [&](const Job& j) { return detail::work_eps(tasks[j.task].trueWorkload) / speed; };
  for (auto& j : jobs) {
    if (j.lre <= eps || true_left(j) <= true_eps(j) || tasks[j.task].completedAt) j.active = false;
  }

  std::vector<std::size_t> coreOf(jobs.size(), kNone);
  std::vector<std::size_t> jobOn(m, kNone);
  double now = iv.start;
  while (now < iv.end - eps) {
    std::vector<std::size_t> live;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (jobs[j].active) live.push_back(j);
    }
    if (live.empty()) break;
    auto by_rank = [&](std::size_t a, std::size_t b) {
      return jobs[a].rank != jobs[b].rank ? jobs[a].rank < jobs[b].rank : a < b;
    };
    // more zero-laxity jobs than cores: the lowest-priority ones cannot all finish
    std::vector<std::size_t> tight;
    for (std::size_t j : live) {
      if (iv.end - now - jobs[j].lre <= eps) tight.push_back(j);
    }
    if (tight.size() > m) {
      std::sort(tight.begin(), tight.end(), by_rank);
      for (std::size_t i = m; i < tight.size(); ++i) jobs[tight[i]].active = false;
      std::erase_if(live, [&](std::size_t j) { return !jobs[j].active; });
    }
    std::sort(live.begin(), live.end(), [&](std::size_t a, std::size_t b) {
      return jobs[a].lre != jobs[b].lre ? jobs[a].lre > jobs[b].lre : by_rank(a, b);
    });
    live.resize(std::min(live.size(), m));

    std::vector<std::size_t> next(m, kNone);
    std::vector<std::size_t> pending;
    for (std::size_t j : live) {
      if (coreOf[j] != kNone) {
        next[coreOf[j]] = j;
      } else {
        pending.push_back(j);
      }
    }
    for (std::size_t c = 0, p = 0; c < m && p < pending.size(); ++c) {
      if (next[c] == kNone) next[c] = pending[p++];
    }
    std::fill(coreOf.begin(), coreOf.end(), kNone);
    jobOn = next;
    for (std::size_t c = 0; c < m; ++c) {
      if (jobOn[c] != kNone) coreOf[jobOn[c]] = c;
    }

    double until = iv.end;
    for (std::size_t c = 0; c < m; ++c) {
      if (jobOn[c] == kNone) continue;
      const auto& j = jobs[jobOn[c]];
      until = std::min(until, now + std::min(j.lre, true_left(j)));
    }
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (!jobs[j].active || coreOf[j] != kNone) continue;
      const double laxity = iv.end - now - jobs[j].lre;
      if (laxity > eps) until = std::min(until, now + laxity);
    }
    until = std::max(until, now);

    const double dt = until - now;
    for (std::size_t c = 0; c < m; ++c) {
      if (jobOn[c] == kNone) continue;
      auto& j = jobs[jobOn[c]];
      auto& t = tasks[j.task];
      j.lre -= dt;
      t.processed = std::min(t.trueWorkload, t.processed + dt * speed);
      tb.add(c, now, until, t.user, j.task);
    }
    now = until;
    for (std::size_t c = 0; c < m; ++c) {
      if (jobOn[c] == kNone) continue;
      auto& j = jobs[jobOn[c]];
      if (true_left(j) <= true_eps(j)) {
        tasks[j.task].completedAt = now;
        j.active = false;
      } else if (j.lre <= eps) {
        j.active = false;
      }
      if (!j.active) {
        coreOf[jobOn[c]] = kNone;
        jobOn[c] = kNone;
      }
    }
  }
}

PeriodOutcome llref_subset(std::vector<TaskInstance> tasks, std::span<const std::size_t> selected,
                           std::span<const CoreSpec> cores, Interval iv, std::size_t users) {
  for (auto& t : tasks) {
    t.processed = 0.0;
    t.completedAt.reset();
  }
  const double speed = cores.front().speed;
  std::vector<Job> jobs;
  double believed = 0.0;
  for (std::size_t r = 0; r < selected.size(); ++r) {
    const auto& t = tasks[selected[r]];
    const double w = t.believedWorkload.value_or(t.trueWorkload);
    believed += w;
    jobs.push_back({selected[r], w / speed, static_cast<double>(r)});
  }
  const double capacity = speed * static_cast<double>(cores.size()) * iv.length();
  if (believed > capacity * (1.0 + 1e-12) + 1e-12) {
    throw DomainError("llref: selected workload exceeds interval capacity");
  }
  detail::TraceBuilder tb(iv, cores.size());
  run_piece(tasks, jobs, cores.size(), speed, iv, tb);
  return detail::finalize(std::move(tasks), tb.take(), users);
}

}  // namespace

PeriodOutcome llref_schedule(std::span<const TaskInstance> selected, std::span<const CoreSpec> cores,
                             Interval interval, std::size_t users) {
  require_identical(cores, "llref_schedule");
  std::vector<std::size_t> all(selected.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return llref_subset(std::vector<TaskInstance>(selected.begin(), selected.end()), all, cores, interval,
                      users);
}

PeriodOutcome heuristic_ts_llref(std::span<const TaskInstance> tasks, const PriorityDecision& decision,
                                 std::span<const CoreSpec> cores, Interval interval,
                                 std::span<const double> estimates) {
  require_identical(cores, "heuristic_ts_llref");
  std::size_t users = 0;
  for (const auto& t : tasks) users = std::max(users, t.user + 1);
  if (estimates.size() < users) throw DomainError("heuristic_ts_llref: one estimate per user required");

  std::vector<std::size_t> taskOf(users, kNone);
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    if (taskOf[tasks[k].user] != kNone) throw DomainError("heuristic_ts_llref: one task per user expected");
    taskOf[tasks[k].user] = k;
  }
  const double capacity = cores.front().speed * static_cast<double>(cores.size()) * interval.length();
  std::vector<TaskInstance> copy(tasks.begin(), tasks.end());
  std::vector<std::size_t> picked;
  for (std::size_t u : ts_select(decision, estimates, capacity)) {
    if (u >= users || taskOf[u] == kNone) continue;
    copy[taskOf[u]].believedWorkload = estimates[u];
    picked.push_back(taskOf[u]);
  }
  return llref_subset(std::move(copy), picked, cores, interval, users);
}

PeriodOutcome llref_super_period(std::span<const TaskInstance> tasks, std::span<const bool> selectedUser,
                                 std::span<const double> periods, std::span<const CoreSpec> cores,
                                 Interval interval, std::span<const double> boundaries, std::size_t users) {
  require_identical(cores, "llref_super_period");
  const double speed = cores.front().speed;
  const std::size_t m = cores.size();

  std::vector<double> peak(users, 0.0);
  for (const auto& t : tasks) {
    if (selectedUser[t.user]) peak[t.user] = std::max(peak[t.user], t.believedWorkload.value_or(t.trueWorkload));
  }
  double density = 0.0;
  for (std::size_t u = 0; u < users; ++u) density += peak[u] / periods[u];
  if (density > speed * static_cast<double>(m) * (1.0 + 1e-9)) {
    throw DomainError("llref_super_period: selected utilization exceeds capacity");
  }

  std::vector<TaskInstance> work(tasks.begin(), tasks.end());
  for (auto& t : work) {
    t.processed = 0.0;
    t.completedAt.reset();
  }
  std::vector<double> cuts(boundaries.begin(), boundaries.end());
  cuts.push_back(interval.start);
  cuts.push_back(interval.end);
  std::sort(cuts.begin(), cuts.end());
  const double eps = time_eps(interval);

  detail::TraceBuilder tb(interval, m);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Interval piece{std::max(cuts[i], interval.start), std::min(cuts[i + 1], interval.end)};
    if (piece.length() <= eps) continue;
    std::vector<Job> jobs;
    for (std::size_t k = 0; k < work.size(); ++k) {
      const auto& t = work[k];
      if (!selectedUser[t.user] || t.completedAt) continue;
      if (t.release > piece.start + eps || t.deadline < piece.end - eps) continue;
      const double w = t.believedWorkload.value_or(t.trueWorkload);
      const double local = piece.length() / periods[t.user] * w;
      jobs.push_back({k, local / speed, static_cast<double>(t.user)});
    }
    run_piece(work, jobs, m, speed, piece, tb);
  }
  return detail::finalize(std::move(work), tb.take(), users);
}

}  // namespace srt
