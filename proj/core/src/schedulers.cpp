#include "srt/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "schedule_detail.hpp"
#include "srt/errors.hpp"

namespace srt {

using detail::time_eps;
using detail::work_eps;

double PeriodOutcome::total_busy() const {
  return std::accumulate(busy.begin(), busy.end(), 0.0);
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

bool same_speed(std::span<const CoreSpec> cores) {
  return std::all_of(cores.begin(), cores.end(),
                     [&](const CoreSpec& c) { return c.speed == cores.front().speed; });
}

std::vector<std::size_t> cores_fastest_first(std::span<const CoreSpec> cores) {
  std::vector<std::size_t> order(cores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cores[a].speed > cores[b].speed; });
  return order;
}

// Identical cores, common release and deadline: plain list scheduling.
PeriodOutcome greedy_list(std::span<const TaskInstance> in, std::span<const CoreSpec> cores,
                          Interval iv, std::size_t users, std::span<const double> budgets) {
  std::vector<TaskInstance> tasks(in.begin(), in.end());
  const double speed = cores.front().speed;
  const double eps = time_eps(iv);
  detail::TraceBuilder tb(iv, cores.size());

  using Slot = std::pair<double, std::size_t>;  // (free time, core)
  std::priority_queue<Slot, std::vector<Slot>, std::greater<>> free;
  for (std::size_t c = 0; c < cores.size(); ++c) free.push({iv.start, c});

  for (std::size_t k = 0; k < tasks.size(); ++k) {
    auto& t = tasks[k];
    t.processed = 0.0;
    t.completedAt.reset();
    const auto [at, core] = free.top();
    if (at >= iv.end - eps) break;
    free.pop();
    const double cap = budgets.empty() ? std::numeric_limits<double>::infinity() : budgets[k];
    const double want = std::min(t.trueWorkload, cap);
    const double finish = at + want / speed;
    if (finish <= iv.end + eps) {
      const double stop = std::min(finish, iv.end);
      t.processed = want;
      if (t.trueWorkload <= cap + work_eps(cap)) t.completedAt = stop;
      tb.add(core, at, stop, t.user, k);
      free.push({stop, core});
    } else {
      t.processed = (iv.end - at) * speed;
      tb.add(core, at, iv.end, t.user, k);
      free.push({iv.end, core});
    }
  }
  return detail::finalize(std::move(tasks), tb.take(), users);
}

}  // namespace

PeriodOutcome greedy_schedule(std::span<const TaskInstance> tasks, std::span<const CoreSpec> cores,
                              Interval interval, GreedyMode mode, std::size_t users,
                              std::span<const double> budgets) {
  if (cores.empty()) throw DomainError("greedy_schedule: no cores");
  if (!budgets.empty() && budgets.size() != tasks.size()) {
    throw DomainError("greedy_schedule: one budget per task required");
  }
  const double eps = time_eps(interval);
  const bool common = std::all_of(tasks.begin(), tasks.end(), [&](const TaskInstance& t) {
    return std::abs(t.release - interval.start) <= eps && t.deadline >= interval.end - eps;
  });
  if (common && same_speed(cores)) return greedy_list(tasks, cores, interval, users, budgets);

  PriorityScheduleOptions opt;
  opt.mode = mode;
  opt.budgets.assign(budgets.begin(), budgets.end());
  return priority_schedule(std::vector<TaskInstance>(tasks.begin(), tasks.end()), cores, interval,
                           users, opt);
}

PeriodOutcome priority_schedule(std::vector<TaskInstance> tasks, std::span<const CoreSpec> cores,
                                Interval iv, std::size_t users, const PriorityScheduleOptions& options) {
  if (cores.empty()) throw DomainError("priority_schedule: no cores");
  const std::size_t m = cores.size();
  const std::size_t n = tasks.size();
  if (!options.budgets.empty() && options.budgets.size() != n) {
    throw DomainError("priority_schedule: one budget per task required");
  }
  const double eps = time_eps(iv);
  const auto order = cores_fastest_first(cores);
  detail::TraceBuilder tb(iv, m);

  for (auto& t : tasks) {
    t.processed = 0.0;
    t.completedAt.reset();
  }
  auto cap = [&](std::size_t k) {
    return options.budgets.empty() ? std::numeric_limits<double>::infinity() : options.budgets[k];
  };

  std::vector<double> rank(n);
  std::iota(rank.begin(), rank.end(), 0.0);
  if (options.rank) rank = options.rank(iv.start, tasks);
  std::vector<double> boundaries = options.boundaries;
  std::sort(boundaries.begin(), boundaries.end());
  std::size_t nextBoundary = 0;

  std::vector<bool> dropped(n, false);
  std::vector<std::size_t> coreOf(n, kNone);
  std::vector<std::size_t> taskOn(m, kNone);
  auto finished = [&](std::size_t k) { return tasks[k].completedAt.has_value() || dropped[k]; };
  auto unassign = [&](std::size_t k) {
    if (coreOf[k] != kNone) taskOn[coreOf[k]] = kNone;
    coreOf[k] = kNone;
  };
  auto by_rank = [&](std::size_t a, std::size_t b) {
    return rank[a] != rank[b] ? rank[a] < rank[b] : a < b;
  };

  double now = iv.start;
  for (;;) {
    for (std::size_t k = 0; k < n; ++k) {
      if (finished(k)) continue;
      if (tasks[k].deadline <= now + eps || tasks[k].processed >= cap(k) - work_eps(cap(k))) {
        dropped[k] = true;
        unassign(k);
      }
    }
    bool reprioritize = false;
    while (nextBoundary < boundaries.size() && boundaries[nextBoundary] <= now + eps) {
      reprioritize |= boundaries[nextBoundary] > iv.start + eps;
      ++nextBoundary;
    }
    if (reprioritize && options.rank) rank = options.rank(now, tasks);
    if (now >= iv.end - eps) break;

    for (bool changed = true; changed;) {
      changed = false;
      std::vector<std::size_t> avail;
      for (std::size_t k = 0; k < n; ++k) {
        if (!finished(k) && tasks[k].release <= now + eps) avail.push_back(k);
      }
      std::sort(avail.begin(), avail.end(), by_rank);

      if (options.mode == GreedyMode::preemptive) {
        const std::size_t top = std::min(m, avail.size());
        std::vector<std::size_t> next(m, kNone);
        // walk speed classes fastest first; inside a class keep tasks on their core
        for (std::size_t lo = 0, pos = 0; lo < m;) {
          std::size_t hi = lo + 1;
          while (hi < m && cores[order[hi]].speed == cores[order[lo]].speed) ++hi;
          const std::size_t take = std::min(hi - lo, top > pos ? top - pos : 0);
          std::vector<std::size_t> pending;
          for (std::size_t j = pos; j < pos + take; ++j) {
            const std::size_t k = avail[j];
            const bool stays = std::any_of(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                           order.begin() + static_cast<std::ptrdiff_t>(hi),
                                           [&](std::size_t c) { return c == coreOf[k]; });
            if (stays) {
              next[coreOf[k]] = k;
            } else {
              pending.push_back(k);
            }
          }
          std::size_t p = 0;
          for (std::size_t i = lo; i < hi && p < pending.size(); ++i) {
            if (next[order[i]] == kNone) next[order[i]] = pending[p++];
          }
          pos += take;
          lo = hi;
        }
        std::fill(coreOf.begin(), coreOf.end(), kNone);
        taskOn = next;
        for (std::size_t c = 0; c < m; ++c) {
          if (taskOn[c] != kNone) coreOf[taskOn[c]] = c;
        }
      } else {
        std::size_t w = 0;
        for (std::size_t c : order) {
          if (taskOn[c] != kNone) continue;
          while (w < avail.size() && coreOf[avail[w]] != kNone) ++w;
          if (w == avail.size()) break;
          taskOn[c] = avail[w];
          coreOf[avail[w]] = c;
          ++w;
        }
      }
      // zero-work tasks complete the moment they get a core
      for (std::size_t c = 0; c < m; ++c) {
        const std::size_t k = taskOn[c];
        if (k == kNone) continue;
        const double left = std::min(tasks[k].trueWorkload, cap(k)) - tasks[k].processed;
        if (left <= work_eps(tasks[k].trueWorkload)) {
          if (detail::is_done(tasks[k])) {
            tasks[k].completedAt = now;
          } else {
            dropped[k] = true;
          }
          unassign(k);
          changed = true;
        }
      }
    }

    double next = iv.end;
    for (std::size_t c = 0; c < m; ++c) {
      const std::size_t k = taskOn[c];
      if (k == kNone) continue;
      const double left = std::min(tasks[k].trueWorkload, cap(k)) - tasks[k].processed;
      next = std::min(next, now + left / cores[c].speed);
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (finished(k)) continue;
      if (tasks[k].release > now + eps) next = std::min(next, tasks[k].release);
      if (tasks[k].deadline > now + eps) next = std::min(next, tasks[k].deadline);
    }
    if (nextBoundary < boundaries.size()) next = std::min(next, boundaries[nextBoundary]);
    next = std::max(next, now);

    const double dt = next - now;
    for (std::size_t c = 0; c < m; ++c) {
      const std::size_t k = taskOn[c];
      if (k == kNone) continue;
      const double limit = std::min(tasks[k].trueWorkload, cap(k));
      tasks[k].processed = std::min(limit, tasks[k].processed + cores[c].speed * dt);
      tb.add(c, now, next, tasks[k].user, k);
    }
    now = next;
    for (std::size_t c = 0; c < m; ++c) {
      const std::size_t k = taskOn[c];
      if (k == kNone) continue;
      if (detail::is_done(tasks[k])) {
        tasks[k].completedAt = now;
        unassign(k);
      }
    }
  }
  return detail::finalize(std::move(tasks), tb.take(), users);
}

std::vector<std::size_t> ts_select(const PriorityDecision& decision, std::span<const double> workloads,
                                   double capacity) {
  if (!(capacity > 0.0)) throw DomainError("ts_select: capacity must be > 0");
  std::vector<std::size_t> chosen;
  double sum = 0.0;
  const double tol = 1e-12 * std::max(1.0, capacity);
  for (std::size_t u : decision.order) {
    if (sum + workloads[u] > capacity + tol) break;
    sum += workloads[u];
    chosen.push_back(u);
  }
  return chosen;
}

PriorityDecision edf_order(std::span<const TaskInstance> tasks) {
  PriorityDecision d{std::vector<std::size_t>(tasks.size())};
  std::iota(d.order.begin(), d.order.end(), std::size_t{0});
  std::stable_sort(d.order.begin(), d.order.end(), [&](std::size_t a, std::size_t b) {
    return tasks[a].deadline < tasks[b].deadline;
  });
  return d;
}

std::vector<double> fine_grained_ldf_intervals(const SystemSpec& system) {
  const double horizon = system.super_period();
  std::vector<double> pts;
  for (std::size_t i = 0; i < system.n(); ++i) {
    const double p = system.users()[i].period;
    for (std::size_t k = 0; k <= system.tasks_per_interval(i); ++k) {
      pts.push_back(std::min(horizon, p * static_cast<double>(k)));
    }
  }
  std::sort(pts.begin(), pts.end());
  const double eps = 1e-9 * std::max(1.0, horizon);
  std::vector<double> out;
  for (double t : pts) {
    if (out.empty() || t - out.back() > eps) out.push_back(t);
  }
  out.back() = horizon;
  return out;
}

std::optional<std::string> validate_trace(const ScheduleTrace& trace) {
  const double eps = time_eps(trace.interval);
  std::vector<Segment> all;
  for (std::size_t c = 0; c < trace.perCore.size(); ++c) {
    const auto& segs = trace.perCore[c];
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const auto& s = segs[i];
      std::ostringstream where;
      where << "core " << c << " segment [" << s.start << ", " << s.end << ") user " << s.user;
      if (!(s.end > s.start)) return where.str() + ": empty or reversed";
      if (s.start < trace.interval.start - eps || s.end > trace.interval.end + eps) {
        return where.str() + ": outside the interval";
      }
      if (i > 0 && s.start < segs[i - 1].end - eps) return where.str() + ": overlaps previous segment";
      all.push_back(s);
    }
  }
  std::sort(all.begin(), all.end(), [](const Segment& a, const Segment& b) {
    return a.user != b.user ? a.user < b.user : a.start < b.start;
  });
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].user == all[i - 1].user && all[i].start < all[i - 1].end - eps) {
      std::ostringstream os;
      os << "user " << all[i].user << " runs on two cores at t=" << all[i].start;
      return os.str();
    }
  }
  return std::nullopt;
}

std::optional<std::string> validate_outcome(const PeriodOutcome& out, std::span<const CoreSpec> cores) {
  if (auto bad = validate_trace(out.trace)) return bad;
  const std::size_t users = out.completions.size();
  double capacity = 0.0;
  for (const auto& c : cores) capacity += c.speed;
  capacity *= out.trace.interval.length();

  double traced = 0.0;
  for (std::size_t c = 0; c < out.trace.perCore.size(); ++c) {
    for (const auto& s : out.trace.perCore[c]) traced += (s.end - s.start) * cores[c].speed;
  }
  const double total = out.total_busy();
  const double tol = 1e-7 * std::max(1.0, capacity);
  if (total > capacity + tol) return "busy work exceeds core capacity";
  if (std::abs(traced - total) > tol) return "traced work differs from accounted work";

  for (std::size_t u = 0; u < users; ++u) {
    if (out.completions[u] + out.unfinished[u] > out.released[u]) {
      return "user " + std::to_string(u) + ": completions + unfinished exceed releases";
    }
    if (out.residual[u] > tol && out.unfinished[u] == 0) {
      return "user " + std::to_string(u) + ": residual work without an unfinished task";
    }
  }
  for (const auto& t : out.tasks) {
    if (t.processed > t.trueWorkload + work_eps(t.trueWorkload)) return "task processed beyond its workload";
    if (t.completedAt && (*t.completedAt < t.release - 1e-9 || *t.completedAt > t.deadline + 1e-9)) {
      return "task completed outside its window";
    }
  }
  return std::nullopt;
}

}  // namespace srt
