#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "schedule_detail.hpp"
#include "srt/errors.hpp"
#include "srt/schedulers.hpp"

namespace srt {

namespace {

bool fits(double lhs, double rhs) { return lhs <= rhs + 1e-9 * std::max(1.0, rhs); }

// Horvath-Lam-Sethi level algorithm on uniform cores for jobs sharing `iv`.
// Jobs at equal remaining work share their cores through cyclic sub-slots so
// that no job is ever on two cores at once.
void level_pack(std::span<const double> work, std::span<const CoreSpec> cores, Interval iv,
                std::vector<std::vector<Allotment>>& perJob) {
  const std::size_t m = cores.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cores[a].speed > cores[b].speed; });

  std::vector<double> rem(work.begin(), work.end());
  const double eps = detail::time_eps(iv);
  double now = iv.start;
  for (;;) {
    std::vector<std::size_t> live;
    for (std::size_t j = 0; j < rem.size(); ++j) {
      if (rem[j] > detail::work_eps(work[j])) live.push_back(j);
    }
    if (live.empty()) return;
    if (now >= iv.end - eps) {
      const bool close = std::all_of(live.begin(), live.end(),
                                     [&](std::size_t j) { return rem[j] <= 1e-7 * std::max(1.0, work[j]); });
      if (close) return;
      throw InfeasibleReservation("level packing ran out of time");
    }
    std::stable_sort(live.begin(), live.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });

    struct Level {
      std::vector<std::size_t> jobs;
      std::vector<std::size_t> cores;
      double rate = 0.0;  // work per time for each job of the level
    };
    std::vector<Level> levels;
    for (std::size_t j : live) {
      if (!levels.empty()) {
        const double top = rem[levels.back().jobs.front()];
        if (top - rem[j] <= 1e-9 * std::max(1.0, top)) {
          levels.back().jobs.push_back(j);
          continue;
        }
      }
      levels.push_back({{j}, {}, 0.0});
    }
    std::size_t p = 0;
    for (auto& lv : levels) {
      const std::size_t k = std::min(lv.jobs.size(), m - p);
      double speed = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        lv.cores.push_back(order[p + i]);
        speed += cores[order[p + i]].speed;
      }
      p += k;
      lv.rate = speed / static_cast<double>(lv.jobs.size());
    }

    double dt = iv.end - now;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const auto& lv = levels[i];
      if (lv.rate > 0.0) dt = std::min(dt, rem[lv.jobs.front()] / lv.rate);
      if (i > 0 && levels[i - 1].rate > lv.rate) {
        const double gap = rem[levels[i - 1].jobs.front()] - rem[lv.jobs.front()];
        dt = std::min(dt, gap / (levels[i - 1].rate - lv.rate));
      }
    }
    dt = std::max(dt, 0.0);

    for (const auto& lv : levels) {
      const std::size_t g = lv.jobs.size();
      const std::size_t k = lv.cores.size();
      if (k == 0) continue;
      if (g == 1) {
        perJob[lv.jobs[0]].push_back({now, now + dt, lv.cores[0]});
      } else {
        const double slot = dt / static_cast<double>(g);
        for (std::size_t r = 0; r < g; ++r) {
          for (std::size_t c = 0; c < k; ++c) {
            const double a = now + slot * static_cast<double>(r);
            perJob[lv.jobs[(r + c) % g]].push_back({a, a + slot, lv.cores[c]});
          }
        }
      }
      for (std::size_t j : lv.jobs) rem[j] = std::max(0.0, rem[j] - lv.rate * dt);
    }
    now += dt;
  }
}

// Wrap-around packing: fill core 0 up to the period, spill onto core 1, ...
void wrap_around(std::span<const double> work, double speed, std::size_t m, double period,
                 std::vector<std::vector<Allotment>>& perUser) {
  std::size_t core = 0;
  double pos = 0.0;
  const double eps = 1e-9 * std::max(1.0, period);
  for (std::size_t u = 0; u < work.size(); ++u) {
    double left = work[u] / speed;
    while (left > eps) {
      if (core >= m) {
        if (left <= 1e-7 * std::max(1.0, period)) break;
        throw InfeasibleReservation("wrap-around packing ran out of cores");
      }
      const double take = std::min(left, period - pos);
      perUser[u].push_back({pos, pos + take, core});
      pos += take;
      left -= take;
      if (pos >= period - eps) {
        ++core;
        pos = 0.0;
      }
    }
  }
}

}  // namespace

std::optional<std::string> check_reservation(std::span<const double> reservations,
                                             std::span<const double> periods,
                                             std::span<const CoreSpec> cores) {
  if (reservations.size() != periods.size()) throw DomainError("check_reservation: size mismatch");
  std::vector<double> util;
  for (std::size_t i = 0; i < reservations.size(); ++i) {
    const double w = reservations[i];
    if (std::isnan(w) || w < 0.0) throw DomainError("check_reservation: reservations must be >= 0");
    util.push_back(w / periods[i]);
  }
  std::vector<double> speeds;
  for (const auto& c : cores) speeds.push_back(c.speed);
  std::sort(util.rbegin(), util.rend());
  std::sort(speeds.rbegin(), speeds.rend());
  const bool identical = !speeds.empty() && speeds.front() == speeds.back();

  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t k = 0; k < std::min(util.size(), speeds.size()); ++k) {
    lhs += util[k];
    rhs += speeds[k];
    if (fits(lhs, rhs)) continue;
    if (k == 0) {
      return identical ? std::string("per-user reservation exceeds period")
                       : std::string("largest reservation exceeds the fastest core");
    }
    if (identical) break;  // the total check below reports this case
    std::ostringstream os;
    os << "k largest reservations exceed the k fastest cores (k=" << k + 1 << ")";
    return os.str();
  }
  const double total = std::accumulate(util.begin(), util.end(), 0.0);
  const double capacity = std::accumulate(speeds.begin(), speeds.end(), 0.0);
  if (!fits(total, capacity)) return std::string("total reservation exceeds capacity");
  return std::nullopt;
}

ReservationPlan plan_reservation(const SystemSpec& system, const QuantileOptions& opts) {
  const std::size_t n = system.n();
  ReservationPlan plan;
  plan.interval = {0.0, system.super_period()};
  plan.perUser.assign(n, {});
  std::vector<double> periods;
  for (const auto& u : system.users()) {
    plan.reservation.push_back(u.qos > 0.0 ? quantile(u.workload, u.qos, opts) : 0.0);
    periods.push_back(u.period);
  }
  for (const auto& c : system.cores()) plan.speeds.push_back(c.speed);
  if (auto why = check_reservation(plan.reservation, periods, system.cores())) {
    throw InfeasibleReservation(*why);
  }

  if (system.identical_cores() && system.equal_periods()) {
    wrap_around(plan.reservation, system.cores().front().speed, system.m(), plan.interval.end, plan.perUser);
  } else if (system.identical_cores()) {
    std::vector<TaskInstance> slots;
    for (std::size_t u = 0; u < n; ++u) {
      if (plan.reservation[u] <= 0.0) continue;
      for (std::size_t k = 0; k < system.tasks_per_interval(u); ++k) {
        const double r = periods[u] * static_cast<double>(k);
        slots.push_back({u, r, std::min(r + periods[u], plan.interval.end), plan.reservation[u],
                         std::nullopt, 0.0, std::nullopt});
      }
    }
    auto flags = std::make_unique<bool[]>(n);
    std::fill_n(flags.get(), n, true);
    const auto cuts = fine_grained_ldf_intervals(system);
    const auto out = llref_super_period(slots, std::span<const bool>(flags.get(), n), periods,
                                        system.cores(), plan.interval, cuts, n);
    for (const auto& t : out.tasks) {
      if (!t.completedAt) throw InfeasibleReservation("local-workload packing left a reservation short");
    }
    for (std::size_t c = 0; c < out.trace.perCore.size(); ++c) {
      for (const auto& s : out.trace.perCore[c]) plan.perUser[s.user].push_back({s.start, s.end, c});
    }
  } else {
    const auto cuts = fine_grained_ldf_intervals(system);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const Interval piece{cuts[i], cuts[i + 1]};
      std::vector<double> local(n);
      for (std::size_t u = 0; u < n; ++u) local[u] = piece.length() / periods[u] * plan.reservation[u];
      level_pack(local, system.cores(), piece, plan.perUser);
    }
  }
  for (auto& a : plan.perUser) {
    std::sort(a.begin(), a.end(), [](const Allotment& x, const Allotment& y) { return x.start < y.start; });
  }
  return plan;
}

PeriodOutcome reservation_schedule(const ReservationPlan& plan, std::span<const TaskInstance> tasks,
                                   std::size_t users) {
  const double len = plan.interval.length();
  double first = std::numeric_limits<double>::infinity();
  for (const auto& t : tasks) first = std::min(first, t.release);
  // plans repeat every interval; shift to the interval holding the tasks
  const double shift = tasks.empty() ? 0.0 : std::floor((first - plan.interval.start) / len + 1e-9) * len;
  const Interval iv{plan.interval.start + shift, plan.interval.end + shift};
  const double eps = detail::time_eps(iv);

  std::vector<TaskInstance> work(tasks.begin(), tasks.end());
  detail::TraceBuilder tb(iv, plan.speeds.size());
  for (std::size_t k = 0; k < work.size(); ++k) {
    auto& t = work[k];
    t.processed = 0.0;
    t.completedAt.reset();
    if (t.user >= plan.perUser.size()) throw DomainError("reservation_schedule: task for unknown user");
    for (const auto& a : plan.perUser[t.user]) {
      const double start = std::max(a.start + shift, t.release);
      const double end = std::min(a.end + shift, t.deadline);
      if (end - start <= eps) continue;
      const double speed = plan.speeds[a.core];
      const double use = std::min((end - start) * speed, t.trueWorkload - t.processed);
      if (use <= 0.0) break;
      const double stop = start + use / speed;
      tb.add(a.core, start, stop, t.user, k);
      t.processed += use;
      if (detail::is_done(t)) {
        t.completedAt = stop;
        break;
      }
    }
  }
  return detail::finalize(std::move(work), tb.take(), users);
}

PeriodOutcome reservation_schedule(const SystemSpec& system, std::span<const TaskInstance> tasks) {
  return reservation_schedule(plan_reservation(system), tasks, system.n());
}

}  // namespace srt
