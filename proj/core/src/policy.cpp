#include "srt/policy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <utility>

#include "srt/errors.hpp"

namespace srt {

namespace {

constexpr std::array<std::pair<std::string_view, SchedulerKind>, 7> kNames{{
    {"reservation", SchedulerKind::reservation},
    {"ldf-greedy", SchedulerKind::ldfGreedy},
    {"ldf-greedy-np", SchedulerKind::ldfGreedyNp},
    {"ldf-ts-llref", SchedulerKind::ldfTsLlref},
    {"ldf-ts-llref-est", SchedulerKind::ldfTsLlrefEst},
    {"edf-greedy", SchedulerKind::edfGreedy},
    {"ldf-fine-grained", SchedulerKind::ldfFineGrained},
}};

}  // namespace

SchedulerKind parse_scheduler(std::string_view name) {
  for (const auto& [key, kind] : kNames) {
    if (key == name) return kind;
  }
  throw ConfigError("unknown scheduler '" + std::string(name) + "'");
}

std::string scheduler_name(SchedulerKind kind) {
  for (const auto& [key, k] : kNames) {
    if (k == kind) return std::string(key);
  }
  return "?";
}

IntervalScheduler::IntervalScheduler(const SystemSpec& system, SchedulerKind kind, const QuantileOptions& opts)
    : system_(&system), kind_(kind) {
  for (const auto& u : system.users()) periods_.push_back(u.period);
  const bool llref = kind == SchedulerKind::ldfTsLlref || kind == SchedulerKind::ldfTsLlrefEst;
  if (llref && !system.identical_cores()) {
    throw ConfigError(scheduler_name(kind) + " requires identical cores");
  }
  if ((kind == SchedulerKind::edfGreedy || kind == SchedulerKind::ldfFineGrained) && system.equal_periods()) {
    throw ConfigError(scheduler_name(kind) + " requires users with different periods");
  }
  if (kind == SchedulerKind::ldfTsLlrefEst) {
    for (std::size_t i = 0; i < system.n(); ++i) {
      const auto& e = system.users()[i].estimate;
      if (!e) throw ConfigError("ldf-ts-llref-est needs a workload estimate for user " + std::to_string(i));
      estimates_.push_back(*e);
    }
  } else if (kind == SchedulerKind::ldfTsLlref) {
    estimates_ = system.means();
  }
  if (!system.equal_periods()) {
    boundaries_ = fine_grained_ldf_intervals(system);
  }
  if (kind == SchedulerKind::reservation) plan_ = plan_reservation(system, opts);
}

PeriodOutcome IntervalScheduler::run(std::span<const TaskInstance> tasks, const PriorityDecision& decision,
                                     const DeficitVector& deficit, Interval iv) const {
  const SystemSpec& sys = *system_;
  const std::size_t n = sys.n();
  std::vector<double> position(n);
  for (std::size_t r = 0; r < decision.order.size(); ++r) position[decision.order[r]] = static_cast<double>(r);

  if (kind_ == SchedulerKind::reservation) return reservation_schedule(*plan_, tasks, n);

  const GreedyMode mode = kind_ == SchedulerKind::ldfGreedyNp ? GreedyMode::nonPreemptive : GreedyMode::preemptive;
  const bool llref = kind_ == SchedulerKind::ldfTsLlref || kind_ == SchedulerKind::ldfTsLlrefEst;

  if (sys.equal_periods()) {
    if (llref) return heuristic_ts_llref(tasks, decision, sys.cores(), iv, estimates_);
    std::vector<TaskInstance> ordered(tasks.begin(), tasks.end());
    std::stable_sort(ordered.begin(), ordered.end(), [&](const TaskInstance& a, const TaskInstance& b) {
      return position[a.user] < position[b.user];
    });
    return greedy_schedule(ordered, sys.cores(), iv, mode, n);
  }

  std::vector<double> cuts;
  for (double b : boundaries_) cuts.push_back(iv.start + b);

  if (llref) {
    std::vector<double> util(n);
    for (std::size_t i = 0; i < n; ++i) util[i] = estimates_[i] / periods_[i];
    const double capacity = sys.cores().front().speed * static_cast<double>(sys.m());
    auto flags = std::make_unique<bool[]>(n);
    std::fill_n(flags.get(), n, false);
    for (std::size_t u : ts_select(decision, util, capacity)) flags[u] = true;
    std::vector<TaskInstance> believed(tasks.begin(), tasks.end());
    for (auto& t : believed) t.believedWorkload = estimates_[t.user];
    return llref_super_period(believed, std::span<const bool>(flags.get(), n), periods_, sys.cores(), iv, cuts, n);
  }

  PriorityScheduleOptions opt;
  opt.mode = mode;
  switch (kind_) {
    case SchedulerKind::edfGreedy:
      opt.rank = [](double, std::span<const TaskInstance> ts) {
        std::vector<double> r;
        for (const auto& t : ts) r.push_back(t.deadline);
        return r;
      };
      break;
    case SchedulerKind::ldfFineGrained: {
      const std::vector<double> q = sys.qos();
      const std::vector<double> x = deficit.values;
      const double eps = 1e-9 * std::max(1.0, iv.length());
      opt.rank = [q, x, eps](double now, std::span<const TaskInstance> ts) {
        std::vector<double> running = x;
        for (const auto& t : ts) {
          if (t.deadline <= now + eps) running[t.user] += q[t.user];
          if (t.completedAt && *t.completedAt <= now + eps) running[t.user] -= 1.0;
        }
        std::vector<double> r;
        for (const auto& t : ts) r.push_back(-static_cast<double>(std::llround(running[t.user] * 1e9)));
        return r;
      };
      opt.boundaries = cuts;
      break;
    }
    default:
      opt.rank = [position](double, std::span<const TaskInstance> ts) {
        std::vector<double> r;
        for (const auto& t : ts) r.push_back(position[t.user]);
        return r;
      };
      break;
  }
  return priority_schedule(std::vector<TaskInstance>(tasks.begin(), tasks.end()), sys.cores(), iv, n, opt);
}

std::vector<TaskInstance> release_tasks(const SystemSpec& system, Interval iv, std::span<Rng> userRngs,
                                        std::vector<std::vector<double>>* parts) {
  std::vector<TaskInstance> tasks;
  if (parts) parts->clear();
  for (std::size_t i = 0; i < system.n(); ++i) {
    const auto& u = system.users()[i];
    for (std::size_t k = 0; k < system.tasks_per_interval(i); ++k) {
      const double release = iv.start + u.period * static_cast<double>(k);
      const double deadline = k + 1 == system.tasks_per_interval(i) ? iv.end : release + u.period;
      auto draw = sample_parts(u.workload, userRngs[i]);
      double w = 0.0;
      for (double p : draw) w += p;
      tasks.push_back({i, release, deadline, w, std::nullopt, 0.0, std::nullopt});
      if (parts) parts->push_back(std::move(draw));
    }
  }
  return tasks;
}

}  // namespace srt
