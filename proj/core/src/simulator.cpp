#include "srt/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "srt/analysis.hpp"
#include "srt/errors.hpp"

namespace srt {

namespace {

class Accumulator {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  Moments moments() const {
    if (n_ < 2) return {mean_, 0.0};
    const double var = m2_ / static_cast<double>(n_ - 1);
    return {mean_, std::sqrt(var / static_cast<double>(n_))};
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace

SimulationResult run(const SimulationConfig& config) {
  if (config.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (config.burnIn >= config.horizon) throw ConfigError("burn-in must be shorter than the horizon");
  const SystemSpec& sys = config.system;
  const std::size_t n = sys.n();
  const IntervalScheduler engine(sys, config.scheduler);
  const double length = sys.super_period();
  const auto qos = sys.qos();
  const auto mu = sys.means();

  std::vector<Rng> rngs;
  for (std::size_t i = 0; i < n; ++i) rngs.emplace_back(derive_seed(config.seed, i, 0));
  Rng tieRng(derive_seed(config.seed, n, 1));
  std::vector<std::size_t> perInterval(n);
  for (std::size_t i = 0; i < n; ++i) perInterval[i] = sys.tasks_per_interval(i);

  SimulationResult res;
  res.meanDeficit.assign(n, 0.0);
  res.maxDeficit.assign(n, 0.0);
  res.maxDeficitSecondHalf.assign(n, 0.0);
  res.minCompletionsPerInterval = std::numeric_limits<std::size_t>::max();
  res.subtaskCompletion.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    res.subtaskCompletion[i].assign(sys.users()[i].workload.part_count(), 0.0);
    res.requiredLoad += qos[i] * mu[i] / sys.users()[i].period;
  }

  std::vector<Accumulator> accA(n), accE(n), accU(n), accD(n);
  Accumulator accAll;
  std::vector<double> completed(n, 0.0), released(n, 0.0);
  std::vector<std::vector<double>> subDone(n);
  for (std::size_t i = 0; i < n; ++i) subDone[i].assign(res.subtaskCompletion[i].size(), 0.0);

  const bool chained = std::any_of(sys.users().begin(), sys.users().end(),
                                   [](const UserSpec& u) { return u.workload.part_count() > 1; });
  DeficitVector x{std::vector<double>(n, 0.0)};
  std::vector<std::vector<double>> parts;
  const std::size_t half = config.horizon / 2;
  for (std::size_t k = 0; k < config.horizon; ++k) {
    const double start = length * static_cast<double>(k);
    const Interval iv{start, start + length};
    const auto tasks = release_tasks(sys, iv, rngs, &parts);
    const auto decision =
        ldf_order(x, config.tieBreak, config.tieBreak == TieBreak::randomSeeded ? &tieRng : nullptr);
    const auto out = engine.run(tasks, decision, x, iv);
    if (config.validate && !res.violation) {
      if (auto bad = validate_outcome(out, sys.cores())) res.violation = "interval " + std::to_string(k) + ": " + *bad;
    }
    x = update_deficit(x, qos, out.completions, perInterval);

    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      total += out.completions[i];
      res.maxDeficit[i] = std::max(res.maxDeficit[i], x.values[i]);
      if (k >= half) res.maxDeficitSecondHalf[i] = std::max(res.maxDeficitSecondHalf[i], x.values[i]);
      res.meanDeficit[i] += x.values[i] / static_cast<double>(config.horizon);
    }
    res.minCompletionsPerInterval = std::min(res.minCompletionsPerInterval, total);
    res.maxCompletionsPerInterval = std::max(res.maxCompletionsPerInterval, total);
    if (k < config.burnIn) continue;

    for (std::size_t i = 0; i < n; ++i) {
      completed[i] += static_cast<double>(out.completions[i]);
      released[i] += static_cast<double>(out.released[i]);
    }
    // sub-task progress: tasks were released in the same order as `parts`
    for (std::size_t t = 0; chained && t < tasks.size(); ++t) {
      const auto match = std::find_if(out.tasks.begin(), out.tasks.end(), [&](const TaskInstance& o) {
        return o.user == tasks[t].user && o.release == tasks[t].release;
      });
      double prefix = 0.0;
      for (std::size_t j = 0; j < parts[t].size(); ++j) {
        prefix += parts[t][j];
        if (match->processed >= prefix - 1e-9 * std::max(1.0, prefix)) subDone[tasks[t].user][j] += 1.0;
      }
    }
    if (config.collectProofObservables) {
      for (std::size_t i = 0; i < n; ++i) {
        const double a = static_cast<double>(out.unfinished[i]);
        accA[i].add(a);
        accE[i].add(out.residual[i]);
        accU[i].add(out.busy[i]);
        accD[i].add(out.residual[i] - mu[i] * a);
      }
      accAll.add(out.total_busy());
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    res.fractions.push_back(released[i] > 0.0 ? completed[i] / released[i] : 1.0);
    for (auto& v : subDone[i]) v /= std::max(1.0, released[i]);
    res.subtaskCompletion[i] = chained ? subDone[i] : std::vector<double>{res.fractions[i]};
  }
  res.feasible = feasibility_verdict(res.fractions, qos);
  if (config.collectProofObservables) {
    for (std::size_t i = 0; i < n; ++i) {
      res.observables.unfinished.push_back(accA[i].moments());
      res.observables.residual.push_back(accE[i].moments());
      res.observables.busy.push_back(accU[i].moments());
      res.observables.wasteGap.push_back(accD[i].moments());
    }
    res.observables.busyAll = accAll.moments();
  }
  return res;
}

SimulationResult run_nonnbue_counterexample(std::size_t n, std::size_t horizon, std::uint64_t seed) {
  if (n == 0 || horizon == 0) throw ConfigError("counterexample needs n >= 1 and horizon >= 1");
  std::vector<UserSpec> users(n, UserSpec{0.5, static_cast<double>(n), Workload::two_point(1.0, 9.0, 0.5), {}});
  const SystemSpec sys(users, SystemSpec::identical_cores(1));
  const std::vector<double> probe(n, 1.0);
  const auto qos = sys.qos();
  const auto mu = sys.means();
  const std::vector<std::size_t> perInterval(n, 1);

  std::vector<Rng> rngs;
  for (std::size_t i = 0; i < n; ++i) rngs.emplace_back(derive_seed(seed, i, 0));

  SimulationResult res;
  res.meanDeficit.assign(n, 0.0);
  res.maxDeficit.assign(n, 0.0);
  res.maxDeficitSecondHalf.assign(n, 0.0);
  res.minCompletionsPerInterval = std::numeric_limits<std::size_t>::max();
  res.subtaskCompletion.assign(n, std::vector<double>(1, 0.0));
  for (std::size_t i = 0; i < n; ++i) res.requiredLoad += qos[i] * mu[i] / sys.users()[i].period;

  std::vector<Accumulator> accA(n), accE(n), accU(n), accD(n);
  Accumulator accAll;
  std::vector<double> completed(n, 0.0);
  DeficitVector x{std::vector<double>(n, 0.0)};
  const double len = sys.super_period();
  for (std::size_t k = 0; k < horizon; ++k) {
    const Interval iv{len * static_cast<double>(k), len * static_cast<double>(k + 1)};
    auto tasks = release_tasks(sys, iv, rngs);
    const auto d = ldf_order(x, TieBreak::byIndex);
    std::vector<TaskInstance> ordered;
    for (std::size_t u : d.order) ordered.push_back(tasks[u]);
    const auto out = greedy_schedule(ordered, sys.cores(), iv, GreedyMode::nonPreemptive, n, probe);
    x = update_deficit(x, qos, out.completions, perInterval);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      total += out.completions[i];
      completed[i] += static_cast<double>(out.completions[i]);
      res.maxDeficit[i] = std::max(res.maxDeficit[i], x.values[i]);
      if (k >= horizon / 2) res.maxDeficitSecondHalf[i] = std::max(res.maxDeficitSecondHalf[i], x.values[i]);
      res.meanDeficit[i] += x.values[i] / static_cast<double>(horizon);
      const double a = static_cast<double>(out.unfinished[i]);
      accA[i].add(a);
      accE[i].add(out.residual[i]);
      accU[i].add(out.busy[i]);
      accD[i].add(out.residual[i] - mu[i] * a);
    }
    accAll.add(out.total_busy());
    res.minCompletionsPerInterval = std::min(res.minCompletionsPerInterval, total);
    res.maxCompletionsPerInterval = std::max(res.maxCompletionsPerInterval, total);
  }
  for (std::size_t i = 0; i < n; ++i) {
    res.fractions.push_back(completed[i] / static_cast<double>(horizon));
    res.subtaskCompletion[i][0] = res.fractions.back();
    res.observables.unfinished.push_back(accA[i].moments());
    res.observables.residual.push_back(accE[i].moments());
    res.observables.busy.push_back(accU[i].moments());
    res.observables.wasteGap.push_back(accD[i].moments());
  }
  res.observables.busyAll = accAll.moments();
  res.feasible = feasibility_verdict(res.fractions, qos);
  return res;
}

CoreRequirement required_cores(const SystemSpec& systemTemplate, SchedulerKind scheduler, std::size_t horizon,
                               std::uint64_t seed, std::size_t mMax) {
  if (mMax < 1) throw ConfigError("mMax must be >= 1");
  const double speed = systemTemplate.cores().front().speed;
  const auto q = systemTemplate.qos();
  const auto bounds = resource_calculators(q, systemTemplate.with_cores(SystemSpec::identical_cores(1, speed)));
  for (std::size_t m = std::max<std::size_t>(1, bounds.mLB); m <= mMax; ++m) {
    const SystemSpec sys = systemTemplate.with_cores(SystemSpec::identical_cores(m, speed));
    if (scheduler == SchedulerKind::reservation) {
      if (f_rb_member(q, sys)) return {m, false};
      continue;
    }
    SimulationConfig cfg{sys, scheduler, horizon, seed, false};
    if (run(cfg).feasible) return {m, false};
  }
  return {mMax, true};
}

}  // namespace srt
