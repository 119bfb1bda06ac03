#include "srt/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "srt/analysis.hpp"
#include "srt/errors.hpp"
#include "srt/policy.hpp"
#include "srt/schedulers.hpp"
#include "srt/simulator.hpp"

namespace srt {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

std::size_t pick(Rng& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

Workload random_workload(Rng& rng, double mean) {
  switch (pick(rng, 6)) {
    case 0:
      return Workload::deterministic(mean);
    case 1:
      return Workload::exponential(mean);
    case 2: {
      const double shape = uniform(rng, 0.5, 8.0);
      return Workload::gamma(shape, mean / shape);
    }
    case 3:
      return Workload::two_point(0.5 * mean, 1.5 * mean, 0.5);
    case 4: {
      std::vector<double> xs;
      for (int i = 0; i < 5; ++i) xs.push_back(uniform(rng, 0.2, 1.8) * mean);
      return Workload::empirical(xs);
    }
    default:
      return Workload::chain({Workload::exponential(0.5 * mean), Workload::deterministic(0.5 * mean)});
  }
}

SystemSpec random_system(Rng& rng) {
  const std::size_t n = 1 + pick(rng, 10);
  const std::size_t m = 1 + pick(rng, 4);
  static const double kSpeeds[] = {0.5, 1.0, 1.5, 2.0};
  static const double kPeriods[] = {2.0, 3.0, 4.0, 6.0};
  const bool uniformCores = uniform01(rng) < 0.5;
  const bool samePeriod = uniform01(rng) < 0.5;
  std::vector<CoreSpec> cores;
  for (std::size_t c = 0; c < m; ++c) cores.push_back({uniformCores ? 1.0 : kSpeeds[pick(rng, 4)]});
  const double speedSum = std::accumulate(cores.begin(), cores.end(), 0.0,
                                          [](double a, const CoreSpec& c) { return a + c.speed; });
  const double load = uniform(rng, 0.4, 1.4) * speedSum;  // target work per time unit
  const double common = kPeriods[pick(rng, 4)];
  std::vector<UserSpec> users;
  for (std::size_t i = 0; i < n; ++i) {
    UserSpec u;
    u.period = samePeriod ? common : kPeriods[pick(rng, 4)];
    u.qos = uniform(rng, 0.1, 0.9);
    u.workload = random_workload(rng, load / static_cast<double>(n) * u.period * uniform(rng, 0.5, 1.5));
    u.estimate = 1.1 * u.workload.mean();
    users.push_back(u);
  }
  return SystemSpec(users, cores);
}

std::string describe(const SystemSpec& s) {
  std::ostringstream os;
  os << "n=" << s.n() << " speeds=";
  for (std::size_t c = 0; c < s.m(); ++c) os << (c ? "/" : "") << s.cores()[c].speed;
  os << " periods=";
  for (std::size_t i = 0; i < s.n(); ++i) os << (i ? "/" : "") << s.users()[i].period;
  return os.str();
}

void add(std::vector<InvariantCheck>& out, std::string name, std::string instance, bool ok, std::string detail = {}) {
  out.push_back({std::move(name), std::move(instance), ok, std::move(detail)});
}

void waste_checks(std::vector<InvariantCheck>& out, const std::string& label, const SimulationResult& r,
                  std::span<const double> mu, bool equality) {
  std::size_t worst = 0;
  double worstZ = -std::numeric_limits<double>::infinity();
  bool ok = true;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto& gap = r.observables.wasteGap[i];
    const double z = gap.stdError > 0.0 ? gap.mean / gap.stdError : (gap.mean > 0.0 ? 1e9 : 0.0);
    const double zz = equality ? std::abs(z) : z;
    if (zz > worstZ) {
      worstZ = zz;
      worst = i;
    }
    ok &= zz <= 3.0;
  }
  const auto& g = r.observables.wasteGap[worst];
  add(out, equality ? "exponential waste equality" : "NBUE waste inequality", label, ok,
      "worst user " + std::to_string(worst) + ": mean(E - mu A) = " + fmt(g.mean) + ", se = " + fmt(g.stdError));
}

}  // namespace

std::vector<InvariantCheck> structural_invariants(std::uint64_t seed, std::size_t instances) {
  std::vector<InvariantCheck> out;
  Rng rng(derive_seed(seed, 0x51, 0));
  static const SchedulerKind kAll[] = {SchedulerKind::reservation, SchedulerKind::ldfGreedy,
                                       SchedulerKind::ldfGreedyNp, SchedulerKind::ldfTsLlref,
                                       SchedulerKind::ldfTsLlrefEst, SchedulerKind::edfGreedy,
                                       SchedulerKind::ldfFineGrained};
  for (std::size_t k = 0; k < instances; ++k) {
    const SystemSpec sys = random_system(rng);
    const std::string label = "instance " + std::to_string(k) + " (" + describe(sys) + ")";
    std::size_t ran = 0;
    std::string failure;
    for (auto kind : kAll) {
      try {
        SimulationConfig cfg{sys, kind, 30, derive_seed(seed, k, 7), false};
        cfg.validate = true;
        const auto r = run(cfg);
        ++ran;
        if (r.violation && failure.empty()) failure = scheduler_name(kind) + ": " + *r.violation;
        for (double p : r.fractions) {
          if ((p < 0.0 || p > 1.0) && failure.empty()) failure = scheduler_name(kind) + ": fraction outside [0,1]";
        }
      } catch (const ConfigError&) {
      } catch (const InfeasibleReservation&) {
      } catch (const std::exception& e) {
        if (failure.empty()) failure = scheduler_name(kind) + ": " + e.what();
      }
    }
    add(out, "schedule trace and capacity", label, failure.empty() && ran > 0,
        failure.empty() ? std::to_string(ran) + " schedulers validated" : failure);

    // task selection: the chosen set is the longest prefix within capacity
    std::vector<double> w;
    for (std::size_t i = 0; i < sys.n(); ++i) w.push_back(uniform(rng, 0.0, 3.0));
    PriorityDecision d{std::vector<std::size_t>(sys.n())};
    std::iota(d.order.begin(), d.order.end(), std::size_t{0});
    for (std::size_t j = d.order.size(); j > 1; --j) std::swap(d.order[j - 1], d.order[pick(rng, j)]);
    const double cap = uniform(rng, 0.5, 10.0);
    const auto sel = ts_select(d, w, cap);
    double sum = 0.0;
    bool prefix = true;
    for (std::size_t j = 0; j < sel.size(); ++j) {
      prefix &= sel[j] == d.order[j];
      sum += w[sel[j]];
    }
    const bool maximal = sel.size() == d.order.size() || sum + w[d.order[sel.size()]] > cap;
    add(out, "ts_select prefix", label, prefix && sum <= cap + 1e-12 && maximal);

    // LLREF completes any deterministic set with w_i <= delta and sum <= m delta
    const std::size_t m = 1 + pick(rng, 4);
    const double period = uniform(rng, 1.0, 10.0);
    std::vector<double> works;
    double budget = period * static_cast<double>(m);
    for (std::size_t i = 0; i < 3 * m && budget > 1e-9; ++i) {
      const double x = std::min({uniform(rng, 0.05, 1.0) * period, budget});
      works.push_back(x);
      budget -= x;
    }
    if (uniform01(rng) < 0.5 && budget > 0.0 && budget <= period) works.push_back(budget);  // fill to exactly m delta
    std::vector<TaskInstance> tasks;
    for (std::size_t i = 0; i < works.size(); ++i) tasks.push_back({i, 0.0, period, works[i], std::nullopt, 0.0, std::nullopt});
    const auto cores = SystemSpec::identical_cores(m);
    const auto res = llref_schedule(tasks, cores, {0.0, period}, tasks.size());
    const auto done = std::accumulate(res.completions.begin(), res.completions.end(), std::size_t{0});
    const auto bad = validate_outcome(res, cores);
    add(out, "LLREF deterministic completion", label + ", m=" + std::to_string(m),
        done == tasks.size() && !bad,
        std::to_string(done) + "/" + std::to_string(tasks.size()) + " completed" + (bad ? "; " + *bad : ""));
  }
  return out;
}

std::vector<InvariantCheck> run_invariant_suite(std::uint64_t seed, const InvariantOptions& opts) {
  auto out = structural_invariants(seed, opts.randomInstances);

  // appendix tightness: greedy completes m, TS/LLREF 2m - 1 tasks in every period
  {
    std::vector<UserSpec> users(4, UserSpec{0.75, 1.5, Workload::deterministic(1.0), {}});
    const SystemSpec sys(users, SystemSpec::identical_cores(2));
    for (auto [kind, want] : {std::pair{SchedulerKind::ldfGreedy, std::size_t{2}},
                              std::pair{SchedulerKind::ldfTsLlref, std::size_t{3}}}) {
      const auto r = run(SimulationConfig{sys, kind, opts.horizon, seed, false});
      add(out, "appendix tightness", scheduler_name(kind),
          r.minCompletionsPerInterval == want && r.maxCompletionsPerInterval == want,
          "completions per period in [" + std::to_string(r.minCompletionsPerInterval) + ", " +
              std::to_string(r.maxCompletionsPerInterval) + "], expected " + std::to_string(want));
    }
  }

  // statistical checks under LDF + greedy
  for (const auto& [label, dist] : {std::pair{std::string("exp(3)"), Workload::exponential(3.0)},
                                    std::pair{std::string("gamma(5,1)"), Workload::gamma(5.0, 1.0)}}) {
    std::vector<UserSpec> users(20, UserSpec{0.5, 12.0, dist, {}});
    const SystemSpec sys(users, SystemSpec::identical_cores(4));
    const auto r = run(SimulationConfig{sys, SchedulerKind::ldfGreedy, opts.horizon, seed, true});
    const auto mu = sys.means();
    waste_checks(out, label + ", n=20, m=4, delta=12", r, mu, false);
    if (label.starts_with("exp")) waste_checks(out, label + ", n=20, m=4, delta=12", r, mu, true);

    double effective = 0.0;
    for (std::size_t i = 0; i < sys.n(); ++i) effective += r.fractions[i] * mu[i];
    const auto& u = r.observables.busyAll;
    const double capacity = sys.total_speed() * sys.super_period();
    const bool ok = !r.feasible || (effective <= u.mean + 3.0 * u.stdError && u.mean <= capacity + 1e-9);
    add(out, "feasible-q accounting", label, ok,
        "sum p mu = " + fmt(effective) + ", mean U_N = " + fmt(u.mean) + ", capacity = " + fmt(capacity));
    bool bounded = true;
    for (std::size_t i = 0; i < sys.n(); ++i) bounded &= r.maxDeficitSecondHalf[i] <= r.maxDeficit[i] + 1e-9;
    add(out, "deficit boundedness", label, bounded);
  }

  if (opts.injectNonNbue) {
    const auto r = run_nonnbue_counterexample(20, opts.horizon, seed);
    const std::vector<double> mu(20, 5.0);
    waste_checks(out, "injected twopoint(1,9,0.5) under a one-unit probe", r, mu, false);
  }

  // analysis properties on small random instances
  Rng rng(derive_seed(seed, 0xa2, 0));
  bool monotone = true, ordered = true, scaled = true, inner = true;
  std::string innerDetail;
  for (int k = 0; k < 40; ++k) {
    const std::size_t n = 2 + pick(rng, 4);
    const std::size_t m = 1 + pick(rng, 3);
    const double period = uniform(rng, 2.0, 8.0);
    std::vector<UserSpec> users;
    for (std::size_t i = 0; i < n; ++i) {
      users.push_back({uniform(rng, 0.0, 1.0), period, Workload::deterministic(uniform(rng, 0.2, 1.0) * period), {}});
    }
    const SystemSpec sys(users, SystemSpec::identical_cores(m));
    auto q = sys.qos();
    if (r_ob_member(q, sys)) {
      auto lower = q;
      for (auto& v : lower) v *= uniform01(rng);
      monotone &= r_ob_member(lower, sys);
    }
    const auto b = resource_calculators(q, sys);
    ordered &= b.mLB <= b.mRB;

    const auto profile = estimate_completion_profile(sys, SchedulerKind::ldfTsLlref, 1, seed);
    const auto mu = sys.means();
    std::vector<double> alpha2 = mu;
    for (auto& a : alpha2) a *= 3.7;
    scaled &= r_ib_member(q, profile, mu).member == r_ib_member(q, profile, alpha2).member;
    if (r_ob_member(q, sys)) {
      auto shrunk = q;
      for (auto& v : shrunk) v *= b.gamma2;
      if (!r_ib_member(shrunk, profile, mu).member) {
        inner = false;
        innerDetail = describe(sys);
      }
    }
  }
  add(out, "r_ob monotone", "40 random deterministic instances", monotone);
  add(out, "mLB <= mRB for deterministic workloads", "40 random deterministic instances", ordered);
  add(out, "r_ib invariant under alpha scaling", "40 random deterministic instances", scaled);
  add(out, "r_ib accepts gamma2 * R_OB under TS/LLREF", "40 random deterministic instances", inner, innerDetail);
  return out;
}

}  // namespace srt
