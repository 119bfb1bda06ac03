#include "srt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "srt/errors.hpp"

namespace srt {

namespace {

void require_q(std::span<const double> q, const SystemSpec& system) {
  if (q.size() != system.n()) throw DomainError("one qos value per user required");
  for (double v : q) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("qos values must lie in [0, 1]");
  }
}

std::vector<double> reservations(std::span<const double> q, const SystemSpec& system, const QuantileOptions& opts) {
  std::vector<double> w;
  for (std::size_t i = 0; i < system.n(); ++i) {
    w.push_back(q[i] > 0.0 ? quantile(system.users()[i].workload, q[i], opts) : 0.0);
  }
  return w;
}

double mean_load(std::span<const double> q, const SystemSpec& system) {
  double load = 0.0;
  for (std::size_t i = 0; i < system.n(); ++i) {
    load += q[i] * system.users()[i].workload.mean() / system.users()[i].period;
  }
  return load;
}

}  // namespace

std::size_t snapped_ceil(double x) {
  if (!(x > 0.0)) return 0;
  if (!std::isfinite(x)) return std::numeric_limits<std::size_t>::max();
  const double r = std::round(x);
  return static_cast<std::size_t>(std::abs(x - r) <= 1e-9 ? r : std::ceil(x));
}

bool r_ob_member(std::span<const double> q, const SystemSpec& system) {
  require_q(q, system);
  const double cap = system.total_speed();
  return mean_load(q, system) <= cap + 1e-12 * std::max(1.0, cap);
}

bool f_rb_member(std::span<const double> q, const SystemSpec& system, const QuantileOptions& opts) {
  require_q(q, system);
  std::vector<double> periods;
  for (const auto& u : system.users()) periods.push_back(u.period);
  return !check_reservation(reservations(q, system, opts), periods, system.cores()).has_value();
}

BoundsReport resource_calculators(std::span<const double> q, const SystemSpec& system, const QuantileOptions& opts) {
  require_q(q, system);
  BoundsReport r;
  const double s = system.cores().front().speed;
  const auto w = reservations(q, system, opts);
  double reserved = 0.0;
  double peak = 0.0;  // max_i mu_i / delta_i
  for (std::size_t i = 0; i < system.n(); ++i) {
    const auto& u = system.users()[i];
    reserved += w[i] / u.period;
    peak = std::max(peak, u.workload.mean() / u.period);
  }
  const double load = mean_load(q, system);
  r.mRB = snapped_ceil(reserved / s);
  r.mLB = snapped_ceil(load / s);
  if (s > peak) r.mEstGreedy = snapped_ceil(load / (s - peak));

  const double m = static_cast<double>(system.m());
  r.gamma1 = 1.0 - peak / (system.total_speed() / m);
  r.gamma1NonPreemptive = 1.0 - peak / system.min_speed();
  r.gamma2 = 1.0 - peak / system.total_speed();
  r.inROB = r_ob_member(q, system);
  r.inFRB = f_rb_member(q, system, opts);
  return r;
}

CompletionProfile estimate_completion_profile(const SystemSpec& system, SchedulerKind scheduler,
                                              std::size_t samplesPerDecision, std::uint64_t seed,
                                              std::size_t maxUsers) {
  const std::size_t n = system.n();
  if (n > maxUsers) {
    throw DomainError("completion profile needs n! decisions; n=" + std::to_string(n) + " exceeds the cap of " +
                      std::to_string(maxUsers));
  }
  if (samplesPerDecision == 0) throw DomainError("samplesPerDecision must be >= 1");
  const bool deterministic = std::all_of(system.users().begin(), system.users().end(),
                                         [](const UserSpec& u) { return u.workload.is_deterministic(); });
  const std::size_t samples = deterministic ? 1 : samplesPerDecision;

  const IntervalScheduler engine(system, scheduler);
  const Interval iv{0.0, system.super_period()};
  const DeficitVector zero{std::vector<double>(n, 0.0)};

  CompletionProfile profile;
  profile.sampleCount = samples;
  std::vector<std::size_t> d(n);
  std::iota(d.begin(), d.end(), std::size_t{0});
  std::uint64_t index = 0;
  do {
    std::vector<double> p(n, 0.0);
    for (std::size_t k = 0; k < samples; ++k) {
      std::vector<Rng> rngs;
      for (std::size_t i = 0; i < n; ++i) rngs.emplace_back(derive_seed(seed, index * samples + k, i));
      const auto tasks = release_tasks(system, iv, rngs);
      const auto out = engine.run(tasks, PriorityDecision{d}, zero, iv);
      for (std::size_t i = 0; i < n; ++i) p[i] += static_cast<double>(out.completions[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      p[i] /= static_cast<double>(samples * system.tasks_per_interval(i));
    }
    profile.perDecision.emplace(d, std::move(p));
    ++index;
  } while (std::next_permutation(d.begin(), d.end()));
  return profile;
}

RibVerdict r_ib_member(std::span<const double> q, const CompletionProfile& profile, std::span<const double> alpha) {
  const std::size_t n = q.size();
  if (alpha.size() != n) throw DomainError("one alpha per user required");
  for (double a : alpha) {
    if (!(a > 0.0)) throw DomainError("alpha must be strictly positive");
  }
  if (n > 20) throw DomainError("subset enumeration limited to 20 users");
  std::size_t decisions = 1;
  for (std::size_t k = 2; k <= n; ++k) decisions *= k;
  if (profile.perDecision.size() != decisions) throw DomainError("profile does not cover every priority decision");

  // rhs[S] = min over decisions ranking S first of sum_{i in S} alpha_i p_i(d)
  const std::size_t subsets = std::size_t{1} << n;
  std::vector<double> rhs(subsets, std::numeric_limits<double>::infinity());
  for (const auto& [d, p] : profile.perDecision) {
    if (d.size() != n || p.size() != n) throw DomainError("profile entry has the wrong size");
    std::size_t mask = 0;
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      mask |= std::size_t{1} << d[k];
      sum += alpha[d[k]] * p[d[k]];
      rhs[mask] = std::min(rhs[mask], sum);
    }
  }
  RibVerdict v{true, false};
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    double lhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) lhs += alpha[i] * q[i];
    }
    const double tol = 1e-9 * std::max(1.0, rhs[mask]);
    if (lhs > rhs[mask] + tol) v.member = false;
    if (std::abs(lhs - rhs[mask]) <= tol) v.boundary = true;
  }
  return v;
}

}  // namespace srt
