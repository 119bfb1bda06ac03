#include "srt/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "srt/errors.hpp"

namespace srt {

namespace {

struct Ratio {
  std::uint64_t num;
  std::uint64_t den;
};

Ratio to_ratio(double x) {
  for (std::uint64_t den = 1; den <= 1'000'000; ++den) {
    const double scaled = x * static_cast<double>(den);
    const double r = std::round(scaled);
    if (r >= 1.0 && std::abs(scaled - r) <= 1e-12 * scaled) {
      auto num = static_cast<std::uint64_t>(r);
      const auto g = std::gcd(num, den);
      return {num / g, den / g};
    }
  }
  throw ConfigError("period " + std::to_string(x) + " is not a rational with denominator <= 1e6");
}

}  // namespace

double least_common_multiple(std::span<const double> periods) {
  if (periods.empty()) throw ConfigError("no periods");
  std::uint64_t num = 0;
  std::uint64_t den = 0;
  for (double p : periods) {
    if (!(std::isfinite(p) && p > 0.0)) throw ConfigError("periods must be finite and > 0");
    const Ratio r = to_ratio(p);
    if (num == 0) {
      num = r.num;
      den = r.den;
      continue;
    }
    const std::uint64_t g = std::gcd(num, r.num);
    if (num / g > (1ULL << 52) / r.num) throw ConfigError("super period too large");
    num = num / g * r.num;
    den = std::gcd(den, r.den);
  }
  const double lcm = static_cast<double>(num) / static_cast<double>(den);
  const double shortest = *std::min_element(periods.begin(), periods.end());
  if (lcm / shortest > 1e6) throw ConfigError("super period exceeds 10^6 shortest periods");
  return lcm;
}

SystemSpec::SystemSpec(std::vector<UserSpec> users, std::vector<CoreSpec> cores)
    : users_(std::move(users)), cores_(std::move(cores)) {
  if (users_.empty()) throw ConfigError("system needs at least one user");
  if (cores_.empty()) throw ConfigError("system needs at least one core");
  std::vector<double> periods;
  for (const auto& u : users_) {
    if (!(u.qos >= 0.0 && u.qos <= 1.0)) throw ConfigError("qos must lie in [0, 1]");
    if (!(std::isfinite(u.period) && u.period > 0.0)) throw ConfigError("period must be > 0");
    if (u.estimate && !(*u.estimate > 0.0)) throw ConfigError("workload estimate must be > 0");
    periods.push_back(u.period);
  }
  for (const auto& c : cores_) {
    if (!(std::isfinite(c.speed) && c.speed > 0.0)) throw ConfigError("core speed must be > 0");
  }
  equalPeriods_ = std::all_of(periods.begin(), periods.end(),
                              [&](double p) { return p == periods.front(); });
  identicalCores_ = std::all_of(cores_.begin(), cores_.end(),
                                [&](const CoreSpec& c) { return c.speed == cores_.front().speed; });
  superPeriod_ = equalPeriods_ ? periods.front() : least_common_multiple(periods);
  tasksPerInterval_.reserve(users_.size());
  for (double p : periods) {
    tasksPerInterval_.push_back(static_cast<std::size_t>(std::llround(superPeriod_ / p)));
  }
}

std::vector<CoreSpec> SystemSpec::identical_cores(std::size_t m, double speed) {
  return std::vector<CoreSpec>(m, CoreSpec{speed});
}

double SystemSpec::total_speed() const {
  double s = 0.0;
  for (const auto& c : cores_) s += c.speed;
  return s;
}

double SystemSpec::top_speed_sum(std::size_t k) const {
  std::vector<double> s;
  for (const auto& c : cores_) s.push_back(c.speed);
  std::sort(s.begin(), s.end(), std::greater<>());
  k = std::min(k, s.size());
  return std::accumulate(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
}

double SystemSpec::min_speed() const {
  double s = cores_.front().speed;
  for (const auto& c : cores_) s = std::min(s, c.speed);
  return s;
}

std::vector<double> SystemSpec::qos() const {
  std::vector<double> q;
  for (const auto& u : users_) q.push_back(u.qos);
  return q;
}

std::vector<double> SystemSpec::means() const {
  std::vector<double> mu;
  for (const auto& u : users_) mu.push_back(u.workload.mean());
  return mu;
}

SystemSpec SystemSpec::with_cores(std::vector<CoreSpec> cores) const {
  return SystemSpec(users_, std::move(cores));
}

SystemSpec SystemSpec::with_qos(std::span<const double> q) const {
  if (q.size() != users_.size()) throw DomainError("with_qos: size mismatch");
  auto users = users_;
  for (std::size_t i = 0; i < users.size(); ++i) users[i].qos = q[i];
  return SystemSpec(std::move(users), cores_);
}

SystemSpec SystemSpec::with_uniform_qos(double q) const {
  std::vector<double> qs(users_.size(), q);
  return with_qos(qs);
}

DeficitVector update_deficit(const DeficitVector& x, std::span<const double> qos,
                             std::span<const std::size_t> completions,
                             std::span<const std::size_t> tasksPerInterval) {
  const std::size_t n = x.values.size();
  if (qos.size() != n || completions.size() != n || tasksPerInterval.size() != n) {
    throw DomainError("update_deficit: size mismatch");
  }
  DeficitVector out{std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    if (x.values[i] < 0.0 || qos[i] < 0.0) throw DomainError("update_deficit: negative input");
    if (completions[i] > tasksPerInterval[i]) {
      throw DomainError("update_deficit: more completions than released tasks");
    }
    const double next = x.values[i] + qos[i] * static_cast<double>(tasksPerInterval[i]) -
                        static_cast<double>(completions[i]);
    out.values[i] = std::max(next, 0.0);
  }
  return out;
}

PriorityDecision ldf_order(const DeficitVector& x, TieBreak tieBreak, Rng* rng) {
  const std::size_t n = x.values.size();
  std::vector<long long> key(n);
  for (std::size_t i = 0; i < n; ++i) key[i] = std::llround(x.values[i] * 1e9);

  PriorityDecision d{std::vector<std::size_t>(n)};
  std::iota(d.order.begin(), d.order.end(), std::size_t{0});
  std::stable_sort(d.order.begin(), d.order.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });

  if (tieBreak == TieBreak::randomSeeded) {
    if (rng == nullptr) throw DomainError("ldf_order: random tie-break needs a random stream");
    for (std::size_t lo = 0; lo < n;) {
      std::size_t hi = lo + 1;
      while (hi < n && key[d.order[hi]] == key[d.order[lo]]) ++hi;
      // Fisher-Yates on the tie group, using the portable uniform
      for (std::size_t k = hi - lo; k > 1; --k) {
        auto j = static_cast<std::size_t>(uniform01(*rng) * static_cast<double>(k));
        std::swap(d.order[lo + k - 1], d.order[lo + std::min(j, k - 1)]);
      }
      lo = hi;
    }
  }
  return d;
}

bool feasibility_verdict(std::span<const double> fractions, std::span<const double> qos) {
  if (fractions.size() != qos.size()) throw DomainError("feasibility_verdict: size mismatch");
  for (std::size_t i = 0; i < qos.size(); ++i) {
    if (fractions[i] < qos[i] - 1e-12) return false;
  }
  return true;
}

}  // namespace srt
