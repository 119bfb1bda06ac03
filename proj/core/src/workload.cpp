#include "srt/workload.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "srt/errors.hpp"

namespace srt {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

Workload::Workload(Variant v) : v_(std::make_shared<const Variant>(std::move(v))) {}

Workload Workload::deterministic(double value) {
  require(finite_nonneg(value) && value > 0.0, "det: value must be finite and > 0");
  return Workload(Deterministic{value});
}

Workload Workload::exponential(double mean) {
  require(std::isfinite(mean) && mean > 0.0, "exp: mean must be finite and > 0");
  return Workload(Exponential{mean});
}

Workload Workload::gamma(double shape, double scale) {
  require(std::isfinite(shape) && shape > 0.0, "gamma: shape must be finite and > 0");
  require(std::isfinite(scale) && scale > 0.0, "gamma: scale must be finite and > 0");
  return Workload(Gamma{shape, scale});
}

Workload Workload::two_point(double low, double high, double p_low) {
  require(finite_nonneg(low) && finite_nonneg(high), "twopoint: values must be finite and >= 0");
  require(low <= high, "twopoint: low must not exceed high");
  require(p_low >= 0.0 && p_low <= 1.0, "twopoint: probability must lie in [0,1]");
  require(p_low * low + (1.0 - p_low) * high > 0.0, "twopoint: mean must be > 0");
  return Workload(TwoPoint{low, high, p_low});
}

Workload Workload::empirical(std::vector<double> samples) {
  require(!samples.empty(), "empirical: no samples");
  for (double s : samples) require(finite_nonneg(s), "empirical: samples must be finite and >= 0");
  std::sort(samples.begin(), samples.end());
  require(samples.back() > 0.0, "empirical: mean must be > 0");
  return Workload(Empirical{std::move(samples)});
}

Workload Workload::chain(std::vector<Workload> parts) {
  require(!parts.empty(), "chain: no parts");
  return Workload(Chain{std::move(parts)});
}

double Workload::mean() const {
  return std::visit(
      Overloaded{
          [](const Deterministic& d) { return d.value; },
          [](const Exponential& e) { return e.mean; },
          [](const Gamma& g) { return g.shape * g.scale; },
          [](const TwoPoint& t) { return t.pLow * t.low + (1.0 - t.pLow) * t.high; },
          [](const Empirical& e) {
            return std::accumulate(e.samples.begin(), e.samples.end(), 0.0) /
                   static_cast<double>(e.samples.size());
          },
          [](const Chain& c) {
            double s = 0.0;
            for (const auto& p : c.parts) s += p.mean();
            return s;
          },
      },
      *v_);
}

double Workload::variance() const {
  return std::visit(
      Overloaded{
          [](const Deterministic&) { return 0.0; },
          [](const Exponential& e) { return e.mean * e.mean; },
          [](const Gamma& g) { return g.shape * g.scale * g.scale; },
          [](const TwoPoint& t) {
            const double d = t.high - t.low;
            return t.pLow * (1.0 - t.pLow) * d * d;
          },
          [](const Empirical& e) {
            const double n = static_cast<double>(e.samples.size());
            const double m = std::accumulate(e.samples.begin(), e.samples.end(), 0.0) / n;
            double ss = 0.0;
            for (double x : e.samples) ss += (x - m) * (x - m);
            return ss / n;
          },
          [](const Chain& c) {
            double s = 0.0;
            for (const auto& p : c.parts) s += p.variance();
            return s;
          },
      },
      *v_);
}

bool Workload::is_deterministic() const {
  return std::visit(
      Overloaded{
          [](const Deterministic&) { return true; },
          [](const TwoPoint& t) { return t.low == t.high || t.pLow == 0.0 || t.pLow == 1.0; },
          [](const Empirical& e) { return e.samples.front() == e.samples.back(); },
          [](const Chain& c) {
            return std::all_of(c.parts.begin(), c.parts.end(),
                               [](const Workload& p) { return p.is_deterministic(); });
          },
          [](const auto&) { return false; },
      },
      *v_);
}

std::size_t Workload::part_count() const {
  if (const auto* c = std::get_if<Chain>(v_.get())) return c->parts.size();
  return 1;
}

std::string Workload::to_string() const {
  return std::visit(
      Overloaded{
          [](const Deterministic& d) { return "det(" + fmt_num(d.value) + ")"; },
          [](const Exponential& e) { return "exp(" + fmt_num(e.mean) + ")"; },
          [](const Gamma& g) { return "gamma(" + fmt_num(g.shape) + "," + fmt_num(g.scale) + ")"; },
          [](const TwoPoint& t) {
            return "twopoint(" + fmt_num(t.low) + "," + fmt_num(t.high) + "," + fmt_num(t.pLow) + ")";
          },
          [](const Empirical& e) {
            std::string s = "empirical(";
            for (std::size_t i = 0; i < e.samples.size(); ++i) {
              if (i) s += ",";
              s += fmt_num(e.samples[i]);
            }
            return s + ")";
          },
          [](const Chain& c) {
            std::string s = "chain(";
            for (std::size_t i = 0; i < c.parts.size(); ++i) {
              if (i) s += ",";
              s += c.parts[i].to_string();
            }
            return s + ")";
          },
      },
      *v_);
}

double sample(const Workload& dist, Rng& rng) {
  return std::visit(
      Overloaded{
          [](const Deterministic& d) { return d.value; },
          [&](const Exponential& e) { return e.mean * standard_exponential(rng); },
          [&](const Gamma& g) { return g.scale * standard_gamma(g.shape, rng); },
          [&](const TwoPoint& t) { return uniform01(rng) < t.pLow ? t.low : t.high; },
          [&](const Empirical& e) {
            const auto n = e.samples.size();
            auto idx = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
            return e.samples[std::min(idx, n - 1)];
          },
          [&](const Chain& c) {
            double s = 0.0;
            for (const auto& p : c.parts) s += sample(p, rng);
            return s;
          },
      },
      dist.variant());
}

std::vector<double> sample_parts(const Workload& dist, Rng& rng) {
  if (const auto* c = std::get_if<Chain>(&dist.variant())) {
    std::vector<double> out;
    out.reserve(c->parts.size());
    for (const auto& p : c->parts) out.push_back(sample(p, rng));
    return out;
  }
  return {sample(dist, rng)};
}

double mean(const Workload& dist) { return dist.mean(); }

namespace {

double empirical_quantile(const std::vector<double>& sorted, double q) {
  const auto n = static_cast<double>(sorted.size());
  auto k = static_cast<std::size_t>(std::ceil(q * n - 1e-12));
  if (k == 0) k = 1;
  return sorted[std::min(k, sorted.size()) - 1];
}

}  // namespace

double quantile(const Workload& dist, double q, const QuantileOptions& opts) {
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("quantile: q must lie in (0, 1]");
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(
      Overloaded{
          [](const Deterministic& d) { return d.value; },
          [&](const Exponential& e) { return q == 1.0 ? inf : -e.mean * std::log1p(-q); },
          [&](const Gamma& g) {
            return q == 1.0 ? inf : g.scale * boost::math::gamma_p_inv(g.shape, q);
          },
          [&](const TwoPoint& t) { return (q <= t.pLow) ? t.low : t.high; },
          [&](const Empirical& e) { return empirical_quantile(e.samples, q); },
          [&](const Chain&) {
            if (dist.is_deterministic()) return dist.mean();
            Rng rng(opts.seed);
            std::vector<double> draws(std::max<std::size_t>(opts.sampleBudget, 1));
            for (auto& d : draws) d = sample(dist, rng);
            std::sort(draws.begin(), draws.end());
            return empirical_quantile(draws, q);
          },
      },
      dist.variant());
}

double cdf(const Workload& dist, double x) {
  return std::visit(
      Overloaded{
          [&](const Deterministic& d) { return x >= d.value ? 1.0 : 0.0; },
          [&](const Exponential& e) { return x <= 0.0 ? 0.0 : -std::expm1(-x / e.mean); },
          [&](const Gamma& g) { return x <= 0.0 ? 0.0 : boost::math::gamma_p(g.shape, x / g.scale); },
          [&](const TwoPoint& t) {
            if (x >= t.high) return 1.0;
            return x >= t.low ? t.pLow : 0.0;
          },
          [&](const Empirical& e) {
            const auto it = std::upper_bound(e.samples.begin(), e.samples.end(), x);
            return static_cast<double>(it - e.samples.begin()) / static_cast<double>(e.samples.size());
          },
          [](const Chain&) -> double { throw DomainError("cdf: not available for chain workloads"); },
      },
      dist.variant());
}

NbueReport nbue_check(const Workload& dist, double horizon, std::size_t gridPoints,
                      std::size_t sampleBudget, Rng& rng) {
  if (!(horizon > 0.0)) throw DomainError("nbue_check: horizon must be > 0");
  if (gridPoints == 0 || sampleBudget < 2) throw DomainError("nbue_check: empty grid or budget");

  std::vector<double> xs(sampleBudget);
  for (auto& x : xs) x = sample(dist, rng);
  std::sort(xs.begin(), xs.end());

  // suffix sums over the sorted draws give every conditional moment in O(1)
  const std::size_t n = xs.size();
  std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    s1[i] = s1[i + 1] + xs[i];
    s2[i] = s2[i + 1] + xs[i] * xs[i];
  }

  NbueReport rep;
  rep.declaredMean = dist.mean();
  rep.maxViolation = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= gridPoints; ++k) {
    const double t = horizon * static_cast<double>(k) / static_cast<double>(gridPoints);
    const auto first = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), t) - xs.begin());
    const std::size_t cnt = n - first;
    if (cnt < 2) {
      rep.skipped.push_back(t);
      continue;
    }
    const double c = static_cast<double>(cnt);
    const double m = s1[first] / c;  // E[W | W > t]
    const double var = std::max(0.0, (s2[first] - c * m * m) / (c - 1.0));
    const double se = std::sqrt(var / c);
    const double residual = m - t;
    rep.grid.push_back({t, residual, se, cnt});
    rep.maxViolation = std::max(rep.maxViolation, residual - rep.declaredMean - 3.0 * se);
  }
  if (rep.grid.empty()) rep.maxViolation = 0.0;
  rep.isNbue = rep.maxViolation <= 0.0;
  return rep;
}

}  // namespace srt
