#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "srt/rng.hpp"

namespace srt {

class Workload;

struct Deterministic {
  double value;
};
struct Exponential {
  double mean;
};
struct Gamma {
  double shape;
  double scale;
};
/// `low` with probability `pLow`, otherwise `high`.
struct TwoPoint {
  double low;
  double high;
  double pLow;
};
/// Resamples uniformly from a fixed, sorted list of observations.
struct Empirical {
  std::vector<double> samples;
};
/// Sequential sub-tasks; the task workload is the sum of independent part draws.
struct Chain {
  std::vector<Workload> parts;
};

/// Immutable, cheaply copyable task-workload distribution.
///
/// All constructors validate their parameters (non-negative support, finite
/// positive mean) and throw DomainError otherwise, so every Workload value in
/// circulation is valid.
class Workload {
 public:
  using Variant = std::variant<Deterministic, Exponential, Gamma, TwoPoint, Empirical, Chain>;

  static Workload deterministic(double value);
  static Workload exponential(double mean);
  static Workload gamma(double shape, double scale);
  static Workload two_point(double low, double high, double p_low);
  static Workload empirical(std::vector<double> samples);
  static Workload chain(std::vector<Workload> parts);

  const Variant& variant() const { return *v_; }

  double mean() const;
  double variance() const;
  bool is_deterministic() const;

  /// Number of sub-tasks (1 unless this is a Chain).
  std::size_t part_count() const;

  /// Literal form accepted by the scenario parser, e.g. `gamma(5,1)`.
  std::string to_string() const;

 private:
  explicit Workload(Variant v);
  std::shared_ptr<const Variant> v_;
};

/// One draw. Chains return the sum of independent part draws.
double sample(const Workload& dist, Rng& rng);

/// Draws of each sub-task in order; sums to what `sample` would have returned
/// for the same stream position.
std::vector<double> sample_parts(const Workload& dist, Rng& rng);

double mean(const Workload& dist);

struct QuantileOptions {
  /// Monte-Carlo budget for Chain quantiles.
  std::size_t sampleBudget = 1'000'000;
  std::uint64_t seed = 0x5eedULL;
};

/// Smallest w with CDF(w) >= q, for q in (0, 1]. May be +inf (e.g. q = 1 for
/// unbounded support). Throws DomainError for q outside (0, 1].
double quantile(const Workload& dist, double q, const QuantileOptions& opts = {});

/// CDF at x. Chains are not supported (DomainError).
double cdf(const Workload& dist, double x);

struct NbuePoint {
  double t;
  double residualMean;  ///< estimate of E[W - t | W > t]
  double stdError;
  std::size_t support;  ///< number of samples with W > t
};

struct NbueReport {
  std::vector<NbuePoint> grid;
  std::vector<double> skipped;  ///< grid times with fewer than two samples beyond t
  double declaredMean = 0.0;
  /// max over grid of residualMean - declaredMean - 3 * stdError; NBUE holds
  /// on the grid iff this is <= 0.
  double maxViolation = 0.0;
  bool isNbue = true;
};

/// Empirical check of E[W - t | W > t] <= E[W] on t = horizon*k/gridPoints,
/// k = 1..gridPoints, allowing three standard errors of slack.
NbueReport nbue_check(const Workload& dist, double horizon, std::size_t gridPoints,
                      std::size_t sampleBudget, Rng& rng);

}  // namespace srt
