#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "srt/rng.hpp"
#include "srt/workload.hpp"

namespace srt {

/// One soft real-time user: a task every `period` time units whose workload is
/// drawn from `workload`; `qos` is the required long-run fraction of on-time
/// completions.
struct UserSpec {
  double qos = 0.0;
  double period = 1.0;
  Workload workload = Workload::deterministic(1.0);
  /// Believed per-task workload used by the estimate-based TS/LLREF heuristic.
  std::optional<double> estimate;
};

struct CoreSpec {
  double speed = 1.0;  ///< work units per time unit
};

/// Full problem instance: users, cores and the derived super period (least
/// common multiple of the user periods).
class SystemSpec {
 public:
  SystemSpec(std::vector<UserSpec> users, std::vector<CoreSpec> cores);

  static std::vector<CoreSpec> identical_cores(std::size_t m, double speed = 1.0);

  const std::vector<UserSpec>& users() const { return users_; }
  const std::vector<CoreSpec>& cores() const { return cores_; }
  std::size_t n() const { return users_.size(); }
  std::size_t m() const { return cores_.size(); }

  double super_period() const { return superPeriod_; }
  /// Number of tasks user i releases per super period (Δ/δ_i).
  std::size_t tasks_per_interval(std::size_t i) const { return tasksPerInterval_[i]; }
  bool equal_periods() const { return equalPeriods_; }
  bool identical_cores() const { return identicalCores_; }

  double total_speed() const;
  /// Sum of the k largest core speeds (S_k); k is clamped to m.
  double top_speed_sum(std::size_t k) const;
  double min_speed() const;

  std::vector<double> qos() const;
  std::vector<double> means() const;

  SystemSpec with_cores(std::vector<CoreSpec> cores) const;
  SystemSpec with_qos(std::span<const double> q) const;
  SystemSpec with_uniform_qos(double q) const;

 private:
  std::vector<UserSpec> users_;
  std::vector<CoreSpec> cores_;
  double superPeriod_ = 0.0;
  std::vector<std::size_t> tasksPerInterval_;
  bool equalPeriods_ = true;
  bool identicalCores_ = true;
};

/// Least common multiple of positive real periods, recovered through rational
/// approximation (denominators up to 10^6). Throws ConfigError when the
/// result would need more than 10^6 tasks of the shortest period.
double least_common_multiple(std::span<const double> periods);

struct DeficitVector {
  std::vector<double> values;
};

/// d[0] is the highest-priority user.
struct PriorityDecision {
  std::vector<std::size_t> order;
};

enum class TieBreak { byIndex, randomSeeded };

/// x'_i = max(x_i + q_i * k_i - Y_i, 0), with k_i tasks released per interval.
DeficitVector update_deficit(const DeficitVector& x, std::span<const double> qos,
                             std::span<const std::size_t> completions,
                             std::span<const std::size_t> tasksPerInterval);

/// Largest deficit first. Deficits that agree to 1e-9 are treated as ties, so
/// accumulated rounding error does not decide priorities. `rng` is required
/// for TieBreak::randomSeeded.
PriorityDecision ldf_order(const DeficitVector& x, TieBreak tieBreak, Rng* rng = nullptr);

/// True iff fractions_i >= qos_i for every user (1e-12 slack for representation error).
bool feasibility_verdict(std::span<const double> fractions, std::span<const double> qos);

}  // namespace srt
