#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srt/model.hpp"
#include "srt/policy.hpp"

namespace srt {

struct SimulationConfig {
  SystemSpec system;
  SchedulerKind scheduler = SchedulerKind::ldfGreedy;
  std::size_t horizon = 3000;  ///< periods, or super periods when periods differ
  std::uint64_t seed = 1;
  bool collectProofObservables = true;
  /// Leading intervals left out of the fractions and observables.
  std::size_t burnIn = 0;
  TieBreak tieBreak = TieBreak::byIndex;
  /// Run validate_outcome on every interval; the first failure is reported.
  bool validate = false;
};

/// Sample mean and its standard error over intervals.
struct Moments {
  double mean = 0.0;
  double stdError = 0.0;
};

/// Per-interval observables behind the capacity argument. Per user:
/// A_i (started but unfinished tasks), E_i (their residual work), U_i (work
/// performed) and E_i - mu_i A_i; plus U_N, the work performed for everyone.
struct ProofObservables {
  std::vector<Moments> unfinished;
  std::vector<Moments> residual;
  std::vector<Moments> busy;
  std::vector<Moments> wasteGap;
  Moments busyAll;
};

struct SimulationResult {
  std::vector<double> fractions;  ///< completed / released, per user
  bool feasible = false;
  std::vector<double> meanDeficit;
  std::vector<double> maxDeficit;
  std::vector<double> maxDeficitSecondHalf;
  ProofObservables observables;
  std::size_t minCompletionsPerInterval = 0;
  std::size_t maxCompletionsPerInterval = 0;
  /// sum_i q_i mu_i / delta_i: the work per time unit the QoS targets demand.
  double requiredLoad = 0.0;
  /// Fraction of sub-tasks finished, per user and sub-task position.
  std::vector<std::vector<double>> subtaskCompletion;
  std::optional<std::string> violation;
};

/// Runs the deficit loop from X(0) = 0. Bitwise reproducible per config.
/// Throws ConfigError when the scheduler does not suit the system and
/// InfeasibleReservation when reservations do not fit.
SimulationResult run(const SimulationConfig& config);

/// n users with TwoPoint(1, 9, 0.5) workloads and q = 0.5 on one core with
/// period n; every task receives exactly one unit of work and is then dropped.
SimulationResult run_nonnbue_counterexample(std::size_t n, std::size_t horizon, std::uint64_t seed);

struct CoreRequirement {
  std::size_t cores = 0;
  bool exceeded = false;  ///< infeasible for every m <= mMax
};

/// Smallest m <= mMax of identical cores (speed of the template's first core)
/// for which the scheduler is feasible, scanning upward from max(1, mLB).
/// Reservation uses its analytic feasibility test instead of simulation.
CoreRequirement required_cores(const SystemSpec& systemTemplate, SchedulerKind scheduler, std::size_t horizon,
                               std::uint64_t seed, std::size_t mMax);

}  // namespace srt
