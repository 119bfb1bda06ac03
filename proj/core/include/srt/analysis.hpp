#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "srt/model.hpp"
#include "srt/policy.hpp"
#include "srt/workload.hpp"

namespace srt {

/// Core counts are for identical cores of the system's first core speed.
struct BoundsReport {
  std::size_t mRB = 0;   ///< reservation: ceil(sum_i w_i(q_i) / delta_i)
  std::size_t mLB = 0;   ///< no policy needs fewer: ceil(sum_i q_i mu_i / delta_i)
  std::optional<std::size_t> mEstGreedy;  ///< unset when a task can exceed its period
  double gamma1 = 0.0;                    ///< greedy efficiency ratio (preemptive on uniform cores)
  double gamma1NonPreemptive = 0.0;
  double gamma2 = 0.0;                    ///< TS/LLREF efficiency ratio
  bool inROB = false;
  bool inFRB = false;
};

/// ceil(x), except that values within 1e-9 of an integer snap to it first.
std::size_t snapped_ceil(double x);

/// sum_i q_i mu_i / delta_i <= S_m.
bool r_ob_member(std::span<const double> q, const SystemSpec& system);

/// Reservations w_i(q_i) fit: per-user, top-k and total utilization checks.
bool f_rb_member(std::span<const double> q, const SystemSpec& system, const QuantileOptions& opts = {});

BoundsReport resource_calculators(std::span<const double> q, const SystemSpec& system,
                                  const QuantileOptions& opts = {});

struct CompletionProfile {
  /// p(d): expected completed fraction of each user's tasks per interval.
  std::map<std::vector<std::size_t>, std::vector<double>> perDecision;
  std::size_t sampleCount = 0;
};

/// Monte-Carlo estimate of p(d) for every priority decision d. Refuses
/// (DomainError) when n exceeds `maxUsers`, since there are n! decisions.
CompletionProfile estimate_completion_profile(const SystemSpec& system, SchedulerKind scheduler,
                                              std::size_t samplesPerDecision, std::uint64_t seed,
                                              std::size_t maxUsers = 8);

struct RibVerdict {
  bool member = false;
  /// Some subset constraint holds with equality (to 1e-9).
  bool boundary = false;
};

/// For every non-empty S: sum_{i in S} alpha_i q_i <= min over decisions that
/// rank S first of sum_{i in S} alpha_i p_i(d). DomainError if the profile
/// lacks a decision.
RibVerdict r_ib_member(std::span<const double> q, const CompletionProfile& profile,
                       std::span<const double> alpha);

}  // namespace srt
