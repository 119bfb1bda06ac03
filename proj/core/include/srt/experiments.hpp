#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srt/analysis.hpp"
#include "srt/scenario.hpp"
#include "srt/simulator.hpp"

namespace srt {

struct ExperimentOptions {
  std::optional<std::uint64_t> seed;   ///< replaces the scenario's seed list
  std::optional<std::size_t> horizon;  ///< replaces the scenario's horizon
  bool deskScale = false;
  unsigned threads = 0;  ///< 0: hardware concurrency
};

/// One (q, scheduler) cell of a required-cores sweep.
struct SavingsRow {
  std::string scenario;
  double q = 0.0;
  std::string scheduler;
  std::optional<std::size_t> mRequired;  ///< unset when no m <= mMax works
  std::size_t mMax = 0;
  std::size_t mRB = 0;
  std::size_t mLB = 0;
  std::optional<std::size_t> mEst;
  std::optional<double> savings;     ///< 1 - mRequired / mRB
  std::optional<double> upperBound;  ///< 1 - mLB / mRB
  bool feasible = false;
  std::string error;  ///< set when the cell could not run
};

struct BoundsRow {
  std::string scenario;
  double q = 0.0;
  BoundsReport report;
};

/// One user of one simulation run.
struct SimulateRow {
  std::string scenario;
  double q = 0.0;
  std::string scheduler;
  std::uint64_t seed = 0;
  std::size_t user = 0;
  double qos = 0.0;
  double fraction = 0.0;
  bool feasible = false;
  double meanDeficit = 0.0;
  double maxDeficit = 0.0;
  Moments unfinished;
  Moments residual;
  Moments busy;
  std::string error;
};

/// Required cores for every (q, scheduler); the largest over seeds is kept.
/// Cells run in parallel, rows come back in grid order.
std::vector<SavingsRow> run_scan(const Scenario& scenario, const ExperimentOptions& opts = {});
std::vector<BoundsRow> run_bounds(const Scenario& scenario, const ExperimentOptions& opts = {});
std::vector<SimulateRow> run_simulate(const Scenario& scenario, const ExperimentOptions& opts = {});

std::string savings_csv(const std::vector<SavingsRow>& rows);
std::string bounds_csv(const std::vector<BoundsRow>& rows);
std::string simulate_csv(const std::vector<SimulateRow>& rows);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace srt
