#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace srt {

struct InvariantCheck {
  std::string name;
  std::string instance;
  bool passed = false;
  std::string detail;
};

struct InvariantOptions {
  std::size_t randomInstances = 100;
  std::size_t horizon = 3000;
  /// Feed the non-NBUE probe run into the NBUE waste check, which must then fail.
  bool injectNonNbue = false;
};

/// Schedule traces, capacity conservation, task selection and LLREF
/// completion on random instances (mixed distributions, speeds, periods).
std::vector<InvariantCheck> structural_invariants(std::uint64_t seed, std::size_t instances = 100);

/// Every exact and statistical check of the library.
std::vector<InvariantCheck> run_invariant_suite(std::uint64_t seed, const InvariantOptions& opts = {});

}  // namespace srt
