// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "srt/analysis.hpp"
#include "srt/experiments.hpp"
#include "srt/invariants.hpp"
#include "srt/scenario.hpp"
#include "srt/simulator.hpp"

using namespace srt;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SystemSpec appendix(double q) {
  return SystemSpec(std::vector<UserSpec>(4, UserSpec{q, 1.5, Workload::deterministic(1.0), {}}),
                    SystemSpec::identical_cores(2));
}

Verdict appendix_tightness() {
  const auto g = run({appendix(0.75), SchedulerKind::ldfGreedy, 3000, 1, false});
  const auto t = run({appendix(0.75), SchedulerKind::ldfTsLlref, 3000, 1, false});
  const bool ok = g.minCompletionsPerInterval == 2 && g.maxCompletionsPerInterval == 2 &&
                  t.minCompletionsPerInterval == 3 && t.maxCompletionsPerInterval == 3;
  return {ok, fmt("greedy completions/period in [%zu,%zu], ts-llref in [%zu,%zu]", g.minCompletionsPerInterval,
                  g.maxCompletionsPerInterval, t.minCompletionsPerInterval, t.maxCompletionsPerInterval)};
}

Verdict nonnbue() {
  const std::size_t n = 20;
  const auto r = run_nonnbue_counterexample(n, 3000, 1);
  const auto [lo, hi] = std::minmax_element(r.fractions.begin(), r.fractions.end());
  const double ratio = r.requiredLoad;  // m = 1, so sum q mu / delta is already per unit of capacity
  const SystemSpec sys(std::vector<UserSpec>(n, UserSpec{0.5, 20.0, Workload::two_point(1, 9, 0.5), {}}),
                       SystemSpec::identical_cores(1));
  const bool ok = *lo >= 0.47 && *hi <= 0.53 && ratio == 2.5 && r.observables.busyAll.mean == 20.0 &&
                  !r_ob_member(sys.qos(), sys);
  return {ok, fmt("fractions in [%.4f,%.4f], sum q mu/(m delta) = %.12g, mean U_N = %.12g, in R_OB = %s", *lo, *hi,
                  ratio, r.observables.busyAll.mean, r_ob_member(sys.qos(), sys) ? "yes" : "no")};
}

const SavingsRow* find(const std::vector<SavingsRow>& rows, double q, const std::string& scheduler) {
  for (const auto& r : rows) {
    if (std::abs(r.q - q) < 1e-9 && r.scheduler == scheduler) return &r;
  }
  return nullptr;
}

std::string count(const SavingsRow* r) {
  if (r == nullptr) return "missing";
  return r->mRequired ? std::to_string(*r->mRequired) : std::string(">") + std::to_string(r->mMax);
}

Verdict deterministic_savings() {
  auto s = *builtin_scenario("fig3-top");
  s.schedulers = {SchedulerKind::ldfGreedy, SchedulerKind::ldfTsLlref};
  const auto rows = run_scan(s);
  bool ok = true;
  std::string detail = "ts-llref m vs mLB:";
  for (double q : s.qGrid) {
    const auto* t = find(rows, q, "ldf-ts-llref");
    const auto lb = static_cast<std::size_t>(std::ceil(30.0 * q * 5.0 / 9.0 - 1e-9));
    ok &= t && t->mRequired && *t->mRequired == lb && t->mLB == lb;
    detail += fmt(" %.1f:%s/%zu", q, count(t).c_str(), lb);
  }
  const auto* g = find(rows, 0.9, "ldf-greedy");
  const bool negative = g && (!g->mRequired || *g->mRequired > g->mRB);
  ok &= negative;
  detail += fmt("; greedy at q=0.9 needs %s vs mRB %zu", count(g).c_str(), g ? g->mRB : std::size_t{0});
  return {ok, detail};
}

Verdict large_period() {
  auto s = builtin_scenario("fig2")->desk_scaled();
  s.qGrid = {0.3, 0.5, 0.7, 0.9};
  s.schedulers = {SchedulerKind::ldfGreedy};
  const auto rows = run_scan(s);
  bool ok = s.user_count() == 50;
  std::string detail = "greedy m (mLB<=m<=mEst):";
  for (double q : s.qGrid) {
    const auto* r = find(rows, q, "ldf-greedy");
    const bool within = r && r->mRequired && r->mEst && r->mLB <= *r->mRequired && *r->mRequired <= *r->mEst;
    ok &= within;
    detail += fmt(" %.1f:%zu<=%s<=%s", q, r ? r->mLB : std::size_t{0}, count(r).c_str(),
                  r && r->mEst ? std::to_string(*r->mEst).c_str() : "undef");
  }
  const auto* half = find(rows, 0.5, "ldf-greedy");
  const double savings = half && half->savings ? *half->savings : -1.0;
  ok &= savings > 0.30;
  detail += fmt("; savings at q=0.5 = %.1f%% (mRB %zu)", 100.0 * savings, half ? half->mRB : std::size_t{0});
  return {ok, detail};
}

// E_i - mu_i A_i in standard errors, worst user
double worst_z(const SimulationResult& r, bool absolute) {
  double worst = -1e300;
  for (const auto& g : r.observables.wasteGap) {
    const double z = g.stdError > 0.0 ? g.mean / g.stdError : (g.mean == 0.0 ? 0.0 : std::copysign(1e9, g.mean));
    worst = std::max(worst, absolute ? std::abs(z) : z);
  }
  return worst;
}

Verdict nbue_waste() {
  auto sys = [](Workload w) {
    return SystemSpec(std::vector<UserSpec>(20, UserSpec{0.5, 12.0, w, {}}), SystemSpec::identical_cores(4));
  };
  const auto e = run({sys(Workload::exponential(3.0)), SchedulerKind::ldfGreedy, 3000, 1});
  const auto g = run({sys(Workload::gamma(5.0, 1.0)), SchedulerKind::ldfGreedy, 3000, 1});
  const double ze = worst_z(e, false), zeAbs = worst_z(e, true), zg = worst_z(g, false);
  const bool ok = ze <= 3.0 && zg <= 3.0 && zeAbs <= 3.0;
  return {ok, fmt("max z of E-muA: exp %.2f (|z| %.2f), gamma(5,1) %.2f; limit 3", ze, zeAbs, zg)};
}

// Enumerates every subset S and every permutation, keeping those that rank S first.
bool brute_force_rib(const std::vector<double>& q, const CompletionProfile& profile, const std::vector<double>& alpha) {
  const std::size_t n = q.size();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    double lhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) lhs += (mask >> i & 1u) ? alpha[i] * q[i] : 0.0;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
      bool leads = true;
      for (std::size_t k = 0; k < size; ++k) leads = leads && (mask >> perm[k] & 1u);
      if (!leads) continue;
      const auto& p = profile.perDecision.at(perm);
      double rhs = 0.0;
      for (std::size_t i = 0; i < n; ++i) rhs += (mask >> i & 1u) ? alpha[i] * p[i] : 0.0;
      if (lhs > rhs + 1e-9) return false;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return true;
}

Verdict inner_bound() {
  const auto sys = appendix(0.75);
  const auto ts = estimate_completion_profile(sys, SchedulerKind::ldfTsLlref, 1, 1);
  const auto greedy = estimate_completion_profile(sys, SchedulerKind::ldfGreedy, 1, 1);
  const auto alpha = sys.means();
  const double g2 = resource_calculators(sys.qos(), sys).gamma2;
  std::vector<double> scaled(4, g2 * 0.75);
  const std::vector<double> ones(4, 1.0);
  const bool a = r_ib_member(scaled, ts, alpha).member, ab = brute_force_rib(scaled, ts, alpha);
  const bool r = r_ib_member(ones, greedy, alpha).member, rb = brute_force_rib(ones, greedy, alpha);
  const bool ok = std::abs(g2 - 2.0 / 3.0) < 1e-12 && a && ab && !r && !rb;
  return {ok, fmt("gamma2 = %.6f; accepts gamma2*0.75 under ts-llref: %s (oracle %s); accepts 1 under greedy: %s "
                  "(oracle %s)",
                  g2, a ? "yes" : "no", ab ? "yes" : "no", r ? "yes" : "no", rb ? "yes" : "no")};
}

Verdict heuristic_ordering() {
  auto s = *builtin_scenario("fig3-bottom");
  s.qGrid = {0.3, 0.5, 0.7, 0.95};
  s.schedulers = {SchedulerKind::ldfGreedy, SchedulerKind::ldfTsLlrefEst};
  const auto rows = run_scan(s);
  auto value = [](const SavingsRow* r) {
    return r && r->mRequired ? static_cast<double>(*r->mRequired) : INFINITY;
  };
  bool ok = true;
  std::string detail = "heuristic vs greedy m:";
  for (double q : s.qGrid) {
    const auto* h = find(rows, q, "ldf-ts-llref-est");
    const auto* g = find(rows, q, "ldf-greedy");
    const bool good = q < 0.9 ? value(h) <= value(g) : value(h) >= value(g);
    ok &= good;
    detail += fmt(" %.2f:%s/%s%s", q, count(h).c_str(), count(g).c_str(), good ? "" : "(x)");
  }
  return {ok, detail};
}

Verdict structural() {
  const auto checks = structural_invariants(1, 100);
  std::size_t passed = 0;
  std::string first;
  for (const auto& c : checks) {
    if (c.passed) {
      ++passed;
    } else if (first.empty()) {
      first = "; first failure: " + c.name + " on " + c.instance + ": " + c.detail;
    }
  }
  return {passed == checks.size(), fmt("%zu/%zu checks over 100 instances", passed, checks.size()) + first};
}

Verdict full_fig2() {
  auto s = *builtin_scenario("fig2");
  s.qGrid = {0.05, 0.5, 0.95};
  s.schedulers = {SchedulerKind::ldfGreedy};
  const auto rows = run_scan(s);
  double sv[3];
  for (int k = 0; k < 3; ++k) {
    const auto* r = find(rows, s.qGrid[k], "ldf-greedy");
    sv[k] = r && r->savings ? *r->savings : -1.0;
  }
  const bool ok = sv[0] >= 0.4 && sv[1] >= 0.4 && sv[2] >= 0.4 && sv[1] < sv[0] && sv[1] < sv[2];
  return {ok, fmt("savings at q=0.05/0.5/0.95: %.1f%% %.1f%% %.1f%%", 100 * sv[0], 100 * sv[1], 100 * sv[2])};
}

struct Criterion {
  int id;
  const char* name;
  double limitSeconds;
  std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv) {
  bool full = false;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--full-fig2") == 0) {
      full = true;
    } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N] [--full-fig2]\n", argv[0]);
      return 2;
    }
  }
  std::vector<Criterion> criteria{
      {1, "appendix tightness", 1.0, appendix_tightness},
      {2, "non-NBUE counterexample", 5.0, nonnbue},
      {3, "deterministic savings curve", 120.0, deterministic_savings},
      {4, "large-period near-optimality (desk scale)", 300.0, large_period},
      {5, "NBUE waste inequality", 30.0, nbue_waste},
      {6, "inner bound enumeration", 1.0, inner_bound},
      {7, "heuristic TS/LLREF ordering", 180.0, heuristic_ordering},
      {8, "structural invariant suite", 60.0, structural},
  };
  if (full) criteria.push_back({9, "full-scale n=200 savings U-shape", 600.0, full_fig2});

  int failed = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool inTime = secs < c.limitSeconds;
    const bool pass = v.pass && inTime;
    failed += !pass;
    std::printf("%s  %d. %s (%.2f s, limit %.0f s%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                c.limitSeconds, inTime ? "" : ", exceeded", v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
