#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "srt/analysis.hpp"
#include "srt/invariants.hpp"
#include "srt/model.hpp"
#include "srt/simulator.hpp"

using namespace srt;

namespace {

struct Instance {
  SystemSpec system;
  std::vector<double> q;
};

// deterministic workloads, identical cores, equal periods
Instance random_deterministic(std::mt19937_64& gen, std::size_t maxUsers) {
  std::uniform_int_distribution<std::size_t> users(1, maxUsers), cores(1, 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = users(gen);
  const double period = 2.0 + 8.0 * u(gen);
  std::vector<UserSpec> specs;
  for (std::size_t i = 0; i < n; ++i) {
    specs.push_back({u(gen), period, Workload::deterministic(0.2 + (period - 0.2) * u(gen)), {}});
  }
  SystemSpec sys(specs, SystemSpec::identical_cores(cores(gen)));
  return {sys, sys.qos()};
}

}  // namespace

TEST(Property, DeficitStaysNonNegative) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> tasks(1, 4);
  for (int trial = 0; trial < 500; ++trial) {
    DeficitVector x{std::vector<double>(5)};
    std::vector<double> q(5);
    for (auto& v : q) v = u(gen);
    for (int step = 0; step < 20; ++step) {
      std::vector<std::size_t> per(5), done(5);
      for (std::size_t i = 0; i < 5; ++i) {
        per[i] = tasks(gen);
        done[i] = std::uniform_int_distribution<std::size_t>(0, per[i])(gen);
      }
      x = update_deficit(x, q, done, per);
      for (double v : x.values) ASSERT_GE(v, 0.0);
    }
  }
}

TEST(Property, LdfOrderIsSortedPermutation) {
  std::mt19937_64 gen(12);
  std::uniform_int_distribution<int> level(0, 3);
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    DeficitVector x{std::vector<double>(7)};
    for (auto& v : x.values) v = 0.25 * level(gen);  // many ties
    for (auto tb : {TieBreak::byIndex, TieBreak::randomSeeded}) {
      const auto d = ldf_order(x, tb, &rng);
      auto sorted = d.order;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < sorted.size(); ++i) ASSERT_EQ(sorted[i], i);
      for (std::size_t k = 1; k < d.order.size(); ++k) {
        ASSERT_GE(x.values[d.order[k - 1]], x.values[d.order[k]]);
        if (tb == TieBreak::byIndex && x.values[d.order[k - 1]] == x.values[d.order[k]]) {
          ASSERT_LT(d.order[k - 1], d.order[k]);
        }
      }
    }
  }
}

TEST(Property, OuterBoundIsMonotone) {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = random_deterministic(gen, 10);
    if (!r_ob_member(inst.q, inst.system)) continue;
    auto lower = inst.q;
    for (auto& v : lower) v *= u(gen);
    EXPECT_TRUE(r_ob_member(lower, inst.system));
  }
}

TEST(Property, ReservationImpliesOuterBoundForDeterministic) {
  std::mt19937_64 gen(14);
  int fits = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = random_deterministic(gen, 6);
    if (f_rb_member(inst.q, inst.system)) {
      ++fits;
      EXPECT_TRUE(r_ob_member(inst.q, inst.system));
    }
    const auto r = resource_calculators(inst.q, inst.system);
    EXPECT_LE(r.mLB, r.mRB);
  }
  EXPECT_GT(fits, 0);
}

TEST(Property, InnerBoundAcceptsScaledOuterBound) {
  std::mt19937_64 gen(15);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = random_deterministic(gen, 5);
    // shrink q into the outer bound
    const auto mu = inst.system.means();
    const double period = inst.system.users().front().period;
    double load = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) load += inst.q[i] * mu[i] / period;
    const double cap = inst.system.total_speed();
    if (load > cap) {
      for (auto& v : inst.q) v *= cap / load * u(gen);
    }
    ASSERT_TRUE(r_ob_member(inst.q, inst.system));
    const auto sys = inst.system.with_qos(inst.q);
    const auto profile = estimate_completion_profile(sys, SchedulerKind::ldfTsLlref, 1, 1);
    const double g2 = resource_calculators(inst.q, sys).gamma2;
    std::vector<double> scaled = inst.q;
    for (auto& v : scaled) v *= g2;
    EXPECT_TRUE(r_ib_member(scaled, profile, mu).member) << "trial " << trial;
    ++checked;
  }
  EXPECT_EQ(checked, 40);
}

TEST(Property, InnerBoundVerdictIgnoresAlphaScale) {
  std::mt19937_64 gen(16);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = random_deterministic(gen, 4);
    const auto profile = estimate_completion_profile(inst.system, SchedulerKind::ldfGreedy, 1, 1);
    auto alpha = inst.system.means();
    const bool base = r_ib_member(inst.q, profile, alpha).member;
    const double c = 0.01 + 100.0 * u(gen);
    for (auto& a : alpha) a *= c;
    EXPECT_EQ(r_ib_member(inst.q, profile, alpha).member, base);
  }
}

TEST(Property, FeasibleFractionsTrackLoad) {
  // whenever a run is feasible, the completed work per time cannot exceed capacity
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = random_deterministic(gen, 6);
    const auto r = run({inst.system, SchedulerKind::ldfGreedy, 200, 1});
    const auto mu = inst.system.means();
    const double period = inst.system.users().front().period;
    double done = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) done += r.fractions[i] * mu[i] / period;
    EXPECT_LE(done, inst.system.total_speed() + 1e-9);
    if (r.feasible) {
      EXPECT_TRUE(r_ob_member(inst.q, inst.system));
    }
  }
}

TEST(Property, StructuralSuite) {
  const auto checks = structural_invariants(7, 25);
  EXPECT_FALSE(checks.empty());
  for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.name << " " << c.instance << ": " << c.detail;
}
