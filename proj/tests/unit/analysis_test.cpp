#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>

#include "srt/analysis.hpp"
#include "srt/errors.hpp"

using namespace srt;

namespace {

SystemSpec homogeneous(std::size_t n, double q, double period, Workload w, std::size_t m) {
  return SystemSpec(std::vector<UserSpec>(n, UserSpec{q, period, w, {}}), SystemSpec::identical_cores(m));
}

SystemSpec appendix() { return homogeneous(4, 0.75, 1.5, Workload::deterministic(1.0), 2); }

// Independent check: enumerate every subset S and every permutation, keep the
// permutations whose first |S| entries are exactly S.
bool brute_force_rib(const std::vector<double>& q, const CompletionProfile& profile, const std::vector<double>& alpha) {
  const std::size_t n = q.size();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    double lhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) lhs += alpha[i] * q[i];
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
      bool leads = true;
      for (std::size_t k = 0; k < size; ++k) leads = leads && (mask & (1u << perm[k]));
      if (!leads) continue;
      const auto& p = profile.perDecision.at(perm);
      double rhs = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) rhs += alpha[i] * p[i];
      }
      if (lhs > rhs + 1e-9) return false;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return true;
}

CompletionProfile random_profile(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CompletionProfile profile;
  profile.sampleCount = 1;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  do {
    std::vector<double> p(n);
    for (auto& v : p) v = u(gen);
    profile.perDecision[perm] = p;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return profile;
}

}  // namespace

TEST(Analysis, SnappedCeil) {
  EXPECT_EQ(snapped_ceil(3.0), 3u);
  EXPECT_EQ(snapped_ceil(3.0000000001), 3u);
  EXPECT_EQ(snapped_ceil(2.9999999999), 3u);
  EXPECT_EQ(snapped_ceil(3.01), 4u);
  EXPECT_EQ(snapped_ceil(0.0), 0u);
}

TEST(Analysis, OuterBoundExamples) {
  const auto tight = homogeneous(6, 1.0, 6.0, Workload::deterministic(1.0), 1);
  EXPECT_TRUE(r_ob_member(tight.qos(), tight));
  const auto probe = homogeneous(20, 0.5, 20.0, Workload::two_point(1, 9, 0.5), 1);
  EXPECT_FALSE(r_ob_member(probe.qos(), probe));
  const std::vector<double> zero(20, 0.0);
  EXPECT_TRUE(r_ob_member(zero, probe));
}

TEST(Analysis, ReservationRegionExamples) {
  const auto fits = homogeneous(2, 1.0, 10.0, Workload::deterministic(5.0), 1);
  EXPECT_TRUE(f_rb_member(fits.qos(), fits));
  const auto over = homogeneous(2, 1.0, 9.0, Workload::deterministic(5.0), 1);
  EXPECT_FALSE(f_rb_member(over.qos(), over));
  const SystemSpec uniform(std::vector<UserSpec>(3, UserSpec{1.0, 4.0, Workload::deterministic(4.0), {}}),
                           {{2.0}, {1.0}});
  EXPECT_TRUE(f_rb_member(uniform.qos(), uniform));
}

TEST(Analysis, CalculatorLargePeriod) {
  const auto sys = homogeneous(200, 0.5, 50.0, Workload::gamma(5.0, 1.0), 1);
  const auto r = resource_calculators(sys.qos(), sys);
  EXPECT_EQ(r.mLB, 10u);
  ASSERT_TRUE(r.mEstGreedy.has_value());
  EXPECT_EQ(*r.mEstGreedy, 12u);
  EXPECT_NEAR(r.gamma1, 0.9, 1e-12);
  // median of gamma(5,1) is 4.67091, so 200 * 4.67091 / 50 = 18.68
  EXPECT_EQ(r.mRB, 19u);
  EXPECT_FALSE(r.inFRB);
  EXPECT_FALSE(r.inROB);
}

TEST(Analysis, CalculatorDeterministic) {
  const auto sys = homogeneous(30, 0.5, 9.0, Workload::deterministic(5.0), 10);
  const auto r = resource_calculators(sys.qos(), sys);
  EXPECT_EQ(r.mRB, 17u);
  EXPECT_EQ(r.mLB, 9u);
  EXPECT_NEAR(r.gamma2, 1.0 - 5.0 / 90.0, 1e-12);
  EXPECT_TRUE(r.inROB);
  EXPECT_FALSE(r.inFRB);
}

TEST(Analysis, EstimateUndefinedForLongTasks) {
  const auto sys = homogeneous(3, 0.5, 4.0, Workload::deterministic(5.0), 2);
  EXPECT_FALSE(resource_calculators(sys.qos(), sys).mEstGreedy.has_value());
}

TEST(Analysis, SpeedRatios) {
  const SystemSpec sys(std::vector<UserSpec>(2, UserSpec{0.5, 10.0, Workload::deterministic(2.0), {}}),
                       {{3.0}, {1.0}});
  const auto r = resource_calculators(sys.qos(), sys);
  EXPECT_NEAR(r.gamma1, 1.0 - 0.2 / 2.0, 1e-12);
  EXPECT_NEAR(r.gamma1NonPreemptive, 1.0 - 0.2, 1e-12);
  EXPECT_NEAR(r.gamma2, 1.0 - 0.2 / 4.0, 1e-12);
}

TEST(Analysis, AppendixProfiles) {
  const auto ts = estimate_completion_profile(appendix(), SchedulerKind::ldfTsLlref, 5, 1);
  EXPECT_EQ(ts.perDecision.size(), 24u);
  EXPECT_EQ(ts.sampleCount, 1u);
  for (const auto& [d, p] : ts.perDecision) {
    EXPECT_EQ(p[d[0]], 1.0);
    EXPECT_EQ(p[d[1]], 1.0);
    EXPECT_EQ(p[d[2]], 1.0);
    EXPECT_EQ(p[d[3]], 0.0);
  }
  const auto greedy = estimate_completion_profile(appendix(), SchedulerKind::ldfGreedy, 5, 1);
  for (const auto& [d, p] : greedy.perDecision) {
    EXPECT_EQ(p[d[0]], 1.0);
    EXPECT_EQ(p[d[1]], 1.0);
    EXPECT_EQ(p[d[2]], 0.0);
    EXPECT_EQ(p[d[3]], 0.0);
  }
}

TEST(Analysis, SingleUserProfile) {
  const auto sys = homogeneous(1, 1.0, 3.0, Workload::deterministic(2.0), 1);
  const auto prof = estimate_completion_profile(sys, SchedulerKind::ldfGreedy, 3, 1);
  ASSERT_EQ(prof.perDecision.size(), 1u);
  EXPECT_EQ(prof.perDecision.begin()->second[0], 1.0);
}

TEST(Analysis, ProfileRefusesLargeSystems) {
  const auto sys = homogeneous(9, 0.5, 3.0, Workload::deterministic(1.0), 2);
  EXPECT_THROW(estimate_completion_profile(sys, SchedulerKind::ldfGreedy, 1, 1), DomainError);
}

TEST(Analysis, InnerBoundAppendix) {
  const auto ts = estimate_completion_profile(appendix(), SchedulerKind::ldfTsLlref, 1, 1);
  const auto greedy = estimate_completion_profile(appendix(), SchedulerKind::ldfGreedy, 1, 1);
  const std::vector<double> alpha(4, 1.0);
  const double g2 = 1.0 - 1.0 / 3.0;
  const std::vector<double> scaled(4, g2 * 0.75);
  EXPECT_TRUE(r_ib_member(scaled, ts, alpha).member);
  EXPECT_TRUE(brute_force_rib(scaled, ts, alpha));
  const std::vector<double> ones(4, 1.0);
  EXPECT_FALSE(r_ib_member(ones, greedy, alpha).member);
  EXPECT_FALSE(brute_force_rib(ones, greedy, alpha));
  const std::vector<double> zero(4, 0.0);
  EXPECT_TRUE(r_ib_member(zero, greedy, alpha).member);
}

TEST(Analysis, InnerBoundBoundaryFlag) {
  const auto ts = estimate_completion_profile(appendix(), SchedulerKind::ldfTsLlref, 1, 1);
  const std::vector<double> alpha(4, 1.0);
  // S = all users: 4 * 0.75 = 3 completions, exactly what TS/LLREF delivers
  const auto v = r_ib_member(appendix().qos(), ts, alpha);
  EXPECT_TRUE(v.member);
  EXPECT_TRUE(v.boundary);
}

TEST(Analysis, InnerBoundMatchesBruteForce) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int members = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const auto profile = random_profile(n, gen);
    std::vector<double> q(n), alpha(n);
    for (auto& v : q) v = 0.6 * u(gen);
    for (auto& a : alpha) a = 0.1 + u(gen);
    const bool expected = brute_force_rib(q, profile, alpha);
    members += expected;
    EXPECT_EQ(r_ib_member(q, profile, alpha).member, expected) << "trial " << trial;
  }
  EXPECT_GT(members, 0);
  EXPECT_LT(members, 300);
}

TEST(Analysis, InnerBoundErrors) {
  auto profile = estimate_completion_profile(appendix(), SchedulerKind::ldfGreedy, 1, 1);
  const std::vector<double> q(4, 0.1);
  EXPECT_THROW(r_ib_member(q, profile, std::vector<double>{1, 1, 0, 1}), DomainError);
  profile.perDecision.erase(profile.perDecision.begin());
  EXPECT_THROW(r_ib_member(q, profile, std::vector<double>(4, 1.0)), DomainError);
}
