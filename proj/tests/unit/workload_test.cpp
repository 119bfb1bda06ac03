#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numeric>

#include "srt/errors.hpp"
#include "srt/workload.hpp"

using namespace srt;

namespace {

// Adaptive Simpson on [a, b].
double simpson(const std::function<double(double)>& f, double a, double b, double eps, int depth) {
  const double c = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fc = f(c);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fhi, double fmid, double s, double e, int d) {
        const double mid = 0.5 * (lo + hi);
        const double l = 0.5 * (lo + mid), r = 0.5 * (mid + hi);
        const double fl = f(l), fr = f(r);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * fl + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * fr + fhi);
        if (d <= 0 || std::abs(left + right - s) <= 15.0 * e) return left + right + (left + right - s) / 15.0;
        return rec(lo, mid, flo, fmid, fl, left, e / 2, d - 1) + rec(mid, hi, fmid, fhi, fr, right, e / 2, d - 1);
      };
  return rec(a, b, fa, fb, fc, whole, eps, depth);
}

// Gamma quantile by integrating the density and bisecting; shares nothing
// with the library's incomplete-gamma route.
double gamma_quantile_oracle(double shape, double scale, double q) {
  const double logNorm = std::lgamma(shape) + shape * std::log(scale);
  auto pdf = [&](double x) { return x <= 0.0 ? 0.0 : std::exp((shape - 1.0) * std::log(x) - x / scale - logNorm); };
  auto cdf = [&](double x) { return simpson(pdf, 0.0, x, 1e-13, 50); };
  double lo = 0.0, hi = shape * scale * 10.0 + 50.0 * scale;
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Workload, ConstructorsRejectInvalidParameters) {
  EXPECT_THROW(Workload::deterministic(0.0), DomainError);
  EXPECT_THROW(Workload::deterministic(-1.0), DomainError);
  EXPECT_THROW(Workload::exponential(0.0), DomainError);
  EXPECT_THROW(Workload::gamma(0.0, 1.0), DomainError);
  EXPECT_THROW(Workload::gamma(1.0, -1.0), DomainError);
  EXPECT_THROW(Workload::two_point(2.0, 1.0, 0.5), DomainError);
  EXPECT_THROW(Workload::two_point(1.0, 2.0, 1.5), DomainError);
  EXPECT_THROW(Workload::empirical({}), DomainError);
  EXPECT_THROW(Workload::empirical({1.0, -2.0}), DomainError);
  EXPECT_THROW(Workload::chain({}), DomainError);
  EXPECT_THROW(Workload::deterministic(std::nan("")), DomainError);
}

TEST(Workload, MomentsMatchClosedForms) {
  EXPECT_DOUBLE_EQ(Workload::gamma(5.0, 1.0).mean(), 5.0);
  EXPECT_DOUBLE_EQ(Workload::gamma(100.0, 0.05).variance(), 0.25);
  EXPECT_DOUBLE_EQ(Workload::two_point(1.0, 9.0, 0.5).mean(), 5.0);
  EXPECT_DOUBLE_EQ(Workload::two_point(1.0, 9.0, 0.5).variance(), 16.0);
  EXPECT_DOUBLE_EQ(Workload::exponential(3.0).variance(), 9.0);
  const auto c = Workload::chain({Workload::exponential(1.0), Workload::deterministic(2.0)});
  EXPECT_DOUBLE_EQ(c.mean(), 3.0);
  EXPECT_DOUBLE_EQ(c.variance(), 1.0);
  EXPECT_EQ(c.part_count(), 2u);
  EXPECT_FALSE(c.is_deterministic());
  EXPECT_TRUE(Workload::chain({Workload::deterministic(1.0), Workload::deterministic(2.0)}).is_deterministic());
}

TEST(Workload, SampleMeansConverge) {
  Rng rng(derive_seed(42));
  for (const auto& w : {Workload::exponential(2.0), Workload::gamma(5.0, 1.0), Workload::gamma(0.5, 2.0),
                        Workload::two_point(1.0, 9.0, 0.5), Workload::empirical({1.0, 2.0, 6.0})}) {
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = sample(w, rng);
      ASSERT_GE(x, 0.0);
      sum += x;
      sq += x * x;
    }
    const double mean = sum / n;
    const double se = std::sqrt(w.variance() / n);
    EXPECT_NEAR(mean, w.mean(), 5.0 * se) << w.to_string();
    EXPECT_NEAR(sq / n - mean * mean, w.variance(), 0.05 * w.variance() + 1e-9) << w.to_string();
  }
}

TEST(Workload, SamplingIsReproducible) {
  Rng a(7), b(7);
  const auto w = Workload::chain({Workload::gamma(2.0, 1.0), Workload::exponential(1.0)});
  for (int i = 0; i < 100; ++i) {
    auto parts = sample_parts(w, a);
    EXPECT_EQ(parts.size(), 2u);
    EXPECT_EQ(parts[0] + parts[1], sample(w, b));
  }
}

TEST(Workload, GammaQuantileMatchesQuadratureOracle) {
  EXPECT_NEAR(quantile(Workload::gamma(5.0, 1.0), 0.5), 4.670908882, 1e-8);
  for (auto [shape, scale] : {std::pair{5.0, 1.0}, std::pair{100.0, 0.05}, std::pair{0.7, 2.0}}) {
    for (double q : {0.05, 0.3, 0.5, 0.9, 0.99}) {
      const double expect = gamma_quantile_oracle(shape, scale, q);
      EXPECT_NEAR(quantile(Workload::gamma(shape, scale), q), expect, 1e-7 * std::max(1.0, expect))
          << "gamma(" << shape << "," << scale << ") q=" << q;
    }
  }
}

TEST(Workload, QuantileClosedForms) {
  EXPECT_DOUBLE_EQ(quantile(Workload::deterministic(5.0), 0.3), 5.0);
  EXPECT_NEAR(quantile(Workload::exponential(2.0), 0.5), 2.0 * std::log(2.0), 1e-12);
  EXPECT_TRUE(std::isinf(quantile(Workload::exponential(2.0), 1.0)));
  EXPECT_TRUE(std::isinf(quantile(Workload::gamma(5.0, 1.0), 1.0)));
  EXPECT_DOUBLE_EQ(quantile(Workload::two_point(1.0, 9.0, 0.5), 0.5), 1.0);
  EXPECT_DOUBLE_EQ(quantile(Workload::two_point(1.0, 9.0, 0.5), 0.51), 9.0);
  EXPECT_DOUBLE_EQ(quantile(Workload::empirical({3.0, 1.0, 2.0, 4.0}), 0.5), 2.0);
  EXPECT_DOUBLE_EQ(quantile(Workload::empirical({3.0, 1.0, 2.0, 4.0}), 1.0), 4.0);
  EXPECT_THROW(quantile(Workload::deterministic(1.0), 0.0), DomainError);
  EXPECT_THROW(quantile(Workload::deterministic(1.0), 1.5), DomainError);
}

TEST(Workload, ChainQuantileIsEstimated) {
  const auto c = Workload::chain({Workload::exponential(1.0), Workload::exponential(1.0)});
  // sum of two unit exponentials is gamma(2, 1)
  EXPECT_NEAR(quantile(c, 0.5, {200000, 3}), quantile(Workload::gamma(2.0, 1.0), 0.5), 0.02);
  EXPECT_DOUBLE_EQ(quantile(Workload::chain({Workload::deterministic(1.0), Workload::deterministic(2.0)}), 0.9),
                   3.0);
}

TEST(Workload, CdfInvertsQuantile) {
  for (const auto& w : {Workload::gamma(5.0, 1.0), Workload::exponential(3.0)}) {
    for (double q : {0.1, 0.5, 0.95}) EXPECT_NEAR(cdf(w, quantile(w, q)), q, 1e-10);
  }
  EXPECT_THROW(cdf(Workload::chain({Workload::exponential(1.0)}), 1.0), DomainError);
}

TEST(Workload, NbueCheckSeparatesFamilies) {
  Rng rng(11);
  EXPECT_TRUE(nbue_check(Workload::exponential(5.0), 20.0, 20, 200000, rng).isNbue);
  EXPECT_TRUE(nbue_check(Workload::gamma(5.0, 1.0), 15.0, 20, 200000, rng).isNbue);
  EXPECT_TRUE(nbue_check(Workload::deterministic(5.0), 4.5, 10, 1000, rng).isNbue);
  const auto bad = nbue_check(Workload::two_point(1.0, 9.0, 0.5), 8.0, 16, 100000, rng);
  EXPECT_FALSE(bad.isNbue);
  EXPECT_GT(bad.maxViolation, 2.0);  // residual life just after t=1 is about 8 > 5
  // decreasing mean residual life: gamma with shape < 1 is not NBUE
  EXPECT_FALSE(nbue_check(Workload::gamma(0.3, 10.0), 10.0, 10, 200000, rng).isNbue);
}

TEST(Workload, NbueCheckSkipsSparseTail) {
  Rng rng(3);
  const auto r = nbue_check(Workload::deterministic(2.0), 4.0, 4, 100, rng);
  EXPECT_EQ(r.grid.size(), 1u);  // only t=1 has samples beyond it
  EXPECT_EQ(r.skipped.size(), 3u);
}

TEST(Workload, LiteralRoundTrip) {
  EXPECT_EQ(Workload::gamma(5.0, 1.0).to_string(), "gamma(5,1)");
  EXPECT_EQ(Workload::chain({Workload::deterministic(1.5), Workload::exponential(2.0)}).to_string(),
            "chain(det(1.5),exp(2))");
}
