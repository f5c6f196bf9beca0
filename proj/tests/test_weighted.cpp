#include <doctest.h>

#include <cmath>

#include "matmean/random.hpp"
#include "matmean/weighted.hpp"
#include "oracle.hpp"

using namespace matmean;

namespace {

SpdMatrix scaled_identity(int dim, double c) {
  return SpdMatrix::validate(c * Matrix::Identity(dim, dim));
}

double rel(const Matrix& a, const Matrix& b) { return oracle::rel_diff(a, b); }

}  // namespace

TEST_CASE("weighted_mean examples") {
  const auto res = weighted_mean(MeanKernel::arithmetic(), 0.25,
                                 SpdMatrix::identity(2), scaled_identity(2, 5.0));
  CHECK((res.value.matrix() - 2.0 * Matrix::Identity(2, 2)).norm() < 1e-15);
  REQUIRE(res.trace.size() == 3);
  CHECK(res.trace.back().step == 2);
  CHECK(res.trace.back().r_gap == 0.0);

  CHECK(weighted_mean_value(MeanKernel::geometric(), 1.0 / 3.0,
                            SpdMatrix::scalar(1.0), SpdMatrix::scalar(8.0))(0, 0) ==
        doctest::Approx(std::cbrt(8.0)).epsilon(1e-11));
  CHECK(weighted_mean_value(MeanKernel::harmonic(), 1.0 / 3.0,
                            SpdMatrix::scalar(1.0),
                            SpdMatrix::scalar(1.0 / 7.0))(0, 0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-11));
}

TEST_CASE("endpoints and midpoint are exact") {
  SpdSampler sampler(21);
  const SpdMatrix a = sampler.spd(3);
  const SpdMatrix b = sampler.spd(3);
  for (const auto& kernel :
       {MeanKernel::arithmetic(), MeanKernel::harmonic(), MeanKernel::geometric(),
        MeanKernel::logarithmic(), MeanKernel::k_family(1.0)}) {
    CAPTURE(kernel.label());
    CHECK(weighted_mean(kernel, 0.0, a, b).value.matrix() == a.matrix());
    CHECK(weighted_mean(kernel, 1.0, a, b).value.matrix() == b.matrix());
    const auto half = weighted_mean(kernel, 0.5, a, b);
    CHECK(half.value.matrix() == mean2(kernel, a, b).matrix());
    CHECK(half.trace.size() == 2);
  }
}

TEST_CASE("f_t_eval examples") {
  CHECK(f_t_eval(MeanKernel::geometric(), 0.5, 4.0) ==
        doctest::Approx(2.0).epsilon(1e-15));
  for (const auto& kernel : {MeanKernel::arithmetic(), MeanKernel::harmonic(),
                             MeanKernel::logarithmic()}) {
    CHECK(f_t_eval(kernel, 0.0, 7.0) == 1.0);
    CHECK(f_t_eval(kernel, 1.0, 7.0) == 7.0);
    CHECK(f_t_eval(kernel, 0.3, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(f_t_eval(MeanKernel::arithmetic(), 0.75, 5.0) ==
        doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS_AS(f_t_eval(MeanKernel::arithmetic(), 0.5, -1.0), Error);
}

TEST_CASE("argument and config checks") {
  const SpdMatrix a = SpdMatrix::identity(2);
  CHECK_THROWS_AS(weighted_mean(MeanKernel::arithmetic(), 1.5, a, a), Error);
  CHECK_THROWS_AS(weighted_mean(MeanKernel::arithmetic(), -0.1, a, a), Error);
  CHECK_THROWS_AS(weighted_mean(MeanKernel::arithmetic(), 0.3, a,
                                SpdMatrix::identity(3)),
                  Error);
  WeightedMeanConfig bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(weighted_mean(MeanKernel::arithmetic(), 0.3, a, a, bad), Error);
  bad = {};
  bad.max_depth = 0;
  CHECK_THROWS_AS(weighted_mean(MeanKernel::arithmetic(), 0.3, a, a, bad), Error);
}

TEST_CASE("max depth exceeded keeps the trace") {
  WeightedMeanConfig cfg;
  cfg.max_depth = 5;
  try {
    weighted_mean(MeanKernel::geometric(), 1.0 / 3.0, SpdMatrix::scalar(1.0),
                  SpdMatrix::scalar(8.0), cfg);
    FAIL("expected MaxDepthExceeded");
  } catch (const MaxDepthExceeded& e) {
    CHECK(e.code() == ErrorCode::MaxDepthExceeded);
    CHECK(e.trace().size() == 6);
    CHECK(e.trace().back().r_gap > cfg.tol);
  }
}

TEST_CASE("dyadic snapping") {
  CHECK(snap_to_dyadic(0.25 + 1e-17, 64) == 0.25);
  CHECK(snap_to_dyadic(0.375, 64) == 0.375);
  CHECK(snap_to_dyadic(1.0 / 3.0, 64) == 1.0 / 3.0);
  CHECK(snap_to_dyadic(0.1, 3) == 0.1);
  CHECK(snap_to_dyadic(0.5 - 1e-16, 64) == 0.5);
}

TEST_CASE("trace brackets t and contracts geometrically") {
  SpdSampler sampler(22);
  for (int trial = 0; trial < 20; ++trial) {
    const SpdMatrix a = sampler.spd(3, 1.5);
    const SpdMatrix b = sampler.spd(3, 1.5);
    const double t = snap_to_dyadic(0.05 + 0.045 * trial, 64);
    for (const auto& kernel : {MeanKernel::arithmetic(), MeanKernel::geometric(),
                               MeanKernel::harmonic()}) {
      const auto res = weighted_mean(kernel, t, a, b);
      const double g0 = res.trace.front().r_gap;
      for (const auto& s : res.trace) {
        CHECK(s.a <= t);
        CHECK(t <= s.b);
        if (s.r_gap > 0.0) CHECK(s.b - s.a == std::ldexp(1.0, -s.step));
        CHECK(s.r_gap <= std::ldexp(g0, -s.step) * (1.0 + 1e-9) + 1e-15);
      }
      CHECK(res.trace.back().r_gap <= 1e-12);
    }
  }
}

TEST_CASE("closed-form agreement") {
  SpdSampler sampler(23);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 1 + trial % 4;
    const SpdMatrix a = sampler.spd(dim);
    const SpdMatrix b = sampler.spd(dim);
    const double t = std::uniform_real_distribution<double>(0.0, 1.0)(sampler.engine());
    const Matrix& am = a.matrix();
    const Matrix& bm = b.matrix();
    CHECK(rel(weighted_mean_value(MeanKernel::arithmetic(), t, a, b).matrix(),
              oracle::weighted_arithmetic(am, bm, t)) < 1e-8);
    CHECK(rel(weighted_mean_value(MeanKernel::harmonic(), t, a, b).matrix(),
              oracle::weighted_harmonic(am, bm, t)) < 1e-8);
    CHECK(rel(weighted_mean_value(MeanKernel::geometric(), t, a, b).matrix(),
              oracle::weighted_geometric(am, bm, t)) < 1e-8);
  }
}

TEST_CASE("monotone in arguments and in the kernel") {
  SpdSampler sampler(24);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 2 + trial % 2;
    const SpdMatrix a = sampler.spd(dim);
    const SpdMatrix b = sampler.spd(dim);
    const Matrix p = sampler.invertible(dim);
    const Matrix q = sampler.invertible(dim);
    const SpdMatrix a_up = SpdMatrix::validate(a.matrix() + p * p.transpose());
    const SpdMatrix b_up = SpdMatrix::validate(b.matrix() + q * q.transpose());
    const double t = 0.1 + 0.04 * trial;
    for (const auto& kernel : {MeanKernel::arithmetic(), MeanKernel::geometric(),
                               MeanKernel::harmonic(), MeanKernel::logarithmic()}) {
      CAPTURE(kernel.label());
      CHECK(loewner_leq(weighted_mean_value(kernel, t, a, b),
                        weighted_mean_value(kernel, t, a_up, b_up)));
    }
    const SpdMatrix h = weighted_mean_value(MeanKernel::harmonic(), t, a, b);
    const SpdMatrix g = weighted_mean_value(MeanKernel::geometric(), t, a, b);
    const SpdMatrix ar = weighted_mean_value(MeanKernel::arithmetic(), t, a, b);
    CHECK(loewner_leq(h, ar));
    CHECK(loewner_leq(g, ar));
  }
}

TEST_CASE("sandwich between weighted harmonic and arithmetic") {
  SpdSampler sampler(25);
  for (int trial = 0; trial < 20; ++trial) {
    const SpdMatrix a = sampler.spd(3);
    const SpdMatrix b = sampler.spd(3);
    const double t = 0.03 + 0.047 * trial;
    const SpdMatrix lo = SpdMatrix::validate(
        oracle::weighted_harmonic(a.matrix(), b.matrix(), t));
    const SpdMatrix hi = SpdMatrix::validate(
        oracle::weighted_arithmetic(a.matrix(), b.matrix(), t));
    for (const auto& kernel : {MeanKernel::geometric(), MeanKernel::logarithmic()}) {
      const SpdMatrix m = weighted_mean_value(kernel, t, a, b);
      CHECK(loewner_leq(lo, m));
      CHECK(loewner_leq(m, hi));
    }
  }
}

TEST_CASE("continuity in t") {
  SpdSampler sampler(26);
  for (int k : {6, 10}) {
    for (int trial = 0; trial < 10; ++trial) {
      const SpdMatrix a = sampler.spd(3);
      const SpdMatrix b = sampler.spd(3);
      const SpdMatrix bound = SpdMatrix::validate(a.matrix() + b.matrix());
      // Both weights inside one dyadic cell of depth k - 1.
      const double cell = std::ldexp(1.0, -(k - 1));
      const double base = cell * ((3 + 7 * trial) % ((1 << (k - 1)) - 1));
      const double t1 = base + 0.2 * cell;
      const double t2 = base + 0.9 * cell;
      const double r = r_metric(a, b).value;
      for (const auto& kernel : {MeanKernel::arithmetic(), MeanKernel::geometric(),
                                 MeanKernel::harmonic()}) {
        const Matrix m1 = weighted_mean_value(kernel, t1, a, b).matrix();
        const Matrix m2 = weighted_mean_value(kernel, t2, a, b).matrix();
        CHECK((m1 - m2).norm() <=
              std::ldexp(1.0, 2 - k) * (r - 1.0) * bound.matrix().norm());
      }
    }
  }
}

TEST_CASE("congruence invariance of the weighted mean") {
  SpdSampler sampler(27);
  for (int trial = 0; trial < 15; ++trial) {
    const SpdMatrix a = sampler.spd(3);
    const SpdMatrix b = sampler.spd(3);
    const Matrix c = sampler.invertible(3);
    const double t = 0.07 + 0.06 * trial;
    for (const auto& kernel : {MeanKernel::geometric(), MeanKernel::logarithmic(),
                               MeanKernel::k_family(1.0)}) {
      const Matrix lhs =
          weighted_mean_value(kernel, t, congruence(a, c), congruence(b, c))
              .matrix();
      const Matrix rhs =
          c * weighted_mean_value(kernel, t, a, b).matrix() * c.transpose();
      if (kernel.is_kubo_ando()) {
        CHECK(rel(lhs, rhs) < 1e-8);
      } else {
        // Only unitary congruence is guaranteed outside the Kubo-Ando class.
        Eigen::HouseholderQR<Matrix> qr(c);
        const Matrix u = qr.householderQ();
        const Matrix l2 =
            weighted_mean_value(kernel, t, congruence(a, u), congruence(b, u))
                .matrix();
        const Matrix r2 =
            u * weighted_mean_value(kernel, t, a, b).matrix() * u.transpose();
        CHECK(rel(l2, r2) < 1e-8);
      }
    }
  }
}
