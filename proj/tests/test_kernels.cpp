#include <doctest.h>

#include <cmath>
#include <vector>

#include "matmean/kernels.hpp"
#include "matmean/random.hpp"
#include "oracle.hpp"

using namespace matmean;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

SpdMatrix scaled_identity(int dim, double c) {
  return SpdMatrix::validate(c * Matrix::Identity(dim, dim));
}

std::vector<MeanKernel> kubo_ando_catalog() {
  return {MeanKernel::arithmetic(), MeanKernel::harmonic(),
          MeanKernel::geometric(), MeanKernel::logarithmic()};
}

std::vector<MeanKernel> full_catalog() {
  auto all = kubo_ando_catalog();
  all.push_back(MeanKernel::k_family(1.0));
  all.push_back(MeanKernel::k_family(0.5));
  all.push_back(MeanKernel::square());
  return all;
}

double rel(const Matrix& a, const Matrix& b) { return oracle::rel_diff(a, b); }

}  // namespace

TEST_CASE("kernel names parse") {
  CHECK(MeanKernel::parse("arithmetic").kind() == KernelKind::Arithmetic);
  CHECK(MeanKernel::parse("harmonic").kind() == KernelKind::Harmonic);
  CHECK(MeanKernel::parse("geometric").kind() == KernelKind::Geometric);
  CHECK(MeanKernel::parse("logarithmic").kind() == KernelKind::Logarithmic);
  CHECK(MeanKernel::parse("square").kind() == KernelKind::Square);
  const MeanKernel k = MeanKernel::parse("kfamily:0.75");
  CHECK(k.kind() == KernelKind::KFamily);
  CHECK(k.k() == 0.75);
  CHECK(k.label() == "kfamily:0.75");
  CHECK_THROWS_AS(MeanKernel::parse("kfamily:0"), Error);
  CHECK_THROWS_AS(MeanKernel::parse("kfamily:2.5"), Error);
  CHECK_THROWS_AS(MeanKernel::parse("kfamily:abc"), Error);
  CHECK_THROWS_AS(MeanKernel::parse("median"), Error);
}

TEST_CASE("generator kernels must be normalized") {
  const SpectralFunction bad{[](double x) { return 2.0 * x; }, "2x"};
  CHECK_THROWS_AS(MeanKernel::from_generator(bad, "bad"), Error);
  const SpectralFunction heinz{[](double x) { return 0.5 * (std::pow(x, 0.25) +
                                                            std::pow(x, 0.75)); },
                               "heinz"};
  const MeanKernel h = MeanKernel::from_generator(heinz, "heinz");
  CHECK(h.is_kubo_ando());
  const SpdMatrix a = scaled_identity(2, 1.0);
  const SpdMatrix b = scaled_identity(2, 16.0);
  // Scalar: (16^0.25 + 16^0.75)/2 = (2 + 8)/2.
  CHECK(mean2(h, a, b)(0, 0) == doctest::Approx(5.0));
}

TEST_CASE("mean2 examples") {
  const SpdMatrix a = SpdMatrix::validate(diag2(1, 4));
  const SpdMatrix b = SpdMatrix::validate(diag2(4, 1));
  CHECK((mean2(MeanKernel::geometric(), a, b).matrix() - diag2(2, 2)).norm() <
        1e-14);

  const SpdMatrix id = SpdMatrix::identity(2);
  const SpdMatrix three = scaled_identity(2, 3.0);
  CHECK((mean2(MeanKernel::harmonic(), id, three).matrix() -
         1.5 * Matrix::Identity(2, 2))
            .norm() < 1e-14);

  SpdSampler sampler(3);
  const SpdMatrix x = sampler.spd(3);
  const SpdMatrix y = sampler.spd(3);
  CHECK(rel(mean2(MeanKernel::arithmetic(), x, y).matrix(),
            0.5 * (x.matrix() + y.matrix())) < 1e-15);

  const double e2 = std::exp(2.0);
  const SpdMatrix ee = scaled_identity(2, e2);
  CHECK(mean2(MeanKernel::logarithmic(), id, ee)(0, 0) ==
        doctest::Approx((e2 - 1.0) / 2.0).epsilon(1e-14));
  CHECK_THROWS_AS(mean2(MeanKernel::geometric(), id, SpdMatrix::identity(3)),
                  Error);
}

TEST_CASE("logarithmic generator near 1 uses the series branch") {
  CHECK(logarithmic_generator(1.0) == 1.0);
  for (double h : {1e-7, -1e-7, 5e-7, 2e-6, -3e-6}) {
    const double x = 1.0 + h;
    // log1p keeps the direct quotient accurate this close to 1.
    const double direct = h / std::log1p(h);
    CHECK(logarithmic_generator(x) == doctest::Approx(direct).epsilon(1e-13));
  }
}

TEST_CASE("k_family_mean examples") {
  SpdSampler sampler(4);
  const SpdMatrix x = sampler.spd(3);
  const SpdMatrix y = sampler.spd(3);
  CHECK(rel(k_family_mean(2.0, 0.5, x, y).matrix(),
            0.5 * (x.matrix() + y.matrix())) < 1e-10);
  for (double t : {0.0, 0.2, 0.9, 1.0}) {
    CHECK(rel(k_family_mean(2.0, t, x, y).matrix(),
              (1.0 - t) * x.matrix() + t * y.matrix()) < 1e-10);
  }

  const SpdMatrix id = SpdMatrix::identity(2);
  const SpdMatrix three = scaled_identity(2, 3.0);
  CHECK(k_family_mean(0.0, 0.5, id, three)(0, 0) ==
        doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  // (1+9)/2 - (1/2)(1/4)(-2)^2 = 4.5
  CHECK(k_family_mean(1.0, 0.5, id, three)(0, 0) ==
        doctest::Approx(std::sqrt(4.5)).epsilon(1e-14));
  CHECK_THROWS_AS(k_family_mean(2.5, 0.5, id, three), Error);
  CHECK_THROWS_AS(k_family_mean(1.0, 1.5, id, three), Error);
}

TEST_CASE("pullback_nmean examples") {
  const std::vector<SpdMatrix> two{SpdMatrix::identity(2),
                                   scaled_identity(2, 3.0)};
  CHECK((pullback_nmean(PullbackMean::arithmetic(), two).matrix() -
         2.0 * Matrix::Identity(2, 2))
            .norm() < 1e-15);

  const std::vector<SpdMatrix> scalars{SpdMatrix::scalar(1), SpdMatrix::scalar(2),
                                       SpdMatrix::scalar(4)};
  CHECK(pullback_nmean(PullbackMean::harmonic(), scalars)(0, 0) ==
        doctest::Approx(12.0 / 7.0).epsilon(1e-15));

  const std::vector<SpdMatrix> sq{SpdMatrix::identity(2),
                                  scaled_identity(2, 2.0)};
  const std::vector<double> w{1.0 / 3.0, 2.0 / 3.0};
  CHECK(pullback_nmean(PullbackMean::square(), w, sq)(1, 1) ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

  const std::vector<double> bad{0.5, 0.6};
  CHECK_THROWS_AS(pullback_nmean(PullbackMean::square(), bad, sq), Error);
  const std::vector<double> negative{1.5, -0.5};
  CHECK_THROWS_AS(pullback_nmean(PullbackMean::square(), negative, sq), Error);
}

TEST_CASE("pullback isometries invert each other") {
  for (const auto& p : {PullbackMean::arithmetic(), PullbackMean::square(),
                        PullbackMean::harmonic()}) {
    for (double x : {1e-3, 0.2, 1.0, 3.7, 250.0}) {
      CHECK(p.inverse(p.forward(x)) == doctest::Approx(x).epsilon(1e-12));
    }
  }
}

TEST_CASE("catalog kernels are symmetric and homogeneous") {
  SpdSampler sampler(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 1 + trial % 4;
    const SpdMatrix a = sampler.spd(dim);
    const SpdMatrix b = sampler.spd(dim);
    const double c = 0.3 + trial * 0.2;
    const SpdMatrix ca = SpdMatrix::validate(c * a.matrix());
    const SpdMatrix cb = SpdMatrix::validate(c * b.matrix());
    for (const auto& kernel : full_catalog()) {
      CAPTURE(kernel.label());
      const Matrix m = mean2(kernel, a, b).matrix();
      CHECK(rel(m, mean2(kernel, b, a).matrix()) < 1e-10);
      CHECK(rel(mean2(kernel, ca, cb).matrix(), c * m) < 1e-10);
    }
  }
}

TEST_CASE("geometric mean paths agree") {
  SpdSampler sampler(6);
  for (int trial = 0; trial < 30; ++trial) {
    const SpdMatrix a = sampler.spd(3, 1.5);
    const SpdMatrix b = sampler.spd(3, 1.5);
    const Matrix dedicated = mean2(MeanKernel::geometric(), a, b).matrix();
    const Matrix generator =
        kubo_ando_mean(SpectralFunction::power(0.5), b, a).matrix();
    CHECK(rel(dedicated, generator) < 1e-9);
    CHECK(rel(dedicated,
              oracle::weighted_geometric(a.matrix(), b.matrix(), 0.5)) < 1e-9);
  }
}

TEST_CASE("harmonic and arithmetic sandwich every Kubo-Ando kernel") {
  SpdSampler sampler(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 2 + trial % 3;
    const SpdMatrix a = sampler.spd(dim);
    const SpdMatrix b = sampler.spd(dim);
    const SpdMatrix h = mean2(MeanKernel::harmonic(), a, b);
    const SpdMatrix ar = mean2(MeanKernel::arithmetic(), a, b);
    for (const auto& kernel : kubo_ando_catalog()) {
      CAPTURE(kernel.label());
      const SpdMatrix m = mean2(kernel, a, b);
      CHECK(loewner_leq(h, m));
      CHECK(loewner_leq(m, ar));
    }
  }
}

TEST_CASE("betweenness and monotonicity") {
  SpdSampler sampler(8);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 2 + trial % 3;
    const SpdMatrix a = sampler.spd(dim);
    const Matrix p = sampler.invertible(dim);
    const SpdMatrix b = SpdMatrix::validate(a.matrix() + p.transpose() * p);
    const Matrix q = sampler.invertible(dim);
    const SpdMatrix c = sampler.spd(dim);
    const SpdMatrix c_up = SpdMatrix::validate(c.matrix() + q.transpose() * q);
    for (const auto& kernel : kubo_ando_catalog()) {
      CAPTURE(kernel.label());
      const SpdMatrix m = mean2(kernel, a, b);
      CHECK(loewner_leq(a, m));
      CHECK(loewner_leq(m, b));
      CHECK(loewner_leq(mean2(kernel, a, c), mean2(kernel, b, c_up)));
    }
  }
}

TEST_CASE("congruence invariance") {
  SpdSampler sampler(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 2 + trial % 3;
    const SpdMatrix a = sampler.spd(dim);
    const SpdMatrix b = sampler.spd(dim);
    const Matrix c = sampler.invertible(dim);
    for (const auto& kernel : kubo_ando_catalog()) {
      CAPTURE(kernel.label());
      const Matrix lhs =
          mean2(kernel, congruence(a, c), congruence(b, c)).matrix();
      const Matrix rhs = c * mean2(kernel, a, b).matrix() * c.transpose();
      CHECK(rel(lhs, rhs) < 1e-9);
    }
  }
}

TEST_CASE("k-family is ordered in k and bounds the trace") {
  SpdSampler sampler(10);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 2 + trial % 3;
    const SpdMatrix a = sampler.spd(dim);
    const SpdMatrix b = sampler.spd(dim);
    for (double t : {0.25, 0.5, 0.8}) {
      const SpdMatrix k2 = k_family_mean(2.0, t, a, b);
      const SpdMatrix k1 = k_family_mean(1.0, t, a, b);
      const SpdMatrix k0 = k_family_mean(0.0, t, a, b);
      CHECK(loewner_leq(k2, k1));
      CHECK(loewner_leq(k1, k0));
    }
    const Matrix& am = a.matrix();
    const Matrix& bm = b.matrix();
    for (const auto& kernel : full_catalog()) {
      CAPTURE(kernel.label());
      const double k = kernel.k_bound();
      const double lhs = mean2(kernel, a, b).matrix().squaredNorm();
      const double rhs = 0.5 * am.squaredNorm() + 0.5 * bm.squaredNorm() -
                         (k / 8.0) * (am - bm).squaredNorm();
      CHECK(lhs <= rhs * (1.0 + 1e-9));
    }
  }
}
