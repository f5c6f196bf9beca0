#include "matmean/random.hpp"

#include <cmath>

namespace matmean {

Matrix SpdSampler::gaussian(int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = normal(rng_);
  }
  return m;
}

Matrix SpdSampler::orthogonal(int dim) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(dim, dim));
  Matrix q = qr.householderQ();
  // Sign fix so the distribution does not depend on the QR convention.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

SpdMatrix SpdSampler::spd(int dim, double log_spread) {
  std::uniform_real_distribution<double> uniform(-log_spread, log_spread);
  Vector lambda(dim);
  for (int i = 0; i < dim; ++i) lambda(i) = std::exp(uniform(rng_));
  const Matrix q = orthogonal(dim);
  return SpdMatrix::validate(q * lambda.asDiagonal() * q.transpose());
}

Matrix SpdSampler::invertible(int dim) {
  for (;;) {
    Matrix c = gaussian(dim, dim);
    Eigen::JacobiSVD<Matrix> svd(c);
    const Vector& s = svd.singularValues();
    if (s(dim - 1) > s(0) * 1e-3) return c / s(0);
  }
}

namespace {

// Symmetric S with spectral radius 1, kept as its eigendecomposition.
struct Direction {
  Vector values;
  Matrix vectors;
};

SpdMatrix displace(const Matrix& half, const Direction& dir, double radius) {
  const Vector mapped = (dir.values * radius).array().exp();
  const Matrix e = dir.vectors * mapped.asDiagonal() * dir.vectors.transpose();
  return SpdMatrix::validate(half * e * half);
}

Direction unit_direction(const Matrix& g) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(g));
  const double rho = eig.eigenvalues().cwiseAbs().maxCoeff();
  return {eig.eigenvalues() / rho, eig.eigenvectors()};
}

}  // namespace

SpdMatrix SpdSampler::near(const SpdMatrix& base, double radius) {
  const Direction dir = unit_direction(gaussian(base.dim(), base.dim()));
  return displace(base.sqrt(), dir, radius);
}

std::vector<SpdMatrix> SpdSampler::cluster(int n, int dim, double max_r) {
  const SpdMatrix base = spd(dim);
  // Each point sits within sqrt(max_r) of the base, so pairs stay within
  // max_r by the multiplicative triangle inequality.
  const double radius = 0.5 * std::log(max_r);
  std::uniform_real_distribution<double> shrink(0.5, 1.0);
  std::vector<SpdMatrix> xs;
  xs.reserve(n);
  for (int i = 0; i < n; ++i) xs.push_back(near(base, radius * shrink(rng_)));
  return xs;
}

std::vector<std::vector<SpdMatrix>> SpdSampler::cluster_path(
    int n, int dim, std::span<const double> bounds) {
  const SpdMatrix base = spd(dim);
  const Matrix half = base.sqrt();
  std::uniform_real_distribution<double> shrink(0.5, 1.0);
  std::vector<Direction> dirs;
  std::vector<double> lengths;
  for (int i = 0; i < n; ++i) {
    dirs.push_back(unit_direction(gaussian(dim, dim)));
    lengths.push_back(shrink(rng_));
  }
  std::vector<std::vector<SpdMatrix>> out;
  for (double bound : bounds) {
    const double radius = 0.5 * std::log(bound);
    std::vector<SpdMatrix> xs;
    for (int i = 0; i < n; ++i) xs.push_back(displace(half, dirs[i], radius * lengths[i]));
    out.push_back(std::move(xs));
  }
  return out;
}

}  // namespace matmean
