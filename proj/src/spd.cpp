#include "matmean/spd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace matmean {

Matrix symmetrize(const Matrix& m) {
  return (m + m.transpose()) * 0.5;
}

double frobenius_norm(const Matrix& m) { return m.norm(); }

SpdMatrix SpdMatrix::validate(const Matrix& raw, double floor_scale) {
  if (raw.rows() != raw.cols()) {
    std::ostringstream msg;
    msg << "matrix is not square (" << raw.rows() << "x" << raw.cols() << ")";
    throw Error(ErrorCode::NotSquare, msg.str());
  }
  if (raw.rows() == 0) {
    throw Error(ErrorCode::InvalidArgument, "matrix dimension must be >= 1");
  }
  if (!raw.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "matrix has non-finite entries");
  }
  Matrix sym = symmetrize(raw);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "eigendecomposition failed");
  }
  const Vector& lambda = eig.eigenvalues();
  const double lo = lambda(0);
  const double hi = lambda(lambda.size() - 1);
  const double floor = floor_scale * hi * static_cast<double>(sym.rows());
  if (!(hi > 0.0) || !(lo > floor)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "matrix is not positive definite (smallest eigenvalue " << lo
        << ", floor " << floor << ")";
    throw Error(ErrorCode::NotPositiveDefinite, msg.str());
  }
  return SpdMatrix(std::move(sym), lambda, eig.eigenvectors());
}

SpdMatrix SpdMatrix::identity(int dim) {
  if (dim < 1) {
    throw Error(ErrorCode::InvalidArgument, "matrix dimension must be >= 1");
  }
  return SpdMatrix(Matrix::Identity(dim, dim), Vector::Ones(dim),
                   Matrix::Identity(dim, dim));
}

SpdMatrix SpdMatrix::scalar(double value) {
  Matrix m(1, 1);
  m(0, 0) = value;
  return validate(m);
}

Matrix SpdMatrix::map_spectrum(const std::function<double(double)>& g) const {
  Vector mapped = eigenvalues_.unaryExpr(g);
  return eigenvectors_ * mapped.asDiagonal() * eigenvectors_.transpose();
}

Matrix SpdMatrix::sqrt() const {
  return map_spectrum([](double x) { return std::sqrt(x); });
}

Matrix SpdMatrix::inverse_sqrt() const {
  return map_spectrum([](double x) { return 1.0 / std::sqrt(x); });
}

Matrix SpdMatrix::inverse() const {
  return map_spectrum([](double x) { return 1.0 / x; });
}

SpectralFunction SpectralFunction::identity() {
  return {[](double x) { return x; }, "identity"};
}

SpectralFunction SpectralFunction::sqrt() {
  return {[](double x) { return std::sqrt(x); }, "sqrt"};
}

SpectralFunction SpectralFunction::square() {
  return {[](double x) { return x * x; }, "square"};
}

SpectralFunction SpectralFunction::inverse() {
  return {[](double x) { return 1.0 / x; }, "inverse"};
}

SpectralFunction SpectralFunction::power(double exponent) {
  std::ostringstream label;
  label << "power(" << exponent << ")";
  return {[exponent](double x) { return std::pow(x, exponent); }, label.str()};
}

void require_same_dim(const SpdMatrix& a, const SpdMatrix& b) {
  if (a.dim() != b.dim()) {
    std::ostringstream msg;
    msg << "dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
}

SpdMatrix apply_spectral(const SpdMatrix& a, const SpectralFunction& g) {
  const Vector& lambda = a.eigenvalues();
  Vector mapped(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    mapped(i) = g(lambda(i));
    if (!std::isfinite(mapped(i)) || !(mapped(i) > 0.0)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "spectral function '" << g.label << "' gave " << mapped(i)
          << " at eigenvalue " << lambda(i);
      throw Error(ErrorCode::NonPositiveResult, msg.str());
    }
  }
  const Matrix& q = a.eigenvectors();
  return SpdMatrix::validate(q * mapped.asDiagonal() * q.transpose());
}

SpdMatrix congruence(const SpdMatrix& a, const Matrix& c) {
  if (c.rows() != c.cols() || c.rows() != a.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "congruence factor must be square with the matrix dimension");
  }
  Eigen::JacobiSVD<Matrix> svd(c);
  const Vector& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smax > 0.0) || smin <= smax * 1e-14) {
    throw Error(ErrorCode::SingularCongruence,
                "congruence factor is singular or numerically singular");
  }
  return SpdMatrix::validate(c * a.matrix() * c.transpose());
}

MetricValue r_metric(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a, b);
  const Matrix w = a.inverse_sqrt();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(w * b.matrix() * w),
                                            Eigen::EigenvaluesOnly);
  const Vector& mu = eig.eigenvalues();
  const double r = std::max(mu(mu.size() - 1), 1.0 / mu(0));
  return {std::max(r, 1.0), MetricKind::RMultiplicative};
}

MetricValue euclid_dist(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a, b);
  return {(a.matrix() - b.matrix()).norm(), MetricKind::Euclid};
}

MetricValue euclid_norm(const SpdMatrix& a) {
  return {a.matrix().norm(), MetricKind::Euclid};
}

MetricValue pullback_dist(const SpdMatrix& a, const SpdMatrix& b,
                          const SpectralFunction& f) {
  require_same_dim(a, b);
  const SpdMatrix fa = apply_spectral(a, f);
  const SpdMatrix fb = apply_spectral(b, f);
  return {(fa.matrix() - fb.matrix()).norm(), MetricKind::Pullback};
}

double loewner_margin(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a, b);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(b.matrix() - a.matrix()),
                                            Eigen::EigenvaluesOnly);
  const double scale = std::max(a.matrix().norm(), b.matrix().norm());
  return eig.eigenvalues()(0) / scale;
}

bool loewner_leq(const SpdMatrix& a, const SpdMatrix& b, double rel_tol) {
  return loewner_margin(a, b) >= -rel_tol;
}

}  // namespace matmean
