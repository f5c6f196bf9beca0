#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "matmean/error.hpp"

namespace matmean {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Smallest eigenvalue must exceed kDefaultFloorScale * lambda_max * dim.
inline constexpr double kDefaultFloorScale = 1e-12;
/// Relative tolerance used by Loewner comparisons unless a caller overrides it.
inline constexpr double kDefaultLoewnerTol = 1e-9;

/// Real symmetric positive definite matrix. Construction symmetrizes the raw
/// entries, checks the positivity floor and keeps the eigendecomposition so
/// that functional calculus on the value needs no further factorization.
class SpdMatrix {
 public:
  static SpdMatrix validate(const Matrix& raw,
                            double floor_scale = kDefaultFloorScale);
  static SpdMatrix identity(int dim);
  static SpdMatrix scalar(double value);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

  /// Ascending eigenvalues and matching orthonormal eigenvectors (columns).
  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }
  double min_eigenvalue() const { return eigenvalues_(0); }
  double max_eigenvalue() const { return eigenvalues_(eigenvalues_.size() - 1); }

  /// Q diag(g(lambda)) Q^T without validation of the result.
  Matrix map_spectrum(const std::function<double(double)>& g) const;
  Matrix sqrt() const;
  Matrix inverse_sqrt() const;
  Matrix inverse() const;

  bool operator==(const SpdMatrix& other) const {
    return entries_ == other.entries_;
  }

 private:
  SpdMatrix(Matrix entries, Vector eigenvalues, Matrix eigenvectors)
      : entries_(std::move(entries)),
        eigenvalues_(std::move(eigenvalues)),
        eigenvectors_(std::move(eigenvectors)) {}

  Matrix entries_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
};

/// Scalar map on (0, inf) applied to matrices through their spectrum.
struct SpectralFunction {
  std::function<double(double)> evaluator;
  std::string label;

  double operator()(double x) const { return evaluator(x); }

  static SpectralFunction identity();
  static SpectralFunction sqrt();
  static SpectralFunction square();
  static SpectralFunction inverse();
  static SpectralFunction power(double exponent);
};

enum class MetricKind { Euclid, Pullback, RMultiplicative };

struct MetricValue {
  double value;
  MetricKind kind;
};

Matrix symmetrize(const Matrix& m);
double frobenius_norm(const Matrix& m);

SpdMatrix apply_spectral(const SpdMatrix& a, const SpectralFunction& g);

/// C A C^T for invertible C.
SpdMatrix congruence(const SpdMatrix& a, const Matrix& c);

/// max{rho(A^-1 B), rho(B^-1 A)}, read off the spectrum of A^-1/2 B A^-1/2.
MetricValue r_metric(const SpdMatrix& a, const SpdMatrix& b);

MetricValue euclid_dist(const SpdMatrix& a, const SpdMatrix& b);
/// Distance from the zero matrix: sqrt(trace(A^2)).
MetricValue euclid_norm(const SpdMatrix& a);
MetricValue pullback_dist(const SpdMatrix& a, const SpdMatrix& b,
                          const SpectralFunction& f);

bool loewner_leq(const SpdMatrix& a, const SpdMatrix& b,
                 double rel_tol = kDefaultLoewnerTol);

/// Smallest eigenvalue of (B - A) divided by max(|A|_F, |B|_F). Negative
/// values mean A <= B fails by that relative margin.
double loewner_margin(const SpdMatrix& a, const SpdMatrix& b);

void require_same_dim(const SpdMatrix& a, const SpdMatrix& b);

}  // namespace matmean
