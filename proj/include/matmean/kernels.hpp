#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "matmean/spd.hpp"

namespace matmean {

enum class KernelKind {
  Arithmetic,
  Harmonic,
  Geometric,
  Logarithmic,
  Generator,
  KFamily,
  Square,
};

/// Flat-metric isometry f with its inverse. The centroid f^-1(sum w_i f(X_i))
/// is the mean this pair induces.
struct PullbackMean {
  SpectralFunction forward;
  SpectralFunction inverse;
  std::string label;

  static PullbackMean arithmetic();  // (x, x)
  static PullbackMean square();      // (x^2, sqrt x)
  static PullbackMean harmonic();    // (x^-1, x^-1)
};

/// Immutable descriptor of a symmetric two-variable mean.
class MeanKernel {
 public:
  static MeanKernel arithmetic();
  static MeanKernel harmonic();
  static MeanKernel geometric();
  static MeanKernel logarithmic();
  /// Square mean [(A^2 + B^2)/2]^1/2, the k = 0 end of the k-family.
  static MeanKernel square();
  static MeanKernel k_family(double k);
  /// Kubo-Ando mean from a normalized generator. Operator monotonicity of f
  /// is taken on trust; only f(1) = 1 is checked.
  static MeanKernel from_generator(SpectralFunction f, std::string label);

  /// Accepts "arithmetic", "harmonic", "geometric", "logarithmic",
  /// "kfamily:<k>" and "square".
  static MeanKernel parse(std::string_view name);

  KernelKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  double k() const { return k_; }

  /// True for means of the form A^1/2 f(A^-1/2 B A^-1/2) A^1/2.
  bool is_kubo_ando() const;
  /// Largest k for which the kernel sits below the k-family bound at t = 1/2.
  /// Kubo-Ando kernels are below the arithmetic mean, so they report 2.
  double k_bound() const;
  /// Scalar generator f with M(1, x) = f(x).
  SpectralFunction generator() const;
  /// The flat isometry whose centroid this kernel preserves, if any.
  std::optional<PullbackMean> pullback() const;

 private:
  MeanKernel(KernelKind kind, std::string label, double k = 0.0)
      : kind_(kind), label_(std::move(label)), k_(k) {}

  KernelKind kind_;
  std::string label_;
  double k_;
  std::optional<SpectralFunction> generator_;
};

/// (x - 1) / ln x with the removable singularity filled in near x = 1.
double logarithmic_generator(double x);

SpdMatrix mean2(const MeanKernel& kernel, const SpdMatrix& a, const SpdMatrix& b);

/// A^1/2 f(A^-1/2 B A^-1/2) A^1/2 for an arbitrary generator.
SpdMatrix kubo_ando_mean(const SpectralFunction& f, const SpdMatrix& a,
                         const SpdMatrix& b);

/// [(1-t)A^2 + tB^2 - (k/2)t(1-t)(A-B)^2]^1/2 with k in [0,2], t in [0,1].
SpdMatrix k_family_mean(double k, double t, const SpdMatrix& a,
                        const SpdMatrix& b);

/// f^-1(sum_i w_i f(X_i)) for convex weights.
SpdMatrix pullback_nmean(const PullbackMean& p, std::span<const double> weights,
                         std::span<const SpdMatrix> xs);

/// Uniform-weight convenience overload.
SpdMatrix pullback_nmean(const PullbackMean& p, std::span<const SpdMatrix> xs);

}  // namespace matmean
