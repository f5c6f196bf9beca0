#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "matmean/multivariate.hpp"

namespace matmean {

// ---------------------------------------------------------------------------
// Convergence order

struct OrderFit {
  double order = 0.0;
  double intercept = 0.0;
  /// Root mean square residual of the log-log fit.
  double residual = 0.0;
  int pairs = 0;
};

/// Least-squares slope of log eps_{l+1} against log eps_l. Throws
/// InsufficientSteps for fewer than two pairs.
OrderFit fit_order(std::span<const double> eps_now,
                   std::span<const double> eps_next);

/// Convenience for one error sequence: fits the last `window` consecutive
/// pairs.
OrderFit fit_order(std::span<const double> epsilons, int window);

struct RateReport {
  Method method = Method::ALM;
  std::string kernel;
  double fitted_order = 0.0;
  /// Number of (eps_l, eps_{l+1}) pairs in the fit.
  int window = 0;
  double residual = 0.0;
  /// eps_l = max_i |X_i^l - limit|_F, per step (first trace when pooled).
  std::vector<double> epsilons;
  double noise_floor = 0.0;
  bool low_confidence = false;
};

/// eps_l for every step of a converged trace.
std::vector<double> trace_errors(const IterationTrace& trace);

/// Errors at or below max(1e3 * machine eps * |limit|_F, 100 * eps_last) are
/// noise and excluded. Uses the last `window` usable pairs; with fewer it
/// uses what there is and flags low confidence.
RateReport estimate_order(const IterationTrace& trace, int window = 4);

/// Pools the usable pairs of several traces of the same method and kernel
/// into one regression. Needed when each run reaches the noise floor within
/// two steps, as BMP does close to its limit.
RateReport estimate_order(std::span<const IterationTrace> traces,
                          int window = 4);

// ---------------------------------------------------------------------------
// Expansion coefficient of f_t around 1

struct ExpansionReport {
  std::string kernel;
  double b2_estimate = 0.0;
  /// Same estimate at half the stencil width.
  double b2_half_stencil = 0.0;
  double stencil_eps = 0.0;
  std::vector<double> t_samples;
  /// Estimate at each t sample (full stencil).
  std::vector<double> per_t;
  bool stable = false;
};

inline const std::vector<double> kDefaultBSamples = {0.25, 1.0 / 3.0, 0.5, 0.7};

/// Signed b2 from f_t(1 + h) = 1 + t h + 4 b2 t(1-t) h^2 + O(h^3), using
/// second differences at h = +-eps, +-2eps with Richardson extrapolation.
/// Throws UnstableEstimate when halving eps moves the estimate by more than
/// 1% (relative to max(|b2|, 1e-3)).
ExpansionReport estimate_b2(const MeanKernel& kernel,
                            const WeightedMeanConfig& cfg = {},
                            double stencil_eps = 0.01,
                            const std::vector<double>& t_samples =
                                kDefaultBSamples);

// ---------------------------------------------------------------------------
// Inequality suites

struct SandwichReport {
  std::string kernel;
  double t = 0.5;
  int samples = 0;
  int dim = 0;
  std::uint64_t seed = 0;
  int lower_violations = 0;
  int upper_violations = 0;
  /// Smallest normalized eigenvalue of M_t - H_t and of A_t - M_t.
  double worst_lower_margin = 0.0;
  double worst_upper_margin = 0.0;
};

/// ((1-t)A^-1 + tB^-1)^-1 <= M_t(A, B) <= (1-t)A + tB on random pairs. At
/// t = 1/2 M_t is the kernel itself.
SandwichReport verify_sandwich(const MeanKernel& kernel, int samples, int dim,
                               std::uint64_t seed, double t = 0.5,
                               const WeightedMeanConfig& cfg = {},
                               double rel_tol = kDefaultLoewnerTol);

struct TraceInequalityReport {
  std::string kernel;
  double k = 0.0;
  double t = 0.5;
  int samples = 0;
  int dim = 0;
  std::uint64_t seed = 0;
  int violations = 0;
  /// Smallest (rhs - lhs) / max(rhs, lhs).
  double worst_margin = 0.0;
};

/// |F_t(A,B)|^2 <= (1-t)|A|^2 + t|B|^2 - (k/2) t(1-t) |A-B|^2 (Frobenius)
/// where F_t is the kernel's weighted form: the closed k-family expression
/// for k-family and square kernels, the weighted mean process otherwise.
TraceInequalityReport verify_trace_inequality(const MeanKernel& kernel, double k,
                                              double t, int samples, int dim,
                                              std::uint64_t seed,
                                              const WeightedMeanConfig& cfg = {},
                                              double rel_tol = 1e-9);

struct CentroidReport {
  std::string kernel;
  Method method = Method::ALM;
  std::string pullback;
  int samples = 0;
  int n = 0;
  int dim = 0;
  std::uint64_t seed = 0;
  /// max over samples and steps of drift / |centroid|_F.
  double max_relative_drift = 0.0;
  /// max over samples of |limit - centroid|_F / |centroid|_F.
  double max_limit_error = 0.0;
};

/// Runs the engine on seeded random inputs and tracks the kernel's pullback
/// centroid. Throws InvalidArgument for kernels without a pullback isometry.
CentroidReport verify_centroid(const MeanKernel& kernel, Method method,
                               int samples, int n, int dim, std::uint64_t seed,
                               const MultiMeanConfig& cfg = {});

/// Order estimate on seeded clusters of n matrices with pairwise R <= max_r.
/// BMP pools `runs` copies of one cluster contracted toward its base, with
/// R bounds 1 + (max_r - 1) 2^-r, so every pair shares the same error
/// constant. ALM uses the uncontracted cluster.
RateReport verify_order(const MeanKernel& kernel, Method method, int n, int dim,
                        double max_r, int runs, std::uint64_t seed,
                        const MultiMeanConfig& cfg = {}, int window = 4);

}  // namespace matmean
