#pragma once

#include <vector>

#include "matmean/kernels.hpp"

namespace matmean {

struct WeightedMeanConfig {
  /// Stop once R(A_n, B_n) - 1 <= tol.
  double tol = 1e-12;
  int max_depth = 64;
  /// Snap t to the nearest dyadic m/2^k (k <= max_depth) when it lies within
  /// 1e-15, so the process ends on an exact hit.
  bool dyadic_shortcut = true;

  void check() const;
};

struct WeightedStep {
  int step;
  double a;
  double b;
  SpdMatrix lower;  // A_n
  SpdMatrix upper;  // B_n
  double r_gap;     // R(A_n, B_n) - 1
};

struct WeightedMeanResult {
  SpdMatrix value;
  std::vector<WeightedStep> trace;
};

/// Raised when the process has not reached cfg.tol after cfg.max_depth
/// bisections. Carries the trace for diagnosis.
class MaxDepthExceeded : public Error {
 public:
  MaxDepthExceeded(const std::string& message, std::vector<WeightedStep> trace)
      : Error(ErrorCode::MaxDepthExceeded, message), trace_(std::move(trace)) {}

  const std::vector<WeightedStep>& trace() const { return trace_; }

 private:
  std::vector<WeightedStep> trace_;
};

/// Weighted counterpart M_t(A, B) of a symmetric mean, built by bisecting the
/// weight interval [0, 1] and replacing one endpoint matrix by the symmetric
/// mean of both at every step. M_0 = A, M_1 = B, M_1/2 = M exactly.
WeightedMeanResult weighted_mean(const MeanKernel& kernel, double t,
                                 const SpdMatrix& a, const SpdMatrix& b,
                                 const WeightedMeanConfig& cfg = {});

/// Same process without keeping the trace. Used by the iteration engines.
SpdMatrix weighted_mean_value(const MeanKernel& kernel, double t,
                              const SpdMatrix& a, const SpdMatrix& b,
                              const WeightedMeanConfig& cfg = {});

/// f_t(x) = M_t(1, x) evaluated on 1x1 matrices.
double f_t_eval(const MeanKernel& kernel, double t, double x,
                const WeightedMeanConfig& cfg = {});

/// Nearest dyadic rational within 1e-15 of t with denominator <= 2^max_depth,
/// or t unchanged.
double snap_to_dyadic(double t, int max_depth);

}  // namespace matmean
