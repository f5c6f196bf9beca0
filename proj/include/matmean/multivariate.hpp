#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "matmean/kernels.hpp"
#include "matmean/weighted.hpp"

namespace matmean {

enum class Method { ALM, BMP };

std::string_view method_name(Method method);
/// Accepts "alm" or "bmp" in any case.
Method parse_method(std::string_view name);

struct MultiMeanConfig {
  /// Outer tolerance; each recursion level below runs at a tenth of its
  /// parent's tolerance.
  double tol = 1e-10;
  int max_iters = 200;
  /// Weighted step of the BMP update.
  WeightedMeanConfig inner = {};
  int max_n = 8;
  /// Evaluate the n sub-means of a step concurrently (outermost level only).
  /// Results are identical to the sequential run.
  bool parallel = false;

  void check() const;
};

struct IterationStep {
  int l;
  std::vector<SpdMatrix> iterates;
  double a;       // sum_i |X_i|_F^2
  double e;       // sum_{i<j} |X_i - X_j|_F^2
  double r_diam;  // max_{i<j} R(X_i, X_j) - 1
};

struct IterationTrace {
  Method method = Method::ALM;
  std::string kernel;
  int n = 0;
  std::vector<IterationStep> steps;
  bool converged = false;
  std::optional<SpdMatrix> limit;
};

struct MultiMeanResult {
  SpdMatrix limit;
  IterationTrace trace;
};

class MaxItersExceeded : public Error {
 public:
  MaxItersExceeded(const std::string& message, IterationTrace trace)
      : Error(ErrorCode::MaxItersExceeded, message), trace_(std::move(trace)) {}

  const IterationTrace& trace() const { return trace_; }

 private:
  IterationTrace trace_;
};

/// Ando-Li-Mathias extension: every X_i is replaced by the (n-1)-mean of the
/// others until all iterates agree. The (n-1)-mean is itself a converged ALM
/// run, bottoming out at the two-variable kernel.
MultiMeanResult alm_mean(const MeanKernel& kernel, std::span<const SpdMatrix> xs,
                         const MultiMeanConfig& cfg = {});

/// Bini-Meini-Poloni extension: X_i moves to M_{(n-1)/n}(X_i, G_i) where G_i
/// is the (n-1)-mean of the others and M_t is the weighted mean process.
MultiMeanResult bmp_mean(const MeanKernel& kernel, std::span<const SpdMatrix> xs,
                         const MultiMeanConfig& cfg = {});

MultiMeanResult n_mean(Method method, const MeanKernel& kernel,
                       std::span<const SpdMatrix> xs,
                       const MultiMeanConfig& cfg = {});

double lyapunov_a(std::span<const SpdMatrix> xs);
double lyapunov_e(std::span<const SpdMatrix> xs);
double r_diameter(std::span<const SpdMatrix> xs);

/// z_n in the per-step decrease a^{l+1} <= a^l - (k/8) z_n e^l:
/// 2/(n-1) for ALM and 4/((n-1)n) for BMP.
double decrease_factor(Method method, int n);

/// Per-step Frobenius distance between the pullback centroid of the iterates
/// and the centroid of the inputs.
std::vector<double> centroid_drift(const IterationTrace& trace,
                                   const PullbackMean& p);

}  // namespace matmean
