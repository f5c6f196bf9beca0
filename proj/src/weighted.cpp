#include "matmean/weighted.hpp"

#include <cmath>
#include <sstream>

namespace matmean {

void WeightedMeanConfig::check() const {
  if (!(tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "weighted-mean tol must be > 0");
  }
  if (max_depth < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "weighted-mean max_depth must be >= 1");
  }
}

double snap_to_dyadic(double t, int max_depth) {
  // Past 2^-40 every double sits within 1e-15 of some dyadic, so deeper
  // denominators would snap arbitrary weights.
  const int depth = std::min(max_depth, 40);
  for (int k = 0; k <= depth; ++k) {
    const double m = std::round(std::ldexp(t, k));
    const double dyadic = std::ldexp(m, -k);
    if (std::abs(t - dyadic) <= 1e-15) return dyadic;
  }
  return t;
}

namespace {

class Recorder {
 public:
  explicit Recorder(std::vector<WeightedStep>* out) : out_(out) {}

  void add(int step, double a, double b, const SpdMatrix& lower,
           const SpdMatrix& upper, double r_gap) {
    if (out_ != nullptr) out_->push_back({step, a, b, lower, upper, r_gap});
  }

 private:
  std::vector<WeightedStep>* out_;
};

SpdMatrix run_process(const MeanKernel& kernel, double t, const SpdMatrix& a0,
                      const SpdMatrix& b0, const WeightedMeanConfig& cfg,
                      std::vector<WeightedStep>* trace) {
  cfg.check();
  require_same_dim(a0, b0);
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream msg;
    msg << "weight t must lie in [0, 1], got " << t;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  if (cfg.dyadic_shortcut) t = snap_to_dyadic(t, cfg.max_depth);

  Recorder rec(trace);
  double a = 0.0;
  double b = 1.0;
  SpdMatrix lower = a0;
  SpdMatrix upper = b0;

  // Terminal branches: once an interval end equals t both iterates collapse
  // onto that end and stay there.
  auto hit = [&]() {
    if (a == t) {
      upper = lower;
      b = a;
      return true;
    }
    if (b == t) {
      lower = upper;
      a = b;
      return true;
    }
    return false;
  };

  if (hit()) {
    rec.add(0, a, b, lower, upper, 0.0);
    return lower;
  }
  double gap = r_metric(lower, upper).value - 1.0;
  rec.add(0, a, b, lower, upper, gap);
  if (gap <= cfg.tol) return lower;

  for (int n = 1; n <= cfg.max_depth; ++n) {
    const double mid = 0.5 * (a + b);
    SpdMatrix m = mean2(kernel, lower, upper);
    if (mid <= t) {
      a = mid;
      lower = std::move(m);
    } else {
      b = mid;
      upper = std::move(m);
    }
    if (hit()) {
      rec.add(n, a, b, lower, upper, 0.0);
      return lower;
    }
    gap = r_metric(lower, upper).value - 1.0;
    rec.add(n, a, b, lower, upper, gap);
    if (gap <= cfg.tol) return lower;
  }

  std::ostringstream msg;
  msg.precision(17);
  msg << "weighted mean did not reach tol " << cfg.tol << " within "
      << cfg.max_depth << " bisections (last gap " << gap << ")";
  throw MaxDepthExceeded(msg.str(),
                         trace != nullptr ? *trace
                                          : std::vector<WeightedStep>{});
}

}  // namespace

WeightedMeanResult weighted_mean(const MeanKernel& kernel, double t,
                                 const SpdMatrix& a, const SpdMatrix& b,
                                 const WeightedMeanConfig& cfg) {
  std::vector<WeightedStep> trace;
  SpdMatrix value = run_process(kernel, t, a, b, cfg, &trace);
  return {std::move(value), std::move(trace)};
}

SpdMatrix weighted_mean_value(const MeanKernel& kernel, double t,
                              const SpdMatrix& a, const SpdMatrix& b,
                              const WeightedMeanConfig& cfg) {
  return run_process(kernel, t, a, b, cfg, nullptr);
}

double f_t_eval(const MeanKernel& kernel, double t, double x,
                const WeightedMeanConfig& cfg) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::InvalidArgument, "f_t argument must be > 0");
  }
  const SpdMatrix one = SpdMatrix::scalar(1.0);
  const SpdMatrix xm = SpdMatrix::scalar(x);
  return weighted_mean_value(kernel, t, one, xm, cfg)(0, 0);
}

}  // namespace matmean
