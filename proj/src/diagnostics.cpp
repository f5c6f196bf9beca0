#include "matmean/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "matmean/random.hpp"

namespace matmean {

OrderFit fit_order(std::span<const double> eps_now,
                   std::span<const double> eps_next) {
  if (eps_now.size() != eps_next.size()) {
    throw Error(ErrorCode::InvalidArgument, "error pair lists differ in size");
  }
  const std::size_t m = eps_now.size();
  if (m < 2) {
    throw Error(ErrorCode::InsufficientSteps,
                "order fit needs at least two error pairs");
  }
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(eps_now[i] > 0.0) || !(eps_next[i] > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "errors must be positive");
    }
    xs[i] = std::log(eps_now[i]);
    ys[i] = std::log(eps_next[i]);
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / static_cast<double>(m);
  const double my = sy / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw Error(ErrorCode::InsufficientSteps,
                "order fit is degenerate (identical errors)");
  }
  OrderFit fit;
  fit.order = sxy / sxx;
  fit.intercept = my - fit.order * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ys[i] - (fit.order * xs[i] + fit.intercept);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(m));
  fit.pairs = static_cast<int>(m);
  return fit;
}

OrderFit fit_order(std::span<const double> epsilons, int window) {
  if (window < 1) {
    throw Error(ErrorCode::InvalidArgument, "window must be >= 1");
  }
  if (epsilons.size() < 2) {
    throw Error(ErrorCode::InsufficientSteps, "need at least two errors");
  }
  const std::size_t pairs =
      std::min<std::size_t>(static_cast<std::size_t>(window),
                            epsilons.size() - 1);
  const std::size_t first = epsilons.size() - 1 - pairs;
  return fit_order(epsilons.subspan(first, pairs),
                   epsilons.subspan(first + 1, pairs));
}

std::vector<double> trace_errors(const IterationTrace& trace) {
  if (!trace.converged || !trace.limit) {
    throw Error(ErrorCode::InvalidArgument,
                "order estimation needs a converged trace");
  }
  const Matrix& limit = trace.limit->matrix();
  std::vector<double> eps;
  eps.reserve(trace.steps.size());
  for (const auto& step : trace.steps) {
    double worst = 0.0;
    for (const auto& x : step.iterates) {
      worst = std::max(worst, (x.matrix() - limit).norm());
    }
    eps.push_back(worst);
  }
  return eps;
}

namespace {

struct UsablePairs {
  std::vector<double> now;
  std::vector<double> next;
  std::vector<double> epsilons;
  double floor = 0.0;
};

UsablePairs usable_pairs(const IterationTrace& trace, int window) {
  if (window < 1) {
    throw Error(ErrorCode::InvalidArgument, "window must be >= 1");
  }
  UsablePairs out;
  out.epsilons = trace_errors(trace);
  const double scale = trace.limit->matrix().norm();
  out.floor = std::max(1e3 * std::numeric_limits<double>::epsilon() * scale,
                       100.0 * out.epsilons.back());
  std::vector<std::size_t> starts;
  for (std::size_t l = 0; l + 1 < out.epsilons.size(); ++l) {
    if (out.epsilons[l] > out.floor && out.epsilons[l + 1] > out.floor) {
      starts.push_back(l);
    }
  }
  const std::size_t keep =
      std::min(starts.size(), static_cast<std::size_t>(window));
  for (std::size_t i = starts.size() - keep; i < starts.size(); ++i) {
    out.now.push_back(out.epsilons[starts[i]]);
    out.next.push_back(out.epsilons[starts[i] + 1]);
  }
  return out;
}

}  // namespace

RateReport estimate_order(const IterationTrace& trace, int window) {
  return estimate_order(std::span<const IterationTrace>(&trace, 1), window);
}

RateReport estimate_order(std::span<const IterationTrace> traces, int window) {
  if (traces.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no traces to fit");
  }
  RateReport report;
  report.method = traces.front().method;
  report.kernel = traces.front().kernel;
  std::vector<double> now, next;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    UsablePairs p = usable_pairs(traces[i], window);
    if (i == 0) {
      report.epsilons = p.epsilons;
      report.noise_floor = p.floor;
    }
    now.insert(now.end(), p.now.begin(), p.now.end());
    next.insert(next.end(), p.next.begin(), p.next.end());
  }
  if (now.size() < 2) {
    std::ostringstream msg;
    msg << "only " << now.size()
        << " error pair(s) above the noise floor; cannot fit an order";
    throw Error(ErrorCode::InsufficientSteps, msg.str());
  }
  const OrderFit fit = fit_order(now, next);
  report.fitted_order = fit.order;
  report.residual = fit.residual;
  report.window = fit.pairs;
  report.low_confidence = fit.pairs < window;
  return report;
}

ExpansionReport estimate_b2(const MeanKernel& kernel,
                            const WeightedMeanConfig& cfg, double stencil_eps,
                            const std::vector<double>& t_samples) {
  if (!(stencil_eps > 0.0 && stencil_eps < 0.25)) {
    throw Error(ErrorCode::InvalidArgument,
                "stencil_eps must lie in (0, 0.25)");
  }
  if (t_samples.empty()) {
    throw Error(ErrorCode::InvalidArgument, "need at least one t sample");
  }
  for (double t : t_samples) {
    if (!(t > 0.0 && t < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "t samples must lie in (0, 1)");
    }
  }

  // Quadratic coefficient of f_t at 1 from symmetric second differences,
  // Richardson-combined over h and 2h to cancel the h^2 error term.
  auto b2_at = [&](double t, double eps) {
    auto second_diff = [&](double h) {
      const double up = f_t_eval(kernel, t, 1.0 + h, cfg);
      const double down = f_t_eval(kernel, t, 1.0 - h, cfg);
      return (up + down - 2.0) / (2.0 * h * h);
    };
    const double quad = (4.0 * second_diff(eps) - second_diff(2.0 * eps)) / 3.0;
    return quad / (4.0 * t * (1.0 - t));
  };

  ExpansionReport report;
  report.kernel = kernel.label();
  report.stencil_eps = stencil_eps;
  report.t_samples = t_samples;
  double full = 0.0;
  double half = 0.0;
  for (double t : t_samples) {
    const double b = b2_at(t, stencil_eps);
    report.per_t.push_back(b);
    full += b;
    half += b2_at(t, 0.5 * stencil_eps);
  }
  report.b2_estimate = full / static_cast<double>(t_samples.size());
  report.b2_half_stencil = half / static_cast<double>(t_samples.size());
  const double denom = std::max(
      {std::abs(report.b2_estimate), std::abs(report.b2_half_stencil), 1e-3});
  report.stable =
      std::abs(report.b2_estimate - report.b2_half_stencil) <= 0.01 * denom;
  if (!report.stable) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "b2 estimate for '" << kernel.label() << "' is unstable: "
        << report.b2_estimate << " vs " << report.b2_half_stencil
        << " at half stencil";
    throw Error(ErrorCode::UnstableEstimate, msg.str());
  }
  return report;
}

SandwichReport verify_sandwich(const MeanKernel& kernel, int samples, int dim,
                               std::uint64_t seed, double t,
                               const WeightedMeanConfig& cfg, double rel_tol) {
  if (samples < 1 || dim < 1) {
    throw Error(ErrorCode::InvalidArgument, "samples and dim must be >= 1");
  }
  SandwichReport report;
  report.kernel = kernel.label();
  report.t = t;
  report.samples = samples;
  report.dim = dim;
  report.seed = seed;
  report.worst_lower_margin = std::numeric_limits<double>::infinity();
  report.worst_upper_margin = std::numeric_limits<double>::infinity();

  SpdSampler sampler(seed);
  const std::vector<double> weights{1.0 - t, t};
  for (int s = 0; s < samples; ++s) {
    const std::vector<SpdMatrix> pair{sampler.spd(dim), sampler.spd(dim)};
    const SpdMatrix m = weighted_mean_value(kernel, t, pair[0], pair[1], cfg);
    const SpdMatrix h = pullback_nmean(PullbackMean::harmonic(), weights, pair);
    const SpdMatrix a =
        pullback_nmean(PullbackMean::arithmetic(), weights, pair);
    const double lower = loewner_margin(h, m);
    const double upper = loewner_margin(m, a);
    report.worst_lower_margin = std::min(report.worst_lower_margin, lower);
    report.worst_upper_margin = std::min(report.worst_upper_margin, upper);
    if (lower < -rel_tol) ++report.lower_violations;
    if (upper < -rel_tol) ++report.upper_violations;
  }
  return report;
}

TraceInequalityReport verify_trace_inequality(const MeanKernel& kernel, double k,
                                              double t, int samples, int dim,
                                              std::uint64_t seed,
                                              const WeightedMeanConfig& cfg,
                                              double rel_tol) {
  if (samples < 1 || dim < 1) {
    throw Error(ErrorCode::InvalidArgument, "samples and dim must be >= 1");
  }
  if (!(k >= 0.0 && k <= 2.0) || !(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "need k in [0,2] and t in [0,1]");
  }
  TraceInequalityReport report;
  report.kernel = kernel.label();
  report.k = k;
  report.t = t;
  report.samples = samples;
  report.dim = dim;
  report.seed = seed;
  report.worst_margin = std::numeric_limits<double>::infinity();

  const bool closed_form = kernel.kind() == KernelKind::KFamily ||
                           kernel.kind() == KernelKind::Square;
  SpdSampler sampler(seed);
  for (int s = 0; s < samples; ++s) {
    const SpdMatrix a = sampler.spd(dim);
    const SpdMatrix b = sampler.spd(dim);
    const SpdMatrix f = closed_form
                            ? k_family_mean(kernel.k(), t, a, b)
                            : weighted_mean_value(kernel, t, a, b, cfg);
    const double lhs = f.matrix().squaredNorm();
    const double rhs = (1.0 - t) * a.matrix().squaredNorm() +
                       t * b.matrix().squaredNorm() -
                       (k / 2.0) * t * (1.0 - t) *
                           (a.matrix() - b.matrix()).squaredNorm();
    const double margin = (rhs - lhs) / std::max(std::abs(rhs), lhs);
    report.worst_margin = std::min(report.worst_margin, margin);
    if (margin < -rel_tol) ++report.violations;
  }
  return report;
}

CentroidReport verify_centroid(const MeanKernel& kernel, Method method,
                               int samples, int n, int dim, std::uint64_t seed,
                               const MultiMeanConfig& cfg) {
  const auto pullback = kernel.pullback();
  if (!pullback) {
    throw Error(ErrorCode::InvalidArgument,
                "kernel '" + kernel.label() + "' has no pullback centroid");
  }
  if (samples < 1 || n < 2 || dim < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "need samples >= 1, n >= 2 and dim >= 1");
  }
  CentroidReport report;
  report.kernel = kernel.label();
  report.method = method;
  report.pullback = pullback->label;
  report.samples = samples;
  report.n = n;
  report.dim = dim;
  report.seed = seed;

  SpdSampler sampler(seed);
  for (int s = 0; s < samples; ++s) {
    std::vector<SpdMatrix> xs;
    for (int i = 0; i < n; ++i) xs.push_back(sampler.spd(dim));
    const SpdMatrix centroid = pullback_nmean(*pullback, xs);
    const double scale = centroid.matrix().norm();
    const MultiMeanResult run = n_mean(method, kernel, xs, cfg);
    for (double d : centroid_drift(run.trace, *pullback)) {
      report.max_relative_drift = std::max(report.max_relative_drift, d / scale);
    }
    report.max_limit_error =
        std::max(report.max_limit_error,
                 (run.limit.matrix() - centroid.matrix()).norm() / scale);
  }
  return report;
}

RateReport verify_order(const MeanKernel& kernel, Method method, int n, int dim,
                        double max_r, int runs, std::uint64_t seed,
                        const MultiMeanConfig& cfg, int window) {
  if (!(max_r > 1.0) || runs < 1) {
    throw Error(ErrorCode::InvalidArgument, "need max_r > 1 and runs >= 1");
  }
  SpdSampler sampler(seed);
  const int count = method == Method::BMP ? runs : 1;
  std::vector<double> bounds;
  for (int r = 0; r < count; ++r) bounds.push_back(1.0 + (max_r - 1.0) * std::pow(0.5, r));
  std::vector<IterationTrace> traces;
  for (const auto& xs : sampler.cluster_path(n, dim, bounds)) {
    traces.push_back(n_mean(method, kernel, xs, cfg).trace);
  }
  return estimate_order(traces, window);
}

}  // namespace matmean
