#include "matmean/multivariate.hpp"

#include <algorithm>
#include <cctype>
#include <future>
#include <sstream>

namespace matmean {

std::string_view method_name(Method method) {
  return method == Method::ALM ? "ALM" : "BMP";
}

Method parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "alm") return Method::ALM;
  if (lower == "bmp") return Method::BMP;
  throw Error(ErrorCode::InvalidArgument,
              "unknown method '" + std::string(name) + "' (expected alm|bmp)");
}

void MultiMeanConfig::check() const {
  if (!(tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tol must be > 0");
  }
  if (max_iters < 1) {
    throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
  }
  if (max_n < 2) {
    throw Error(ErrorCode::InvalidArgument, "max_n must be >= 2");
  }
  inner.check();
}

double lyapunov_a(std::span<const SpdMatrix> xs) {
  double a = 0.0;
  for (const auto& x : xs) a += x.matrix().squaredNorm();
  return a;
}

double lyapunov_e(std::span<const SpdMatrix> xs) {
  double e = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      e += (xs[i].matrix() - xs[j].matrix()).squaredNorm();
    }
  }
  return e;
}

double r_diameter(std::span<const SpdMatrix> xs) {
  double diam = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      diam = std::max(diam, r_metric(xs[i], xs[j]).value - 1.0);
    }
  }
  return diam;
}

double decrease_factor(Method method, int n) {
  const double nd = static_cast<double>(n);
  return method == Method::ALM ? 2.0 / (nd - 1.0) : 4.0 / ((nd - 1.0) * nd);
}

namespace {

class Engine {
 public:
  Engine(Method method, const MeanKernel& kernel, const MultiMeanConfig& cfg)
      : method_(method), kernel_(kernel), cfg_(cfg) {}

  // Converged n-mean at the given tolerance, no trace.
  SpdMatrix solve(std::span<const SpdMatrix> xs, double tol) const {
    if (xs.size() == 2) return mean2(kernel_, xs[0], xs[1]);
    return iterate(xs, tol, nullptr, false);
  }

  SpdMatrix iterate(std::span<const SpdMatrix> xs, double tol,
                    IterationTrace* trace, bool parallel) const {
    const std::size_t n = xs.size();
    double scale = 0.0;
    for (const auto& x : xs) scale += x.matrix().norm();
    const double e_limit = tol * tol * scale * scale;

    std::vector<SpdMatrix> current(xs.begin(), xs.end());
    for (int l = 0;; ++l) {
      bool done = false;
      if (trace != nullptr) {
        const double e = lyapunov_e(current);
        const double diam = r_diameter(current);
        trace->steps.push_back({l, current, lyapunov_a(current), e, diam});
        done = e <= e_limit && diam <= tol;
      } else {
        done = lyapunov_e(current) <= e_limit && r_diameter(current) <= tol;
      }
      if (done) {
        if (trace != nullptr) {
          trace->converged = true;
          trace->limit = current.front();
        }
        return current.front();
      }
      if (l == cfg_.max_iters) break;

      std::vector<SpdMatrix> next;
      next.reserve(n);
      if (parallel) {
        std::vector<std::future<SpdMatrix>> jobs;
        jobs.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
          jobs.push_back(std::async(std::launch::async, [&, i] {
            return update(current, i, tol);
          }));
        }
        for (auto& job : jobs) next.push_back(job.get());
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          next.push_back(update(current, i, tol));
        }
      }
      current = std::move(next);
    }

    std::ostringstream msg;
    msg.precision(17);
    msg << method_name(method_) << " " << n << "-mean with kernel '"
        << kernel_.label() << "' did not converge to tol " << tol
        << " within " << cfg_.max_iters << " iterations";
    throw MaxItersExceeded(msg.str(), trace != nullptr ? *trace
                                                       : IterationTrace{});
  }

 private:
  SpdMatrix update(const std::vector<SpdMatrix>& current, std::size_t skip,
                   double tol) const {
    std::vector<SpdMatrix> others;
    others.reserve(current.size() - 1);
    for (std::size_t j = 0; j < current.size(); ++j) {
      if (j != skip) others.push_back(current[j]);
    }
    SpdMatrix sub = solve(others, tol / 10.0);
    if (method_ == Method::ALM) return sub;
    const double n = static_cast<double>(current.size());
    // The weighted step must resolve finer than this level's tolerance or
    // the iterates stall at the weighted-mean stopping error.
    WeightedMeanConfig step_cfg = cfg_.inner;
    step_cfg.tol = std::min(step_cfg.tol, tol / 10.0);
    return weighted_mean_value(kernel_, (n - 1.0) / n, current[skip], sub,
                               step_cfg);
  }

  Method method_;
  const MeanKernel& kernel_;
  const MultiMeanConfig& cfg_;
};

void check_inputs(std::span<const SpdMatrix> xs, const MultiMeanConfig& cfg) {
  cfg.check();
  if (xs.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "n-mean needs at least 2 matrices");
  }
  if (static_cast<int>(xs.size()) > cfg.max_n) {
    std::ostringstream msg;
    msg << "n = " << xs.size() << " exceeds max_n = " << cfg.max_n;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  for (const auto& x : xs) require_same_dim(xs.front(), x);
}

}  // namespace

MultiMeanResult n_mean(Method method, const MeanKernel& kernel,
                       std::span<const SpdMatrix> xs,
                       const MultiMeanConfig& cfg) {
  check_inputs(xs, cfg);
  IterationTrace trace;
  trace.method = method;
  trace.kernel = kernel.label();
  trace.n = static_cast<int>(xs.size());

  if (xs.size() == 2) {
    SpdMatrix m = mean2(kernel, xs[0], xs[1]);
    std::vector<SpdMatrix> inputs(xs.begin(), xs.end());
    trace.steps.push_back({0, inputs, lyapunov_a(inputs), lyapunov_e(inputs),
                           r_diameter(inputs)});
    std::vector<SpdMatrix> settled{m, m};
    trace.steps.push_back({1, settled, lyapunov_a(settled), 0.0, 0.0});
    trace.converged = true;
    trace.limit = m;
    return {std::move(m), std::move(trace)};
  }

  Engine engine(method, kernel, cfg);
  try {
    SpdMatrix limit = engine.iterate(xs, cfg.tol, &trace, cfg.parallel);
    return {std::move(limit), std::move(trace)};
  } catch (const MaxItersExceeded& e) {
    // Inner levels carry no trace; report the outer one.
    throw MaxItersExceeded(e.what(), trace);
  }
}

MultiMeanResult alm_mean(const MeanKernel& kernel, std::span<const SpdMatrix> xs,
                         const MultiMeanConfig& cfg) {
  return n_mean(Method::ALM, kernel, xs, cfg);
}

MultiMeanResult bmp_mean(const MeanKernel& kernel, std::span<const SpdMatrix> xs,
                         const MultiMeanConfig& cfg) {
  return n_mean(Method::BMP, kernel, xs, cfg);
}

std::vector<double> centroid_drift(const IterationTrace& trace,
                                   const PullbackMean& p) {
  std::vector<double> drift;
  if (trace.steps.empty()) return drift;
  const SpdMatrix origin = pullback_nmean(p, trace.steps.front().iterates);
  drift.reserve(trace.steps.size());
  for (const auto& step : trace.steps) {
    const SpdMatrix c = pullback_nmean(p, step.iterates);
    drift.push_back((c.matrix() - origin.matrix()).norm());
  }
  return drift;
}

}  // namespace matmean
