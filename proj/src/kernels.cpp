#include "matmean/kernels.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace matmean {
namespace {

// Generator path without intermediate validation; only the result is
// validated.
SpdMatrix congruence_mean(const std::function<double(double)>& f,
                          const std::string& label, const SpdMatrix& a,
                          const SpdMatrix& b) {
  require_same_dim(a, b);
  const Matrix w = a.inverse_sqrt();
  const SpdMatrix inner = SpdMatrix::validate(w * b.matrix() * w);
  const Vector& mu = inner.eigenvalues();
  Vector mapped(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    mapped(i) = f(mu(i));
    if (!std::isfinite(mapped(i)) || !(mapped(i) > 0.0)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "generator '" << label << "' gave " << mapped(i) << " at "
          << mu(i);
      throw Error(ErrorCode::NonPositiveResult, msg.str());
    }
  }
  const Matrix& q = inner.eigenvectors();
  const Matrix s = a.sqrt();
  return SpdMatrix::validate(s * (q * mapped.asDiagonal() * q.transpose()) * s);
}

}  // namespace

double logarithmic_generator(double x) {
  const double h = x - 1.0;
  if (std::abs(h) < 1e-6) {
    return 1.0 + h / 2.0 - h * h / 12.0 + h * h * h / 24.0;
  }
  return h / std::log(x);
}

PullbackMean PullbackMean::arithmetic() {
  return {SpectralFunction::identity(), SpectralFunction::identity(),
          "arithmetic"};
}

PullbackMean PullbackMean::square() {
  return {SpectralFunction::square(), SpectralFunction::sqrt(), "square"};
}

PullbackMean PullbackMean::harmonic() {
  return {SpectralFunction::inverse(), SpectralFunction::inverse(),
          "harmonic"};
}

MeanKernel MeanKernel::arithmetic() {
  return MeanKernel(KernelKind::Arithmetic, "arithmetic");
}

MeanKernel MeanKernel::harmonic() {
  return MeanKernel(KernelKind::Harmonic, "harmonic");
}

MeanKernel MeanKernel::geometric() {
  return MeanKernel(KernelKind::Geometric, "geometric");
}

MeanKernel MeanKernel::logarithmic() {
  return MeanKernel(KernelKind::Logarithmic, "logarithmic");
}

MeanKernel MeanKernel::square() {
  return MeanKernel(KernelKind::Square, "square", 0.0);
}

MeanKernel MeanKernel::k_family(double k) {
  if (!(k > 0.0 && k <= 2.0)) {
    std::ostringstream msg;
    msg << "k-family parameter must lie in (0, 2], got " << k;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  std::ostringstream label;
  label.precision(17);
  label << "kfamily:" << k;
  return MeanKernel(KernelKind::KFamily, label.str(), k);
}

MeanKernel MeanKernel::from_generator(SpectralFunction f, std::string label) {
  const double at_one = f(1.0);
  if (!(std::abs(at_one - 1.0) <= 1e-12)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "generator '" << label << "' is not normalized: f(1) = " << at_one;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  MeanKernel kernel(KernelKind::Generator, std::move(label));
  kernel.generator_ = std::move(f);
  return kernel;
}

MeanKernel MeanKernel::parse(std::string_view name) {
  if (name == "arithmetic") return arithmetic();
  if (name == "harmonic") return harmonic();
  if (name == "geometric") return geometric();
  if (name == "logarithmic") return logarithmic();
  if (name == "square") return square();
  constexpr std::string_view prefix = "kfamily:";
  if (name.substr(0, prefix.size()) == prefix) {
    const std::string_view number = name.substr(prefix.size());
    double k = 0.0;
    const auto [end, ec] =
        std::from_chars(number.data(), number.data() + number.size(), k);
    if (ec != std::errc() || end != number.data() + number.size() ||
        number.empty()) {
      throw Error(ErrorCode::InvalidArgument,
                  "bad k-family parameter in kernel name '" +
                      std::string(name) + "'");
    }
    return k_family(k);
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown kernel '" + std::string(name) + "'");
}

bool MeanKernel::is_kubo_ando() const {
  switch (kind_) {
    case KernelKind::Arithmetic:
    case KernelKind::Harmonic:
    case KernelKind::Geometric:
    case KernelKind::Logarithmic:
    case KernelKind::Generator:
      return true;
    case KernelKind::KFamily:
      return k_ == 2.0;
    case KernelKind::Square:
      return false;
  }
  return false;
}

double MeanKernel::k_bound() const {
  switch (kind_) {
    case KernelKind::KFamily:
    case KernelKind::Square:
      return k_;
    default:
      return 2.0;
  }
}

SpectralFunction MeanKernel::generator() const {
  switch (kind_) {
    case KernelKind::Arithmetic:
      return {[](double x) { return 0.5 * (1.0 + x); }, label_};
    case KernelKind::Harmonic:
      return {[](double x) { return 2.0 * x / (1.0 + x); }, label_};
    case KernelKind::Geometric:
      return {[](double x) { return std::sqrt(x); }, label_};
    case KernelKind::Logarithmic:
      return {logarithmic_generator, label_};
    case KernelKind::Generator:
      return *generator_;
    case KernelKind::KFamily:
    case KernelKind::Square: {
      const double k = k_;
      return {[k](double x) {
                return std::sqrt(0.5 * (1.0 + x * x) -
                                 (k / 8.0) * (1.0 - x) * (1.0 - x));
              },
              label_};
    }
  }
  return {};
}

std::optional<PullbackMean> MeanKernel::pullback() const {
  switch (kind_) {
    case KernelKind::Arithmetic:
      return PullbackMean::arithmetic();
    case KernelKind::Harmonic:
      return PullbackMean::harmonic();
    case KernelKind::Square:
      return PullbackMean::square();
    case KernelKind::KFamily:
      if (k_ == 2.0) return PullbackMean::arithmetic();
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

SpdMatrix kubo_ando_mean(const SpectralFunction& f, const SpdMatrix& a,
                         const SpdMatrix& b) {
  return congruence_mean(f.evaluator, f.label, a, b);
}

SpdMatrix mean2(const MeanKernel& kernel, const SpdMatrix& a,
                const SpdMatrix& b) {
  require_same_dim(a, b);
  switch (kernel.kind()) {
    case KernelKind::Arithmetic:
      return SpdMatrix::validate(0.5 * (a.matrix() + b.matrix()));
    case KernelKind::Harmonic: {
      const SpdMatrix s =
          SpdMatrix::validate(0.5 * (a.inverse() + b.inverse()));
      return SpdMatrix::validate(s.inverse());
    }
    case KernelKind::Geometric:
      return congruence_mean([](double x) { return std::sqrt(x); }, "sqrt", a,
                             b);
    case KernelKind::Logarithmic:
    case KernelKind::Generator: {
      const SpectralFunction f = kernel.generator();
      return congruence_mean(f.evaluator, f.label, a, b);
    }
    case KernelKind::KFamily:
    case KernelKind::Square:
      return k_family_mean(kernel.k(), 0.5, a, b);
  }
  throw Error(ErrorCode::InvalidArgument, "unhandled kernel kind");
}

SpdMatrix k_family_mean(double k, double t, const SpdMatrix& a,
                        const SpdMatrix& b) {
  require_same_dim(a, b);
  if (!(k >= 0.0 && k <= 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "k must lie in [0, 2]");
  }
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "t must lie in [0, 1]");
  }
  const Matrix& am = a.matrix();
  const Matrix& bm = b.matrix();
  const Matrix diff = am - bm;
  const Matrix inner = (1.0 - t) * (am * am) + t * (bm * bm) -
                       (k / 2.0) * t * (1.0 - t) * (diff * diff);
  const SpdMatrix inner_spd = SpdMatrix::validate(inner);
  return SpdMatrix::validate(inner_spd.sqrt());
}

SpdMatrix pullback_nmean(const PullbackMean& p, std::span<const double> weights,
                         std::span<const SpdMatrix> xs) {
  if (xs.empty()) {
    throw Error(ErrorCode::InvalidArgument, "pullback mean needs >= 1 matrix");
  }
  if (weights.size() != xs.size()) {
    throw Error(ErrorCode::WeightError, "weight count does not match inputs");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::WeightError, "weights must be finite and >= 0");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12 * static_cast<double>(weights.size())) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "weights must sum to 1 (sum " << total << ")";
    throw Error(ErrorCode::WeightError, msg.str());
  }
  Matrix acc = Matrix::Zero(xs[0].dim(), xs[0].dim());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    require_same_dim(xs[0], xs[i]);
    acc += weights[i] * apply_spectral(xs[i], p.forward).matrix();
  }
  return apply_spectral(SpdMatrix::validate(acc), p.inverse);
}

SpdMatrix pullback_nmean(const PullbackMean& p, std::span<const SpdMatrix> xs) {
  std::vector<double> weights(xs.size(), 1.0 / static_cast<double>(xs.size()));
  if (!xs.empty()) {
    // Uniform weights may miss 1 by an ulp or two; fold the residue into the
    // last weight.
    double partial = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) partial += weights[i];
    weights.back() = 1.0 - partial;
  }
  return pullback_nmean(p, weights, xs);
}

}  // namespace matmean
