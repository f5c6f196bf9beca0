#include "matmean/matmean.h"

#include <cstring>
#include <string>
#include <vector>

#include "matmean/diagnostics.hpp"
#include "matmean/io.hpp"

struct mm_matrix {
  matmean::SpdMatrix value;
  std::string label;
  bool has_label = false;
  bool asymmetry_warning = false;
};

struct mm_kernel {
  matmean::MeanKernel value;
};

struct mm_trace {
  matmean::IterationTrace value;
};

namespace {

using matmean::Error;
using matmean::ErrorCode;
using nlohmann::json;

thread_local std::string last_error;

mm_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return MM_ERR_INVALID_ARGUMENT;
    case ErrorCode::NotSquare: return MM_ERR_NOT_SQUARE;
    case ErrorCode::NotPositiveDefinite: return MM_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::DimensionMismatch: return MM_ERR_DIMENSION_MISMATCH;
    case ErrorCode::NonPositiveResult: return MM_ERR_NON_POSITIVE_RESULT;
    case ErrorCode::SingularCongruence: return MM_ERR_SINGULAR_CONGRUENCE;
    case ErrorCode::WeightError: return MM_ERR_WEIGHT;
    case ErrorCode::MaxDepthExceeded: return MM_ERR_MAX_DEPTH_EXCEEDED;
    case ErrorCode::MaxItersExceeded: return MM_ERR_MAX_ITERS_EXCEEDED;
    case ErrorCode::InsufficientSteps: return MM_ERR_INSUFFICIENT_STEPS;
    case ErrorCode::UnstableEstimate: return MM_ERR_UNSTABLE_ESTIMATE;
    case ErrorCode::ParseError: return MM_ERR_PARSE;
    case ErrorCode::IoError: return MM_ERR_IO;
  }
  return MM_ERR_INTERNAL;
}

template <typename F>
mm_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return MM_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return MM_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return MM_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

matmean::WeightedMeanConfig to_cpp(const mm_weighted_config* cfg) {
  matmean::WeightedMeanConfig out;
  if (cfg != nullptr) {
    out.tol = cfg->tol;
    out.max_depth = cfg->max_depth;
    out.dyadic_shortcut = cfg->dyadic_shortcut != 0;
  }
  return out;
}

matmean::MultiMeanConfig to_cpp(const mm_multi_config* cfg) {
  matmean::MultiMeanConfig out;
  if (cfg != nullptr) {
    out.tol = cfg->tol;
    out.max_iters = cfg->max_iters;
    out.max_n = cfg->max_n;
    out.parallel = cfg->parallel != 0;
    out.inner = to_cpp(&cfg->inner);
  }
  return out;
}

mm_matrix* wrap(matmean::SpdMatrix m) {
  return new mm_matrix{std::move(m), {}, false, false};
}

matmean::Method to_cpp(mm_method method) {
  switch (method) {
    case MM_METHOD_ALM: return matmean::Method::ALM;
    case MM_METHOD_BMP: return matmean::Method::BMP;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method");
}

matmean::PullbackMean pullback_by_name(const std::string& name) {
  if (name == "arithmetic") return matmean::PullbackMean::arithmetic();
  if (name == "harmonic") return matmean::PullbackMean::harmonic();
  if (name == "square") return matmean::PullbackMean::square();
  throw Error(ErrorCode::InvalidArgument,
              "unknown pullback '" + name + "' (arithmetic|harmonic|square)");
}

// Options for mm_verify with their defaults.
struct VerifyOptions {
  std::string kernel = "geometric";
  int samples = 100;
  int dim = 3;
  std::uint64_t seed = 0;
  double t = 0.5;
  double k = 2.0;
  std::string method = "alm";
  int n = 3;
  double max_r = 1.2;
  int runs = 4;
  int window = 4;
  double stencil_eps = 0.01;
  matmean::MultiMeanConfig multi;

  static VerifyOptions parse(const char* text) {
    VerifyOptions o;
    if (text == nullptr || *text == '\0') return o;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError,
                  std::string("bad verify options: ") + e.what());
    }
    if (!j.is_object()) {
      throw Error(ErrorCode::ParseError, "verify options must be an object");
    }
    try {
      for (const auto& [key, v] : j.items()) {
        if (key == "kernel") o.kernel = v.get<std::string>();
        else if (key == "samples") o.samples = v.get<int>();
        else if (key == "dim") o.dim = v.get<int>();
        else if (key == "seed") o.seed = v.get<std::uint64_t>();
        else if (key == "t") o.t = v.get<double>();
        else if (key == "k") o.k = v.get<double>();
        else if (key == "method") o.method = v.get<std::string>();
        else if (key == "n") o.n = v.get<int>();
        else if (key == "max_r") o.max_r = v.get<double>();
        else if (key == "runs") o.runs = v.get<int>();
        else if (key == "window") o.window = v.get<int>();
        else if (key == "stencil_eps") o.stencil_eps = v.get<double>();
        else if (key == "tol") o.multi.tol = v.get<double>();
        else if (key == "max_iters") o.multi.max_iters = v.get<int>();
        else throw Error(ErrorCode::InvalidArgument,
                         "unknown verify option '" + key + "'");
      }
    } catch (const json::type_error& e) {
      throw Error(ErrorCode::ParseError,
                  std::string("bad verify option type: ") + e.what());
    }
    return o;
  }
};

}  // namespace

extern "C" {

const char* mm_version(void) { return "0.1.0"; }

const char* mm_status_name(mm_status status) {
  switch (status) {
    case MM_OK: return "OK";
    case MM_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case MM_ERR_NOT_SQUARE: return "NotSquare";
    case MM_ERR_NOT_POSITIVE_DEFINITE: return "NotPositiveDefinite";
    case MM_ERR_DIMENSION_MISMATCH: return "DimensionMismatch";
    case MM_ERR_NON_POSITIVE_RESULT: return "NonPositiveResult";
    case MM_ERR_SINGULAR_CONGRUENCE: return "SingularCongruence";
    case MM_ERR_WEIGHT: return "WeightError";
    case MM_ERR_MAX_DEPTH_EXCEEDED: return "MaxDepthExceeded";
    case MM_ERR_MAX_ITERS_EXCEEDED: return "MaxItersExceeded";
    case MM_ERR_INSUFFICIENT_STEPS: return "InsufficientSteps";
    case MM_ERR_UNSTABLE_ESTIMATE: return "UnstableEstimate";
    case MM_ERR_PARSE: return "ParseError";
    case MM_ERR_IO: return "IoError";
    case MM_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* mm_last_error(void) { return last_error.c_str(); }

void mm_string_free(char* s) { delete[] s; }

void mm_weighted_config_default(mm_weighted_config* cfg) {
  if (cfg == nullptr) return;
  const matmean::WeightedMeanConfig d;
  cfg->tol = d.tol;
  cfg->max_depth = d.max_depth;
  cfg->dyadic_shortcut = d.dyadic_shortcut ? 1 : 0;
}

void mm_multi_config_default(mm_multi_config* cfg) {
  if (cfg == nullptr) return;
  const matmean::MultiMeanConfig d;
  cfg->tol = d.tol;
  cfg->max_iters = d.max_iters;
  cfg->max_n = d.max_n;
  cfg->parallel = d.parallel ? 1 : 0;
  mm_weighted_config_default(&cfg->inner);
}

mm_status mm_matrix_create(int dim, const double* row_major, mm_matrix** out) {
  return guarded([&] {
    require(out != nullptr && row_major != nullptr, "null argument");
    require(dim >= 1, "dim must be >= 1");
    matmean::Matrix raw(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) raw(i, j) = row_major[i * dim + j];
    }
    *out = wrap(matmean::SpdMatrix::validate(raw));
  });
}

mm_status mm_matrix_load(const char* path, mm_matrix** out) {
  return guarded([&] {
    require(out != nullptr && path != nullptr, "null argument");
    auto file = matmean::io::parse_matrix_file(path);
    *out = new mm_matrix{std::move(file.matrix), file.label.value_or(""),
                         file.label.has_value(), file.asymmetry_warning()};
  });
}

mm_status mm_matrix_parse(const char* json_text, mm_matrix** out) {
  return guarded([&] {
    require(out != nullptr && json_text != nullptr, "null argument");
    auto file = matmean::io::parse_matrix_text(json_text);
    *out = new mm_matrix{std::move(file.matrix), file.label.value_or(""),
                         file.label.has_value(), file.asymmetry_warning()};
  });
}

void mm_matrix_free(mm_matrix* m) { delete m; }

int mm_matrix_dim(const mm_matrix* m) {
  return m == nullptr ? 0 : m->value.dim();
}

mm_status mm_matrix_data(const mm_matrix* m, double* out, size_t len) {
  return guarded([&] {
    require(m != nullptr && out != nullptr, "null argument");
    const int dim = m->value.dim();
    require(len >= static_cast<size_t>(dim) * static_cast<size_t>(dim),
            "output buffer too small");
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) out[i * dim + j] = m->value(i, j);
    }
  });
}

const char* mm_matrix_label(const mm_matrix* m) {
  return (m != nullptr && m->has_label) ? m->label.c_str() : nullptr;
}

mm_status mm_matrix_set_label(mm_matrix* m, const char* label) {
  return guarded([&] {
    require(m != nullptr, "null argument");
    m->has_label = label != nullptr;
    m->label = label != nullptr ? label : "";
  });
}

int mm_matrix_asymmetry_warning(const mm_matrix* m) {
  return (m != nullptr && m->asymmetry_warning) ? 1 : 0;
}

mm_status mm_matrix_to_json(const mm_matrix* m, char** out) {
  return guarded([&] {
    require(m != nullptr && out != nullptr, "null argument");
    std::optional<std::string> label;
    if (m->has_label) label = m->label;
    *out = dup_string(matmean::io::format_matrix(m->value, label));
  });
}

mm_status mm_kernel_parse(const char* name, mm_kernel** out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "null argument");
    *out = new mm_kernel{matmean::MeanKernel::parse(name)};
  });
}

void mm_kernel_free(mm_kernel* k) { delete k; }

const char* mm_kernel_label(const mm_kernel* k) {
  return k == nullptr ? nullptr : k->value.label().c_str();
}

mm_status mm_mean2(const mm_kernel* kernel, const mm_matrix* a,
                   const mm_matrix* b, mm_matrix** out) {
  return guarded([&] {
    require(kernel != nullptr && a != nullptr && b != nullptr &&
                out != nullptr,
            "null argument");
    *out = wrap(matmean::mean2(kernel->value, a->value, b->value));
  });
}

mm_status mm_weighted_mean(const mm_kernel* kernel, double t,
                           const mm_matrix* a, const mm_matrix* b,
                           const mm_weighted_config* cfg, int full_trace,
                           mm_matrix** out, char** trace_json) {
  return guarded([&] {
    require(kernel != nullptr && a != nullptr && b != nullptr &&
                out != nullptr,
            "null argument");
    try {
      auto result = matmean::weighted_mean(kernel->value, t, a->value,
                                           b->value, to_cpp(cfg));
      if (trace_json != nullptr) {
        *trace_json = dup_string(
            matmean::io::weighted_trace_to_json(kernel->value.label(), t,
                                                result.trace, full_trace != 0)
                .dump(2));
      }
      *out = wrap(std::move(result.value));
    } catch (const matmean::MaxDepthExceeded& e) {
      if (trace_json != nullptr) {
        *trace_json = dup_string(
            matmean::io::weighted_trace_to_json(kernel->value.label(), t,
                                                e.trace(), full_trace != 0)
                .dump(2));
      }
      throw;
    }
  });
}

mm_status mm_nmean(mm_method method, const mm_kernel* kernel,
                   const mm_matrix* const* xs, size_t n,
                   const mm_multi_config* cfg, mm_matrix** out,
                   mm_trace** trace) {
  return guarded([&] {
    require(kernel != nullptr && xs != nullptr && out != nullptr,
            "null argument");
    std::vector<matmean::SpdMatrix> inputs;
    inputs.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      require(xs[i] != nullptr, "null matrix in input list");
      inputs.push_back(xs[i]->value);
    }
    try {
      auto result =
          matmean::n_mean(to_cpp(method), kernel->value, inputs, to_cpp(cfg));
      if (trace != nullptr) *trace = new mm_trace{std::move(result.trace)};
      *out = wrap(std::move(result.limit));
    } catch (const matmean::MaxItersExceeded& e) {
      if (trace != nullptr) *trace = new mm_trace{e.trace()};
      throw;
    }
  });
}

void mm_trace_free(mm_trace* t) { delete t; }

size_t mm_trace_steps(const mm_trace* t) {
  return t == nullptr ? 0 : t->value.steps.size();
}

int mm_trace_converged(const mm_trace* t) {
  return (t != nullptr && t->value.converged) ? 1 : 0;
}

mm_status mm_trace_step(const mm_trace* t, size_t step, double* a, double* e,
                        double* r_diam) {
  return guarded([&] {
    require(t != nullptr, "null argument");
    require(step < t->value.steps.size(), "step index out of range");
    const auto& s = t->value.steps[step];
    if (a != nullptr) *a = s.a;
    if (e != nullptr) *e = s.e;
    if (r_diam != nullptr) *r_diam = s.r_diam;
  });
}

mm_status mm_trace_to_json(const mm_trace* t, int full, char** out) {
  return guarded([&] {
    require(t != nullptr && out != nullptr, "null argument");
    *out = dup_string(matmean::io::trace_to_json(t->value, full != 0).dump(2));
  });
}

mm_status mm_trace_load(const char* path, mm_trace** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    const std::string text = matmean::io::read_text_file(path);
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError,
                  std::string(path) + ": malformed JSON: " + e.what());
    }
    *out = new mm_trace{matmean::io::trace_from_json(j)};
  });
}

mm_status mm_trace_centroid_drift(const mm_trace* t, const char* pullback,
                                  char** out) {
  return guarded([&] {
    require(t != nullptr && pullback != nullptr && out != nullptr,
            "null argument");
    for (const auto& s : t->value.steps) {
      require(!s.iterates.empty(), "trace has no iterates");
    }
    const auto drift =
        matmean::centroid_drift(t->value, pullback_by_name(pullback));
    *out = dup_string(json(drift).dump());
  });
}

mm_status mm_estimate_order(const mm_trace* t, int window, char** report_json) {
  return guarded([&] {
    require(t != nullptr && report_json != nullptr, "null argument");
    for (const auto& s : t->value.steps) {
      require(!s.iterates.empty(),
              "trace has no iterates (write it with full iterates)");
    }
    const auto report = matmean::estimate_order(t->value, window);
    *report_json = dup_string(matmean::io::to_json(report).dump(2));
  });
}

mm_status mm_verify(const char* check, const char* options_json,
                    char** report_json) {
  return guarded([&] {
    require(check != nullptr && report_json != nullptr, "null argument");
    const VerifyOptions o = VerifyOptions::parse(options_json);
    const auto kernel = matmean::MeanKernel::parse(o.kernel);
    const std::string which = check;
    json report;
    if (which == "sandwich") {
      report = matmean::io::to_json(
          matmean::verify_sandwich(kernel, o.samples, o.dim, o.seed, o.t));
    } else if (which == "trace-ineq") {
      report = matmean::io::to_json(matmean::verify_trace_inequality(
          kernel, o.k, o.t, o.samples, o.dim, o.seed));
    } else if (which == "centroid") {
      report = matmean::io::to_json(
          matmean::verify_centroid(kernel, matmean::parse_method(o.method),
                                   o.samples, o.n, o.dim, o.seed, o.multi));
    } else if (which == "order") {
      report = matmean::io::to_json(matmean::verify_order(
          kernel, matmean::parse_method(o.method), o.n, o.dim, o.max_r, o.runs,
          o.seed, o.multi, o.window));
    } else if (which == "b2") {
      report = matmean::io::to_json(
          matmean::estimate_b2(kernel, {}, o.stencil_eps));
    } else {
      throw Error(ErrorCode::InvalidArgument,
                  "unknown check '" + which +
                      "' (sandwich|trace-ineq|centroid|order|b2)");
    }
    *report_json = dup_string(report.dump(2));
  });
}

}  // extern "C"
