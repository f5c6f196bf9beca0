// Command-line front end. Talks to the library only through matmean.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "matmean/matmean.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCompute = 1;
constexpr int kExitUsage = 2;

struct MatrixDeleter {
  void operator()(mm_matrix* m) const { mm_matrix_free(m); }
};
struct KernelDeleter {
  void operator()(mm_kernel* k) const { mm_kernel_free(k); }
};
struct TraceDeleter {
  void operator()(mm_trace* t) const { mm_trace_free(t); }
};
struct StringDeleter {
  void operator()(char* s) const { mm_string_free(s); }
};

using MatrixPtr = std::unique_ptr<mm_matrix, MatrixDeleter>;
using KernelPtr = std::unique_ptr<mm_kernel, KernelDeleter>;
using TracePtr = std::unique_ptr<mm_trace, TraceDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

// Carries the exit code out of a failing step.
struct Failure {
  int exit_code;
};

bool is_usage_status(mm_status s) {
  return s == MM_ERR_INVALID_ARGUMENT || s == MM_ERR_PARSE || s == MM_ERR_IO ||
         s == MM_ERR_NOT_SQUARE;
}

[[noreturn]] void fail(mm_status s, const std::string& context, int code) {
  std::cerr << "error: " << context << ": " << mm_status_name(s) << ": "
            << mm_last_error() << "\n";
  throw Failure{code};
}

// Errors while reading inputs are usage errors; errors while computing are
// computational unless they flag a bad argument.
void check_input(mm_status s, const std::string& context) {
  if (s != MM_OK) fail(s, context, kExitUsage);
}

void check_compute(mm_status s, const std::string& context) {
  if (s != MM_OK) {
    fail(s, context, is_usage_status(s) ? kExitUsage : kExitCompute);
  }
}

MatrixPtr load_matrix(const std::string& path) {
  mm_matrix* raw = nullptr;
  check_input(mm_matrix_load(path.c_str(), &raw), path);
  MatrixPtr m(raw);
  if (mm_matrix_asymmetry_warning(m.get()) != 0) {
    std::cerr << "warning: " << path
              << ": input asymmetric beyond 1e-9 relative; symmetrized\n";
  }
  return m;
}

KernelPtr load_kernel(const std::string& name) {
  mm_kernel* raw = nullptr;
  check_input(mm_kernel_parse(name.c_str(), &raw), "kernel");
  return KernelPtr(raw);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    throw Failure{kExitUsage};
  }
  out << text;
  if (!text.empty() && text.back() != '\n') out << "\n";
}

void emit_matrix(const mm_matrix* m, const std::string& out_path) {
  char* raw = nullptr;
  check_compute(mm_matrix_to_json(m, &raw), "serialize");
  StringPtr text(raw);
  emit(text.get(), out_path);
}

struct Common {
  std::string kernel = "geometric";
  std::string out;
  std::string trace;
  bool trace_full = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix means: two-variable kernels, weighted means, ALM/BMP "
               "n-variable extensions and diagnostics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mm_version());

  Common common;
  mm_weighted_config wcfg;
  mm_weighted_config_default(&wcfg);
  mm_multi_config mcfg;
  mm_multi_config_default(&mcfg);

  // mean2
  std::vector<std::string> mean2_files;
  auto* mean2 = app.add_subcommand("mean2", "Two-variable symmetric mean");
  mean2->add_option("--kernel", common.kernel, "Kernel name")
      ->capture_default_str();
  mean2->add_option("--out", common.out, "Write result here instead of stdout");
  mean2->add_option("files", mean2_files, "Matrix files A and B")
      ->required()
      ->expected(2);

  // wmean
  double t = 0.5;
  int no_shortcut = 0;
  std::vector<std::string> wmean_files;
  auto* wmean = app.add_subcommand("wmean", "Weighted mean M_t(A, B)");
  wmean->add_option("--kernel", common.kernel, "Kernel name")
      ->capture_default_str();
  wmean->add_option("-t,--weight", t, "Weight in [0, 1]")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  wmean->add_option("--tol", wcfg.tol, "Stop when R(A_n, B_n) - 1 <= tol")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  wmean->add_option("--max-depth", wcfg.max_depth, "Bisection cap")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  wmean->add_flag("--no-dyadic-shortcut", no_shortcut,
                  "Use t verbatim instead of snapping to a nearby dyadic");
  wmean->add_option("--out", common.out, "Write result here");
  wmean->add_option("--trace", common.trace, "Write step trace JSON here");
  wmean->add_flag("--trace-full", common.trace_full,
                  "Include iterates in the trace");
  wmean->add_option("files", wmean_files, "Matrix files A and B")
      ->required()
      ->expected(2);

  // nmean
  std::string method = "alm";
  std::vector<std::string> nmean_files;
  int parallel = 0;
  auto* nmean = app.add_subcommand("nmean", "n-variable ALM or BMP mean");
  nmean->add_option("--method", method, "alm or bmp")
      ->capture_default_str()
      ->check(CLI::IsMember({"alm", "bmp", "ALM", "BMP"}));
  nmean->add_option("--kernel", common.kernel, "Kernel name")
      ->capture_default_str();
  nmean->add_option("--tol", mcfg.tol, "Convergence tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  nmean->add_option("--max-iters", mcfg.max_iters, "Iteration cap per level")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  nmean->add_option("--max-n", mcfg.max_n, "Largest accepted n")
      ->capture_default_str();
  nmean->add_flag("--parallel", parallel,
                  "Evaluate the sub-means of a step concurrently");
  nmean->add_option("--out", common.out, "Write result here");
  nmean->add_option("--trace", common.trace, "Write iteration trace JSON here");
  nmean->add_flag("--trace-full", common.trace_full,
                  "Include iterates in the trace");
  nmean->add_option("files", nmean_files, "Matrix files X_1 ... X_n")
      ->required();

  // verify
  std::string check;
  nlohmann::json vopts = nlohmann::json::object();
  int samples = 100, dim = 3, n = 3, runs = 4, window = 4;
  unsigned long long seed = 0;
  double k = 2.0, max_r = 1.2, stencil_eps = 0.01, vtol = 1e-10;
  int vmax_iters = 200;
  auto* verify = app.add_subcommand("verify", "Run a verification check");
  verify->add_option("--check", check, "sandwich|trace-ineq|centroid|order|b2")
      ->required()
      ->check(CLI::IsMember(
          {"sandwich", "trace-ineq", "centroid", "order", "b2"}));
  verify->add_option("--kernel", common.kernel, "Kernel name")
      ->capture_default_str();
  verify->add_option("--samples", samples)->capture_default_str();
  verify->add_option("--dim", dim)->capture_default_str();
  verify->add_option("--seed", seed)->capture_default_str();
  auto* t_opt = verify->add_option("-t,--weight", t)->check(CLI::Range(0.0, 1.0));
  verify->add_option("--k", k)->capture_default_str()->check(
      CLI::Range(0.0, 2.0));
  verify->add_option("--method", method)
      ->capture_default_str()
      ->check(CLI::IsMember({"alm", "bmp", "ALM", "BMP"}));
  verify->add_option("--n", n)->capture_default_str();
  verify->add_option("--max-r", max_r, "Pairwise R bound for order runs")
      ->capture_default_str();
  verify->add_option("--runs", runs, "Pooled BMP runs for order")
      ->capture_default_str();
  verify->add_option("--window", window)->capture_default_str();
  verify->add_option("--stencil-eps", stencil_eps)->capture_default_str();
  verify->add_option("--tol", vtol)->capture_default_str();
  verify->add_option("--max-iters", vmax_iters)->capture_default_str();
  verify->add_option("--out", common.out, "Write report here");

  // rate
  std::string trace_in;
  auto* rate = app.add_subcommand(
      "rate", "Fit the convergence order of a trace written with --trace-full");
  rate->add_option("trace", trace_in, "Trace JSON file")->required();
  rate->add_option("--window", window)->capture_default_str();
  rate->add_option("--out", common.out, "Write report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*mean2) {
      const KernelPtr kernel = load_kernel(common.kernel);
      const MatrixPtr a = load_matrix(mean2_files[0]);
      const MatrixPtr b = load_matrix(mean2_files[1]);
      mm_matrix* raw = nullptr;
      check_compute(mm_mean2(kernel.get(), a.get(), b.get(), &raw), "mean2");
      const MatrixPtr result(raw);
      emit_matrix(result.get(), common.out);
    } else if (*wmean) {
      const KernelPtr kernel = load_kernel(common.kernel);
      const MatrixPtr a = load_matrix(wmean_files[0]);
      const MatrixPtr b = load_matrix(wmean_files[1]);
      wcfg.dyadic_shortcut = no_shortcut != 0 ? 0 : 1;
      mm_matrix* raw = nullptr;
      char* trace_raw = nullptr;
      const mm_status s = mm_weighted_mean(
          kernel.get(), t, a.get(), b.get(), &wcfg, common.trace_full ? 1 : 0,
          &raw, common.trace.empty() ? nullptr : &trace_raw);
      const StringPtr trace_text(trace_raw);
      if (trace_text) emit(trace_text.get(), common.trace);
      check_compute(s, "wmean");
      const MatrixPtr result(raw);
      emit_matrix(result.get(), common.out);
    } else if (*nmean) {
      const KernelPtr kernel = load_kernel(common.kernel);
      std::vector<MatrixPtr> owned;
      std::vector<const mm_matrix*> xs;
      for (const auto& f : nmean_files) {
        owned.push_back(load_matrix(f));
        xs.push_back(owned.back().get());
      }
      mcfg.parallel = parallel;
      const mm_method m =
          (method == "bmp" || method == "BMP") ? MM_METHOD_BMP : MM_METHOD_ALM;
      mm_matrix* raw = nullptr;
      mm_trace* trace_raw = nullptr;
      const mm_status s =
          mm_nmean(m, kernel.get(), xs.data(), xs.size(), &mcfg, &raw,
                   common.trace.empty() ? nullptr : &trace_raw);
      const TracePtr trace(trace_raw);
      if (trace) {
        char* text_raw = nullptr;
        check_compute(
            mm_trace_to_json(trace.get(), common.trace_full ? 1 : 0, &text_raw),
            "trace");
        const StringPtr text(text_raw);
        emit(text.get(), common.trace);
      }
      check_compute(s, "nmean");
      const MatrixPtr result(raw);
      emit_matrix(result.get(), common.out);
    } else if (*verify) {
      vopts["kernel"] = common.kernel;
      vopts["samples"] = samples;
      vopts["dim"] = dim;
      vopts["seed"] = seed;
      vopts["k"] = k;
      vopts["method"] = method;
      vopts["n"] = n;
      vopts["max_r"] = max_r;
      vopts["runs"] = runs;
      vopts["window"] = window;
      vopts["stencil_eps"] = stencil_eps;
      vopts["tol"] = vtol;
      vopts["max_iters"] = vmax_iters;
      if (t_opt->count() > 0) vopts["t"] = t;
      char* raw = nullptr;
      check_compute(mm_verify(check.c_str(), vopts.dump().c_str(), &raw),
                    "verify " + check);
      const StringPtr report(raw);
      emit(report.get(), common.out);
    } else if (*rate) {
      mm_trace* trace_raw = nullptr;
      check_input(mm_trace_load(trace_in.c_str(), &trace_raw), trace_in);
      const TracePtr trace(trace_raw);
      char* raw = nullptr;
      check_compute(mm_estimate_order(trace.get(), window, &raw), "rate");
      const StringPtr report(raw);
      emit(report.get(), common.out);
    }
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return kExitOk;
}
