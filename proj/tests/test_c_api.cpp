#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "matmean/matmean.h"

using nlohmann::json;

namespace {

mm_matrix* make(int dim, std::vector<double> data) {
  mm_matrix* m = nullptr;
  REQUIRE(mm_matrix_create(dim, data.data(), &m) == MM_OK);
  return m;
}

mm_kernel* kernel(const char* name) {
  mm_kernel* k = nullptr;
  REQUIRE(mm_kernel_parse(name, &k) == MM_OK);
  return k;
}

std::vector<double> data(const mm_matrix* m) {
  const int dim = mm_matrix_dim(m);
  std::vector<double> out(static_cast<size_t>(dim * dim));
  REQUIRE(mm_matrix_data(m, out.data(), out.size()) == MM_OK);
  return out;
}

json take_json(char* s) {
  REQUIRE(s != nullptr);
  json j = json::parse(s);
  mm_string_free(s);
  return j;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(mm_status_name(MM_OK)) == "OK");
  CHECK(std::string(mm_status_name(MM_ERR_NOT_POSITIVE_DEFINITE)) ==
        "NotPositiveDefinite");
  CHECK(std::strlen(mm_version()) > 0);
}

TEST_CASE("matrix handles") {
  mm_matrix* m = nullptr;
  const double indefinite[] = {1, 2, 2, 1};
  CHECK(mm_matrix_create(2, indefinite, &m) == MM_ERR_NOT_POSITIVE_DEFINITE);
  CHECK(m == nullptr);
  CHECK(std::string(mm_last_error()).find("-1") != std::string::npos);
  CHECK(mm_matrix_create(0, indefinite, &m) == MM_ERR_INVALID_ARGUMENT);
  CHECK(mm_matrix_create(2, nullptr, &m) == MM_ERR_INVALID_ARGUMENT);

  CHECK(mm_matrix_parse(R"({"dim":2,"data":[1,2,3]})", &m) == MM_ERR_PARSE);
  CHECK(mm_matrix_load("/nonexistent/x.json", &m) == MM_ERR_IO);

  REQUIRE(mm_matrix_parse(R"({"dim":2,"data":[2,1.5,0.5,2],"label":"p"})", &m) ==
          MM_OK);
  CHECK(mm_matrix_asymmetry_warning(m) == 1);
  CHECK(std::string(mm_matrix_label(m)) == "p");
  CHECK(data(m) == std::vector<double>{2, 1, 1, 2});
  double small[2];
  CHECK(mm_matrix_data(m, small, 2) == MM_ERR_INVALID_ARGUMENT);
  REQUIRE(mm_matrix_set_label(m, "q") == MM_OK);
  const json j = take_json([&] {
    char* s = nullptr;
    REQUIRE(mm_matrix_to_json(m, &s) == MM_OK);
    return s;
  }());
  CHECK(j["label"] == "q");
  CHECK(j["dim"] == 2);
  mm_matrix_free(m);
}

TEST_CASE("kernel handles") {
  mm_kernel* k = nullptr;
  CHECK(mm_kernel_parse("median", &k) == MM_ERR_INVALID_ARGUMENT);
  k = kernel("kfamily:1.5");
  CHECK(std::string(mm_kernel_label(k)) == "kfamily:1.5");
  mm_kernel_free(k);
}

TEST_CASE("two-variable and weighted means") {
  mm_kernel* geo = kernel("geometric");
  mm_matrix* a = make(2, {1, 0, 0, 4});
  mm_matrix* b = make(2, {4, 0, 0, 1});
  mm_matrix* out = nullptr;
  REQUIRE(mm_mean2(geo, a, b, &out) == MM_OK);
  const auto d = data(out);
  CHECK(d[0] == doctest::Approx(2.0));
  CHECK(d[3] == doctest::Approx(2.0));
  mm_matrix_free(out);

  mm_matrix* c = make(3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  CHECK(mm_mean2(geo, a, c, &out) == MM_ERR_DIMENSION_MISMATCH);

  mm_kernel* ar = kernel("arithmetic");
  char* trace = nullptr;
  REQUIRE(mm_weighted_mean(ar, 0.25, a, b, nullptr, 0, &out, &trace) == MM_OK);
  CHECK(data(out)[0] == doctest::Approx(1.75));
  const json tj = take_json(trace);
  CHECK(tj["kernel"] == "arithmetic");
  CHECK(tj["steps"].size() == 3);
  CHECK(tj["steps"][2]["step"] == 2);
  mm_matrix_free(out);

  CHECK(mm_weighted_mean(ar, 1.5, a, b, nullptr, 0, &out, nullptr) ==
        MM_ERR_INVALID_ARGUMENT);

  mm_weighted_config cfg;
  mm_weighted_config_default(&cfg);
  CHECK(cfg.tol == 1e-12);
  CHECK(cfg.max_depth == 64);
  cfg.max_depth = 3;
  trace = nullptr;
  CHECK(mm_weighted_mean(geo, 1.0 / 3.0, a, b, &cfg, 1, &out, &trace) ==
        MM_ERR_MAX_DEPTH_EXCEEDED);
  const json partial = take_json(trace);
  CHECK(partial["steps"].size() == 4);
  CHECK(partial["steps"][0].contains("lower"));

  mm_matrix_free(a);
  mm_matrix_free(b);
  mm_matrix_free(c);
  mm_kernel_free(geo);
  mm_kernel_free(ar);
}

TEST_CASE("n-variable means and traces") {
  mm_kernel* geo = kernel("geometric");
  mm_matrix* xs[3] = {make(1, {1}), make(1, {1}), make(1, {8})};
  mm_matrix* out = nullptr;
  mm_trace* trace = nullptr;
  REQUIRE(mm_nmean(MM_METHOD_BMP, geo, xs, 3, nullptr, &out, &trace) == MM_OK);
  CHECK(data(out)[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(mm_trace_converged(trace) == 1);
  const size_t steps = mm_trace_steps(trace);
  CHECK(steps >= 2);
  double a0 = 0.0;
  double e0 = 0.0;
  REQUIRE(mm_trace_step(trace, 0, &a0, &e0, nullptr) == MM_OK);
  CHECK(a0 == 66.0);
  CHECK(e0 == 98.0);
  CHECK(mm_trace_step(trace, steps, &a0, nullptr, nullptr) ==
        MM_ERR_INVALID_ARGUMENT);

  char* s = nullptr;
  REQUIRE(mm_trace_centroid_drift(trace, "arithmetic", &s) == MM_OK);
  const json drift = take_json(s);
  CHECK(drift.size() == steps);
  CHECK(mm_trace_centroid_drift(trace, "cubic", &s) == MM_ERR_INVALID_ARGUMENT);

  REQUIRE(mm_trace_to_json(trace, 1, &s) == MM_OK);
  const json tj = take_json(s);
  CHECK(tj["method"] == "BMP");
  mm_trace_free(trace);
  mm_matrix_free(out);

  mm_multi_config cfg;
  mm_multi_config_default(&cfg);
  CHECK(cfg.tol == 1e-10);
  CHECK(cfg.max_iters == 200);
  cfg.max_iters = 1;
  trace = nullptr;
  CHECK(mm_nmean(MM_METHOD_ALM, geo, xs, 3, &cfg, &out, &trace) ==
        MM_ERR_MAX_ITERS_EXCEEDED);
  REQUIRE(trace != nullptr);
  CHECK(mm_trace_converged(trace) == 0);
  CHECK(mm_trace_steps(trace) == 2);
  mm_trace_free(trace);

  CHECK(mm_nmean(MM_METHOD_ALM, geo, xs, 1, nullptr, &out, nullptr) ==
        MM_ERR_INVALID_ARGUMENT);

  for (auto* x : xs) mm_matrix_free(x);
  mm_kernel_free(geo);
}

TEST_CASE("diagnostics through the C API") {
  char* s = nullptr;
  REQUIRE(mm_verify("sandwich", R"({"kernel":"geometric","samples":10,"seed":3})",
                    &s) == MM_OK);
  const json sw = take_json(s);
  CHECK(sw["lower_violations"] == 0);
  CHECK(sw["samples"] == 10);

  REQUIRE(mm_verify("b2", R"({"kernel":"harmonic"})", &s) == MM_OK);
  const json b2 = take_json(s);
  CHECK(b2["b2_estimate"].get<double>() == doctest::Approx(-0.25).epsilon(0.01));

  CHECK(mm_verify("sandwich", R"({"bogus":1})", &s) == MM_ERR_INVALID_ARGUMENT);
  CHECK(mm_verify("nonsense", nullptr, &s) == MM_ERR_INVALID_ARGUMENT);
  CHECK(mm_verify("sandwich", "{", &s) == MM_ERR_PARSE);
}
