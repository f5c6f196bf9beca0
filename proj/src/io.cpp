#include "matmean/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace matmean::io {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& what) {
  throw Error(ErrorCode::ParseError, what);
}

}  // namespace

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

MatrixFile parse_matrix_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    parse_fail(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) parse_fail("matrix file must be a JSON object");

  const auto dim_it = doc.find("dim");
  if (dim_it == doc.end()) parse_fail("field 'dim' is missing");
  if (!dim_it->is_number_integer() || dim_it->get<long long>() < 1) {
    parse_fail("field 'dim' must be an integer >= 1");
  }
  const long long dim = dim_it->get<long long>();
  if (dim > 4096) parse_fail("field 'dim' is unreasonably large");

  const auto data_it = doc.find("data");
  if (data_it == doc.end()) parse_fail("field 'data' is missing");
  if (!data_it->is_array()) parse_fail("field 'data' must be an array");
  if (static_cast<long long>(data_it->size()) != dim * dim) {
    std::ostringstream msg;
    msg << "field 'data' has " << data_it->size() << " entries, expected "
        << dim * dim << " for dim " << dim;
    parse_fail(msg.str());
  }

  const int r = static_cast<int>(dim);
  Matrix raw(r, r);
  for (int idx = 0; idx < r * r; ++idx) {
    const json& v = (*data_it)[static_cast<std::size_t>(idx)];
    if (!v.is_number()) {
      std::ostringstream msg;
      msg << "field 'data' entry " << idx << " is not a number";
      parse_fail(msg.str());
    }
    raw(idx / r, idx % r) = v.get<double>();
  }

  MatrixFile out{SpdMatrix::identity(1), std::nullopt, 0.0};
  if (const auto label_it = doc.find("label"); label_it != doc.end()) {
    if (!label_it->is_string()) parse_fail("field 'label' must be a string");
    out.label = label_it->get<std::string>();
  }
  const double norm = raw.norm();
  out.asymmetry = norm > 0.0 ? (raw - raw.transpose()).norm() / norm : 0.0;
  out.matrix = SpdMatrix::validate(raw);
  return out;
}

MatrixFile parse_matrix_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_matrix_text(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string format_matrix(const SpdMatrix& m,
                          const std::optional<std::string>& label) {
  std::string out = "{\"dim\": " + std::to_string(m.dim()) + ", \"data\": [";
  for (int i = 0; i < m.dim(); ++i) {
    for (int j = 0; j < m.dim(); ++j) {
      if (i != 0 || j != 0) out += ", ";
      out += format_real(m(i, j));
    }
  }
  out += "]";
  if (label) out += ", \"label\": " + json(*label).dump();
  out += "}\n";
  return out;
}

json matrix_to_json(const SpdMatrix& m) {
  json data = json::array();
  for (int i = 0; i < m.dim(); ++i) {
    for (int j = 0; j < m.dim(); ++j) data.push_back(m(i, j));
  }
  return {{"dim", m.dim()}, {"data", std::move(data)}};
}

SpdMatrix matrix_from_json(const json& j) {
  return parse_matrix_text(j.dump()).matrix;
}

json trace_to_json(const IterationTrace& trace, bool full) {
  json steps = json::array();
  for (const auto& s : trace.steps) {
    json step = {{"l", s.l}, {"a", s.a}, {"e", s.e}, {"r_diam", s.r_diam}};
    if (full) {
      json iterates = json::array();
      for (const auto& x : s.iterates) iterates.push_back(matrix_to_json(x));
      step["iterates"] = std::move(iterates);
    }
    steps.push_back(std::move(step));
  }
  json out = {{"method", std::string(method_name(trace.method))},
              {"kernel", trace.kernel},
              {"n", trace.n},
              {"converged", trace.converged},
              {"steps", std::move(steps)}};
  out["limit"] = trace.limit ? matrix_to_json(*trace.limit) : json(nullptr);
  return out;
}

IterationTrace trace_from_json(const json& j) {
  try {
    IterationTrace trace;
    trace.method = parse_method(j.at("method").get<std::string>());
    trace.kernel = j.at("kernel").get<std::string>();
    trace.n = j.at("n").get<int>();
    trace.converged = j.at("converged").get<bool>();
    for (const auto& s : j.at("steps")) {
      IterationStep step{s.at("l").get<int>(), {}, s.at("a").get<double>(),
                         s.at("e").get<double>(), s.at("r_diam").get<double>()};
      if (const auto it = s.find("iterates"); it != s.end()) {
        for (const auto& x : *it) step.iterates.push_back(matrix_from_json(x));
      }
      trace.steps.push_back(std::move(step));
    }
    if (const auto it = j.find("limit"); it != j.end() && !it->is_null()) {
      trace.limit = matrix_from_json(*it);
    }
    return trace;
  } catch (const json::exception& e) {
    parse_fail(std::string("bad trace file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) {
      parse_fail(std::string("bad trace file: ") + e.what());
    }
    throw;
  }
}

json weighted_trace_to_json(const std::string& kernel, double t,
                            std::span<const WeightedStep> steps, bool full) {
  json list = json::array();
  for (const auto& s : steps) {
    json step = {{"step", s.step}, {"a", s.a}, {"b", s.b}, {"r_gap", s.r_gap}};
    if (full) {
      step["lower"] = matrix_to_json(s.lower);
      step["upper"] = matrix_to_json(s.upper);
    }
    list.push_back(std::move(step));
  }
  return {{"kernel", kernel}, {"t", t}, {"steps", std::move(list)}};
}

json to_json(const RateReport& r) {
  return {{"check", "order"},
          {"method", std::string(method_name(r.method))},
          {"kernel", r.kernel},
          {"fitted_order", r.fitted_order},
          {"window", r.window},
          {"residual", r.residual},
          {"noise_floor", r.noise_floor},
          {"low_confidence", r.low_confidence},
          {"epsilons", r.epsilons}};
}

json to_json(const ExpansionReport& r) {
  return {{"check", "b2"},
          {"kernel", r.kernel},
          {"b2_estimate", r.b2_estimate},
          {"b2_half_stencil", r.b2_half_stencil},
          {"stencil_eps", r.stencil_eps},
          {"t_samples", r.t_samples},
          {"per_t", r.per_t},
          {"stable", r.stable}};
}

json to_json(const SandwichReport& r) {
  return {{"check", "sandwich"},
          {"kernel", r.kernel},
          {"t", r.t},
          {"samples", r.samples},
          {"dim", r.dim},
          {"seed", r.seed},
          {"lower_violations", r.lower_violations},
          {"upper_violations", r.upper_violations},
          {"worst_lower_margin", r.worst_lower_margin},
          {"worst_upper_margin", r.worst_upper_margin}};
}

json to_json(const TraceInequalityReport& r) {
  return {{"check", "trace-ineq"},
          {"kernel", r.kernel},
          {"k", r.k},
          {"t", r.t},
          {"samples", r.samples},
          {"dim", r.dim},
          {"seed", r.seed},
          {"violations", r.violations},
          {"worst_margin", r.worst_margin}};
}

json to_json(const CentroidReport& r) {
  return {{"check", "centroid"},
          {"kernel", r.kernel},
          {"method", std::string(method_name(r.method))},
          {"pullback", r.pullback},
          {"samples", r.samples},
          {"n", r.n},
          {"dim", r.dim},
          {"seed", r.seed},
          {"max_relative_drift", r.max_relative_drift},
          {"max_limit_error", r.max_limit_error}};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw Error(ErrorCode::IoError, "write failed for " + path.string());
  }
}

}  // namespace matmean::io
