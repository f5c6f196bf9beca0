#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "matmean/diagnostics.hpp"
#include "matmean/multivariate.hpp"
#include "matmean/weighted.hpp"

namespace matmean::io {

/// Relative asymmetry |M - M^T|_F / |M|_F above which loading warns.
inline constexpr double kAsymmetryWarnLevel = 1e-9;

struct MatrixFile {
  SpdMatrix matrix;
  std::optional<std::string> label;
  /// |M - M^T|_F / |M|_F of the raw data before symmetrization.
  double asymmetry = 0.0;

  bool asymmetry_warning() const { return asymmetry > kAsymmetryWarnLevel; }
};

/// Parses {"dim": r, "data": [r*r reals, row-major], "label": optional}.
/// Throws ParseError with the offending field, NotPositiveDefinite from
/// validation.
MatrixFile parse_matrix_text(std::string_view text);
MatrixFile parse_matrix_file(const std::filesystem::path& path);

/// Matrix file text with every real at 17 significant digits.
std::string format_matrix(const SpdMatrix& m,
                          const std::optional<std::string>& label = {});

std::string format_real(double value);

nlohmann::json matrix_to_json(const SpdMatrix& m);
SpdMatrix matrix_from_json(const nlohmann::json& j);

/// Per-step l, a, e, r_diam; iterates only when `full` is set. The limit is
/// always written when present.
nlohmann::json trace_to_json(const IterationTrace& trace, bool full);
/// Inverse of trace_to_json. Steps written without iterates come back with
/// empty iterate lists.
IterationTrace trace_from_json(const nlohmann::json& j);

/// {"kernel", "t", "steps": [{step, a, b, r_gap[, lower, upper]}]}.
nlohmann::json weighted_trace_to_json(const std::string& kernel, double t,
                                      std::span<const WeightedStep> steps,
                                      bool full);

nlohmann::json to_json(const RateReport& r);
nlohmann::json to_json(const ExpansionReport& r);
nlohmann::json to_json(const SandwichReport& r);
nlohmann::json to_json(const TraceInequalityReport& r);
nlohmann::json to_json(const CentroidReport& r);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace matmean::io
