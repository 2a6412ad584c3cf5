#pragma once

// Function-spec documents and result documents (JSON), plus their parsers.

#include <string>

#include "json.hpp"
#include "lpjohn/validation.hpp"

namespace lpjohn {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";

/// Function spec:
///   {"type": "gaussian", "Q": [[...], ...]}
///   {"type": "gauge_power", "q": 2, "body": {"vertices": [[...], ...]}}
///   {"type": "gauge_power", "q": 2, "body": {"normals": [[...]], "offsets": [...]}}
///   {"type": "indicator", "body": {...}}
///   {"type": "grid", "grid": {"half_width": R, "points_per_axis": N, "values": [...]}}
/// Matrices are lists of rows; a flat row-major list of n^2 numbers is also
/// accepted. Grid values are flattened row-major (last axis fastest) and the
/// dimension is inferred from their count. Throws InputError naming the field.
LogConcaveFunction function_from_json(const Json& spec);
LogConcaveFunction function_from_file(const std::string& path, Json* spec_out = nullptr);
Json read_json_file(const std::string& path);

/// Reals that may be infinite are written as numbers or the strings "inf",
/// "-inf", "nan".
Json real_to_json(double v);
double real_from_json(const Json& j);

/// "inf" or a decimal number; anything else is an InputError.
double parse_p(const std::string& text);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json to_json(const SolverResult& r);
SolverResult solver_result_from_json(const Json& j);
Json to_json(const VariationReport& r);
VariationReport variation_report_from_json(const Json& j);
Json to_json(const validation::InequalityRecord& r);
validation::InequalityRecord record_from_json(const Json& j);
Json to_json(const validation::SuiteReport& r);
validation::SuiteReport suite_report_from_json(const Json& j);

struct Provenance {
  int resolution = 0;
  std::uint64_t seed = 0;
  Json tolerances = Json::object();
  double wall_time_ms = 0.0;
};

struct ResultDocument {
  std::string schema_version = kSchemaVersion;
  std::string command;
  Json input_spec = Json::object();
  Json outputs = Json::object();
  Provenance provenance;
};

Json to_json(const ResultDocument& doc);
ResultDocument result_document_from_json(const Json& j);

}  // namespace lpjohn
