#include "lpjohn/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace lpjohn {

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(where + ": missing field \"" + key + "\"");
  }
  return j.at(key);
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + " must be a number");
  return j.get<double>();
}

Vector vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw InputError(where + " must be a nonempty list of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], where);
  return v;
}

std::vector<Vector> points_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw InputError(where + " must be a nonempty list of points");
  std::vector<Vector> out;
  for (const auto& p : j) out.push_back(vector_from_json(p, where));
  for (const auto& p : out) {
    if (p.size() != out.front().size()) throw InputError(where + ": points differ in dimension");
  }
  return out;
}

ConvexBody body_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("body must be an object");
  if (j.contains("vertices")) return ConvexBody::from_vertices(points_from_json(j["vertices"], "body.vertices"));
  if (j.contains("normals")) {
    const auto normals = points_from_json(j["normals"], "body.normals");
    const Vector offsets = vector_from_json(field(j, "offsets", "body"), "body.offsets");
    std::vector<double> off(offsets.data(), offsets.data() + offsets.size());
    return ConvexBody::from_halfspaces(normals, off);
  }
  throw InputError("body needs \"vertices\" or \"normals\"/\"offsets\"");
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InputError("matrix must be a nonempty list");
  if (j.front().is_array()) {
    const auto n = static_cast<Eigen::Index>(j.size());
    Matrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto& row = j[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        throw InputError("matrix must be square");
      }
      for (Eigen::Index c = 0; c < n; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], "matrix entry");
    }
    return m;
  }
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(j.size()))));
  if (n * n != static_cast<Eigen::Index>(j.size())) throw InputError("flat matrix length must be a square");
  Matrix m(n, n);
  for (Eigen::Index k = 0; k < n * n; ++k) m(k / n, k % n) = number(j[static_cast<std::size_t>(k)], "matrix entry");
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

LogConcaveFunction function_from_json(const Json& spec) {
  const std::string type = [&] {
    const Json& t = field(spec, "type", "function spec");
    if (!t.is_string()) throw InputError("function spec: \"type\" must be a string");
    return t.get<std::string>();
  }();
  if (type == "gaussian") {
    const Matrix q = matrix_from_json(field(spec, "Q", "gaussian"));
    try {
      return LogConcaveFunction::gaussian(SpdMatrix(q));
    } catch (const InputError& e) {
      throw InputError(std::string("gaussian.Q: ") + e.what());
    }
  }
  if (type == "gauge_power") {
    const double q = number(field(spec, "q", "gauge_power"), "gauge_power.q");
    return LogConcaveFunction::gauge_power(body_from_json(field(spec, "body", "gauge_power")), q);
  }
  if (type == "indicator") {
    return LogConcaveFunction::indicator(body_from_json(field(spec, "body", "indicator")));
  }
  if (type == "grid") {
    const Json& g = field(spec, "grid", "grid");
    const double r = number(field(g, "half_width", "grid"), "grid.half_width");
    const Json& npa = field(g, "points_per_axis", "grid");
    if (!npa.is_number_integer()) throw InputError("grid.points_per_axis must be an integer");
    const int n = npa.get<int>();
    const Json& vals = field(g, "values", "grid");
    if (!vals.is_array()) throw InputError("grid.values must be a list");
    std::vector<double> values;
    values.reserve(vals.size());
    for (const auto& v : vals) values.push_back(number(v, "grid value"));
    int dim = 0;
    std::size_t count = 1;
    while (count < values.size() && dim < kMaxDim) {
      count *= static_cast<std::size_t>(n);
      ++dim;
    }
    if (n < 3 || count != values.size() || dim < 1) {
      throw InputError("grid.values must hold points_per_axis^n values for n in {1, 2, 3}");
    }
    if (g.contains("dim") && g["dim"] != dim) throw InputError("grid.dim disagrees with the value count");
    return LogConcaveFunction::from_grid(Grid(dim, r, n, std::move(values)));
  }
  throw InputError("function spec: unknown type \"" + type + "\"");
}

LogConcaveFunction function_from_file(const std::string& path, Json* spec_out) {
  Json spec = read_json_file(path);
  LogConcaveFunction f = function_from_json(spec);
  if (spec_out != nullptr) *spec_out = std::move(spec);
  return f;
}

Json real_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double real_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    if (s == "nan") return std::nan("");
  }
  throw InputError("expected a number or \"inf\"");
}

double parse_p(const std::string& text) {
  if (text == "inf") return kInfinity;
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(p)) {
    throw InputError("p must be a decimal number or \"inf\", got \"" + text + "\"");
  }
  if (p < 1.0) throw InputError("p must be at least 1");
  return p;
}

Json to_json(const SolverResult& r) {
  Json trace = Json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"iteration", t.iteration},
                     {"objective", real_to_json(t.objective)},
                     {"residual", real_to_json(t.residual)}});
  }
  return Json{{"p", real_to_json(r.p)},
              {"Q_bar", matrix_to_json(r.Q_bar.matrix())},
              {"delta_bar", real_to_json(r.delta_bar)},
              {"E_p", {{"Q", matrix_to_json(r.E_p.Q.matrix())}, {"mass", r.E_p.mass()}}},
              {"kkt_residual", real_to_json(r.kkt_residual)},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"excluded_mass", r.excluded_mass},
              {"cloud_size", r.cloud_size},
              {"trace", std::move(trace)}};
}

SolverResult solver_result_from_json(const Json& j) {
  SolverResult r;
  r.p = real_from_json(j.at("p"));
  r.Q_bar = SpdMatrix(matrix_from_json(j.at("Q_bar")));
  r.delta_bar = real_from_json(j.at("delta_bar"));
  r.E_p = GaussianEllipsoid{SpdMatrix(matrix_from_json(j.at("E_p").at("Q")))};
  r.kkt_residual = real_from_json(j.at("kkt_residual"));
  r.iterations = j.at("iterations").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.excluded_mass = j.at("excluded_mass").get<double>();
  r.cloud_size = j.at("cloud_size").get<std::size_t>();
  for (const auto& t : j.at("trace")) {
    r.trace.push_back({t.at("iteration").get<int>(), real_from_json(t.at("objective")),
                       real_from_json(t.at("residual"))});
  }
  return r;
}

Json to_json(const VariationReport& r) {
  return Json{{"p", real_to_json(r.p)},
              {"delta_Jp", r.delta_Jp ? real_to_json(*r.delta_Jp) : Json(nullptr)},
              {"normalized", real_to_json(r.normalized)},
              {"entropy_mass_used", real_to_json(r.entropy_mass_used)},
              {"cloud_size", r.cloud_size},
              {"excluded_mass", r.excluded_mass},
              {"origin_mass", r.origin_mass},
              {"unbounded", r.unbounded},
              {"diagnostic", r.diagnostic}};
}

VariationReport variation_report_from_json(const Json& j) {
  VariationReport r;
  r.p = real_from_json(j.at("p"));
  if (!j.at("delta_Jp").is_null()) r.delta_Jp = real_from_json(j.at("delta_Jp"));
  r.normalized = real_from_json(j.at("normalized"));
  r.entropy_mass_used = real_from_json(j.at("entropy_mass_used"));
  r.cloud_size = j.at("cloud_size").get<std::size_t>();
  r.excluded_mass = j.at("excluded_mass").get<double>();
  r.origin_mass = j.at("origin_mass").get<double>();
  r.unbounded = j.at("unbounded").get<bool>();
  r.diagnostic = j.at("diagnostic").get<std::string>();
  return r;
}

Json to_json(const validation::InequalityRecord& r) {
  return Json{{"name", r.name},
              {"function", r.function},
              {"p", real_to_json(r.p)},
              {"statement", r.statement},
              {"lhs", real_to_json(r.lhs)},
              {"rhs", real_to_json(r.rhs)},
              {"margin", real_to_json(r.margin)},
              {"pass", r.pass},
              {"tolerance_used", real_to_json(r.tolerance_used)},
              {"diagnostic", r.diagnostic}};
}

validation::InequalityRecord record_from_json(const Json& j) {
  validation::InequalityRecord r;
  r.name = j.at("name").get<std::string>();
  r.function = j.at("function").get<std::string>();
  r.p = real_from_json(j.at("p"));
  r.statement = j.at("statement").get<std::string>();
  r.lhs = real_from_json(j.at("lhs"));
  r.rhs = real_from_json(j.at("rhs"));
  r.margin = real_from_json(j.at("margin"));
  r.pass = j.at("pass").get<bool>();
  r.tolerance_used = real_from_json(j.at("tolerance_used"));
  r.diagnostic = j.at("diagnostic").get<std::string>();
  return r;
}

Json to_json(const validation::SuiteReport& r) {
  Json records = Json::array();
  for (const auto& rec : r.records) records.push_back(to_json(rec));
  return Json{{"passed", r.passed},
              {"failed", r.failed},
              {"all_pass", r.all_pass()},
              {"records", std::move(records)}};
}

validation::SuiteReport suite_report_from_json(const Json& j) {
  validation::SuiteReport r;
  r.passed = j.at("passed").get<std::size_t>();
  r.failed = j.at("failed").get<std::size_t>();
  for (const auto& rec : j.at("records")) r.records.push_back(record_from_json(rec));
  return r;
}

Json to_json(const ResultDocument& doc) {
  return Json{{"schema_version", doc.schema_version},
              {"command", doc.command},
              {"input_spec", doc.input_spec},
              {"outputs", doc.outputs},
              {"provenance",
               {{"resolution", doc.provenance.resolution},
                {"seed", doc.provenance.seed},
                {"tolerances", doc.provenance.tolerances},
                {"wall_time_ms", doc.provenance.wall_time_ms}}}};
}

ResultDocument result_document_from_json(const Json& j) {
  ResultDocument doc;
  if (!j.contains("schema_version")) throw InputError("result document lacks schema_version");
  doc.schema_version = j.at("schema_version").get<std::string>();
  doc.command = j.at("command").get<std::string>();
  doc.input_spec = j.at("input_spec");
  doc.outputs = j.at("outputs");
  const Json& p = j.at("provenance");
  doc.provenance.resolution = p.at("resolution").get<int>();
  doc.provenance.seed = p.at("seed").get<std::uint64_t>();
  doc.provenance.tolerances = p.at("tolerances");
  doc.provenance.wall_time_ms = p.at("wall_time_ms").get<double>();
  return doc;
}

}  // namespace lpjohn
