// Acceptance run: one PASS/FAIL line per criterion. Optional arguments select
// criteria by number, e.g. `lpjohn_acceptance 3 9`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "lpjohn/commands.hpp"
#include "lpjohn/oracle.hpp"
#include "lpjohn/serialization.hpp"
#include "lpjohn/validation.hpp"
#include "oracles.hpp"

using namespace lpjohn;
namespace lt = lpjohn::testing;
namespace val = lpjohn::validation;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;  // printed below the verdict line

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures.push_back(what);
    }
  }
};

std::string num(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

const val::TestCorpus& corpus() {
  static const val::TestCorpus c = val::TestCorpus::builtin(7);
  return c;
}

const LogConcaveFunction& member(const std::string& name) {
  for (const auto& m : corpus().functions)
    if (m.name == name) return m.f;
  throw std::runtime_error("no corpus member " + name);
}

// The full suite is shared by the record-based criteria.
const val::SuiteReport& suite() {
  static const val::SuiteReport report = val::run_suite(corpus(), {});
  return report;
}

// Evaluates the records named `names`; `detail` summarizes the worst margin.
void from_records(Outcome& out, const std::set<std::string>& names,
                  const std::function<bool(const val::InequalityRecord&)>& filter = {}) {
  std::size_t count = 0;
  double worst = kInfinity;
  std::string worst_where;
  for (const auto& r : suite().records) {
    if (!names.count(r.name) || (filter && !filter(r))) continue;
    ++count;
    if (r.margin + r.tolerance_used < worst) {
      worst = r.margin + r.tolerance_used;
      worst_where = r.name + " " + r.function + " p=" + val::format_p(r.p);
    }
    out.require(r.pass, r.name + " " + r.function + " p=" + val::format_p(r.p) + " lhs=" +
                            num(r.lhs, 8) + " rhs=" + num(r.rhs, 8) + " tol=" +
                            num(r.tolerance_used, 3) +
                            (r.diagnostic.empty() ? "" : " (" + r.diagnostic + ")"));
  }
  out.require(count > 0, "no records found");
  out.detail = std::to_string(count) + " records, smallest slack " + num(worst, 3) + " at " +
               worst_where;
}

// 1. Gaussian fixed point.
Outcome gaussian_fixed_point() {
  Outcome out;
  std::mt19937_64 rng(7);
  double worst_q = 0.0, worst_m = 0.0;
  int solves = 0;
  for (int n = 1; n <= 3; ++n) {
    std::vector<Matrix> qs;
    for (double a : {1.0, 4.0, 9.0}) {
      Matrix q = Matrix::Identity(n, n);
      q(0, 0) = a;
      qs.push_back(q);
    }
    qs.push_back(lt::random_spd(n, rng));
    for (const Matrix& q : qs) {
      const auto f = LogConcaveFunction::gaussian(SpdMatrix(q));
      for (double p : {1.0, 2.0, 8.0, kInfinity}) {
        const std::string where = "n=" + std::to_string(n) + " Q00=" + num(q(0, 0)) + " p=" +
                                  val::format_p(p);
        try {
          const SolverResult r = solve_Ep(f, p);
          const double dq = lt::op_norm(r.E_p.Q.matrix() - q);
          const double dm = std::abs(r.E_p.mass() / lt::gaussian_mass(q) - 1.0);
          worst_q = std::max(worst_q, dq);
          worst_m = std::max(worst_m, dm);
          out.require(dq <= 1e-4, where + " |Q_E - Q| = " + num(dq, 3));
          out.require(dm <= 1e-6, where + " mass rel err = " + num(dm, 3));
        } catch (const Error& e) {
          out.require(false, where + ": " + e.what());
        }
        ++solves;
      }
    }
  }
  out.detail = std::to_string(solves) + " solves, max |Q_E - Q|_op " + num(worst_q, 3) +
               " (tol 1e-4), max mass rel err " + num(worst_m, 3) + " (tol 1e-6)";
  return out;
}

// 2. Oracle equivalence.
Outcome oracle_equivalence() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  double worst_q = 0.0, worst_d = 0.0;
  for (const std::string name : {"gauge_square_q4", "gauge_hexagon_q1.5", "grid_smoothed_max"}) {
    const LogConcaveFunction& f = member(name);
    for (double p : {1.0, 2.0}) {
      const std::string where = name + " p=" + val::format_p(p);
      try {
        const WeightedPointCloud cloud = surface_cloud(f, p);
        const SolverResult r = solve_Sbar(f, p);
        const auto search = oracle::grid_search_Sbar(cloud, p, oracle::OracleConfig::defaults());
        const double dq = lt::op_norm(r.Q_bar.matrix() - search.Q_best.matrix());
        const double dd = std::abs(r.delta_bar / search.delta_best - 1.0);
        worst_q = std::max(worst_q, dq);
        worst_d = std::max(worst_d, dd);
        out.require(dq <= 1e-2, where + " |Q_bar - Q_oracle| = " + num(dq, 3));
        out.require(dd <= 1e-3, where + " delta_bar rel gap = " + num(dd, 3));
      } catch (const Error& e) {
        out.require(false, where + ": " + e.what());
      }
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.require(secs <= 180.0, "runtime " + num(secs) + " s exceeds 3 min");
  out.detail = "max |dQ|_op " + num(worst_q, 3) + " (tol 1e-2), max delta_bar rel gap " +
               num(worst_d, 3) + " (tol 1e-3), " + num(secs, 3) + " s (limit 180 s)";
  return out;
}

// 3. Variation formula against the extrapolated difference quotient.
Outcome variation_formula() {
  Outcome out;
  const auto g = LogConcaveFunction::standard_gaussian(2);
  const auto g41 = member("gaussian_diag_4_1");
  const std::vector<std::tuple<std::string, LogConcaveFunction, LogConcaveFunction>> pairs = {
      {"(gaussian, gaussian)", g, g},
      {"(gaussian_diag_4_1, gaussian)", g41, g},
      {"(square_q2, gaussian)", member("gauge_square_q2"), g},
      {"(square_q4, gaussian_diag_4_1)", member("gauge_square_q4"), g41},
      {"(hexagon_q1.5, gaussian)", member("gauge_hexagon_q1.5"), g},
      {"(gaussian, square_q2)", g, member("gauge_square_q2")},
  };
  double worst = 0.0;
  for (const auto& [name, f, h] : pairs) {
    for (double p : {1.0, 2.0}) {
      const std::string where = name + " p=" + val::format_p(p);
      try {
        const double formula = *lp_first_variation(f, h, p).delta_Jp;
        const double quotient = lp_first_variation_fd_extrapolated(f, h, p, 1e-2, 513);
        const double rel = std::abs(formula / quotient - 1.0);
        worst = std::max(worst, rel);
        out.require(rel <= 0.02, where + " formula " + num(formula, 8) + " quotient " +
                                     num(quotient, 8) + " rel " + num(rel, 3));
      } catch (const Error& e) {
        out.require(false, where + ": " + e.what());
      }
    }
  }
  out.detail = "12 comparisons at 513 points per axis, t = 1e-2, max rel gap " + num(worst, 3) +
               " (tol 2e-2)";
  return out;
}

// J(f^◇) from closed forms where available.
double reference_entropy_mass(const LogConcaveFunction& f) {
  const int n = f.dim();
  if (const auto* q = std::get_if<Quadratic>(&f.potential())) {
    return 0.5 * n * lt::gaussian_mass(q->Q.matrix());
  }
  if (const auto* gp = std::get_if<GaugePower>(&f.potential())) {
    const double vol = gp->body.volume();
    return n * lt::gauge_power_mass(vol, n, gp->q) - lt::gauge_power_u_moment(vol, n, gp->q);
  }
  return entropy_mass_quadrature(f);
}

// 4. Normalization identity.
Outcome normalization_identity() {
  Outcome out;
  double worst_n = 0.0, worst_e = 0.0;
  for (const auto& m : corpus().functions) {
    const double jd = reference_entropy_mass(m.f);
    for (double p : {1.0, 2.0, 4.0}) {
      const std::string where = m.name + " p=" + val::format_p(p);
      try {
        const VariationReport r = lp_first_variation(m.f, m.f, p);
        const double dn = std::abs(r.normalized - 1.0);
        const double de = std::abs(p * *r.delta_Jp / jd - 1.0);
        worst_n = std::max(worst_n, dn);
        worst_e = std::max(worst_e, de);
        out.require(dn <= 1e-4, where + " |dbar - 1| = " + num(dn, 3));
        out.require(de <= 1e-3, where + " p dJ / J(f^◇) rel err = " + num(de, 3));
      } catch (const Error& e) {
        out.require(false, where + ": " + e.what());
      }
    }
  }
  out.detail = "max |dbar(f,f) - 1| " + num(worst_n, 3) + " (tol 1e-4), max rel err of p dJ_p(f,f) " +
               num(worst_e, 3) + " (tol 1e-3)";
  return out;
}

// 5. Jensen monotonicity.
Outcome jensen_monotonicity() {
  Outcome out;
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"gauge_square_q4", "gaussian_identity"},   {"gauge_hexagon_q1.5", "gaussian_diag_4_1"},
      {"grid_smoothed_max", "gaussian_identity"}, {"gaussian_diag_4_1", "gaussian_identity"},
      {"gauge_heptagon_q2", "gaussian_diag_9_1"}, {"gaussian_identity", "gaussian_diag_9_1"},
  };
  double worst_drop = 0.0, worst_sup = -kInfinity;
  for (const auto& [fn, gn] : pairs) {
    const LogConcaveFunction& f = member(fn);
    const LogConcaveFunction& g = member(gn);
    const std::string where = "(" + fn + ", " + gn + ")";
    try {
      double prev = 0.0, last = 0.0;
      for (double p : {1.0, 1.5, 2.0, 4.0, 8.0, 16.0, 32.0}) {
        const double v = lp_first_variation(f, g, p).normalized;
        worst_drop = std::max(worst_drop, prev - v);
        out.require(v >= prev - 1e-6, where + " drops at p=" + val::format_p(p) + " by " + num(prev - v, 3));
        prev = last = v;
      }
      const SupRatio sr = sup_ratio_variation(f, g);
      worst_sup = std::max(worst_sup, last - sr.value);
      out.require(last <= sr.value + 1e-3,
                  where + " dbar_32 " + num(last, 8) + " > sup ratio " + num(sr.value, 8));
    } catch (const Error& e) {
      out.require(false, where + ": " + e.what());
    }
  }
  out.detail = "6 pairs, largest drop " + num(worst_drop, 3) + " (tol 1e-6), max dbar_32 - sup " +
               num(worst_sup, 3) + " (tol 1e-3)";
  return out;
}

// 10. Linear covariance of the solution.
Outcome gl_covariance() {
  Outcome out;
  const LogConcaveFunction& f = member("gauge_heptagon_q2");
  std::mt19937_64 rng(10);
  std::vector<Matrix> maps;
  for (int k = 0; k < 5; ++k) maps.push_back(lt::random_linear_map(2, rng));
  double worst = 0.0;
  for (double p : {1.0, 2.0, kInfinity}) {
    try {
      const Matrix q = solve_Ep(f, p).E_p.Q.matrix();
      for (std::size_t k = 0; k < maps.size(); ++k) {
        const Matrix& t = maps[k];
        const Matrix qt = solve_Ep(gl_image(f, t), p).E_p.Q.matrix();
        const double d = lt::op_norm(qt - t.transpose() * q * t);
        worst = std::max(worst, d);
        out.require(d <= 1e-3, "T" + std::to_string(k) + " p=" + val::format_p(p) +
                                   " |Q_E(f o T) - T^T Q_E T| = " + num(d, 3));
      }
    } catch (const Error& e) {
      out.require(false, "p=" + val::format_p(p) + ": " + e.what());
    }
  }
  out.detail = "heptagon q = 2, 5 maps x 3 p, max deviation " + num(worst, 3) + " (tol 1e-3)";
  return out;
}

// 13. Numerics floor.
Outcome numerics_floor() {
  Outcome out;
  const auto g = LogConcaveFunction::standard_gaussian(2);
  const double jq = total_mass_quadrature(g);
  const double jerr = std::abs(jq - 2 * std::numbers::pi);
  out.require(jerr < 1e-6, "J(gamma) quadrature error " + num(jerr, 3));

  // Fenchel-Young: u(x) + u*(grad u(x)) - <x, grad u(x)> at interior nodes whose
  // gradient lies inside the dual box.
  double worst_fy = 0.0;
  for (const std::string name : {"gaussian_diag_4_1", "grid_smoothed_max"}) {
    const Grid u = sample_potential(member(name));
    const Grid us = legendre_transform(u);
    const double h = std::max(u.spacing(), us.spacing());
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u.is_boundary(i) || u[i] > 20.0) continue;
      double grad[kMaxDim];
      node_gradient(u, i, grad);
      if (!us.contains(grad, true)) continue;
      double x[kMaxDim];
      u.node(i, x);
      const double fy = u[i] + us.interpolate(grad) - (x[0] * grad[0] + x[1] * grad[1]);
      worst = std::max(worst, std::abs(fy) / (h * h));
    }
    worst_fy = std::max(worst_fy, worst);
    out.require(worst < 10.0, name + " Fenchel-Young residual " + num(worst, 3) + " spacing^2");
  }

  // Grid transform against the dense conjugate at 100 dual points.
  const auto fn = [](const Vector& x) {
    return std::pow(std::abs(x(0)), 1.5) / 1.5 + 0.5 * x(1) * x(1) + 0.25 * x(0) * x(1);
  };
  const Grid u = Grid::sample(2, 6.0, default_resolution(2),
                              [&](const double* x) { return fn(Eigen::Map<const Vector>(x, 2)); });
  const Grid us = legendre_transform(u);
  const double h = u.spacing();
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ud(-1.5, 1.5);
  double worst_dc = 0.0;
  for (int k = 0; k < 100; ++k) {
    Vector y(2);
    y << ud(rng), ud(rng);
    const double exact = oracle::dense_conjugate(fn, y, 6.0, 401);
    worst_dc = std::max(worst_dc, std::abs(us.interpolate(y) - exact) / (h * h));
  }
  out.require(worst_dc < 5.0, "legendre_transform vs dense conjugate " + num(worst_dc, 3) + " spacing^2");
  out.detail = "J(gamma) err " + num(jerr, 3) + " (tol 1e-6), Fenchel-Young " + num(worst_fy, 3) +
               " h^2 (tol 10 h^2), transform vs dense " + num(worst_dc, 3) + " h^2 (tol 5 h^2)";
  return out;
}

// 14. Determinism of the validate command.
Outcome determinism() {
  Outcome out;
  const auto dir = std::filesystem::temp_directory_path() / "lpjohn_acceptance";
  std::filesystem::create_directories(dir);
  std::vector<Json> docs;
  std::vector<std::string> csvs;
  std::vector<int> codes;
  for (int run = 0; run < 2; ++run) {
    ValidateArgs a;
    a.corpus = "builtin";
    a.seed = 7;
    a.out = (dir / ("report" + std::to_string(run) + ".json")).string();
    a.csv = (dir / ("report" + std::to_string(run) + ".csv")).string();
    std::ostringstream sink, err;
    codes.push_back(cmd_validate(a, sink, err));
    Json doc = read_json_file(a.out);
    doc["provenance"].erase("wall_time_ms");
    docs.push_back(doc);
    std::ifstream in(a.csv);
    std::stringstream s;
    s << in.rdbuf();
    csvs.push_back(s.str());
  }
  std::filesystem::remove_all(dir);
  out.require(codes[0] == codes[1], "exit codes differ");
  out.require(docs[0].dump() == docs[1].dump(), "report documents differ");
  out.require(csvs[0] == csvs[1], "CSV exports differ");
  out.detail = "two builtin runs (seed 7): documents " +
               std::string(docs[0].dump() == docs[1].dump() ? "identical" : "differ") + ", " +
               std::to_string(docs[0]["outputs"]["records"].size()) + " records, exit code " +
               std::to_string(codes[0]);
  return out;
}

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  const std::vector<Criterion> criteria = {
      {1, "gaussian fixed point", gaussian_fixed_point},
      {2, "oracle equivalence", oracle_equivalence},
      {3, "variation formula vs difference quotient", variation_formula},
      {4, "normalization identity", normalization_identity},
      {5, "jensen monotonicity", jensen_monotonicity},
      {6, "mass chain",
       [] {
         Outcome o;
         from_records(o, {"mass_monotone"});
         return o;
       }},
      {7, "mass bound",
       [] {
         Outcome o;
         from_records(o, {"mass_bound", "mass_bound_equality"});
         return o;
       }},
      {8, "santalo product",
       [] {
         Outcome o;
         from_records(o, {"santalo", "santalo_equality"});
         return o;
       }},
      {9, "ball ratio",
       [] {
         Outcome o;
         from_records(o, {"ball_ratio_even", "ball_ratio_general"});
         return o;
       }},
      {10, "linear covariance", gl_covariance},
      {11, "KKT stationarity",
       [] {
         Outcome o;
         from_records(o, {"kkt_residual", "kkt_negative_control"});
         return o;
       }},
      {12, "continuity",
       [] {
         Outcome o;
         from_records(o, {"continuity", "continuity_decreasing", "continuity_decay"});
         return o;
       }},
      {13, "numerics floor", numerics_floor},
      {14, "determinism", determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s [%2d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs);
    const std::size_t shown = std::min<std::size_t>(o.failures.size(), 40);
    for (std::size_t i = 0; i < shown; ++i) std::printf("       %s\n", o.failures[i].c_str());
    if (o.failures.size() > shown)
      std::printf("       ... %zu more\n", o.failures.size() - shown);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
