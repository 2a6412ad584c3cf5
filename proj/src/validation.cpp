#include "lpjohn/validation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace lpjohn::validation {

namespace {

constexpr double kIdentityTol = 1e-6;
constexpr double kSolverTol = 1e-4;
constexpr double kKktTol = 1e-5;
constexpr double kQuotientTol = 2e-2;

std::string gauge_name(const std::string& body, double q) {
  return "gauge_" + body + "_q" + format_p(q);
}

std::vector<Vector> polygon(const std::vector<std::pair<double, double>>& pts) {
  std::vector<Vector> out;
  for (auto [a, b] : pts) {
    Vector v(2);
    v << a, b;
    out.push_back(v);
  }
  return out;
}

double cn(int n) { return std::pow(2.0 * std::numbers::pi, 0.5 * n); }

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

// Equality as a record: lhs = |a/b - 1|, rhs = 0.
InequalityRecord relative_equality(std::string name, const std::string& function, double p,
                                   std::string statement, double a, double b, double tol) {
  const double rel = std::abs(a / b - 1.0);
  std::ostringstream diag;
  diag.precision(17);
  diag << "value " << a << " reference " << b;
  return make_record(std::move(name), function, p, std::move(statement), rel, 0.0, tol,
                     diag.str());
}

// h_E(y) over the cloud of f divided by h_f, maximized (the sup-ratio of the
// discretized constraint).
double cloud_max_ratio(const WeightedPointCloud& cloud, const SpdMatrix& q_e) {
  const Matrix inv = q_e.inverse();
  double best = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Map<const Vector> z(cloud.point(i), cloud.dim);
    best = std::max(best, 0.5 * z.dot(inv * z) / cloud.hf[i]);
  }
  return best;
}

SupportFn quadratic_support(const SpdMatrix& q, int n) {
  const Matrix inv = q.inverse();
  return [inv, n](const double* y) {
    const Eigen::Map<const Vector> v(y, n);
    return 0.5 * v.dot(inv * v);
  };
}

Matrix seeded_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = normal(rng);
  }
  return m;
}

}  // namespace

std::string format_p(double p) {
  if (std::isinf(p)) return "inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), p);
  return std::string(buf, res.ptr);
}

std::vector<double> default_ladder() { return {1.0, 1.5, 2.0, 4.0, 8.0, 16.0, 32.0, kInfinity}; }

std::vector<Vector> random_heptagon(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);
  std::uniform_real_distribution<double> radius(0.7, 1.3);
  std::vector<Vector> out;
  for (int k = 0; k < 7; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 7.0 + jitter(rng);
    const double r = radius(rng);
    Vector v(2);
    v << r * std::cos(a), r * std::sin(a);
    out.push_back(v);
  }
  return out;
}

LogConcaveFunction smoothed_max_potential(int resolution) {
  const int res = resolution > 0 ? resolution : default_resolution(2);
  Matrix a(2, 2);
  a << 1.0, 0.0, 0.0, 0.5;
  const double c = std::cos(std::numbers::pi / 4), s = std::sin(std::numbers::pi / 4);
  Matrix rot(2, 2);
  rot << c, -s, s, c;
  const Matrix b = rot * a * rot.transpose();
  constexpr double beta = 4.0;
  // min over the box boundary of max(a, b) is 0.25 * 12^2 = 36 > decay level
  Grid grid = Grid::sample(2, 12.0, res, [&](const double* x) {
    const Eigen::Map<const Vector> v(x, 2);
    const double qa = 0.5 * v.dot(a * v), qb = 0.5 * v.dot(b * v);
    const double m = std::max(qa, qb);
    return m + std::log(0.5 * (std::exp(beta * (qa - m)) + std::exp(beta * (qb - m)))) / beta;
  });
  return LogConcaveFunction::from_grid(std::move(grid));
}

TestCorpus TestCorpus::builtin(std::uint64_t seed) {
  TestCorpus c;
  c.p_ladder = default_ladder();
  c.functions.push_back({"gaussian_identity", LogConcaveFunction::standard_gaussian(2), true});
  c.functions.push_back(
      {"gaussian_diag_4_1", LogConcaveFunction::gaussian(SpdMatrix::diagonal({4, 1})), true});
  c.functions.push_back(
      {"gaussian_diag_9_1", LogConcaveFunction::gaussian(SpdMatrix::diagonal({9, 1})), true});
  const ConvexBody square = ConvexBody::from_vertices(polygon({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}));
  std::vector<Vector> hex;
  for (int k = 0; k < 6; ++k) {
    Vector v(2);
    v << std::cos(std::numbers::pi * k / 3), std::sin(std::numbers::pi * k / 3);
    hex.push_back(v);
  }
  const ConvexBody hexagon = ConvexBody::from_vertices(hex);
  const ConvexBody heptagon = ConvexBody::from_vertices(random_heptagon(seed));
  for (const auto& [name, body] : std::vector<std::pair<std::string, ConvexBody>>{
           {"square", square}, {"hexagon", hexagon}, {"heptagon", heptagon}}) {
    for (double q : {1.5, 2.0, 4.0}) {
      c.functions.push_back({gauge_name(name, q), LogConcaveFunction::gauge_power(body, q), false});
    }
  }
  c.functions.push_back({"grid_smoothed_max", smoothed_max_potential(), false});
  return c;
}

TestCorpus TestCorpus::gaussian_only() {
  TestCorpus c;
  c.p_ladder = default_ladder();
  c.functions.push_back({"gaussian_identity", LogConcaveFunction::standard_gaussian(2), true});
  return c;
}

InequalityRecord make_record(std::string name, std::string function, double p,
                             std::string statement, double lhs, double rhs, double tolerance,
                             std::string diagnostic) {
  InequalityRecord r;
  r.name = std::move(name);
  r.function = std::move(function);
  r.p = p;
  r.statement = std::move(statement);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.tolerance_used = tolerance;
  r.pass = std::isfinite(r.margin) ? r.margin >= -tolerance : (lhs == -kInfinity || rhs == kInfinity);
  r.diagnostic = std::move(diagnostic);
  return r;
}

InequalityRecord failed_record(std::string name, std::string function, double p,
                               std::string statement, std::string diagnostic) {
  InequalityRecord r;
  r.name = std::move(name);
  r.function = std::move(function);
  r.p = p;
  r.statement = std::move(statement);
  r.lhs = std::nan("");
  r.rhs = std::nan("");
  r.margin = std::nan("");
  r.pass = false;
  r.diagnostic = std::move(diagnostic);
  return r;
}

LadderSolutions solve_ladder(const LogConcaveFunction& f, const std::vector<double>& ladder,
                             const SuiteOptions& options) {
  LadderSolutions out;
  SolverOptions opts;
  opts.resolution = options.resolution;
  for (double p : ladder) {
    try {
      SolverResult r = solve_Ep(f, p, opts);
      if (options.corrupt_solver) {
        const int n = f.dim();
        Matrix s = Matrix::Identity(n, n);
        s(0, 0) = std::sqrt(1.1);
        r.Q_bar = spd_normalize_det(SpdMatrix(s * r.Q_bar.matrix() * s));
        r.E_p = rescale_to_Sp(r.Q_bar, r.delta_bar);
        if (!std::isinf(p)) {
          r.kkt_residual = kkt_residual(f, p, r.Q_bar, options.resolution);
        }
      }
      out.results.emplace(p, std::move(r));
    } catch (const Error& e) {
      out.errors.emplace(p, e.what());
    }
  }
  return out;
}

double ball_ratio_bound_general(int n) {
  const double nf = std::tgamma(n + 1.0);
  return std::pow(n, (n - 2.0) / n) * std::pow(n + 1.0, 0.5 * (n + 1.0)) * std::numbers::e /
         (std::pow(nf, (n - 1.0) / n) * unit_ball_volume(n));
}

double ball_ratio_bound_even(int n) {
  const double nf = std::tgamma(n + 1.0);
  return std::numbers::e / n * std::pow(nf, 1.0 / n) * std::pow(2.0, n) / unit_ball_volume(n);
}

std::vector<InequalityRecord> check_mass_monotone_in_p(const CorpusMember& member,
                                                       const std::vector<double>& ladder,
                                                       const LadderSolutions& solutions) {
  const std::string statement = "J(E_q f) <= J(E_p f) for p < q";
  std::vector<InequalityRecord> out;
  for (std::size_t k = 0; k + 1 < ladder.size(); ++k) {
    const double p = ladder[k], q = ladder[k + 1];
    const auto a = solutions.results.find(p), b = solutions.results.find(q);
    if (a == solutions.results.end() || b == solutions.results.end()) {
      out.push_back(failed_record("mass_monotone", member.name, q, statement,
                                  "solver failure at p = " + format_p(p) + " or " + format_p(q)));
      continue;
    }
    const double rhs = a->second.E_p.mass();
    out.push_back(make_record("mass_monotone", member.name, q, statement, b->second.E_p.mass(),
                              rhs, kSolverTol * rhs, "previous p = " + format_p(p)));
  }
  return out;
}

std::vector<InequalityRecord> check_mass_bound(const CorpusMember& member,
                                               const LadderSolutions& solutions) {
  const std::string statement = "J(E_p f) <= J(f)";
  std::vector<InequalityRecord> out;
  const double jf = total_mass(member.f);
  for (const auto& [p, r] : solutions.results) {
    out.push_back(make_record("mass_bound", member.name, p, statement, r.E_p.mass(), jf,
                              kSolverTol * jf));
    if (member.gaussian) {
      out.push_back(relative_equality("mass_bound_equality", member.name, p,
                                      "J(E_p f) = J(f) for Gaussian f", r.E_p.mass(), jf,
                                      kIdentityTol));
    }
  }
  for (const auto& [p, msg] : solutions.errors) {
    out.push_back(failed_record("mass_bound", member.name, p, statement, msg));
  }
  return out;
}

std::vector<InequalityRecord> check_santalo_product(const CorpusMember& member,
                                                    const LadderSolutions& solutions,
                                                    const LadderSolutions& polar_solutions) {
  const std::string statement = "J(E_p f) J(E_p f°) <= (2 pi)^n";
  std::vector<InequalityRecord> out;
  const double rhs = std::pow(cn(member.f.dim()), 2);
  for (const auto& [p, r] : solutions.results) {
    const auto it = polar_solutions.results.find(p);
    if (it == polar_solutions.results.end()) {
      const auto err = polar_solutions.errors.find(p);
      out.push_back(failed_record("santalo", member.name, p, statement,
                                  err == polar_solutions.errors.end() ? "polar not solved"
                                                                      : err->second));
      continue;
    }
    const double lhs = r.E_p.mass() * it->second.E_p.mass();
    out.push_back(make_record("santalo", member.name, p, statement, lhs, rhs, kSolverTol * rhs));
    if (member.gaussian) {
      out.push_back(relative_equality("santalo_equality", member.name, p,
                                      "J(E_p f) J(E_p f°) = (2 pi)^n for Gaussian f", lhs, rhs,
                                      kIdentityTol));
    }
  }
  for (const auto& [p, msg] : solutions.errors) {
    out.push_back(failed_record("santalo", member.name, p, statement, msg));
  }
  return out;
}

std::vector<InequalityRecord> check_ball_ratio(const CorpusMember& member,
                                               const LadderSolutions& solutions) {
  std::vector<InequalityRecord> out;
  const int n = member.f.dim();
  const double jf = total_mass(member.f);
  const bool even = member.f.is_even();
  const double general = ball_ratio_bound_general(n);
  const double even_bound = ball_ratio_bound_even(n);
  // Gauge powers with q != 2 have no continuum limit problem: h_gamma / h_f is
  // unbounded near the origin (q < 2) or at infinity (q > 2). For q < 2 the
  // variation against a Gaussian also diverges once p >= (2 + q) / (2 - q).
  const auto* gp = std::get_if<GaugePower>(&member.f.potential());
  const auto diagnostic = [&](double p) -> std::string {
    if (gp == nullptr || gp->q == 2.0) return {};
    if (std::isinf(p)) return "sup of h_gamma / h_f is unbounded for q != 2; cloud value only";
    if (gp->q < 2.0 && p >= (2.0 + gp->q) / (2.0 - gp->q)) {
      return "dJ_p(f, gamma) diverges at the origin for p >= (2+q)/(2-q); cloud value only";
    }
    return {};
  };
  for (const auto& [p, r] : solutions.results) {
    const double ratio = jf / r.E_p.mass();
    if (even) {
      out.push_back(make_record("ball_ratio_even", member.name, p,
                                "J(f) / J(E_p f) <= (e/n) (n!)^{1/n} 2^n / omega_n for even f",
                                ratio, even_bound, kSolverTol * even_bound, diagnostic(p)));
    }
    out.push_back(make_record(
        "ball_ratio_general", member.name, p,
        "J(f) / J(E_p f) <= n^{(n-2)/n} (n+1)^{(n+1)/2} e / ((n!)^{(n-1)/n} omega_n)", ratio,
        general, kSolverTol * general, diagnostic(p)));
  }
  for (const auto& [p, msg] : solutions.errors) {
    out.push_back(failed_record("ball_ratio_general", member.name, p, "ball ratio", msg));
  }
  return out;
}

std::vector<double> default_perturbation_schedule() { return {0.2, 0.1, 0.05, 0.025}; }

ContinuityData continuity_gaps(const LogConcaveFunction& f, double p,
                               const std::vector<double>& schedule, std::uint64_t seed,
                               const SuiteOptions& options) {
  const int n = f.dim();
  Matrix delta = seeded_matrix(n, seed);
  delta /= operator_norm(delta);
  SolverOptions opts;
  opts.resolution = options.resolution;
  const SpdMatrix base = solve_Sbar(f, p, opts).Q_bar;
  ContinuityData out;
  for (double eps : schedule) {
    const Matrix t = Matrix::Identity(n, n) + eps * delta;
    const SpdMatrix qi = solve_Sbar(gl_image(f, t), p, opts).Q_bar;
    out.eps.push_back(eps);
    out.gaps.push_back(operator_norm(qi.matrix() - base.matrix()));
  }
  return out;
}

std::vector<InequalityRecord> check_continuity(const CorpusMember& member, double p,
                                               const std::vector<double>& schedule,
                                               const SuiteOptions& options) {
  std::vector<InequalityRecord> out;
  const std::string statement = "Q_bar(f o (I + eps Delta)) -> Q_bar(f) as eps -> 0";
  ContinuityData data;
  try {
    data = continuity_gaps(member.f, p, schedule, options.seed, options);
  } catch (const Error& e) {
    out.push_back(failed_record("continuity", member.name, p, statement, e.what()));
    return out;
  }
  for (std::size_t i = 0; i + 1 < data.gaps.size(); ++i) {
    out.push_back(make_record("continuity_decreasing", member.name, p, statement,
                              data.gaps[i + 1], data.gaps[i], kSolverTol,
                              "eps " + format_p(data.eps[i + 1]) + " vs " + format_p(data.eps[i])));
  }
  if (!data.gaps.empty()) {
    out.push_back(make_record("continuity_decay", member.name, p,
                              "last gap < 0.1 x first gap along the schedule", data.gaps.back(),
                              0.1 * data.gaps.front(), kSolverTol,
                              "gap ratio " + format_p(data.gaps.back() / data.gaps.front()) +
                                  ", eps ratio " + format_p(data.eps.back() / data.eps.front())));
  }
  return out;
}

std::vector<InequalityRecord> check_solver_invariants(const CorpusMember& member,
                                                      const LadderSolutions& solutions,
                                                      int resolution) {
  std::vector<InequalityRecord> out;
  const int n = member.f.dim();
  for (const auto& [p, r] : solutions.results) {
    out.push_back(make_record("kkt_residual", member.name, p,
                              std::isinf(p) ? "duality gap of the enclosing-ellipsoid problem < 1e-5"
                                            : "whitened moment residual < 1e-5",
                              r.kkt_residual, kKktTol, 0.0));
    out.push_back(make_record("det_one", member.name, p, "det Q_bar = 1",
                              std::abs(r.Q_bar.determinant() - 1.0), 0.0, 1e-9));
    try {
      const WeightedPointCloud cloud = surface_cloud(member.f, p, resolution);
      const double tight = std::isinf(p)
                               ? cloud_max_ratio(cloud, r.E_p.Q)
                               : normalized_variation(cloud, quadratic_support(r.E_p.Q, n), p);
      out.push_back(make_record("constraint_tight", member.name, p, "dbar J_p(f, E_p f) = 1",
                                std::abs(tight - 1.0), 0.0, kSolverTol));
    } catch (const Error& e) {
      out.push_back(failed_record("constraint_tight", member.name, p, "dbar J_p(f, E_p f) = 1",
                                  e.what()));
    }
    if (!std::isinf(p)) {
      double worst = 0.0;
      for (std::size_t i = 1; i < r.trace.size(); ++i) {
        worst = std::max(worst, r.trace[i].objective / r.trace[i - 1].objective - 1.0);
      }
      out.push_back(make_record("trace_monotone", member.name, p,
                                "objective nonincreasing along the iteration", worst, 0.0, 1e-12));
      // S_p -> S̄_p: (c_n / J(E))^{2p/n} ._p E has det-1 matrix Q_bar.
      const double lambda = std::pow(cn(n) / r.E_p.mass(), 2.0 * p / n);
      const LogConcaveFunction back =
          lp_scalar_mult(lambda, LogConcaveFunction::gaussian(r.E_p.Q), p);
      const auto& qb = std::get<Quadratic>(back.potential()).Q;
      out.push_back(make_record("rescale_round_trip", member.name, p,
                                "rescaling E_p f back to unit mass recovers Q_bar",
                                operator_norm(qb.matrix() - r.Q_bar.matrix()), 0.0,
                                kIdentityTol));
    }
  }
  for (const auto& [p, msg] : solutions.errors) {
    out.push_back(failed_record("kkt_residual", member.name, p, "solver converged", msg));
  }
  return out;
}

std::vector<InequalityRecord> check_variation_invariants(const CorpusMember& member,
                                                         const std::vector<double>& ladder,
                                                         int resolution) {
  std::vector<InequalityRecord> out;
  const auto& f = member.f;
  const double ent = entropy_mass(f);
  for (double p : {1.0, 2.0, 4.0}) {
    try {
      const VariationReport r = lp_first_variation(f, f, p, resolution);
      out.push_back(make_record("normalization", member.name, p, "dbar J_p(f, f) = 1",
                                std::abs(r.normalized - 1.0), 0.0, kSolverTol));
      out.push_back(relative_equality("entropy_identity", member.name, p,
                                      "p delta J_p(f, f) = J(f^◇)", p * *r.delta_Jp, ent, 1e-3));
    } catch (const Error& e) {
      out.push_back(failed_record("normalization", member.name, p, "dbar J_p(f, f) = 1", e.what()));
    }
  }
  const LogConcaveFunction g = LogConcaveFunction::standard_gaussian(f.dim());
  std::vector<std::pair<double, double>> values;
  for (double p : ladder) {
    if (std::isinf(p)) continue;
    try {
      values.emplace_back(p, lp_first_variation(f, g, p, resolution).normalized);
    } catch (const Error& e) {
      out.push_back(failed_record("jensen_monotone", member.name, p,
                                  "dbar J_p(f, g) nondecreasing in p", e.what()));
    }
  }
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    out.push_back(make_record("jensen_monotone", member.name, values[k + 1].first,
                              "dbar J_p(f, g) nondecreasing in p", values[k].second,
                              values[k + 1].second, 1e-6));
  }
  if (!values.empty()) {
    const SupRatio sr = sup_ratio_variation(f, g);
    out.push_back(make_record("sup_ratio_limit", member.name, values.back().first,
                              "dbar J_p(f, g) <= sup h_g / h_f", values.back().second, sr.value,
                              1e-3, sr.diagnostic));
  }
  return out;
}

std::vector<InequalityRecord> check_variation_gl(const CorpusMember& member, std::uint64_t seed,
                                                 int resolution) {
  std::vector<InequalityRecord> out;
  const auto& f = member.f;
  const int n = f.dim();
  const double p = 2.0;
  Matrix phi = Matrix::Identity(n, n) + 0.3 * seeded_matrix(n, seed + 1);
  const LogConcaveFunction g = LogConcaveFunction::standard_gaussian(n);
  try {
    const LogConcaveFunction pf = gl_image(f, phi);
    const LogConcaveFunction pg = gl_image(g, phi.inverse());
    const VariationReport a = lp_first_variation(pf, g, p, resolution);
    const VariationReport b = lp_first_variation(f, pg, p, resolution);
    const double det = std::abs(phi.determinant());
    out.push_back(relative_equality("gl_variation", member.name, p,
                                    "delta J_p(phi f, g) = |det phi|^{-1} delta J_p(f, phi^{-1} g)",
                                    *a.delta_Jp, *b.delta_Jp / det, 1e-3));
    out.push_back(relative_equality("gl_normalized", member.name, p,
                                    "dbar J_p(phi f, g) = dbar J_p(f, phi^{-1} g)", a.normalized,
                                    b.normalized, 1e-3));
  } catch (const Error& e) {
    out.push_back(failed_record("gl_variation", member.name, p, "GL equivariance", e.what()));
  }
  return out;
}

SuiteReport run_suite(const TestCorpus& corpus, const SuiteOptions& options) {
  SuiteReport report;
  auto add = [&](std::vector<InequalityRecord> rs) {
    for (auto& r : rs) report.records.push_back(std::move(r));
  };
  for (const auto& member : corpus.functions) {
    const LadderSolutions sol = solve_ladder(member.f, corpus.p_ladder, options);
    LadderSolutions polar_sol;
    try {
      polar_sol = solve_ladder(polar(member.f), corpus.p_ladder, options);
    } catch (const Error& e) {
      for (double p : corpus.p_ladder) polar_sol.errors.emplace(p, e.what());
    }
    add(check_solver_invariants(member, sol, options.resolution));
    add(check_mass_monotone_in_p(member, corpus.p_ladder, sol));
    add(check_mass_bound(member, sol));
    add(check_santalo_product(member, sol, polar_sol));
    add(check_ball_ratio(member, sol));
    add(check_variation_invariants(member, corpus.p_ladder, options.resolution));
    add(check_variation_gl(member, options.seed, options.resolution));
  }

  // Continuity on the first Gaussian and the square gauge power with q = 4.
  for (const auto& member : corpus.functions) {
    if (member.name == "gaussian_identity" || member.name == gauge_name("square", 4.0)) {
      add(check_continuity(member, 2.0, default_perturbation_schedule(), options));
    }
  }

  if (options.include_difference_quotients) {
    // Formula against definition on Gaussian pairs at a finer dual grid.
    const LogConcaveFunction g = LogConcaveFunction::standard_gaussian(2);
    const LogConcaveFunction g41 = LogConcaveFunction::gaussian(SpdMatrix::diagonal({4, 1}));
    for (const auto& [name, f] : std::vector<std::pair<std::string, LogConcaveFunction>>{
             {"gaussian_identity", g}, {"gaussian_diag_4_1", g41}}) {
      for (double p : {1.0, 2.0}) {
        try {
          const double formula = *lp_first_variation(f, g, p).delta_Jp;
          const double quotient = lp_first_variation_fd_extrapolated(f, g, p, 1e-2, 257);
          report.records.push_back(relative_equality(
              "variation_formula", name, p,
              "integral formula = extrapolated difference quotient (g standard Gaussian)",
              formula, quotient, kQuotientTol));
        } catch (const Error& e) {
          report.records.push_back(
              failed_record("variation_formula", name, p, "formula vs quotient", e.what()));
        }
      }
    }
  }

  // Stationarity must be violated at a wrong candidate.
  {
    const LogConcaveFunction f = LogConcaveFunction::gaussian(SpdMatrix::diagonal({4, 1}));
    const double res = kkt_residual(f, 2.0, SpdMatrix::identity(2), options.resolution);
    report.records.push_back(make_record("kkt_negative_control", "gaussian_diag_4_1", 2.0,
                                         "residual at Q = I exceeds 0.3", 0.3, res, 0.0));
  }

  for (const auto& r : report.records) (r.pass ? report.passed : report.failed)++;
  return report;
}

std::string to_csv(const SuiteReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "name,function,p,lhs,rhs,margin,pass,tolerance_used\n";
  for (const auto& r : report.records) {
    out << r.name << ',' << r.function << ',' << format_p(r.p) << ',' << r.lhs << ',' << r.rhs
        << ',' << r.margin << ',' << (r.pass ? "true" : "false") << ',' << r.tolerance_used
        << '\n';
  }
  return out.str();
}

}  // namespace lpjohn::validation
