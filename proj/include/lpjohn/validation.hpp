#pragma once

// The inequality suite: every theorem-level claim evaluated on a fixed corpus
// and reported as records with explicit margins and tolerances.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lpjohn/solver.hpp"

namespace lpjohn::validation {

struct CorpusMember {
  std::string name;
  LogConcaveFunction f;
  bool gaussian = false;
};

struct TestCorpus {
  std::vector<CorpusMember> functions;
  std::vector<double> p_ladder;

  /// Standard Gaussian, gamma_diag(4,1), gamma_diag(9,1); gauge powers over the
  /// square, the regular hexagon and a seeded random heptagon with
  /// q in {1.5, 2, 4}; a grid potential (smoothed max of two quadratics).
  static TestCorpus builtin(std::uint64_t seed = 7);
  /// The standard Gaussian alone.
  static TestCorpus gaussian_only();
};

/// {1, 1.5, 2, 4, 8, 16, 32, inf}.
std::vector<double> default_ladder();

/// Vertices of the seeded random heptagon (angles jittered around 2 pi k / 7,
/// radii in [0.7, 1.3]).
std::vector<Vector> random_heptagon(std::uint64_t seed);

/// (1/beta) log((e^{beta a} + e^{beta b}) / 2) for a = x^T A x / 2 and
/// b = x^T B x / 2, with B the 45 degree rotation of A = diag(1, 1/2), beta = 4.
LogConcaveFunction smoothed_max_potential(int resolution = 0);

struct InequalityRecord {
  std::string name;
  std::string function;
  double p = 0.0;
  std::string statement;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  bool pass = false;    // margin >= -tolerance_used
  double tolerance_used = 0.0;
  std::string diagnostic;
};

/// Builds a record with margin rhs - lhs.
InequalityRecord make_record(std::string name, std::string function, double p,
                             std::string statement, double lhs, double rhs, double tolerance,
                             std::string diagnostic = {});
InequalityRecord failed_record(std::string name, std::string function, double p,
                               std::string statement, std::string diagnostic);

/// Solutions along the ladder, keyed by p. Solver errors are kept as messages.
struct LadderSolutions {
  std::map<double, SolverResult> results;
  std::map<double, std::string> errors;
};

struct SuiteOptions {
  std::uint64_t seed = 7;
  int resolution = 0;
  /// Negative control: perturb every solver output Q_bar by 10% before checks.
  bool corrupt_solver = false;
  /// Include the difference-quotient comparisons (the slowest checks).
  bool include_difference_quotients = true;
};

LadderSolutions solve_ladder(const LogConcaveFunction& f, const std::vector<double>& ladder,
                             const SuiteOptions& options = {});

/// n^{(n-2)/n} (n+1)^{(n+1)/2} e / ((n!)^{(n-1)/n} omega_n).
double ball_ratio_bound_general(int n);
/// (e/n) (n!)^{1/n} 2^n / omega_n.
double ball_ratio_bound_even(int n);

std::vector<InequalityRecord> check_mass_monotone_in_p(const CorpusMember& member,
                                                       const std::vector<double>& ladder,
                                                       const LadderSolutions& solutions);
std::vector<InequalityRecord> check_mass_bound(const CorpusMember& member,
                                               const LadderSolutions& solutions);
std::vector<InequalityRecord> check_santalo_product(const CorpusMember& member,
                                                    const LadderSolutions& solutions,
                                                    const LadderSolutions& polar_solutions);
std::vector<InequalityRecord> check_ball_ratio(const CorpusMember& member,
                                               const LadderSolutions& solutions);

/// Gaps ||Q_bar(f_i) - Q_bar(f)||_op for f_i = f o (I + eps_i Delta) with a
/// seeded Delta of unit operator norm.
struct ContinuityData {
  std::vector<double> eps;
  std::vector<double> gaps;
};
ContinuityData continuity_gaps(const LogConcaveFunction& f, double p,
                               const std::vector<double>& schedule, std::uint64_t seed,
                               const SuiteOptions& options = {});
std::vector<double> default_perturbation_schedule();
std::vector<InequalityRecord> check_continuity(const CorpusMember& member, double p,
                                               const std::vector<double>& schedule,
                                               const SuiteOptions& options = {});

/// Records on the solver outputs: KKT residual, det-1 feasibility, tightness of
/// the constraint at E_p, monotone trace, rescaling round trip.
std::vector<InequalityRecord> check_solver_invariants(const CorpusMember& member,
                                                      const LadderSolutions& solutions,
                                                      int resolution = 0);

/// Normalization, the entropy identity, monotonicity in p against the standard
/// Gaussian, and the p = 32 versus sup-ratio comparison.
std::vector<InequalityRecord> check_variation_invariants(const CorpusMember& member,
                                                         const std::vector<double>& ladder,
                                                         int resolution = 0);

/// delta J_p(phi f, g) = |det phi|^{-1} delta J_p(f, phi^{-1} g) and the
/// normalized version, seeded phi, g the standard Gaussian, p = 2.
std::vector<InequalityRecord> check_variation_gl(const CorpusMember& member, std::uint64_t seed,
                                                 int resolution = 0);

struct SuiteReport {
  std::vector<InequalityRecord> records;
  std::size_t passed = 0;
  std::size_t failed = 0;
  bool all_pass() const { return failed == 0; }
};

SuiteReport run_suite(const TestCorpus& corpus, const SuiteOptions& options = {});

/// name,function,p,lhs,rhs,margin,pass,tolerance_used
std::string to_csv(const SuiteReport& report);

/// "inf" for infinity, otherwise the shortest round-trip decimal.
std::string format_p(double p);

}  // namespace lpjohn::validation
