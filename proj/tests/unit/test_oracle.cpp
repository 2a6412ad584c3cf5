#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lpjohn/oracle.hpp"
#include "lpjohn/solver.hpp"
#include "lpjohn/validation.hpp"
#include "oracles.hpp"

using namespace lpjohn;
namespace lt = lpjohn::testing;

namespace {

LogConcaveFunction member(const std::string& name) {
  static const auto corpus = validation::TestCorpus::builtin(7);
  for (const auto& m : corpus.functions)
    if (m.name == name) return m.f;
  throw std::runtime_error("no corpus member " + name);
}

}  // namespace

TEST_CASE("configuration grids") {
  const auto c = oracle::OracleConfig::defaults();
  CHECK(c.eigen_ratio_grid.size() == 33);
  CHECK(c.rotation_grid.size() == 36);
  CHECK(c.eigen_ratio_grid.front() == doctest::Approx(1.0 / 16));
  CHECK(c.eigen_ratio_grid.back() == doctest::Approx(16.0));
  CHECK(c.mc_samples >= 100000);
  const auto r = c.refined();
  CHECK(r.eigen_ratio_grid.size() > c.eigen_ratio_grid.size());
  CHECK(r.rotation_grid.size() > c.rotation_grid.size());
  const SpdMatrix q = oracle::planar_candidate(4.0, 0.3);
  CHECK(q.determinant() == doctest::Approx(1.0));
  CHECK(q.eigenvalues()(1) == doctest::Approx(4.0));
}

TEST_CASE("grid search recovers a known gaussian optimum") {
  // For f = gamma_Q the optimum over det-1 matrices is Q / det(Q)^{1/2}.
  Matrix q(2, 2);
  q << 3.0, 1.0, 1.0, 1.0;
  const auto f = LogConcaveFunction::gaussian(SpdMatrix(q));
  const auto res = oracle::grid_search_Sbar(f, 2.0, oracle::OracleConfig::defaults());
  CHECK(lt::op_norm(res.Q_best.matrix() - q / std::sqrt(q.determinant())) < 1e-4);
  CHECK(res.delta_best ==
        doctest::Approx(lt::gaussian_normalized_variation(q, q / std::sqrt(q.determinant()), 2.0))
            .epsilon(1e-5));
}

TEST_CASE("refining the search grid changes the optimum by less than 1e-3") {
  const auto f = member("gauge_hexagon_q4");
  const WeightedPointCloud cloud = surface_cloud(f, 1.0);
  const auto base = oracle::grid_search_Sbar(cloud, 1.0, oracle::OracleConfig::defaults());
  const auto fine = oracle::grid_search_Sbar(cloud, 1.0, oracle::OracleConfig::defaults().refined());
  CHECK(std::abs(fine.delta_best / base.delta_best - 1.0) < 1e-3);
  CHECK(fine.evaluations > base.evaluations);
}

TEST_CASE("grid search agrees with the fixed-point solver on the heptagon") {
  const auto f = member("gauge_heptagon_q2");
  const WeightedPointCloud cloud = surface_cloud(f, 2.0);
  const auto search = oracle::grid_search_Sbar(cloud, 2.0, oracle::OracleConfig::defaults());
  const SolverResult r = solve_Sbar(f, 2.0);
  CHECK(lt::op_norm(search.Q_best.matrix() - r.Q_bar.matrix()) < 1e-2);
  CHECK(std::abs(search.delta_best / r.delta_bar - 1.0) < 1e-3);
}

TEST_CASE("grid search rejects dimension three") {
  CHECK_THROWS_AS(oracle::grid_search_Sbar(LogConcaveFunction::standard_gaussian(3), 1.0,
                                           oracle::OracleConfig::defaults()),
                  InputError);
}

TEST_CASE("importance-sampled mass") {
  const auto cfg = oracle::OracleConfig::defaults();
  for (const auto& name : {"gaussian_diag_4_1", "gauge_square_q1.5", "grid_smoothed_max"}) {
    const auto f = member(name);
    const auto mc = oracle::mc_total_mass(f, cfg);
    CAPTURE(name);
    CHECK(std::abs(mc.estimate - total_mass(f)) < 5 * mc.standard_error + 1e-3 * total_mass(f));
    CHECK(mc.effective_sample_size > 0.01 * cfg.mc_samples);
  }
  // Deterministic for a fixed seed.
  const auto a = oracle::mc_total_mass(member("gauge_hexagon_q2"), cfg);
  const auto b = oracle::mc_total_mass(member("gauge_hexagon_q2"), cfg);
  CHECK(a.estimate == b.estimate);
}

TEST_CASE("dense conjugate of a quadratic") {
  const auto u = [](const Vector& x) { return 0.5 * (2 * x(0) * x(0) + x(1) * x(1)); };
  Vector y(2);
  y << 1.0, -0.5;
  CHECK(oracle::dense_conjugate(u, y, 3.0, 101) == doctest::Approx(0.25 + 0.125).epsilon(1e-9));
  y << 10.0, 0.0;
  CHECK_THROWS_AS(oracle::dense_conjugate(u, y, 3.0, 101), InputError);
}
