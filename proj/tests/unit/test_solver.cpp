#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
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

TEST_CASE("gaussians are their own John gaussians") {
  std::mt19937_64 rng(29);
  for (int n = 1; n <= 3; ++n) {
    const Matrix q = lt::random_spd(n, rng);
    const auto f = LogConcaveFunction::gaussian(SpdMatrix(q));
    for (double p : {1.0, 3.0, kInfinity}) {
      const SolverResult r = solve_Ep(f, p);
      CAPTURE(n);
      CAPTURE(p);
      CHECK(r.converged);
      CHECK(lt::op_norm(r.E_p.Q.matrix() - q) < 1e-4);
      CHECK(r.E_p.mass() == doctest::Approx(lt::gaussian_mass(q)).epsilon(1e-6));
    }
  }
}

TEST_CASE("solver output is feasible, tight and stationary") {
  const auto f = member("gauge_hexagon_q4");
  for (double p : {1.0, 2.0, 8.0}) {
    const SolverResult r = solve_Ep(f, p);
    CHECK(r.converged);
    CHECK(r.Q_bar.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.kkt_residual < 1e-5);
    const VariationReport v = lp_first_variation(f, LogConcaveFunction::gaussian(r.E_p.Q), p);
    CHECK(v.normalized == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.E_p.mass() == doctest::Approx(std::pow(2 * std::numbers::pi, 1.0) / r.delta_bar).epsilon(1e-12));
    for (std::size_t i = 1; i < r.trace.size(); ++i)
      CHECK(r.trace[i].objective <= r.trace[i - 1].objective + 1e-12);
  }
}

TEST_CASE("the optimum beats random det-1 candidates") {
  const auto f = member("gauge_heptagon_q2");
  const SolverResult r = solve_Sbar(f, 2.0);
  const WeightedPointCloud cloud = surface_cloud(f, 2.0);
  std::mt19937_64 rng(31);
  for (int k = 0; k < 20; ++k) {
    const SpdMatrix cand = spd_normalize_det(SpdMatrix(lt::random_spd(2, rng)));
    const auto g = LogConcaveFunction::gaussian(cand);
    const double v = normalized_variation(cloud, [&](const double* y) { return g.support(y); }, 2.0);
    CHECK(v >= r.delta_bar - 1e-10);
  }
}

TEST_CASE("multi-start reaches the same optimum in three dimensions") {
  std::vector<Vector> cube;
  for (int s = 0; s < 8; ++s) {
    Vector v(3);
    v << (s & 1 ? 1.0 : -1.0), (s & 2 ? 2.0 : -2.0), (s & 4 ? 0.5 : -0.5);
    cube.push_back(v);
  }
  const auto f = LogConcaveFunction::gauge_power(ConvexBody::from_vertices(cube), 2.0);
  const SolverResult a = solve_Sbar(f, 2.0);
  std::mt19937_64 rng(37);
  SolverOptions opts;
  opts.initial = spd_normalize_det(SpdMatrix(lt::random_spd(3, rng)));
  const SolverResult b = solve_Sbar(f, 2.0, opts);
  CHECK(a.kkt_residual < 1e-5);
  CHECK(lt::op_norm(a.Q_bar.matrix() - b.Q_bar.matrix()) < 1e-4);
  // The box is symmetric under coordinate reflections, so Q_bar is diagonal.
  CHECK(std::abs(a.Q_bar(0, 1)) + std::abs(a.Q_bar(0, 2)) + std::abs(a.Q_bar(1, 2)) < 1e-6);
}

TEST_CASE("KKT residual separates the optimum from a wrong candidate") {
  const auto f = LogConcaveFunction::gaussian(SpdMatrix::diagonal({4.0, 1.0}));
  CHECK(kkt_residual(f, 2.0, SpdMatrix::diagonal({2.0, 0.5})) < 1e-6);
  CHECK(kkt_residual(f, 2.0, SpdMatrix::identity(2)) > 0.3);
}

TEST_CASE("limit problem: MVEE on the cloud") {
  const auto f = member("gauge_square_q2");
  const SolverResult r = solve_Ep_infinity(f);
  CHECK(r.converged);
  const WeightedPointCloud cloud = surface_cloud(f, 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    worst = std::max(worst, r.E_p.support(cloud.point(i)) / cloud.hf[i]);
  CHECK(worst == doctest::Approx(1.0).epsilon(1e-4));
  // The limit mass is below every finite-p mass.
  CHECK(r.E_p.mass() <= solve_Ep(f, 32.0).E_p.mass() * (1 + 1e-4));
}

TEST_CASE("rescaling and input checks") {
  const GaussianEllipsoid e = rescale_to_Sp(SpdMatrix::identity(2), 2.0);
  CHECK(e.mass() == doctest::Approx(std::numbers::pi));
  const auto f = LogConcaveFunction::standard_gaussian(2);
  CHECK_THROWS_AS(solve_Ep(f, 64.0), InputError);
  SolverOptions bad;
  bad.damping = 0.0;
  CHECK_THROWS_AS(solve_Ep(f, 2.0, bad), InputError);
  CHECK_THROWS_AS(rescale_to_Sp(SpdMatrix::identity(2), 0.0), NumericalError);
}

TEST_CASE("moment initialization of a gaussian is its normalized matrix") {
  const SpdMatrix q = SpdMatrix::diagonal({4.0, 1.0});
  const SpdMatrix m = moment_initialization(LogConcaveFunction::gaussian(q));
  CHECK(lt::op_norm(m.matrix() - spd_normalize_det(q).matrix()) < 1e-6);
}
