#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lpjohn/variation.hpp"
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

TEST_CASE("gaussian pairs match the polar-coordinate oracle") {
  std::mt19937_64 rng(17);
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 2; ++trial) {
      const Matrix q = lt::random_spd(n, rng);
      const Matrix pm = lt::random_spd(n, rng);
      const auto f = LogConcaveFunction::gaussian(SpdMatrix(q));
      const auto g = LogConcaveFunction::gaussian(SpdMatrix(pm));
      for (double p : {1.0, 2.0, 4.5}) {
        const VariationReport r = lp_first_variation(f, g, p);
        REQUIRE(r.delta_Jp.has_value());
        CAPTURE(n);
        CAPTURE(p);
        CHECK(*r.delta_Jp == doctest::Approx(lt::gaussian_variation(q, pm, p)).epsilon(1e-5));
        CHECK(r.normalized ==
              doctest::Approx(lt::gaussian_normalized_variation(q, pm, p)).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("standard gaussian, p = 1: delta J = 2 pi and normalized value 1") {
  const auto g = LogConcaveFunction::standard_gaussian(2);
  const VariationReport r = lp_first_variation(g, g, 1.0);
  CHECK(*r.delta_Jp == doctest::Approx(2 * std::numbers::pi).epsilon(1e-6));
  CHECK(r.normalized == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("self variation equals the entropy mass over p on every corpus member") {
  const auto corpus = validation::TestCorpus::builtin(7);
  for (const auto& m : corpus.functions) {
    const double jd = m.f.is_grid() ? entropy_mass_quadrature(m.f) : entropy_mass(m.f);
    for (double p : {1.0, 2.0, 4.0}) {
      const VariationReport r = lp_first_variation(m.f, m.f, p);
      CAPTURE(m.name);
      CAPTURE(p);
      CHECK(r.normalized == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(p * *r.delta_Jp == doctest::Approx(jd).epsilon(1e-3));
    }
  }
}

TEST_CASE("homogeneity in the lp scalar multiple of g") {
  const auto f = member("gauge_hexagon_q2");
  const auto g = member("gaussian_diag_4_1");
  for (double p : {1.0, 3.0}) {
    const double base = *lp_first_variation(f, g, p).delta_Jp;
    const double scaled = *lp_first_variation(f, lp_scalar_mult(2.5, g, p), p).delta_Jp;
    CHECK(scaled == doctest::Approx(2.5 * base).epsilon(1e-10));
  }
}

TEST_CASE("normalized variation is nondecreasing in p and bounded by the sup ratio") {
  const auto f = member("gauge_square_q4");
  const auto g = member("gaussian_diag_9_1");
  const WeightedPointCloud cloud = surface_cloud(f, 1.0);
  const SupportFn hg = [&](const double* y) { return g.support(y); };
  double prev = 0.0;
  for (double p : {1.0, 1.5, 2.0, 4.0, 8.0, 16.0, 32.0}) {
    const WeightedPointCloud c = surface_cloud(f, p);
    const double v = normalized_variation(c, hg, p);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
  const SupRatio sr = sup_ratio_variation(f, g);
  CHECK(prev <= sr.value + 1e-3);
  CHECK(lp_first_variation(cloud, hg, kInfinity).normalized <= sr.value + 1e-9);
}

TEST_CASE("sup ratio of two gaussians is the top generalized eigenvalue") {
  Matrix q(2, 2), pm(2, 2);
  q << 2.0, 0.5, 0.5, 1.0;
  pm << 1.0, -0.3, -0.3, 3.0;
  const SupRatio sr = sup_ratio_variation(LogConcaveFunction::gaussian(SpdMatrix(q)),
                                          LogConcaveFunction::gaussian(SpdMatrix(pm)));
  CHECK_FALSE(sr.unbounded);
  CHECK(sr.value == doctest::Approx(lt::gaussian_normalized_variation(q, pm, kInfinity)).epsilon(1e-6));
}

TEST_CASE("sup ratio reports growth near the origin as unbounded") {
  // h_g ~ |y|^{4/3} against h_f ~ |y|^2.
  const SupRatio sr = sup_ratio_variation(LogConcaveFunction::standard_gaussian(2), member("gauge_square_q4"));
  CHECK(sr.unbounded);
  CHECK(std::isinf(sr.value));
}

TEST_CASE("linear covariance of the variation") {
  std::mt19937_64 rng(23);
  const Matrix phi = lt::random_linear_map(2, rng);
  const auto f = member("gauge_hexagon_q4");
  const auto g = LogConcaveFunction::standard_gaussian(2);
  // delta J_p(f o phi, g o phi) = |det phi|^{-1} delta J_p(f, g).
  const double lhs = *lp_first_variation(gl_image(f, phi), gl_image(g, phi), 2.0).delta_Jp;
  const double rhs = *lp_first_variation(f, g, 2.0).delta_Jp / std::abs(phi.determinant());
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
}

TEST_CASE("difference quotient approaches the variation (coarse grid)") {
  const auto f = LogConcaveFunction::standard_gaussian(2);
  const auto g = LogConcaveFunction::gaussian(SpdMatrix::diagonal({4.0, 1.0}));
  for (double p : {1.0, 2.0}) {
    const double exact = lt::gaussian_variation(SpdMatrix::identity(2).matrix(),
                                                SpdMatrix::diagonal({4.0, 1.0}).matrix(), p);
    const double fd = lp_first_variation_fd_extrapolated(f, g, p, 1e-2, 129);
    CHECK(fd == doctest::Approx(exact).epsilon(0.06));
  }
  CHECK_THROWS_AS(lp_first_variation_fd(f, g, 1.0, 0.5), InputError);
}

TEST_CASE("lipschitz estimate holds between two support functions") {
  const auto f = member("gauge_square_q2");
  const WeightedPointCloud cloud = surface_cloud(f, 2.0);
  const auto g = LogConcaveFunction::standard_gaussian(2);
  const auto g0 = LogConcaveFunction::gaussian(SpdMatrix::diagonal({1.2, 0.9}));
  const LipschitzDiagnostic d =
      lipschitz_diagnostic(cloud, [&](const double* y) { return g.support(y); },
                           [&](const double* y) { return g0.support(y); }, 2.0);
  CHECK(d.holds);
  CHECK(d.lhs <= d.bound);
}

TEST_CASE("invalid inputs") {
  const auto f = LogConcaveFunction::standard_gaussian(2);
  CHECK_THROWS_AS(lp_first_variation(f, f, 0.5), InputError);
  CHECK_THROWS_AS(lp_first_variation(f, LogConcaveFunction::standard_gaussian(3), 1.0), InputError);
  std::vector<Vector> v(3, Vector(2));
  v[0] << 1, 0;
  v[1] << -1, 1;
  v[2] << -1, -1;
  const auto ind = LogConcaveFunction::indicator(ConvexBody::from_vertices(v));
  CHECK_THROWS_AS(surface_cloud(ind, 1.0), InputError);
}

TEST_CASE("ray cloud of a polytope gauge power carries the full mass") {
  const auto f = member("gauge_hexagon_q1.5");
  for (double p : {1.0, 2.0}) {
    const WeightedPointCloud c = surface_cloud(f, p);
    const double total = c.total_weight + c.origin_mass + c.excluded_mass;
    CHECK(total == doctest::Approx(total_mass(f)).epsilon(1e-9));
  }
}
