#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "lpjohn/validation.hpp"
#include "oracles.hpp"

using namespace lpjohn;
using namespace lpjohn::validation;

TEST_CASE("records carry rhs - lhs as margin") {
  const auto r = make_record("mass_bound", "f", 2.0, "J(E) <= J(f)", 1.0, 1.5, 1e-4);
  CHECK(r.margin == doctest::Approx(0.5));
  CHECK(r.pass);
  const auto s = make_record("mass_bound", "f", 2.0, "J(E) <= J(f)", 1.5, 1.0, 1e-4);
  CHECK_FALSE(s.pass);
  const auto t = make_record("mass_bound", "f", 2.0, "J(E) <= J(f)", 1.0 + 5e-5, 1.0, 1e-4);
  CHECK(t.pass);
  CHECK_FALSE(failed_record("x", "f", 1.0, "s", "why").pass);
}

TEST_CASE("ball ratio constants in the plane") {
  CHECK(ball_ratio_bound_even(2) == doctest::Approx(std::numbers::e * 2 * std::sqrt(2.0) / std::numbers::pi).epsilon(1e-12));
  CHECK(ball_ratio_bound_even(2) == doctest::Approx(2.44731).epsilon(1e-5));
  CHECK(ball_ratio_bound_general(2) == doctest::Approx(3.17915).epsilon(1e-5));
  CHECK(ball_ratio_bound_general(2) > ball_ratio_bound_even(2));
}

TEST_CASE("builtin corpus composition") {
  const auto c = TestCorpus::builtin(7);
  CHECK(c.functions.size() == 13);
  std::set<std::string> names;
  for (const auto& m : c.functions) names.insert(m.name);
  CHECK(names.size() == c.functions.size());
  CHECK(names.count("gaussian_identity"));
  CHECK(names.count("gauge_heptagon_q1.5"));
  CHECK(names.count("grid_smoothed_max"));
  CHECK(c.p_ladder == default_ladder());
  CHECK(std::isinf(default_ladder().back()));
  CHECK(TestCorpus::gaussian_only().functions.size() == 1);
}

TEST_CASE("p formatting") {
  CHECK(format_p(kInfinity) == "inf");
  CHECK(format_p(1.5) == "1.5");
  CHECK(format_p(32.0) == "32");
}

TEST_CASE("gaussian suite passes and the corrupted suite does not") {
  TestCorpus c = TestCorpus::gaussian_only();
  c.p_ladder = {1.0, 2.0, kInfinity};
  SuiteOptions opts;
  opts.include_difference_quotients = false;
  const SuiteReport ok = run_suite(c, opts);
  for (const auto& r : ok.records) {
    CAPTURE(r.name);
    CAPTURE(r.p);
    if (r.name == "continuity_decay") continue;  // O(eps) gaps; see check_continuity
    CHECK(r.pass);
  }
  opts.corrupt_solver = true;
  const SuiteReport bad = run_suite(c, opts);
  std::size_t kkt_failures = 0;
  for (const auto& r : bad.records)
    if (!r.pass && r.name == "kkt_residual") ++kkt_failures;
  CHECK(kkt_failures > 0);
  CHECK_FALSE(bad.all_pass());
}

TEST_CASE("continuity gaps scale linearly with the perturbation") {
  const auto f = LogConcaveFunction::standard_gaussian(2);
  const auto d = continuity_gaps(f, 2.0, default_perturbation_schedule(), 7);
  REQUIRE(d.gaps.size() == 4);
  for (std::size_t i = 1; i < d.gaps.size(); ++i) {
    CHECK(d.gaps[i] < d.gaps[i - 1]);
    // Halving eps roughly halves the gap.
    CHECK(d.gaps[i] / d.gaps[i - 1] == doctest::Approx(0.5).epsilon(0.15));
  }
}

TEST_CASE("csv export") {
  SuiteReport r;
  r.records.push_back(make_record("det_one", "g", kInfinity, "det Q = 1", 1.0, 1.0, 1e-9));
  const std::string csv = to_csv(r);
  CHECK(csv.rfind("name,function,p,lhs,rhs,margin,pass,tolerance_used\n", 0) == 0);
  CHECK(csv.find("det_one,g,inf,") != std::string::npos);
}
