#pragma once

// Discretized surface measures and the first variation of the total mass.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lpjohn/functions.hpp"

namespace lpjohn {

/// Quadrature discretization of mu(f, .): one point z = grad u(x) per grid node
/// with weight f(x) * cell volume * trapezoid factor, and h_f(z) evaluated by
/// the Fenchel-Young identity <x, z> - u(x).
struct WeightedPointCloud {
  int dim = 0;
  double p = 1.0;
  std::vector<double> z;  // dim entries per point
  std::vector<double> hf;
  std::vector<double> weight;
  double excluded_mass = 0.0;  // cells dropped because h_f(z) < 1e-8
  double origin_mass = 0.0;    // the cell at the minimum of u (z = 0)
  double total_weight = 0.0;
  double entropy_mass = 0.0;   // sum of weight * hf, the discrete J(f^◇)
  double spacing = 0.0;

  std::size_t size() const { return hf.size(); }
  const double* point(std::size_t i) const { return z.data() + i * dim; }
};

inline constexpr double kHfFloor = 1e-8;
inline constexpr double kExcludedMassFraction = 1e-3;

/// Builds the cloud of f on its default box (grid potentials: their own grid).
/// Polytope gauges split a node's weight equally among the facets active there.
/// Throws InputError for potentials without gradient and NumericalError when the
/// excluded mass reaches 1e-3 J(f).
WeightedPointCloud surface_cloud(const LogConcaveFunction& f, double p, int resolution = 0);

using SupportFn = std::function<double(const double*)>;

struct VariationReport {
  double p = 1.0;  // +inf for the sup-ratio
  std::optional<double> delta_Jp;
  double normalized = 0.0;
  double entropy_mass_used = 0.0;
  std::size_t cloud_size = 0;
  double excluded_mass = 0.0;
  double origin_mass = 0.0;
  bool unbounded = false;
  std::string diagnostic;
};

/// delta J_p = (1/p) sum w h_g(z)^p hf^{1-p} and the normalized value
/// (p delta J_p / J(f^◇))^{1/p}, with J(f^◇) taken from the cloud. p = inf
/// returns the largest ratio h_g / h_f over the cloud.
VariationReport lp_first_variation(const WeightedPointCloud& cloud, const SupportFn& hg, double p);
VariationReport lp_first_variation(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                   double p, int resolution = 0);

/// Normalized variation only; cheaper entry point for solver inner loops.
double normalized_variation(const WeightedPointCloud& cloud, const SupportFn& hg, double p);

/// (J(f (+)_p t._p g) - J(f (+)_p 0._p g)) / t with both sums on identical grids.
double lp_first_variation_fd(const LogConcaveFunction& f, const LogConcaveFunction& g, double p,
                             double t, int resolution = 0);
/// Richardson extrapolation 2 D(t/2) - D(t) of the one-sided quotient.
double lp_first_variation_fd_extrapolated(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                          double p, double t, int resolution = 0);

struct SupRatio {
  double value = 0.0;  // +inf when unbounded
  Vector argmax;
  bool unbounded = false;
  std::string diagnostic;
};

/// sup over y != 0 of h_g(y) / h_f(y): a direction x log-radius scan (64
/// directions for n = 2, 256 Fibonacci directions for n = 3) followed by
/// golden-section refinement. A ratio still growing at either end of the radial
/// range is reported as unbounded.
SupRatio sup_ratio_variation(const LogConcaveFunction& f, const LogConcaveFunction& g);

/// Both sides of the Lipschitz estimate
///   |dbar(f,g) - dbar(f,g0)| <= sup |h_g - h_g0| / min h_f
/// restricted to cloud points with |z| >= one grid spacing.
struct LipschitzDiagnostic {
  double lhs = 0.0;
  double bound = 0.0;
  bool holds = false;
};
LipschitzDiagnostic lipschitz_diagnostic(const WeightedPointCloud& cloud, const SupportFn& hg,
                                         const SupportFn& hg0, double p);

/// Unit directions used by the sup-ratio scan.
std::vector<Vector> sphere_directions(int dim);

}  // namespace lpjohn
