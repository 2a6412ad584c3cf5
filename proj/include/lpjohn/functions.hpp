#pragma once

// Log-concave functions f = exp(-u) with u >= 0, u(0) = 0, u convex, and the
// operations on them: support function h_f = u*, linear images, polarity, the
// L_p Asplund sum and scalar multiple, total mass and the entropy-adjusted mass.

#include <array>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "lpjohn/body.hpp"
#include "lpjohn/numerics.hpp"

namespace lpjohn {

/// u(x) = x^T Q x / 2.
struct Quadratic {
  SpdMatrix Q;
};

/// u(x) = ||x||_K^q / q with q in (1, 8].
struct GaugePower {
  ConvexBody body;
  double q;
};

/// u = 0 on K, +inf outside (f is the characteristic function of K).
struct Indicator {
  ConvexBody body;
};

/// u = 0 at the origin, +inf elsewhere (the sum with both coefficients zero).
struct PointMass {
  int dim;
};

/// Node values of u on a grid.
struct GridPotential {
  Grid grid;
};

using Potential = std::variant<Quadratic, GaugePower, Indicator, PointMass, GridPotential>;

/// Immutable handle; copies share the cached support data.
class LogConcaveFunction {
 public:
  /// Validates membership (u(0) = 0, u >= 0, convexity, decay) and precomputes
  /// the discrete conjugates of grid potentials.
  explicit LogConcaveFunction(Potential potential);

  static LogConcaveFunction gaussian(const SpdMatrix& q);
  static LogConcaveFunction standard_gaussian(int dim);
  static LogConcaveFunction gauge_power(const ConvexBody& body, double q);
  static LogConcaveFunction indicator(const ConvexBody& body);
  static LogConcaveFunction from_grid(Grid grid);

  int dim() const;
  const Potential& potential() const;
  bool is_quadratic() const { return std::holds_alternative<Quadratic>(potential()); }
  bool is_grid() const { return std::holds_alternative<GridPotential>(potential()); }
  /// Smooth-potential path (quadratic, gauge power or grid).
  bool has_gradient() const;

  /// u(x). Grid potentials interpolate inside the box and use the convex
  /// extension u** (from the discrete support function) outside it.
  double potential_at(const double* x) const;
  double potential_at(const Vector& x) const { return potential_at(x.data()); }
  double operator()(const Vector& x) const;

  /// h_f(y) = u*(y) without range checks. Grid potentials use the exact
  /// supremum over their nodes.
  double support(const double* y) const;
  double support(const Vector& y) const { return support(y.data()); }

  /// Half width of the primal box on which e^{-u} has decayed (u >= 32 on its
  /// boundary for analytic potentials; the grid box for grids).
  double box_half_width() const;
  /// Half width of a box containing the gradient range of u on the primal box,
  /// padded by 10%.
  double dual_half_width() const;

  /// Sampled support function on the dual box (grid potentials only).
  const Grid& support_grid() const;

  /// u(x) = u(-x) at seeded sample points and, for grids, at every node.
  bool is_even() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Checked h_f(y): grid potentials reject y outside their dual box.
double support_function(const LogConcaveFunction& f, const Vector& y);

/// x -> f(Tx). Grid potentials are resampled on [-R', R']^n with
/// R' = R * ||T^{-1}||_inf.
LogConcaveFunction gl_image(const LogConcaveFunction& f, const Matrix& t);

/// f° = exp(-u*).
LogConcaveFunction polar(const LogConcaveFunction& f);

/// alpha ._p f (+)_p beta ._p g, the function with support function
/// (alpha h_f^p + beta h_g^p)^{1/p}. Exact when a coefficient vanishes, a grid
/// potential otherwise.
LogConcaveFunction lp_asplund_sum(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                  double alpha, double beta, double p);

/// Always takes the grid route. The output box is the larger of the two input
/// boxes times box_scale (0 selects max(1, (alpha + beta)^{1/p})); the dual box
/// is the larger input dual box. With box_scale 0 a second pass shrinks the dual
/// box to the gradient range where e^{-u} is not negligible. Difference
/// quotients pin box_scale so that both terms share one discretization.
/// resolution 0 selects the default.
LogConcaveFunction lp_asplund_sum_grid(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                       double alpha, double beta, double p, int resolution = 0,
                                       double box_scale = 0.0);

/// lambda ._p f: support function lambda^{1/p} h_f.
LogConcaveFunction lp_scalar_mult(double lambda, const LogConcaveFunction& f, double p);

/// J(f) = integral of f. Closed form for analytic potentials.
double total_mass(const LogConcaveFunction& f);
/// Trapezoid quadrature of f on its box (resolution 0 selects the default).
double total_mass_quadrature(const LogConcaveFunction& f, int resolution = 0);

/// J(f^◇) = n J(f) - integral of u e^{-u}.
double entropy_mass(const LogConcaveFunction& f);
double entropy_mass_quadrature(const LogConcaveFunction& f, int resolution = 0);

/// u sampled on the default box of f (grid potentials: their own grid).
Grid sample_potential(const LogConcaveFunction& f, int resolution = 0);

}  // namespace lpjohn
