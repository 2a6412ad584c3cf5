#include "lpjohn/functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace lpjohn {
namespace {

constexpr double kDecayLevel = 32.0;        // u on the box boundary for analytic potentials
constexpr double kGridDecayLevel = 27.631;  // e^{-u} < 1e-12

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int potential_dim(const Potential& p) {
  return std::visit(Overloaded{[](const Quadratic& v) { return v.Q.dim(); },
                               [](const GaugePower& v) { return v.body.dim(); },
                               [](const Indicator& v) { return v.body.dim(); },
                               [](const PointMass& v) { return v.dim; },
                               [](const GridPotential& v) { return v.grid.dim(); }},
                    p);
}

double inf_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

// Largest gauge over the cube [-r, r]^n (attained at a corner).
double max_gauge_on_cube(const ConvexBody& body, double r) {
  const int n = body.dim();
  double best = 0.0;
  double x[kMaxDim];
  for (int corner = 0; corner < (1 << n); ++corner) {
    for (int a = 0; a < n; ++a) x[a] = (corner >> a) & 1 ? r : -r;
    best = std::max(best, body.gauge(x));
  }
  return best;
}

double max_gauge_gradient(const ConvexBody& body) {
  if (!body.is_polytope()) return std::sqrt(body.ellipsoid_matrix()->eigenvalues().maxCoeff());
  double best = 0.0;
  for (const Vector& a : body.rows()) best = std::max(best, a.cwiseAbs().maxCoeff());
  return best;
}

void check_grid_membership(const Grid& g) {
  const auto vals = g.values();
  const double u0 = vals[g.origin_index()];
  if (!(std::abs(u0) <= 1e-9)) {
    std::ostringstream msg;
    msg << "grid potential must vanish at the origin (u(0) = " << u0 << ")";
    throw InputError(msg.str());
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::isnan(vals[i]) || vals[i] < -1e-9) {
      std::ostringstream msg;
      msg << "grid potential must be nonnegative (node " << i << " has " << vals[i] << ")";
      throw InputError(msg.str());
    }
  }
  // Midpoint convexity on seeded node pairs with an even index difference.
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> pick(0, g.points_per_axis() - 1);
  const double tol = 10.0 * g.spacing() * g.spacing();
  for (int trial = 0; trial < 1000; ++trial) {
    std::array<int, kMaxDim> a{0, 0, 0}, b{0, 0, 0}, m{0, 0, 0};
    for (int d = 0; d < g.dim(); ++d) {
      a[d] = pick(rng);
      b[d] = pick(rng);
      if ((a[d] + b[d]) % 2 != 0) b[d] += b[d] + 1 < g.points_per_axis() ? 1 : -1;
      m[d] = (a[d] + b[d]) / 2;
    }
    const double ua = vals[g.flatten(a)], ub = vals[g.flatten(b)], um = vals[g.flatten(m)];
    if (!std::isfinite(ua) || !std::isfinite(ub)) continue;
    if (um > 0.5 * (ua + ub) + tol * (1.0 + std::max(ua, ub))) {
      std::ostringstream msg;
      msg << "grid potential fails the midpoint convexity test (" << um << " > (" << ua << " + "
          << ub << ")/2)";
      throw InputError(msg.str());
    }
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_boundary(i) && vals[i] < kGridDecayLevel) {
      const auto ijk = g.unflatten(i);
      int axis = 0;
      for (int d = 0; d < g.dim(); ++d) {
        if (ijk[d] == 0 || ijk[d] == g.points_per_axis() - 1) {
          axis = d;
          break;
        }
      }
      std::ostringstream msg;
      msg << "e^{-u} has not decayed below 1e-12 on the face x" << axis << " = "
          << (ijk[axis] == 0 ? "-" : "+") << g.half_width() << " (u = " << vals[i] << ")";
      throw NumericalError(msg.str());
    }
  }
}

}  // namespace

struct LogConcaveFunction::Impl {
  explicit Impl(Potential p) : potential(std::move(p)) {}

  Potential potential;
  int dim = 0;
  double box = 0.0;
  double dual = 0.0;
  Matrix q_inverse;  // quadratic potentials
  std::optional<Grid> support_grid;
  std::optional<DiscreteConjugate> support_eval;    // u* from the node values of u
  std::optional<DiscreteConjugate> extension_eval;  // u** from the sampled u*
};

LogConcaveFunction::LogConcaveFunction(Potential potential) {
  auto impl = std::make_shared<Impl>(std::move(potential));
  impl->dim = potential_dim(impl->potential);
  if (impl->dim < 1 || impl->dim > kMaxDim) throw InputError("dimension must be 1, 2 or 3");
  std::visit(
      Overloaded{
          [&](const Quadratic& v) {
            const double lmin = v.Q.eigenvalues()(0);
            impl->box = std::sqrt(2.0 * kDecayLevel / lmin);
            impl->dual = 1.1 * impl->box * inf_norm(v.Q.matrix());
            impl->q_inverse = v.Q.inverse();
          },
          [&](const GaugePower& v) {
            if (!(v.q > 1.0 && v.q <= 8.0)) {
              throw InputError("gauge-power exponent q must lie in (1, 8]");
            }
            const double rho = v.body.max_abs_coordinate();
            impl->box = rho * std::pow(kDecayLevel * v.q, 1.0 / v.q);
            const double gmax = max_gauge_on_cube(v.body, impl->box);
            impl->dual = 1.1 * std::pow(gmax, v.q - 1.0) * max_gauge_gradient(v.body);
          },
          [&](const Indicator& v) {
            const double rho = v.body.max_abs_coordinate();
            impl->box = 1.5 * rho;
            impl->dual = 64.0 / rho;
          },
          [&](const PointMass&) {
            impl->box = 1.0;
            impl->dual = 1.0;
          },
          [&](const GridPotential& v) {
            check_grid_membership(v.grid);
            impl->box = v.grid.half_width();
            impl->support_grid = legendre_transform(v.grid);
            impl->dual = impl->support_grid->half_width();
            impl->support_eval.emplace(v.grid);
            impl->extension_eval.emplace(*impl->support_grid);
          }},
      impl->potential);
  impl_ = std::move(impl);
}

LogConcaveFunction LogConcaveFunction::gaussian(const SpdMatrix& q) {
  return LogConcaveFunction(Quadratic{q});
}

LogConcaveFunction LogConcaveFunction::standard_gaussian(int dim) {
  return gaussian(SpdMatrix::identity(dim));
}

LogConcaveFunction LogConcaveFunction::gauge_power(const ConvexBody& body, double q) {
  return LogConcaveFunction(GaugePower{body, q});
}

LogConcaveFunction LogConcaveFunction::indicator(const ConvexBody& body) {
  return LogConcaveFunction(Indicator{body});
}

LogConcaveFunction LogConcaveFunction::from_grid(Grid grid) {
  return LogConcaveFunction(GridPotential{std::move(grid)});
}

int LogConcaveFunction::dim() const { return impl_->dim; }
const Potential& LogConcaveFunction::potential() const { return impl_->potential; }
double LogConcaveFunction::box_half_width() const { return impl_->box; }
double LogConcaveFunction::dual_half_width() const { return impl_->dual; }

bool LogConcaveFunction::has_gradient() const {
  return std::holds_alternative<Quadratic>(impl_->potential) ||
         std::holds_alternative<GaugePower>(impl_->potential) ||
         std::holds_alternative<GridPotential>(impl_->potential);
}

const Grid& LogConcaveFunction::support_grid() const {
  if (!impl_->support_grid) throw InputError("support grid exists only for grid potentials");
  return *impl_->support_grid;
}

double LogConcaveFunction::potential_at(const double* x) const {
  const int n = impl_->dim;
  return std::visit(
      Overloaded{[&](const Quadratic& v) {
                   const Eigen::Map<const Vector> xv(x, n);
                   return 0.5 * xv.dot(v.Q.matrix() * xv);
                 },
                 [&](const GaugePower& v) { return std::pow(v.body.gauge(x), v.q) / v.q; },
                 [&](const Indicator& v) { return v.body.gauge(x) <= 1.0 + 1e-12 ? 0.0 : kInfinity; },
                 [&](const PointMass&) {
                   for (int a = 0; a < n; ++a) {
                     if (x[a] != 0.0) return kInfinity;
                   }
                   return 0.0;
                 },
                 [&](const GridPotential& v) {
                   if (v.grid.contains(x)) return v.grid.interpolate(x);
                   return (*impl_->extension_eval)(x);
                 }},
      impl_->potential);
}

double LogConcaveFunction::operator()(const Vector& x) const {
  return std::exp(-potential_at(x.data()));
}

double LogConcaveFunction::support(const double* y) const {
  const int n = impl_->dim;
  return std::visit(
      Overloaded{[&](const Quadratic&) {
                   const Eigen::Map<const Vector> yv(y, n);
                   return 0.5 * yv.dot(impl_->q_inverse * yv);
                 },
                 [&](const GaugePower& v) {
                   const double qc = v.q / (v.q - 1.0);
                   return std::pow(v.body.support(y), qc) / qc;
                 },
                 [&](const Indicator& v) { return v.body.support(y); },
                 [&](const PointMass&) { return 0.0; },
                 [&](const GridPotential&) { return std::max(0.0, (*impl_->support_eval)(y)); }},
      impl_->potential);
}

bool LogConcaveFunction::is_even() const {
  const int n = impl_->dim;
  if (const auto* g = std::get_if<GridPotential>(&impl_->potential)) {
    const Grid& grid = g->grid;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const std::size_t j = grid.size() - 1 - i;  // index of -x
      const double a = grid[i], b = grid[j];
      if (a == b) continue;
      if (!(std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a)))) return false;
    }
    return true;
  }
  if (std::holds_alternative<Quadratic>(impl_->potential) ||
      std::holds_alternative<PointMass>(impl_->potential)) {
    return true;
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-impl_->box / 2, impl_->box / 2);
  double x[kMaxDim], mx[kMaxDim];
  for (int trial = 0; trial < 256; ++trial) {
    for (int a = 0; a < n; ++a) {
      x[a] = coord(rng);
      mx[a] = -x[a];
    }
    const double u = potential_at(x), v = potential_at(mx);
    if (u == v) continue;
    if (!(std::abs(u - v) <= 1e-9 * (1.0 + std::abs(u)))) return false;
  }
  return true;
}

double support_function(const LogConcaveFunction& f, const Vector& y) {
  if (y.size() != f.dim()) throw InputError("support query has the wrong dimension");
  if (f.is_grid()) {
    const Grid& s = f.support_grid();
    if (!s.contains(y.data())) throw InputError("support query lies outside the dual grid box");
  }
  return f.support(y);
}

LogConcaveFunction gl_image(const LogConcaveFunction& f, const Matrix& t) {
  const int n = f.dim();
  if (t.rows() != n || t.cols() != n || !t.allFinite()) {
    throw InputError("linear map has the wrong size");
  }
  Eigen::JacobiSVD<Matrix> svd(t);
  const auto& sv = svd.singularValues();
  if (!(sv(n - 1) > 0) || sv(0) / sv(n - 1) > 1e8) {
    throw InputError("linear map is singular or too ill-conditioned (condition number > 1e8)");
  }
  return std::visit(
      Overloaded{
          [&](const Quadratic& v) {
            return LogConcaveFunction(Quadratic{SpdMatrix(t.transpose() * v.Q.matrix() * t)});
          },
          [&](const GaugePower& v) {
            return LogConcaveFunction(GaugePower{v.body.linear_preimage(t), v.q});
          },
          [&](const Indicator& v) {
            return LogConcaveFunction(Indicator{v.body.linear_preimage(t)});
          },
          [&](const PointMass&) { return f; },
          [&](const GridPotential& v) {
            const Matrix tinv = t.inverse();
            const double r = v.grid.half_width() * inf_norm(tinv);
            Vector tx(n);
            Grid g = Grid::sample(n, r, v.grid.points_per_axis(), [&](const double* x) {
              tx = t * Eigen::Map<const Vector>(x, n);
              return v.grid.contains(tx.data()) ? v.grid.interpolate_cubic(tx.data())
                                                : f.potential_at(tx);
            });
            return LogConcaveFunction::from_grid(std::move(g));
          }},
      f.potential());
}

LogConcaveFunction polar(const LogConcaveFunction& f) {
  return std::visit(
      Overloaded{
          [&](const Quadratic& v) {
            return LogConcaveFunction(Quadratic{SpdMatrix(v.Q.inverse())});
          },
          [&](const GaugePower& v) {
            return LogConcaveFunction(GaugePower{v.body.polar(), v.q / (v.q - 1.0)});
          },
          [&](const Indicator&) -> LogConcaveFunction {
            throw InputError("the polar of an indicator has a non-smooth linear potential");
          },
          [&](const PointMass&) -> LogConcaveFunction {
            throw InputError("the polar of the point mass is identically 1 and not integrable");
          },
          [&](const GridPotential&) { return LogConcaveFunction::from_grid(f.support_grid()); }},
      f.potential());
}

LogConcaveFunction lp_scalar_mult(double lambda, const LogConcaveFunction& f, double p) {
  if (!(lambda > 0) || !std::isfinite(lambda)) throw InputError("scalar must be positive");
  if (!(p >= 1.0)) throw InputError("p must be at least 1");
  if (lambda == 1.0) return f;
  // support lambda^{1/p} h_f  <=>  potential s u(x/s), s = lambda^{1/p}
  const double s = std::pow(lambda, 1.0 / p);
  return std::visit(
      Overloaded{
          [&](const Quadratic& v) { return LogConcaveFunction(Quadratic{SpdMatrix(v.Q.matrix() / s)}); },
          [&](const GaugePower& v) {
            return LogConcaveFunction(GaugePower{v.body.scaled(std::pow(s, 1.0 - 1.0 / v.q)), v.q});
          },
          [&](const Indicator& v) { return LogConcaveFunction(Indicator{v.body.scaled(s)}); },
          [&](const PointMass&) { return f; },
          [&](const GridPotential& v) {
            std::vector<double> vals(v.grid.values().begin(), v.grid.values().end());
            for (double& u : vals) u *= s;
            return LogConcaveFunction::from_grid(
                Grid(v.grid.dim(), s * v.grid.half_width(), v.grid.points_per_axis(), std::move(vals)));
          }},
      f.potential());
}

LogConcaveFunction lp_asplund_sum_grid(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                       double alpha, double beta, double p, int resolution,
                                       double box_scale) {
  if (f.dim() != g.dim()) throw InputError("summands differ in dimension");
  if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("p must be a finite value >= 1");
  if (!(alpha >= 0) || !(beta >= 0) || !(alpha + beta > 0)) {
    throw InputError("coefficients must be nonnegative and not both zero");
  }
  const int n = f.dim();
  const int points = resolution > 0 ? resolution : default_resolution(n);
  const double c =
      box_scale > 0 ? box_scale : std::max(1.0, std::pow(alpha + beta, 1.0 / p));
  const double r_out = c * std::max(f.box_half_width(), g.box_half_width());
  // The sum on the dilated box keeps the gradient range of the summands.
  const double y_full = std::max(f.dual_half_width(), g.dual_half_width());
  const auto transform = [&](double y_out) {
    const Grid h = Grid::sample(n, y_out, points, [&](const double* y) {
      const double hf = alpha > 0 ? alpha * std::pow(f.support(y), p) : 0.0;
      const double hg = beta > 0 ? beta * std::pow(g.support(y), p) : 0.0;
      return std::pow(hf + hg, 1.0 / p);
    });
    return legendre_transform(h, DualBox{r_out, points});
  };
  Grid u = transform(y_full);
  if (box_scale > 0) return LogConcaveFunction::from_grid(std::move(u));

  // Second pass on the gradient range of the region where e^{-u} is not negligible.
  double needed = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.is_boundary(i) || u[i] > kGridDecayLevel + 5.0) continue;
    double grad[kMaxDim];
    node_gradient(u, i, grad);
    for (int d = 0; d < n; ++d) needed = std::max(needed, std::abs(grad[d]));
  }
  const double y_tight = 1.25 * needed + 4.0 * 2.0 * y_full / (points - 1);
  if (y_tight < 0.8 * y_full) u = transform(y_tight);
  return LogConcaveFunction::from_grid(std::move(u));
}

LogConcaveFunction lp_asplund_sum(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                  double alpha, double beta, double p) {
  if (f.dim() != g.dim()) throw InputError("summands differ in dimension");
  if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("p must be a finite value >= 1");
  if (!(alpha >= 0) || !(beta >= 0)) throw InputError("coefficients must be nonnegative");
  if (alpha == 0 && beta == 0) return LogConcaveFunction(PointMass{f.dim()});
  if (beta == 0) return lp_scalar_mult(alpha, f, p);
  if (alpha == 0) return lp_scalar_mult(beta, g, p);
  return lp_asplund_sum_grid(f, g, alpha, beta, p);
}

Grid sample_potential(const LogConcaveFunction& f, int resolution) {
  if (const auto* g = std::get_if<GridPotential>(&f.potential())) return g->grid;
  const int points = resolution > 0 ? resolution : default_resolution(f.dim());
  return Grid::sample(f.dim(), f.box_half_width(), points,
                      [&](const double* x) { return f.potential_at(x); });
}

double total_mass(const LogConcaveFunction& f) {
  const int n = f.dim();
  return std::visit(
      Overloaded{[&](const Quadratic& v) {
                   return std::pow(2.0 * std::numbers::pi, n / 2.0) / std::sqrt(v.Q.determinant());
                 },
                 [&](const GaugePower& v) {
                   return v.body.volume() * std::pow(v.q, n / v.q) * std::tgamma(1.0 + n / v.q);
                 },
                 [&](const Indicator& v) { return v.body.volume(); },
                 [&](const PointMass&) { return 0.0; },
                 [&](const GridPotential&) { return total_mass_quadrature(f); }},
      f.potential());
}

namespace {

Grid map_values(const Grid& u, double (*fn)(double)) {
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = fn(u[i]);
  return Grid(u.dim(), u.half_width(), u.points_per_axis(), std::move(out));
}

}  // namespace

double total_mass_quadrature(const LogConcaveFunction& f, int resolution) {
  if (std::holds_alternative<PointMass>(f.potential())) return 0.0;
  const Grid u = sample_potential(f, resolution);
  return integrate(map_values(u, [](double v) { return std::exp(-v); }));
}

double entropy_mass(const LogConcaveFunction& f) {
  const int n = f.dim();
  return std::visit(
      Overloaded{[&](const Quadratic&) { return 0.5 * n * total_mass(f); },
                 [&](const GaugePower& v) { return n * total_mass(f) * (1.0 - 1.0 / v.q); },
                 [&](const Indicator& v) { return n * v.body.volume(); },
                 [&](const PointMass&) { return 0.0; },
                 [&](const GridPotential&) { return entropy_mass_quadrature(f); }},
      f.potential());
}

double entropy_mass_quadrature(const LogConcaveFunction& f, int resolution) {
  if (std::holds_alternative<PointMass>(f.potential())) return 0.0;
  const Grid u = sample_potential(f, resolution);
  const double n = f.dim();
  const double mass = integrate(map_values(u, [](double v) { return std::exp(-v); }));
  const double weighted = integrate(map_values(
      u, [](double v) { return std::isfinite(v) ? v * std::exp(-v) : 0.0; }));
  return n * mass - weighted;
}

}  // namespace lpjohn
