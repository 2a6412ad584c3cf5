#include "lpjohn/variation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lpjohn {

namespace {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int m) {
    for (int i = 0; i < m; ++i) {
      double t = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= m; ++k) {
          const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = m * (t * p1 - p0) / (t * t - 1.0);
        const double step = p1 / dp;
        t -= step;
        if (std::abs(step) < 1e-16) break;
      }
      x.push_back(t);
      w.push_back(2.0 / ((1.0 - t * t) * dp * dp));
    }
  }
};

// Polytope gauge powers: on the cone over facet i (gauge a_i . x) the gradient
// is s^{q-1} a_i with s the gauge value, so mu(f) lives on the rays through the
// rows a_i with radial density (|F_i| / |a_i|) s^{n-1} e^{-s^q / q}.
WeightedPointCloud polytope_ray_cloud(const GaugePower& gp, int n, double p, int resolution) {
  const double q = gp.q;
  const double c = 1.0 - 1.0 / q;
  const double s_max = std::pow(60.0 * q, 1.0 / q);  // e^{-u} < 1e-26 beyond
  const double s_floor = std::pow(kHfFloor / c, 1.0 / q);
  const int res = resolution > 0 ? resolution : default_resolution(n);
  const int uniform = std::max(16, (res - 1) / 4);
  const double width = s_max / uniform;

  std::vector<std::pair<double, double>> panels;
  double hi = width;
  while (hi / 2 > s_floor) {
    panels.emplace_back(hi / 2, hi);
    hi /= 2;
  }
  panels.emplace_back(s_floor, hi);
  for (int k = 1; k < uniform; ++k) panels.emplace_back(k * width, (k + 1) * width);

  static const GaussLegendre gl(10);
  const auto& rows = gp.body.rows();
  const auto& areas = gp.body.facet_areas();

  WeightedPointCloud cloud;
  cloud.dim = n;
  cloud.p = p;
  cloud.spacing = width;
  double inner = 0.0;  // mass of the gauge ball of radius s_floor
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double density = areas[i] / rows[i].norm();
    inner += density * std::pow(s_floor, n) / n;
    for (const auto& [a, b] : panels) {
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (std::size_t k = 0; k < gl.x.size(); ++k) {
        const double s = mid + half * gl.x[k];
        const double w = density * std::pow(s, n - 1) * std::exp(-std::pow(s, q) / q) * half * gl.w[k];
        const double scale = std::pow(s, q - 1.0);
        for (int d = 0; d < n; ++d) cloud.z.push_back(scale * rows[i](d));
        cloud.hf.push_back(c * std::pow(s, q));
        cloud.weight.push_back(w);
        cloud.total_weight += w;
        cloud.entropy_mass += w * cloud.hf.back();
      }
    }
  }
  // Below s_floor h_f < 1e-8: excluded for p > 1, the minimum cell for p = 1.
  (p > 1.0 ? cloud.excluded_mass : cloud.origin_mass) += inner;
  return cloud;
}

// Quadratic potentials in whitened coordinates y = Q^{1/2} x: z = Q^{1/2} y,
// h_f(z) = |y|^2 / 2 and weight e^{-|y|^2/2} dy / sqrt(det Q), on an isotropic
// grid whatever the conditioning of Q.
WeightedPointCloud quadratic_cloud(const SpdMatrix& q, int n, double p, int resolution) {
  const int res = resolution > 0 ? resolution : default_resolution(n);
  const double radius = std::sqrt(2.0 * 32.0);
  const Grid y = Grid::sample(n, radius, res, [n](const double* v) {
    double r = 0.0;
    for (int d = 0; d < n; ++d) r += v[d] * v[d];
    return 0.5 * r;
  });
  const Matrix root = q.sqrt();
  const double jac = 1.0 / std::sqrt(q.determinant());
  const double cell = y.cell_volume() * jac;
  const std::size_t origin = y.origin_index();

  WeightedPointCloud cloud;
  cloud.dim = n;
  cloud.p = p;
  cloud.spacing = y.spacing() * std::sqrt(q.eigenvalues().minCoeff());
  double node[kMaxDim] = {0, 0, 0};
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double hf = y[i];
    const double w = std::exp(-hf) * cell * y.trapezoid_factor(i);
    if (i == origin) {
      cloud.origin_mass += w;
      continue;
    }
    if (hf < kHfFloor && p > 1.0) {
      cloud.excluded_mass += w;
      continue;
    }
    y.node(i, node);
    const Vector z = root * Eigen::Map<const Vector>(node, n);
    cloud.z.insert(cloud.z.end(), z.data(), z.data() + n);
    cloud.hf.push_back(hf);
    cloud.weight.push_back(w);
    cloud.total_weight += w;
    cloud.entropy_mass += w * hf;
  }
  return cloud;
}

}  // namespace

WeightedPointCloud surface_cloud(const LogConcaveFunction& f, double p, int resolution) {
  if (!(p >= 1.0)) throw InputError("p must be at least 1");
  if (!f.has_gradient()) {
    throw InputError("surface measure needs a differentiable potential (indicators have none)");
  }
  const int n = f.dim();
  if (const auto* gp = std::get_if<GaugePower>(&f.potential()); gp && gp->body.is_polytope()) {
    WeightedPointCloud cloud = polytope_ray_cloud(*gp, n, p, resolution);
    if (cloud.excluded_mass >= kExcludedMassFraction * total_mass(f)) {
      throw NumericalError("excluded mass reaches 1e-3 J(f)");
    }
    return cloud;
  }
  if (const auto* qd = std::get_if<Quadratic>(&f.potential())) {
    return quadratic_cloud(qd->Q, n, p, resolution);
  }
  const Grid u = sample_potential(f, resolution);
  const auto vals = u.values();
  const std::size_t origin = u.origin_index();
  const double cell = u.cell_volume();

  WeightedPointCloud cloud;
  cloud.dim = n;
  cloud.p = p;
  cloud.spacing = u.spacing();
  cloud.z.reserve(u.size() * n);
  cloud.hf.reserve(u.size());
  cloud.weight.reserve(u.size());

  const auto* gauge = std::get_if<GaugePower>(&f.potential());
  const auto* quad = std::get_if<Quadratic>(&f.potential());
  std::vector<std::array<double, kMaxDim>> grads;
  double x[kMaxDim] = {0, 0, 0};
  double z[kMaxDim] = {0, 0, 0};

  auto accept = [&](const double* zz, double hf, double w) {
    if (hf < kHfFloor && (p > 1.0 || hf < 0.0)) {
      cloud.excluded_mass += w;
      return;
    }
    cloud.z.insert(cloud.z.end(), zz, zz + n);
    cloud.hf.push_back(hf);
    cloud.weight.push_back(w);
    cloud.total_weight += w;
    cloud.entropy_mass += w * hf;
  };

  for (std::size_t i = 0; i < u.size(); ++i) {
    const double ui = vals[i];
    const double w = std::exp(-ui) * cell * u.trapezoid_factor(i);
    if (!(w > 0)) continue;
    if (i == origin) {
      cloud.origin_mass += w;
      continue;
    }
    u.node(i, x);
    if (gauge != nullptr) {
      const double g = gauge->body.gauge(x);
      gauge->body.gauge_gradients(x, grads);
      const double scale = std::pow(g, gauge->q - 1.0);
      const double hf = std::pow(g, gauge->q) * (1.0 - 1.0 / gauge->q);
      const double share = w / static_cast<double>(grads.size());
      for (const auto& a : grads) {
        for (int d = 0; d < n; ++d) z[d] = scale * a[d];
        accept(z, hf, share);
      }
      continue;
    }
    if (quad != nullptr) {
      const Eigen::Map<const Vector> xv(x, n);
      Eigen::Map<Vector>(z, n) = quad->Q.matrix() * xv;
    } else {
      node_gradient(u, i, z);
    }
    double hf = -ui;
    for (int d = 0; d < n; ++d) hf += x[d] * z[d];
    accept(z, hf, w);
  }

  const double mass = total_mass(f);
  if (cloud.excluded_mass >= kExcludedMassFraction * mass) {
    std::ostringstream msg;
    msg << "excluded mass " << cloud.excluded_mass << " reaches 1e-3 J(f) = "
        << kExcludedMassFraction * mass << "; refine the resolution or lower p";
    throw NumericalError(msg.str());
  }
  if (cloud.size() == 0 || !(cloud.entropy_mass > 0)) {
    throw NumericalError("surface cloud is empty at this resolution");
  }
  return cloud;
}

namespace {

struct Accumulated {
  double r_max = 0.0;
  double scaled_sum = 0.0;  // sum nu (r / r_max)^p
  double linear_sum = 0.0;  // sum w h_g, used when p = 1
};

Accumulated accumulate(const WeightedPointCloud& cloud, const SupportFn& hg, double p) {
  Accumulated acc;
  std::vector<double> ratio(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double h = hg(cloud.point(i));
    if (!std::isfinite(h)) throw NumericalError("support function of g is not finite on the cloud");
    const double hv = std::max(0.0, h);
    acc.linear_sum += cloud.weight[i] * hv;
    ratio[i] = hv / cloud.hf[i];
    acc.r_max = std::max(acc.r_max, ratio[i]);
  }
  if (std::isfinite(p) && p > 1.0 && acc.r_max > 0) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (ratio[i] == 0) continue;
      acc.scaled_sum += cloud.weight[i] * cloud.hf[i] * std::pow(ratio[i] / acc.r_max, p);
    }
  }
  return acc;
}

double normalized_from(const Accumulated& acc, const WeightedPointCloud& cloud, double p) {
  if (!std::isfinite(p)) return acc.r_max;
  if (p == 1.0) return acc.linear_sum / cloud.entropy_mass;
  if (acc.r_max == 0) return 0.0;
  return acc.r_max * std::pow(acc.scaled_sum / cloud.entropy_mass, 1.0 / p);
}

}  // namespace

double normalized_variation(const WeightedPointCloud& cloud, const SupportFn& hg, double p) {
  if (!(p >= 1.0)) throw InputError("p must be at least 1");
  return normalized_from(accumulate(cloud, hg, p), cloud, p);
}

VariationReport lp_first_variation(const WeightedPointCloud& cloud, const SupportFn& hg, double p) {
  if (!(p >= 1.0)) throw InputError("p must be at least 1");
  const Accumulated acc = accumulate(cloud, hg, p);
  VariationReport report;
  report.p = p;
  report.normalized = normalized_from(acc, cloud, p);
  report.entropy_mass_used = cloud.entropy_mass;
  report.cloud_size = cloud.size();
  report.excluded_mass = cloud.excluded_mass;
  report.origin_mass = cloud.origin_mass;
  if (std::isfinite(p)) {
    report.delta_Jp = p == 1.0 ? acc.linear_sum : std::pow(acc.r_max, p) * acc.scaled_sum / p;
  }
  return report;
}

VariationReport lp_first_variation(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                   double p, int resolution) {
  if (f.dim() != g.dim()) throw InputError("f and g differ in dimension");
  const WeightedPointCloud cloud = surface_cloud(f, p, resolution);
  VariationReport report =
      lp_first_variation(cloud, [&g](const double* y) { return g.support(y); }, p);
  if (!std::isfinite(p)) {
    const SupRatio sup = sup_ratio_variation(f, g);
    report.normalized = sup.value;
    report.unbounded = sup.unbounded;
    report.diagnostic = sup.diagnostic;
  }
  return report;
}

namespace {

double mass_of_sum(const LogConcaveFunction& f, const LogConcaveFunction& g, double p, double t,
                   int resolution, double scale) {
  return total_mass_quadrature(lp_asplund_sum_grid(f, g, 1.0, t, p, resolution, scale));
}

void check_fd_step(double t) {
  if (!(t >= 1e-4 && t <= 1e-1)) throw InputError("difference step t must lie in [1e-4, 1e-1]");
}

}  // namespace

double lp_first_variation_fd(const LogConcaveFunction& f, const LogConcaveFunction& g, double p,
                             double t, int resolution) {
  check_fd_step(t);
  if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("p must be a finite value >= 1");
  const double scale = std::pow(1.0 + t, 1.0 / p);
  const double j0 = mass_of_sum(f, g, p, 0.0, resolution, scale);
  const double jt = mass_of_sum(f, g, p, t, resolution, scale);
  return (jt - j0) / t;
}

double lp_first_variation_fd_extrapolated(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                          double p, double t, int resolution) {
  check_fd_step(t);
  check_fd_step(t / 2);
  if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("p must be a finite value >= 1");
  const double scale = std::pow(1.0 + t, 1.0 / p);
  const double j0 = mass_of_sum(f, g, p, 0.0, resolution, scale);
  const double jh = mass_of_sum(f, g, p, t / 2, resolution, scale);
  const double jt = mass_of_sum(f, g, p, t, resolution, scale);
  const double d_half = (jh - j0) / (t / 2);
  const double d_full = (jt - j0) / t;
  return 2.0 * d_half - d_full;
}

std::vector<Vector> sphere_directions(int dim) {
  std::vector<Vector> dirs;
  if (dim == 1) {
    dirs.push_back(Vector::Constant(1, 1.0));
    dirs.push_back(Vector::Constant(1, -1.0));
  } else if (dim == 2) {
    for (int k = 0; k < 64; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 64;
      Vector d(2);
      d << std::cos(a), std::sin(a);
      dirs.push_back(d);
    }
  } else {
    const int m = 256;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < m; ++k) {
      const double zc = 1.0 - (2.0 * k + 1.0) / m;
      const double r = std::sqrt(1.0 - zc * zc);
      Vector d(3);
      d << r * std::cos(golden * k), r * std::sin(golden * k), zc;
      dirs.push_back(d);
    }
  }
  return dirs;
}

namespace {

// Point from (angles..., log radius).
Vector to_point(int dim, const std::array<double, 3>& s) {
  Vector y(dim);
  const double r = std::exp(s[dim == 1 ? 0 : dim - 1]);
  if (dim == 1) {
    y(0) = r;
  } else if (dim == 2) {
    y << r * std::cos(s[0]), r * std::sin(s[0]);
  } else {
    y << r * std::sin(s[0]) * std::cos(s[1]), r * std::sin(s[0]) * std::sin(s[1]),
        r * std::cos(s[0]);
  }
  return y;
}

double golden_max(const std::function<double(double)>& fn, double lo, double hi, int iters) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int k = 0; k < iters; ++k) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace

SupRatio sup_ratio_variation(const LogConcaveFunction& f, const LogConcaveFunction& g) {
  if (f.dim() != g.dim()) throw InputError("f and g differ in dimension");
  const int n = f.dim();
  double r_hi = f.dual_half_width();
  if (g.is_grid()) r_hi = std::min(r_hi, g.dual_half_width());
  // Discrete conjugates vanish near the origin, so grids only resolve the ratio
  // away from it.
  const bool grid = f.is_grid() || g.is_grid();
  const double r_lo = r_hi * (grid ? 0.1 : 1e-3);
  const double log_lo = std::log(r_lo), log_hi = std::log(r_hi);

  auto ratio = [&](const Vector& y) {
    const double hf = f.support(y);
    const double hg = std::max(0.0, g.support(y));
    if (!(hf > 0)) return hg > 0 ? kInfinity : 0.0;
    return hg / hf;
  };

  const auto dirs = sphere_directions(n);
  constexpr int kRadii = 64;
  double best = -1.0;
  int best_dir = 0, best_rad = 0;
  std::vector<double> best_profile(kRadii);
  std::vector<double> profile(kRadii);
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    for (int k = 0; k < kRadii; ++k) {
      const double r = std::exp(log_lo + (log_hi - log_lo) * k / (kRadii - 1));
      profile[k] = ratio(r * dirs[d]);
      if (profile[k] > best) {
        best = profile[k];
        best_dir = static_cast<int>(d);
        best_rad = k;
      }
    }
    if (static_cast<int>(d) == best_dir) best_profile = profile;
  }

  SupRatio out;
  if (!std::isfinite(best)) {
    out.value = kInfinity;
    out.unbounded = true;
    out.diagnostic = "h_f vanishes where h_g is positive";
    return out;
  }
  const double growth = 1e-6;
  if ((best_rad == kRadii - 1 && best_profile[kRadii - 1] > best_profile[kRadii - 2] * (1 + growth)) ||
      (best_rad == 0 && best_profile[0] > best_profile[1] * (1 + growth))) {
    std::ostringstream msg;
    msg << "ratio h_g/h_f still growing at radius "
        << (best_rad == 0 ? r_lo : r_hi) << " (value " << best << ")";
    out.value = kInfinity;
    out.unbounded = true;
    out.diagnostic = msg.str();
    out.argmax = std::exp(best_rad == 0 ? log_lo : log_hi) * dirs[best_dir];
    return out;
  }

  // Local refinement in (angles, log radius) by coordinate-wise golden sections.
  std::array<double, 3> s{0, 0, 0};
  const Vector& d0 = dirs[best_dir];
  const double step_r = (log_hi - log_lo) / (kRadii - 1);
  double step_a = 0.0;
  if (n == 1) {
    s[0] = log_lo + step_r * best_rad;
  } else if (n == 2) {
    s[0] = std::atan2(d0(1), d0(0));
    s[1] = log_lo + step_r * best_rad;
    step_a = 2.0 * std::numbers::pi / 64;
  } else {
    s[0] = std::acos(std::clamp(d0(2), -1.0, 1.0));
    s[1] = std::atan2(d0(1), d0(0));
    s[2] = log_lo + step_r * best_rad;
    step_a = std::sqrt(4.0 * std::numbers::pi / 256);
  }
  const double sign = n == 1 ? d0(0) : 1.0;
  auto eval = [&](const std::array<double, 3>& st) {
    Vector y = to_point(n, st);
    if (n == 1) y(0) *= sign;
    return ratio(y);
  };
  double value = eval(s);
  const int radial = n == 1 ? 0 : n - 1;
  for (int sweep = 0; sweep < 4; ++sweep) {
    for (int c = 0; c < n; ++c) {
      const double step = c == radial ? step_r : step_a;
      double lo = s[c] - step, hi = s[c] + step;
      if (c == radial) {
        lo = std::max(lo, log_lo);
        hi = std::min(hi, log_hi);
      }
      auto line = [&](double v) {
        auto st = s;
        st[c] = v;
        return eval(st);
      };
      const double arg = golden_max(line, lo, hi, 40);
      const double cand = line(arg);
      if (cand > value) {
        value = cand;
        s[c] = arg;
      }
    }
  }
  out.value = std::max(value, best);
  out.argmax = to_point(n, s);
  if (n == 1) out.argmax(0) *= sign;
  return out;
}

LipschitzDiagnostic lipschitz_diagnostic(const WeightedPointCloud& cloud, const SupportFn& hg,
                                         const SupportFn& hg0, double p) {
  WeightedPointCloud outer;
  outer.dim = cloud.dim;
  outer.p = cloud.p;
  outer.spacing = cloud.spacing;
  double sup_diff = 0.0;
  double min_hf = kInfinity;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double* z = cloud.point(i);
    double norm2 = 0.0;
    for (int d = 0; d < cloud.dim; ++d) norm2 += z[d] * z[d];
    if (std::sqrt(norm2) < cloud.spacing) continue;
    outer.z.insert(outer.z.end(), z, z + cloud.dim);
    outer.hf.push_back(cloud.hf[i]);
    outer.weight.push_back(cloud.weight[i]);
    outer.entropy_mass += cloud.weight[i] * cloud.hf[i];
    sup_diff = std::max(sup_diff, std::abs(hg(z) - hg0(z)));
    min_hf = std::min(min_hf, cloud.hf[i]);
  }
  LipschitzDiagnostic diag;
  if (outer.size() == 0) return diag;
  diag.lhs = std::abs(normalized_variation(outer, hg, p) - normalized_variation(outer, hg0, p));
  diag.bound = sup_diff / min_hf;
  diag.holds = diag.lhs <= diag.bound * (1 + 1e-12);
  return diag;
}

}  // namespace lpjohn
