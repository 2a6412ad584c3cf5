#include "lpjohn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace lpjohn {

double GaussianEllipsoid::mass() const {
  return std::pow(2.0 * std::numbers::pi, Q.dim() / 2.0) / std::sqrt(Q.determinant());
}

double GaussianEllipsoid::support(const double* y) const {
  const Eigen::Map<const Vector> v(y, Q.dim());
  return 0.5 * v.dot(Q.inverse() * v);
}

MomentData moment_condition(const WeightedPointCloud& cloud, const SpdMatrix& q, double p) {
  const int n = cloud.dim;
  if (q.dim() != n) throw InputError("candidate matrix has the wrong dimension");
  const Matrix pinv = q.inverse();
  const std::size_t m = cloud.size();
  std::vector<double> ratio(m);
  double r_max = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Map<const Vector> z(cloud.point(i), n);
    ratio[i] = 0.5 * z.dot(pinv * z) / cloud.hf[i];
    r_max = std::max(r_max, ratio[i]);
  }
  if (!(r_max > 0)) throw NumericalError("candidate support vanishes on the cloud");
  // M / delta J_p = (n / (2 r_max)) sum w z z^T rho^{p-1} / sum w hf rho^p, rho = r / r_max
  Matrix acc = Matrix::Zero(n, n);
  double denom = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double rho = ratio[i] / r_max;
    const double rp1 = p == 1.0 ? 1.0 : std::pow(rho, p - 1.0);
    const double c = cloud.weight[i] * rp1;
    const double* z = cloud.point(i);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b <= a; ++b) acc(a, b) += c * z[a] * z[b];
    }
    denom += cloud.weight[i] * cloud.hf[i] * rp1 * rho;
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) acc(a, b) = acc(b, a);
  }
  MomentData out;
  out.moment_over_variation = acc * (n / (2.0 * r_max * denom));
  out.normalized = r_max * std::pow(denom / cloud.entropy_mass, 1.0 / p);
  return out;
}

namespace {

double whitened_residual(const SpdMatrix& q, const Matrix& m_over_f) {
  const int n = q.dim();
  const Matrix s = q.inverse_sqrt();
  const Matrix w = s * m_over_f * s;
  return (w - Matrix::Identity(n, n)).norm() / std::sqrt(static_cast<double>(n));
}

void check_p(double p) {
  if (!(p >= 1.0 && p <= kMaxFiniteP)) {
    throw InputError("finite p must lie in [1, 32]; use inf for the limit problem");
  }
}

// Q^{1/2} exp(s Q^{-1/2} D Q^{-1/2}) Q^{1/2}, D = M/F - Q; det-preserving since
// the whitened direction is traceless.
SpdMatrix geodesic_step(const SpdMatrix& q, const Matrix& m_over_f, double s) {
  const Matrix half = q.sqrt();
  const Matrix ihalf = q.inverse_sqrt();
  Matrix w = ihalf * m_over_f * ihalf;
  w = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(w - Matrix::Identity(q.dim(), q.dim()));
  const Matrix e = eig.eigenvectors() * (s * eig.eigenvalues()).array().exp().matrix().asDiagonal() *
                   eig.eigenvectors().transpose();
  return spd_normalize_det(SpdMatrix(half * e * half));
}

}  // namespace

double kkt_residual(const WeightedPointCloud& cloud, const SpdMatrix& q, double p) {
  return whitened_residual(q, moment_condition(cloud, q, p).moment_over_variation);
}

double kkt_residual(const LogConcaveFunction& f, double p, const SpdMatrix& q, int resolution) {
  check_p(p);
  return kkt_residual(surface_cloud(f, p, resolution), q, p);
}

SpdMatrix moment_initialization(const LogConcaveFunction& f, int resolution) {
  const int n = f.dim();
  if (const auto* quad = std::get_if<Quadratic>(&f.potential())) return spd_normalize_det(quad->Q);
  const Grid u = sample_potential(f, resolution);
  Matrix second = Matrix::Zero(n, n);
  double mass = 0.0;
  double x[kMaxDim] = {0, 0, 0};
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double w = std::exp(-u[i]) * u.trapezoid_factor(i);
    if (!(w > 0)) continue;
    u.node(i, x);
    mass += w;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) second(a, b) += w * x[a] * x[b];
    }
  }
  return spd_normalize_det(SpdMatrix(SpdMatrix(second / mass).inverse()));
}

SolverResult solve_Sbar(const WeightedPointCloud& cloud, double p, const SpdMatrix& initial,
                        const SolverOptions& opts) {
  check_p(p);
  if (!(opts.damping > 0 && opts.damping <= 1)) throw InputError("damping must lie in (0, 1]");
  if (!(opts.tol > 0) || opts.max_iter < 1) throw InputError("invalid solver tolerance or budget");
  const int n = cloud.dim;

  SpdMatrix q = spd_normalize_det(initial);
  MomentData md = moment_condition(cloud, q, p);
  double residual = whitened_residual(q, md.moment_over_variation);

  SolverResult result;
  result.p = p;
  result.trace.push_back({0, md.normalized, residual});
  // Relative slack for "nonincreasing": objective changes near convergence are
  // of the order residual^2 and meet floating-point noise there.
  constexpr double kSlack = 1e-13;

  int it = 0;
  while (residual >= opts.tol && it < opts.max_iter) {
    ++it;
    bool moved = false;
    double theta = opts.damping;
    int non_decrease = 0;
    while (non_decrease < 2) {
      std::optional<SpdMatrix> cand;
      try {
        cand = spd_normalize_det(
            SpdMatrix((1.0 - theta) * q.matrix() + theta * md.moment_over_variation));
      } catch (const InputError&) {
        throw NumericalError("moment matrix is numerically singular");
      }
      MomentData cmd = moment_condition(cloud, *cand, p);
      if (cmd.normalized <= md.normalized * (1.0 + kSlack)) {
        q = *cand;
        md = cmd;
        moved = true;
        break;
      }
      ++non_decrease;
      theta *= 0.5;
    }
    if (!moved) {
      // Geodesic gradient step on log dbar with Armijo backtracking.
      const Matrix ihalf = q.inverse_sqrt();
      const double g2 = (ihalf * md.moment_over_variation * ihalf - Matrix::Identity(n, n))
                            .squaredNorm();
      for (double s = 1.0; s > 1e-12; s *= 0.5) {
        const SpdMatrix cand = geodesic_step(q, md.moment_over_variation, s);
        const MomentData cmd = moment_condition(cloud, cand, p);
        if (std::log(cmd.normalized) <= std::log(md.normalized) - 1e-4 * s * g2 / n ||
            (cmd.normalized <= md.normalized * (1.0 + kSlack) &&
             whitened_residual(cand, cmd.moment_over_variation) < residual)) {
          q = cand;
          md = cmd;
          moved = true;
          break;
        }
      }
    }
    if (!moved) break;
    residual = whitened_residual(q, md.moment_over_variation);
    result.trace.push_back({it, md.normalized, residual});
  }

  result.Q_bar = q;
  result.delta_bar = md.normalized;
  result.E_p = rescale_to_Sp(q, md.normalized);
  result.kkt_residual = residual;
  result.iterations = it;
  result.converged = residual < opts.tol;
  result.excluded_mass = cloud.excluded_mass;
  result.cloud_size = cloud.size();
  return result;
}

SolverResult solve_Sbar(const LogConcaveFunction& f, double p, const SolverOptions& opts) {
  check_p(p);
  const WeightedPointCloud cloud = surface_cloud(f, p, opts.resolution);
  const SpdMatrix init = opts.initial ? *opts.initial : moment_initialization(f, opts.resolution);
  return solve_Sbar(cloud, p, init, opts);
}

GaussianEllipsoid rescale_to_Sp(const SpdMatrix& q_bar, double delta_bar) {
  if (!(delta_bar > 0) || !std::isfinite(delta_bar)) {
    throw NumericalError("normalized variation must be positive and finite to rescale");
  }
  return GaussianEllipsoid{SpdMatrix(q_bar.matrix() * delta_bar)};
}

SolverResult solve_Ep(const LogConcaveFunction& f, double p, const SolverOptions& opts) {
  if (std::isinf(p) && p > 0) return solve_Ep_infinity(f, opts);
  return solve_Sbar(f, p, opts);
}

namespace {

struct Mvee {
  Matrix m;  // sum u_i w_i w_i^T
  double gap;
};

// Khachiyan iterations with away steps on the columns of pts indexed by active,
// warm-started from weights u (aligned with active).
void mvee_active(const Matrix& pts, const std::vector<std::size_t>& active, std::vector<double>& u,
                 double eps, int max_steps) {
  const int n = static_cast<int>(pts.rows());
  const std::size_t k = active.size();
  std::vector<double> g(k);
  for (int step = 0; step < max_steps; ++step) {
    Matrix m = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < k; ++i) {
      if (u[i] > 0) m.noalias() += u[i] * pts.col(active[i]) * pts.col(active[i]).transpose();
    }
    const Matrix minv = m.inverse();
    std::size_t jmax = 0, jmin = 0;
    double gmax = -1.0, gmin = kInfinity;
    for (std::size_t i = 0; i < k; ++i) {
      const auto w = pts.col(active[i]);
      g[i] = w.dot(minv * w);
      if (g[i] > gmax) {
        gmax = g[i];
        jmax = i;
      }
      if (u[i] > 0 && g[i] < gmin) {
        gmin = g[i];
        jmin = i;
      }
    }
    const double up = gmax / n - 1.0;
    const double down = 1.0 - gmin / n;
    if (up <= eps && down <= eps) return;
    if (up >= down) {
      const double beta = (gmax / n - 1.0) / (gmax - 1.0);
      for (double& v : u) v *= 1.0 - beta;
      u[jmax] += beta;
    } else {
      double beta = (gmin / n - 1.0) / (gmin - 1.0);
      const double floor = -u[jmin] / (1.0 - u[jmin]);
      // For g < 1 the unconstrained optimum lies past the simplex: drop the point.
      if (!(gmin > 1.0) || beta < floor) beta = floor;
      for (double& v : u) v *= 1.0 - beta;
      u[jmin] += beta;
      if (u[jmin] < 1e-300) u[jmin] = 0.0;
    }
  }
}

}  // namespace

SolverResult solve_Ep_infinity(const WeightedPointCloud& cloud, const SolverOptions& opts) {
  const int n = cloud.dim;
  const std::size_t m = cloud.size();
  Matrix pts(n, static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const double s = 1.0 / std::sqrt(2.0 * cloud.hf[i]);
    for (int a = 0; a < n; ++a) pts(a, static_cast<Eigen::Index>(i)) = cloud.point(i)[a] * s;
  }

  // Seed the active set with the extreme points of the cloud in a spread of directions.
  std::vector<std::size_t> active;
  for (const Vector& d : sphere_directions(n)) {
    std::size_t best = 0;
    double best_dot = -kInfinity;
    for (std::size_t i = 0; i < m; ++i) {
      const double v = pts.col(static_cast<Eigen::Index>(i)).dot(d);
      if (v > best_dot) {
        best_dot = v;
        best = i;
      }
    }
    if (std::find(active.begin(), active.end(), best) == active.end()) active.push_back(best);
  }
  std::vector<double> u(active.size(), 1.0 / active.size());
  std::vector<double> g(m);

  const double eps = std::min(1e-10, opts.tol * 1e-3);
  Matrix mat;
  double gmax = 0.0;
  int rounds = 0;
  for (; rounds < 200; ++rounds) {
    mvee_active(pts, active, u, eps, 200000);
    mat = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (u[i] > 0) mat.noalias() += u[i] * pts.col(active[i]) * pts.col(active[i]).transpose();
    }
    const Matrix minv = mat.inverse();
    gmax = 0.0;
    std::vector<std::pair<double, std::size_t>> violators;
    for (std::size_t i = 0; i < m; ++i) {
      g[i] = pts.col(i).dot(minv * pts.col(i));
      gmax = std::max(gmax, g[i]);
      if (g[i] > n * (1.0 + eps)) violators.emplace_back(-g[i], i);
    }
    if (violators.empty()) break;
    std::sort(violators.begin(), violators.end());
    const std::size_t add = std::min<std::size_t>(violators.size(), 64);
    for (std::size_t k = 0; k < add; ++k) {
      const std::size_t idx = violators[k].second;
      if (std::find(active.begin(), active.end(), idx) != active.end()) continue;
      active.push_back(idx);
      u.push_back(0.0);
    }
  }

  // P = M^{-1} / max g is feasible; Q_E = P^{-1}.
  const SpdMatrix q_e(mat * gmax);
  SolverResult result;
  result.p = kInfinity;
  result.E_p = GaussianEllipsoid{q_e};
  result.Q_bar = spd_normalize_det(q_e);
  result.delta_bar = std::exp(q_e.eigenvalues().array().log().sum() / n);
  result.kkt_residual = gmax / n - 1.0;
  result.iterations = rounds + 1;
  result.converged = result.kkt_residual < opts.tol;
  result.trace.push_back({result.iterations, result.delta_bar, result.kkt_residual});
  result.excluded_mass = cloud.excluded_mass;
  result.cloud_size = cloud.size();
  return result;
}

SolverResult solve_Ep_infinity(const LogConcaveFunction& f, const SolverOptions& opts) {
  return solve_Ep_infinity(surface_cloud(f, kInfinity, opts.resolution), opts);
}

}  // namespace lpjohn
