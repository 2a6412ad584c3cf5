#include "lpjohn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace lpjohn::oracle {

OracleConfig OracleConfig::defaults() {
  OracleConfig c;
  const int nt = 33, na = 36;
  for (int i = 0; i < nt; ++i) c.eigen_ratio_grid.push_back(std::pow(16.0, -1.0 + 2.0 * i / (nt - 1)));
  for (int i = 0; i < na; ++i) c.rotation_grid.push_back(std::numbers::pi * i / na);
  return c;
}

OracleConfig OracleConfig::refined() const {
  OracleConfig c = *this;
  const std::size_t nt = 2 * eigen_ratio_grid.size() - 1;
  const std::size_t na = 2 * rotation_grid.size();
  c.eigen_ratio_grid.clear();
  c.rotation_grid.clear();
  for (std::size_t i = 0; i < nt; ++i) {
    c.eigen_ratio_grid.push_back(std::pow(16.0, -1.0 + 2.0 * static_cast<double>(i) / (nt - 1)));
  }
  for (std::size_t i = 0; i < na; ++i) {
    c.rotation_grid.push_back(std::numbers::pi * static_cast<double>(i) / na);
  }
  return c;
}

SpdMatrix planar_candidate(double t, double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = t;
  d(1, 1) = 1.0 / t;
  return SpdMatrix(r * d * r.transpose());
}

namespace {

double objective(const WeightedPointCloud& cloud, double p, const SpdMatrix& q) {
  const Matrix inv = q.inverse();
  const int n = cloud.dim;
  return normalized_variation(
      cloud,
      [&](const double* y) {
        const Eigen::Map<const Vector> v(y, n);
        return 0.5 * v.dot(inv * v);
      },
      p);
}

// Minimizer of a unimodal function on [lo, hi] by trisection.
double trisect(const std::function<double(double)>& fn, double lo, double hi, int iters) {
  for (int k = 0; k < iters; ++k) {
    const double a = lo + (hi - lo) / 3.0;
    const double b = hi - (hi - lo) / 3.0;
    if (fn(a) <= fn(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SearchResult grid_search_Sbar(const WeightedPointCloud& cloud, double p, const OracleConfig& config) {
  if (config.eigen_ratio_grid.empty() || config.rotation_grid.empty()) {
    throw InputError("oracle search grids must be nonempty");
  }
  SearchResult best;
  if (cloud.dim == 1) {
    best.Q_best = SpdMatrix::identity(1);
    best.delta_best = objective(cloud, p, best.Q_best);
    best.evaluations = 1;
    return best;
  }
  if (cloud.dim != 2) throw InputError("the exhaustive search is limited to dimension 2");

  best.delta_best = kInfinity;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < config.eigen_ratio_grid.size(); ++i) {
    for (std::size_t j = 0; j < config.rotation_grid.size(); ++j) {
      const double t = config.eigen_ratio_grid[i];
      const double th = config.rotation_grid[j];
      const double v = objective(cloud, p, planar_candidate(t, th));
      ++best.evaluations;
      if (v < best.delta_best) {
        best.delta_best = v;
        best.t = t;
        best.theta = th;
        bi = i;
        bj = j;
      }
    }
  }

  // Local refinement within one grid cell on each side of the best node.
  const auto& ts = config.eigen_ratio_grid;
  const auto& as = config.rotation_grid;
  double log_lo = std::log(ts[bi > 0 ? bi - 1 : bi]);
  double log_hi = std::log(ts[bi + 1 < ts.size() ? bi + 1 : bi]);
  const double da = as.size() > 1 ? as[1] - as[0] : std::numbers::pi;
  double lt = std::log(best.t);
  double th = best.theta;
  (void)bj;
  for (int round = 0; round < 6; ++round) {
    if (log_hi > log_lo) {
      lt = trisect(
          [&](double v) {
            ++best.evaluations;
            return objective(cloud, p, planar_candidate(std::exp(v), th));
          },
          log_lo, log_hi, 40);
    }
    th = trisect(
        [&](double v) {
          ++best.evaluations;
          return objective(cloud, p, planar_candidate(std::exp(lt), v));
        },
        th - da, th + da, 40);
  }
  const double v = objective(cloud, p, planar_candidate(std::exp(lt), th));
  if (v <= best.delta_best) {
    best.delta_best = v;
    best.t = std::exp(lt);
    best.theta = th;
  }
  best.Q_best = planar_candidate(best.t, best.theta);
  return best;
}

SearchResult grid_search_Sbar(const LogConcaveFunction& f, double p, const OracleConfig& config,
                              int resolution) {
  return grid_search_Sbar(surface_cloud(f, p, resolution), p, config);
}

MonteCarloEstimate mc_total_mass(const LogConcaveFunction& f, const OracleConfig& config) {
  if (config.mc_samples < 2) throw InputError("mc_samples must be at least 2");
  const int n = f.dim();
  // Second moments of f from its grid sample.
  const Grid u = sample_potential(f);
  Matrix second = Matrix::Zero(n, n);
  double mass = 0.0;
  double x[kMaxDim] = {0, 0, 0};
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double w = std::exp(-u[i]);
    if (!(w > 0)) continue;
    u.node(i, x);
    mass += w;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) second(a, b) += w * x[a] * x[b];
    }
  }
  if (!(mass > 0)) throw NumericalError("function has no mass on its sampling grid");
  const SpdMatrix cov(2.0 * second / mass);
  const Matrix chol = cov.sqrt();
  const double log_norm =
      0.5 * n * std::log(2.0 * std::numbers::pi) + 0.5 * std::log(cov.determinant());
  const Matrix prec = cov.inverse();

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector e(n);
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < config.mc_samples; ++s) {
    for (int a = 0; a < n; ++a) e(a) = normal(rng);
    const Vector xs = chol * e;
    const double log_q = -0.5 * xs.dot(prec * xs) - log_norm;
    const double w = std::exp(-f.potential_at(xs) - log_q);
    sum += w;
    sum_sq += w * w;
  }
  const double m = config.mc_samples;
  MonteCarloEstimate out;
  out.estimate = sum / m;
  const double var = std::max(0.0, sum_sq / m - out.estimate * out.estimate);
  out.standard_error = std::sqrt(var / (m - 1));
  out.effective_sample_size = sum_sq > 0 ? sum * sum / sum_sq : 0.0;
  if (out.effective_sample_size < 0.01 * m) {
    throw NumericalError("importance sampling degenerate: effective sample size below 1%");
  }
  return out;
}

double dense_conjugate(const std::function<double(const Vector&)>& u, const Vector& y,
                       double radius, int samples) {
  const int n = static_cast<int>(y.size());
  if (n < 1 || n > kMaxDim) throw InputError("dimension must be 1, 2 or 3");
  if (!(radius > 0) || samples < 3) throw InputError("dense search needs radius > 0, samples >= 3");
  Vector center = Vector::Zero(n);
  double half = radius;
  double best = -kInfinity;
  Vector x(n), arg = center;
  for (int level = 0; level < 40; ++level) {
    const double h = 2.0 * half / (samples - 1);
    std::size_t total = 1;
    for (int a = 0; a < n; ++a) total *= static_cast<std::size_t>(samples);
    bool on_edge = false;
    double level_best = -kInfinity;
    Vector level_arg = center;
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      bool edge = false;
      for (int a = n - 1; a >= 0; --a) {
        const int k = static_cast<int>(rem % samples);
        rem /= samples;
        x(a) = center(a) - half + h * k;
        edge |= k == 0 || k == samples - 1;
      }
      const double v = x.dot(y) - u(x);
      if (v > level_best) {
        level_best = v;
        level_arg = x;
        on_edge = edge;
      }
    }
    if (level == 0 && on_edge) {
      throw InputError("dense conjugate maximizer lies on the search boundary; enlarge the radius");
    }
    if (level_best > best) {
      best = level_best;
      arg = level_arg;
    }
    center = arg;
    half = 2.0 * h;
    if (half < 1e-13 * radius) break;
  }
  return best;
}

}  // namespace lpjohn::oracle
