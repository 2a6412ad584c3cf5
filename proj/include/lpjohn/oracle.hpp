#pragma once

// Brute-force references: exhaustive search over det-1 Gaussians in the plane,
// importance-sampled total mass, and dense conjugate suprema.

#include <cstdint>
#include <functional>
#include <vector>

#include "lpjohn/variation.hpp"

namespace lpjohn::oracle {

struct OracleConfig {
  std::vector<double> eigen_ratio_grid;  // t in [1/16, 16], log spaced
  std::vector<double> rotation_grid;     // theta in [0, pi)
  int mc_samples = 200000;
  std::uint64_t seed = 7;

  /// 33 ratios and 36 angles.
  static OracleConfig defaults();
  /// Same ranges with twice as many points on each axis.
  OracleConfig refined() const;
};

/// Q(t, theta) = R(theta) diag(t, 1/t) R(theta)^T.
SpdMatrix planar_candidate(double t, double theta);

struct SearchResult {
  SpdMatrix Q_best = SpdMatrix::identity(1);
  double delta_best = 0.0;
  double t = 1.0;
  double theta = 0.0;
  int evaluations = 0;
};

/// Exhaustive minimum of dbar J_p(f, gamma_Q(t, theta)) over the configured
/// grid, then refined by alternating trisection in log t and theta around the
/// best cell. n = 1 evaluates the single candidate Q = 1.
SearchResult grid_search_Sbar(const WeightedPointCloud& cloud, double p, const OracleConfig& config);
SearchResult grid_search_Sbar(const LogConcaveFunction& f, double p, const OracleConfig& config,
                              int resolution = 0);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  double effective_sample_size = 0.0;
};

/// Importance sampling of J(f) with a centred Gaussian proposal whose covariance
/// is twice the second-moment matrix of f. Throws NumericalError when the
/// effective sample size falls below 1% of the sample count.
MonteCarloEstimate mc_total_mass(const LogConcaveFunction& f, const OracleConfig& config);

/// sup over |x_i| <= radius of <x, y> - u(x) on a dense grid of `samples` points
/// per axis, zoomed around the best node. Throws InputError when the coarse
/// maximizer sits on the boundary of the search box.
double dense_conjugate(const std::function<double(const Vector&)>& u, const Vector& y,
                       double radius, int samples);

}  // namespace lpjohn::oracle
