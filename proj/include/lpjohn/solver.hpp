#pragma once

// Optimal Gaussians: minimize the normalized first variation over det-1
// Gaussians, rescale to the mass-maximizing Gaussian, and check stationarity.

#include <optional>
#include <vector>

#include "lpjohn/variation.hpp"

namespace lpjohn {

/// gamma_Q(x) = exp(-x^T Q x / 2).
struct GaussianEllipsoid {
  SpdMatrix Q;
  double mass() const;
  /// h(y) = y^T Q^{-1} y / 2.
  double support(const double* y) const;
};

struct SolverOptions {
  double damping = 0.5;
  double tol = 1e-6;
  int max_iter = 200;
  int resolution = 0;  // 0: default for the dimension
  std::optional<SpdMatrix> initial;
};

struct TraceEntry {
  int iteration;
  double objective;  // normalized variation at the iterate
  double residual;
};

struct SolverResult {
  double p = 1.0;
  SpdMatrix Q_bar = SpdMatrix::identity(1);
  double delta_bar = 0.0;
  GaussianEllipsoid E_p{SpdMatrix::identity(1)};
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<TraceEntry> trace;
  double excluded_mass = 0.0;
  std::size_t cloud_size = 0;
};

/// Moment data of a candidate gamma_Q on a cloud: M/delta J_p (which equals Q
/// at the optimum) and the normalized variation.
struct MomentData {
  Matrix moment_over_variation;
  double normalized = 0.0;
};
MomentData moment_condition(const WeightedPointCloud& cloud, const SpdMatrix& q, double p);

/// ||Q^{-1/2} (M / delta J_p) Q^{-1/2} - I||_F / sqrt(n).
double kkt_residual(const WeightedPointCloud& cloud, const SpdMatrix& q, double p);
double kkt_residual(const LogConcaveFunction& f, double p, const SpdMatrix& q, int resolution = 0);

/// Inverse second-moment matrix of f, normalized to det 1.
SpdMatrix moment_initialization(const LogConcaveFunction& f, int resolution = 0);

/// Problem: minimize dbar J_p(f, gamma_Q) over det Q = 1 (finite p in [1, 32]).
/// Damped fixed point Q <- normalize((1 - theta) Q + theta M/delta J_p) with a
/// monotone descent guard and a geodesic gradient fallback.
SolverResult solve_Sbar(const LogConcaveFunction& f, double p, const SolverOptions& opts = {});
SolverResult solve_Sbar(const WeightedPointCloud& cloud, double p, const SpdMatrix& initial,
                        const SolverOptions& opts = {});

/// gamma_{Q_E} with Q_E = delta_bar Q_bar; mass (2 pi)^{n/2} delta_bar^{-n/2}.
GaussianEllipsoid rescale_to_Sp(const SpdMatrix& q_bar, double delta_bar);

/// Mass-maximizing Gaussian subject to dbar J_p(f, .) <= 1; p = inf dispatches
/// to solve_Ep_infinity.
SolverResult solve_Ep(const LogConcaveFunction& f, double p, const SolverOptions& opts = {});

/// Largest det P subject to z^T P z / 2 <= h_f(z) on the cloud support: a
/// centred minimum-volume enclosing ellipsoid of z / sqrt(2 h_f), solved by
/// Khachiyan iterations with away steps on a growing active set. The reported
/// residual is the duality gap max_i g_i / n - 1.
SolverResult solve_Ep_infinity(const LogConcaveFunction& f, const SolverOptions& opts = {});
SolverResult solve_Ep_infinity(const WeightedPointCloud& cloud, const SolverOptions& opts = {});

inline constexpr double kMaxFiniteP = 32.0;

}  // namespace lpjohn
