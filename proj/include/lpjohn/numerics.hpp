#pragma once

// Grids, quadrature, discrete Legendre-Fenchel transforms and SPD helpers for
// dimensions 1..3.

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lpjohn/errors.hpp"

namespace lpjohn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Reserved value for +infinity in potentials (indicator-like grids). IEEE
/// arithmetic propagates it: `x*y - kInfinity` never wins a supremum.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline constexpr int kMaxDim = 3;

/// Default points per axis for dimension n (513, 129, 65), overridable through
/// the LPJOHN_RESOLUTION environment variable (positive odd integer >= 33).
int default_resolution(int dim);

/// Node values on the cube [-R, R]^dim with an odd number of points per axis,
/// flattened row-major (axis 0 slowest). Immutable once constructed.
class Grid {
 public:
  Grid(int dim, double half_width, int points_per_axis, std::vector<double> values);

  /// Samples fn(const double* x) at every node.
  template <class Fn>
  static Grid sample(int dim, double half_width, int points_per_axis, Fn&& fn);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int points_per_axis() const { return n_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return values_.size(); }
  double coordinate(int i) const { return -half_width_ + spacing_ * i; }
  double cell_volume() const;

  std::span<const double> values() const { return values_; }
  double operator[](std::size_t idx) const { return values_[idx]; }

  std::array<int, kMaxDim> unflatten(std::size_t idx) const;
  std::size_t flatten(const std::array<int, kMaxDim>& ijk) const;
  std::size_t origin_index() const;
  void node(std::size_t idx, double* x) const;
  Vector node(std::size_t idx) const;
  bool is_boundary(std::size_t idx) const;
  std::size_t stride(int axis) const { return strides_[axis]; }

  /// True when x lies in the closed box (strict: open box).
  bool contains(const double* x, bool strict = false) const;

  /// Multilinear interpolation; throws InputError outside the closed box.
  double interpolate(const double* x) const;
  double interpolate(const Vector& x) const { return interpolate(x.data()); }
  /// Tensor Catmull-Rom interpolation; multilinear in cells next to the boundary.
  double interpolate_cubic(const double* x) const;

  /// Trapezoid weight factor of a node (product of 1/2 per boundary coordinate).
  double trapezoid_factor(std::size_t idx) const;

 private:
  int dim_;
  double half_width_;
  int n_;
  double spacing_;
  std::array<std::size_t, kMaxDim> strides_{};
  std::vector<double> values_;
};

template <class Fn>
Grid Grid::sample(int dim, double half_width, int points_per_axis, Fn&& fn) {
  Grid shape(dim, half_width, points_per_axis, {});
  std::vector<double> values(shape.size());
  double x[kMaxDim] = {0, 0, 0};
  for (std::size_t i = 0; i < values.size(); ++i) {
    shape.node(i, x);
    values[i] = fn(static_cast<const double*>(x));
  }
  return Grid(dim, half_width, points_per_axis, std::move(values));
}

/// Symmetric positive definite matrix; symmetrized and eigen-checked on construction.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Matrix& m);
  static SpdMatrix identity(int n);
  static SpdMatrix diagonal(std::initializer_list<double> entries);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  const Vector& eigenvalues() const { return eigenvalues_; }  // ascending
  const Matrix& eigenvectors() const { return eigenvectors_; }
  double determinant() const;
  Matrix inverse() const;
  Matrix sqrt() const;
  Matrix inverse_sqrt() const;
  double condition_number() const { return eigenvalues_.maxCoeff() / eigenvalues_.minCoeff(); }

 private:
  Matrix m_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
};

/// Q / det(Q)^{1/n}.
SpdMatrix spd_normalize_det(const SpdMatrix& q);

/// Largest singular value.
double operator_norm(const Matrix& a);

/// Explicit dual box for legendre_transform.
struct DualBox {
  double half_width;
  int points_per_axis;
};

/// Largest absolute finite-difference slope between adjacent finite nodes.
double max_grid_slope(const Grid& u);

/// Discrete conjugate u*(y) = max over nodes x of <x,y> - u(x), sampled on a dual
/// grid covering the gradient range of u padded by 10%. Computed by successive
/// one-dimensional passes along each axis (direct O(N^2) supremum per line).
Grid legendre_transform(const Grid& u);
Grid legendre_transform(const Grid& u, const DualBox& dual);

/// max |u** - u| over interior nodes with finite values.
double double_conjugate_check(const Grid& u);

/// Central-difference gradient at a node (one-sided on the boundary).
void node_gradient(const Grid& u, std::size_t idx, double* grad);

/// Central-difference gradient at the nodes of the enclosing cell, blended by
/// multilinear weights. x must lie strictly inside the box.
Vector gradient(const Grid& u, const Vector& x);

enum class DecayCheck { kEnforce, kSkip };

/// Tensor-product trapezoid rule. With kEnforce the integrand must be below
/// 1e-12 (relative to max(1, peak)) on every face of the box.
double integrate(const Grid& values, DecayCheck check = DecayCheck::kEnforce);

/// Evaluates max over the nodes x of a grid of <x,y> - g(x) at arbitrary y,
/// using lower convex hulls along the last axis.
class DiscreteConjugate {
 public:
  explicit DiscreteConjugate(const Grid& g);
  double operator()(const double* y) const;
  int dim() const { return dim_; }

 private:
  struct Row {
    double prefix[kMaxDim - 1];  // coordinates of the leading axes
    std::vector<double> xs;      // hull vertices, increasing x
    std::vector<double> gs;
  };
  double row_max(const Row& row, double slope) const;

  int dim_;
  std::vector<Row> rows_;
};

}  // namespace lpjohn
