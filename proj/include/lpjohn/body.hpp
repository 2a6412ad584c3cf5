#pragma once

// Convex bodies containing the origin in their interior: polytopes (kept as
// both a facet and a vertex description) and origin-centred ellipsoids.

#include <array>
#include <optional>
#include <vector>

#include "lpjohn/numerics.hpp"

namespace lpjohn {

class ConvexBody {
 public:
  /// K = {x : <normal_i, x> <= offset_i}; offsets must be positive and K bounded.
  static ConvexBody from_halfspaces(const std::vector<Vector>& normals,
                                    const std::vector<double>& offsets);
  /// K = conv(vertices); the origin must be an interior point.
  static ConvexBody from_vertices(const std::vector<Vector>& vertices);
  /// K = {x : x^T A x <= 1}.
  static ConvexBody ellipsoid(const SpdMatrix& a);

  int dim() const { return dim_; }
  bool is_polytope() const { return !ellipsoid_.has_value(); }

  /// Minkowski functional ||x||_K.
  double gauge(const double* x) const;
  double gauge(const Vector& x) const { return gauge(x.data()); }
  /// h_K(y) = max_{v in K} <v, y>.
  double support(const double* y) const;
  double support(const Vector& y) const { return support(y.data()); }

  /// Gradients of the gauge at x != 0. A polytope contributes one gradient per
  /// facet attaining the maximum (relative tolerance 1e-10); an ellipsoid one.
  void gauge_gradients(const double* x, std::vector<std::array<double, kMaxDim>>& out) const;

  double volume() const;
  ConvexBody polar() const;
  /// T^{-1}K = {x : Tx in K}.
  ConvexBody linear_preimage(const Matrix& t) const;
  /// sK.
  ConvexBody scaled(double s) const;
  /// Radius of the smallest cube [-r, r]^n containing K.
  double max_abs_coordinate() const;

  /// Facet rows a_i with ||x||_K = max_i <a_i, x> (polytopes only).
  const std::vector<Vector>& rows() const { return rows_; }
  const std::vector<Vector>& vertices() const { return vertices_; }
  /// (n-1)-dimensional measure of each facet, aligned with rows(); 1 in dimension 1.
  const std::vector<double>& facet_areas() const { return facet_areas_; }
  const std::optional<SpdMatrix>& ellipsoid_matrix() const { return ellipsoid_; }

 private:
  ConvexBody() = default;

  int dim_ = 0;
  std::vector<Vector> rows_;
  std::vector<Vector> vertices_;
  std::vector<double> facet_areas_;  // aligned with rows_, for the volume
  std::optional<SpdMatrix> ellipsoid_;
};

}  // namespace lpjohn
