#include "lpjohn/body.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lpjohn {
namespace {

struct Facet {
  Vector normal;  // unit outward normal
  double offset;  // <normal, x> = offset on the facet, > 0
  double area;    // (n-1)-dimensional measure
  std::vector<int> members;
};

double cross2(const Vector& o, const Vector& a, const Vector& b) {
  return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}

// Convex hull polygon (counter-clockwise) of planar points.
std::vector<int> hull2(const std::vector<Vector>& pts, double eps) {
  std::vector<int> idx(pts.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return pts[a](0) < pts[b](0) || (pts[a](0) == pts[b](0) && pts[a](1) < pts[b](1));
  });
  std::vector<int> h(2 * idx.size());
  std::size_t k = 0;
  for (int i : idx) {
    while (k >= 2 && cross2(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= eps) --k;
    h[k++] = i;
  }
  for (std::size_t t = idx.size() - 1, lower = k + 1; t-- > 0;) {
    const int i = idx[t];
    while (k >= lower && cross2(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= eps) --k;
    h[k++] = i;
  }
  h.resize(k > 0 ? k - 1 : 0);
  return h;
}

double polygon_area(const std::vector<Vector>& pts, const std::vector<int>& ring) {
  double a = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Vector& p = pts[ring[i]];
    const Vector& q = pts[ring[(i + 1) % ring.size()]];
    a += p(0) * q(1) - p(1) * q(0);
  }
  return 0.5 * std::abs(a);
}

// Facets of conv(points); throws unless the origin is an interior point.
std::vector<Facet> hull_facets(const std::vector<Vector>& points, int dim) {
  if (points.empty()) throw InputError("convex body needs at least one point");
  double scale = 0.0;
  for (const Vector& p : points) {
    if (p.size() != dim || !p.allFinite()) throw InputError("convex body point has wrong size");
    scale = std::max(scale, p.cwiseAbs().maxCoeff());
  }
  if (!(scale > 0)) throw InputError("convex body is degenerate");
  const double eps = 1e-10 * scale;
  std::vector<Facet> facets;

  if (dim == 1) {
    double lo = kInfinity, hi = -kInfinity;
    for (const Vector& p : points) {
      lo = std::min(lo, p(0));
      hi = std::max(hi, p(0));
    }
    if (!(hi > eps) || !(lo < -eps)) {
      throw InputError("origin must lie strictly inside the convex body");
    }
    facets.push_back({Vector::Constant(1, 1.0), hi, 1.0, {}});
    facets.push_back({Vector::Constant(1, -1.0), -lo, 1.0, {}});
    return facets;
  }

  if (dim == 2) {
    const auto ring = hull2(points, eps * scale);
    if (ring.size() < 3) throw InputError("convex body is not full-dimensional");
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Vector& a = points[ring[i]];
      const Vector& b = points[ring[(i + 1) % ring.size()]];
      Vector edge = b - a;
      Vector normal(2);
      normal << edge(1), -edge(0);  // outward for a counter-clockwise ring
      const double len = normal.norm();
      normal /= len;
      facets.push_back({normal, normal.dot(a), len, {ring[i], ring[(i + 1) % ring.size()]}});
    }
  } else {
    const int m = static_cast<int>(points.size());
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        for (int k = j + 1; k < m; ++k) {
          Eigen::Vector3d a = points[i], b = points[j], c = points[k];
          Eigen::Vector3d nrm = (b - a).cross(c - a);
          if (nrm.norm() <= eps * scale) continue;
          nrm.normalize();
          double d = nrm.dot(a);
          bool above = false, below = false;
          for (const Vector& p : points) {
            const double s = nrm.dot(Eigen::Vector3d(p)) - d;
            above |= s > eps;
            below |= s < -eps;
          }
          if (above && below) continue;
          if (above) {
            nrm = -nrm;
            d = -d;
          }
          bool duplicate = false;
          for (const Facet& f : facets) {
            if ((f.normal - Vector(nrm)).norm() < 1e-9 && std::abs(f.offset - d) < eps) {
              duplicate = true;
              break;
            }
          }
          if (duplicate) continue;
          Facet f{Vector(nrm), d, 0.0, {}};
          for (int t = 0; t < m; ++t) {
            if (std::abs(nrm.dot(Eigen::Vector3d(points[t])) - d) <= eps) f.members.push_back(t);
          }
          // area from the planar hull of the members in an orthonormal frame
          Eigen::Vector3d e1 = (b - a).normalized();
          Eigen::Vector3d e2 = nrm.cross(e1);
          std::vector<Vector> planar;
          for (int t : f.members) {
            Eigen::Vector3d p = points[t];
            Vector v(2);
            v << e1.dot(p), e2.dot(p);
            planar.push_back(v);
          }
          f.area = polygon_area(planar, hull2(planar, eps * scale));
          facets.push_back(std::move(f));
        }
      }
    }
    if (facets.size() < 4) throw InputError("convex body is not full-dimensional");
  }
  for (const Facet& f : facets) {
    if (!(f.offset > eps)) throw InputError("origin must lie strictly inside the convex body");
  }
  return facets;
}

}  // namespace

ConvexBody ConvexBody::from_vertices(const std::vector<Vector>& vertices) {
  if (vertices.empty()) throw InputError("vertex list is empty");
  const int dim = static_cast<int>(vertices.front().size());
  if (dim < 1 || dim > kMaxDim) throw InputError("convex body dimension must be 1, 2 or 3");
  const auto facets = hull_facets(vertices, dim);
  ConvexBody body;
  body.dim_ = dim;
  std::vector<bool> extreme(vertices.size(), dim == 1);
  for (const Facet& f : facets) {
    body.rows_.push_back(f.normal / f.offset);
    body.facet_areas_.push_back(f.area);
    for (int m : f.members) extreme[m] = true;
  }
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (extreme[i]) body.vertices_.push_back(vertices[i]);
  }
  return body;
}

ConvexBody ConvexBody::from_halfspaces(const std::vector<Vector>& normals,
                                       const std::vector<double>& offsets) {
  if (normals.empty() || normals.size() != offsets.size()) {
    throw InputError("halfspace body needs matching, nonempty normals and offsets");
  }
  const int dim = static_cast<int>(normals.front().size());
  if (dim < 1 || dim > kMaxDim) throw InputError("convex body dimension must be 1, 2 or 3");
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (normals[i].size() != dim) throw InputError("halfspace normals differ in dimension");
    if (!(offsets[i] > 0)) {
      throw InputError("halfspace offsets must be positive (origin strictly inside)");
    }
    rows.push_back(normals[i] / offsets[i]);
  }
  // K is the polar of conv(rows); conv(rows) must contain the origin in its
  // interior, which is exactly boundedness of K.
  std::vector<Facet> dual;
  try {
    dual = hull_facets(rows, dim);
  } catch (const InputError&) {
    throw InputError("halfspace body is unbounded or degenerate");
  }
  std::vector<Vector> vertices;
  for (const Facet& f : dual) vertices.push_back(f.normal / f.offset);
  return from_vertices(vertices);
}

ConvexBody ConvexBody::ellipsoid(const SpdMatrix& a) {
  ConvexBody body;
  body.dim_ = a.dim();
  body.ellipsoid_ = a;
  return body;
}

double ConvexBody::gauge(const double* x) const {
  if (ellipsoid_) {
    const Eigen::Map<const Vector> v(x, dim_);
    return std::sqrt(std::max(0.0, v.dot(ellipsoid_->matrix() * v)));
  }
  double best = 0.0;
  for (const Vector& a : rows_) {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += a(i) * x[i];
    best = std::max(best, s);
  }
  return best;
}

double ConvexBody::support(const double* y) const {
  if (ellipsoid_) {
    const Eigen::Map<const Vector> v(y, dim_);
    return std::sqrt(std::max(0.0, v.dot(ellipsoid_->inverse() * v)));
  }
  double best = 0.0;
  for (const Vector& p : vertices_) {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += p(i) * y[i];
    best = std::max(best, s);
  }
  return best;
}

void ConvexBody::gauge_gradients(const double* x,
                                 std::vector<std::array<double, kMaxDim>>& out) const {
  out.clear();
  if (ellipsoid_) {
    const Eigen::Map<const Vector> v(x, dim_);
    const Vector ax = ellipsoid_->matrix() * v;
    const double g = std::sqrt(v.dot(ax));
    if (!(g > 0)) return;
    std::array<double, kMaxDim> grad{0, 0, 0};
    for (int i = 0; i < dim_; ++i) grad[i] = ax(i) / g;
    out.push_back(grad);
    return;
  }
  const double g = gauge(x);
  if (!(g > 0)) return;
  for (const Vector& a : rows_) {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += a(i) * x[i];
    if (s >= g - 1e-10 * g) {
      std::array<double, kMaxDim> grad{0, 0, 0};
      for (int i = 0; i < dim_; ++i) grad[i] = a(i);
      out.push_back(grad);
    }
  }
}

double ConvexBody::volume() const {
  if (ellipsoid_) {
    const double n = dim_;
    const double unit_ball = std::pow(std::numbers::pi, n / 2) / std::tgamma(n / 2 + 1);
    return unit_ball / std::sqrt(ellipsoid_->determinant());
  }
  double v = 0.0;
  for (std::size_t i = 0; i < rows_.size(); ++i) v += facet_areas_[i] / rows_[i].norm();
  return v / dim_;
}

ConvexBody ConvexBody::polar() const {
  if (ellipsoid_) return ellipsoid(SpdMatrix(ellipsoid_->inverse()));
  return from_vertices(rows_);
}

ConvexBody ConvexBody::linear_preimage(const Matrix& t) const {
  if (t.rows() != dim_ || t.cols() != dim_) throw InputError("linear map has the wrong size");
  if (ellipsoid_) return ellipsoid(SpdMatrix(t.transpose() * ellipsoid_->matrix() * t));
  const Eigen::FullPivLU<Matrix> lu(t);
  if (!lu.isInvertible()) throw InputError("linear map is singular");
  std::vector<Vector> verts;
  for (const Vector& v : vertices_) verts.push_back(lu.solve(v));
  return from_vertices(verts);
}

ConvexBody ConvexBody::scaled(double s) const {
  if (!(s > 0)) throw InputError("body scale must be positive");
  if (ellipsoid_) return ellipsoid(SpdMatrix(ellipsoid_->matrix() / (s * s)));
  ConvexBody body = *this;
  for (Vector& a : body.rows_) a /= s;
  for (Vector& v : body.vertices_) v *= s;
  for (double& area : body.facet_areas_) area *= std::pow(s, dim_ - 1);
  return body;
}

double ConvexBody::max_abs_coordinate() const {
  if (ellipsoid_) return std::sqrt(ellipsoid_->inverse().diagonal().maxCoeff());
  double r = 0.0;
  for (const Vector& v : vertices_) r = std::max(r, v.cwiseAbs().maxCoeff());
  return r;
}

}  // namespace lpjohn
