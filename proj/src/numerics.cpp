#include "lpjohn/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

namespace lpjohn {

int default_resolution(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw InputError("dimension must be 1, 2 or 3");
  }
  if (const char* env = std::getenv("LPJOHN_RESOLUTION"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 33 || n % 2 == 0 || n > 4097) {
      throw InputError(std::string("LPJOHN_RESOLUTION must be an odd integer >= 33, got '") + env +
                       "'");
    }
    return static_cast<int>(n);
  }
  static constexpr int kDefaults[] = {513, 129, 65};
  return kDefaults[dim - 1];
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(int dim, double half_width, int points_per_axis, std::vector<double> values)
    : dim_(dim), half_width_(half_width), n_(points_per_axis), values_(std::move(values)) {
  if (dim < 1 || dim > kMaxDim) throw InputError("grid dimension must be 1, 2 or 3");
  if (!(half_width > 0) || !std::isfinite(half_width)) {
    throw InputError("grid half_width must be positive");
  }
  if (points_per_axis < 3 || points_per_axis % 2 == 0) {
    throw InputError("grid points_per_axis must be odd so the origin is a node");
  }
  spacing_ = 2.0 * half_width / (points_per_axis - 1);
  std::size_t total = 1;
  for (int a = dim - 1; a >= 0; --a) {
    strides_[a] = total;
    total *= static_cast<std::size_t>(n_);
  }
  if (values_.empty()) {
    values_.assign(total, 0.0);
  } else if (values_.size() != total) {
    std::ostringstream msg;
    msg << "grid expects " << total << " values, got " << values_.size();
    throw InputError(msg.str());
  }
}

double Grid::cell_volume() const { return std::pow(spacing_, dim_); }

std::array<int, kMaxDim> Grid::unflatten(std::size_t idx) const {
  std::array<int, kMaxDim> ijk{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    ijk[a] = static_cast<int>(idx / strides_[a]);
    idx %= strides_[a];
  }
  return ijk;
}

std::size_t Grid::flatten(const std::array<int, kMaxDim>& ijk) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim_; ++a) idx += strides_[a] * static_cast<std::size_t>(ijk[a]);
  return idx;
}

std::size_t Grid::origin_index() const {
  const int mid = (n_ - 1) / 2;
  return flatten({mid, mid, mid});
}

void Grid::node(std::size_t idx, double* x) const {
  const auto ijk = unflatten(idx);
  for (int a = 0; a < dim_; ++a) x[a] = coordinate(ijk[a]);
}

Vector Grid::node(std::size_t idx) const {
  Vector x(dim_);
  node(idx, x.data());
  return x;
}

bool Grid::is_boundary(std::size_t idx) const {
  const auto ijk = unflatten(idx);
  for (int a = 0; a < dim_; ++a) {
    if (ijk[a] == 0 || ijk[a] == n_ - 1) return true;
  }
  return false;
}

bool Grid::contains(const double* x, bool strict) const {
  for (int a = 0; a < dim_; ++a) {
    if (strict ? !(std::abs(x[a]) < half_width_) : !(std::abs(x[a]) <= half_width_)) return false;
  }
  return true;
}

double Grid::trapezoid_factor(std::size_t idx) const {
  const auto ijk = unflatten(idx);
  double w = 1.0;
  for (int a = 0; a < dim_; ++a) {
    if (ijk[a] == 0 || ijk[a] == n_ - 1) w *= 0.5;
  }
  return w;
}

namespace {

// Cell index and local coordinate in [0,1] along one axis.
void locate(const Grid& g, double x, int& cell, double& frac) {
  const double s = (x + g.half_width()) / g.spacing();
  cell = std::clamp(static_cast<int>(std::floor(s)), 0, g.points_per_axis() - 2);
  frac = s - cell;
}

}  // namespace

double Grid::interpolate(const double* x) const {
  if (!contains(x)) {
    throw InputError("interpolation point lies outside the grid box");
  }
  int cell[kMaxDim] = {0, 0, 0};
  double frac[kMaxDim] = {0, 0, 0};
  for (int a = 0; a < dim_; ++a) locate(*this, x[a], cell[a], frac[a]);
  double acc = 0.0;
  for (int corner = 0; corner < (1 << dim_); ++corner) {
    double w = 1.0;
    std::size_t idx = 0;
    for (int a = 0; a < dim_; ++a) {
      const int bit = (corner >> a) & 1;
      w *= bit ? frac[a] : 1.0 - frac[a];
      idx += strides_[a] * static_cast<std::size_t>(cell[a] + bit);
    }
    if (w == 0.0) continue;
    acc += w * values_[idx];
  }
  return acc;
}

double Grid::interpolate_cubic(const double* x) const {
  if (!contains(x)) {
    throw InputError("interpolation point lies outside the grid box");
  }
  int cell[kMaxDim] = {0, 0, 0};
  double frac[kMaxDim] = {0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    locate(*this, x[a], cell[a], frac[a]);
    if (cell[a] < 1 || cell[a] > n_ - 3) return interpolate(x);
  }
  // Catmull-Rom weights for offsets -1, 0, 1, 2.
  double w[kMaxDim][4];
  for (int a = 0; a < dim_; ++a) {
    const double t = frac[a], t2 = t * t, t3 = t2 * t;
    w[a][0] = 0.5 * (-t3 + 2.0 * t2 - t);
    w[a][1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
    w[a][2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
    w[a][3] = 0.5 * (t3 - t2);
  }
  double acc = 0.0;
  const int corners = dim_ == 1 ? 4 : dim_ == 2 ? 16 : 64;
  for (int c = 0; c < corners; ++c) {
    double weight = 1.0;
    std::size_t idx = 0;
    int rem = c;
    for (int a = 0; a < dim_; ++a) {
      const int o = rem % 4;
      rem /= 4;
      weight *= w[a][o];
      idx += strides_[a] * static_cast<std::size_t>(cell[a] + o - 1);
    }
    acc += weight * values_[idx];
  }
  return acc;
}

// ---------------------------------------------------------------------------
// SPD matrices

SpdMatrix::SpdMatrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1 || m.rows() > kMaxDim) {
    throw InputError("SPD matrix must be square with dimension 1, 2 or 3");
  }
  if (!m.allFinite()) throw InputError("SPD matrix has non-finite entries");
  m_ = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m_);
  if (eig.info() != Eigen::Success) throw InputError("SPD matrix: eigen decomposition failed");
  eigenvalues_ = eig.eigenvalues();
  eigenvectors_ = eig.eigenvectors();
  if (!(eigenvalues_.minCoeff() > 0.0)) {
    std::ostringstream msg;
    msg << "matrix is not positive definite (smallest eigenvalue " << eigenvalues_.minCoeff()
        << ")";
    throw InputError(msg.str());
  }
}

SpdMatrix SpdMatrix::identity(int n) { return SpdMatrix(Matrix::Identity(n, n)); }

SpdMatrix SpdMatrix::diagonal(std::initializer_list<double> entries) {
  Vector d(static_cast<Eigen::Index>(entries.size()));
  int i = 0;
  for (double e : entries) d(i++) = e;
  return SpdMatrix(d.asDiagonal());
}

double SpdMatrix::determinant() const { return eigenvalues_.prod(); }

Matrix SpdMatrix::inverse() const {
  return eigenvectors_ * eigenvalues_.cwiseInverse().asDiagonal() * eigenvectors_.transpose();
}

Matrix SpdMatrix::sqrt() const {
  return eigenvectors_ * eigenvalues_.cwiseSqrt().asDiagonal() * eigenvectors_.transpose();
}

Matrix SpdMatrix::inverse_sqrt() const {
  return eigenvectors_ * eigenvalues_.cwiseSqrt().cwiseInverse().asDiagonal() *
         eigenvectors_.transpose();
}

SpdMatrix spd_normalize_det(const SpdMatrix& q) {
  // log-sum keeps the n-th root accurate for badly scaled inputs
  const double log_det = q.eigenvalues().array().log().sum();
  return SpdMatrix(q.matrix() * std::exp(-log_det / q.dim()));
}

double operator_norm(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

// ---------------------------------------------------------------------------
// Legendre transform

double max_grid_slope(const Grid& u) {
  const auto vals = u.values();
  double slope = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(vals[i])) continue;
    const auto ijk = u.unflatten(i);
    for (int a = 0; a < u.dim(); ++a) {
      if (ijk[a] + 1 >= u.points_per_axis()) continue;
      const double next = vals[i + u.stride(a)];
      if (!std::isfinite(next)) continue;
      slope = std::max(slope, std::abs(next - vals[i]) / u.spacing());
    }
  }
  return slope;
}

namespace {

void check_transformable(const Grid& u) {
  const auto vals = u.values();
  double lo = kInfinity;
  double hi = -kInfinity;
  for (double v : vals) {
    if (std::isnan(v) || v == -kInfinity) throw InputError("potential grid has NaN or -inf");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo) || !(hi >= lo + 1.0)) {
    throw InputError(
        "potential never exceeds its minimum by 1 on the grid; gradient range degenerate");
  }
}

// One pass: out(.., y_k, ..) = max_j x_j * y_k - in(.., x_j, ..) along `axis`. The input
// has `in_n` points on `axis` with coordinates xs, the output `out_n` with ys; other axes
// keep their sizes given by `shape`.
std::vector<double> conjugate_pass(const std::vector<double>& in, std::array<int, kMaxDim> shape,
                                   int dim, int axis, const std::vector<double>& xs,
                                   const std::vector<double>& ys) {
  const int in_n = shape[axis];
  const int out_n = static_cast<int>(ys.size());
  std::array<int, kMaxDim> out_shape = shape;
  out_shape[axis] = out_n;
  auto strides = [dim](const std::array<int, kMaxDim>& s) {
    std::array<std::size_t, kMaxDim> st{0, 0, 0};
    std::size_t total = 1;
    for (int a = dim - 1; a >= 0; --a) {
      st[a] = total;
      total *= static_cast<std::size_t>(s[a]);
    }
    return std::make_pair(st, total);
  };
  const auto [in_st, in_total] = strides(shape);
  const auto [out_st, out_total] = strides(out_shape);
  std::vector<double> out(out_total, -kInfinity);

  // Iterate over all lines parallel to `axis`.
  const std::size_t lines = in_total / static_cast<std::size_t>(in_n);
  std::vector<double> line(in_n);
  for (std::size_t l = 0; l < lines; ++l) {
    // decode line position in the other axes
    std::size_t rem = l;
    std::size_t in_base = 0;
    std::size_t out_base = 0;
    for (int a = dim - 1; a >= 0; --a) {
      if (a == axis) continue;
      const std::size_t c = rem % static_cast<std::size_t>(shape[a]);
      rem /= static_cast<std::size_t>(shape[a]);
      in_base += c * in_st[a];
      out_base += c * out_st[a];
    }
    for (int j = 0; j < in_n; ++j) line[j] = in[in_base + in_st[axis] * j];
    for (int k = 0; k < out_n; ++k) {
      const double y = ys[k];
      double best = -kInfinity;
      for (int j = 0; j < in_n; ++j) {
        const double cand = xs[j] * y - line[j];
        if (cand > best) best = cand;
      }
      out[out_base + out_st[axis] * k] = best;
    }
  }
  return out;
}

}  // namespace

Grid legendre_transform(const Grid& u) {
  check_transformable(u);
  const double slope = max_grid_slope(u);
  if (!(slope > 0)) {
    throw InputError("gradient range of the potential is zero; pass an explicit dual box");
  }
  return legendre_transform(u, DualBox{1.1 * slope, u.points_per_axis()});
}

Grid legendre_transform(const Grid& u, const DualBox& dual) {
  check_transformable(u);
  if (!(dual.half_width > 0) || dual.points_per_axis < 3 || dual.points_per_axis % 2 == 0) {
    throw InputError("dual box needs a positive half width and an odd number of points");
  }
  const int dim = u.dim();
  std::vector<double> xs(u.points_per_axis());
  for (int i = 0; i < u.points_per_axis(); ++i) xs[i] = u.coordinate(i);
  const Grid dual_shape(dim, dual.half_width, dual.points_per_axis, {});
  std::vector<double> ys(dual.points_per_axis);
  for (int i = 0; i < dual.points_per_axis; ++i) ys[i] = dual_shape.coordinate(i);

  // sup_x <x,y> - u(x) factorizes into nested one-dimensional suprema; between passes
  // the partial result is negated so each pass has the same form.
  std::vector<double> work(u.values().begin(), u.values().end());
  std::array<int, kMaxDim> shape{1, 1, 1};
  for (int a = 0; a < dim; ++a) shape[a] = u.points_per_axis();
  for (int pass = 0; pass < dim; ++pass) {
    const int axis = dim - 1 - pass;
    work = conjugate_pass(work, shape, dim, axis, xs, ys);
    shape[axis] = dual.points_per_axis;
    if (pass + 1 < dim) {
      for (double& v : work) v = -v;
    }
  }
  return Grid(dim, dual.half_width, dual.points_per_axis, std::move(work));
}

double double_conjugate_check(const Grid& u) {
  const Grid conj = legendre_transform(u);
  const Grid back = legendre_transform(conj, DualBox{u.half_width(), u.points_per_axis()});
  double err = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.is_boundary(i) || !std::isfinite(u[i])) continue;
    err = std::max(err, std::abs(back[i] - u[i]));
  }
  return err;
}

// ---------------------------------------------------------------------------
// Gradients

void node_gradient(const Grid& u, std::size_t idx, double* grad) {
  const auto ijk = u.unflatten(idx);
  const auto vals = u.values();
  const double h = u.spacing();
  for (int a = 0; a < u.dim(); ++a) {
    const std::size_t st = u.stride(a);
    if (ijk[a] == 0) {
      grad[a] = (vals[idx + st] - vals[idx]) / h;
    } else if (ijk[a] == u.points_per_axis() - 1) {
      grad[a] = (vals[idx] - vals[idx - st]) / h;
    } else if (ijk[a] == 1 || ijk[a] == u.points_per_axis() - 2) {
      grad[a] = (vals[idx + st] - vals[idx - st]) / (2.0 * h);
    } else {
      grad[a] = (8.0 * (vals[idx + st] - vals[idx - st]) - (vals[idx + 2 * st] - vals[idx - 2 * st])) /
                (12.0 * h);
    }
  }
}

Vector gradient(const Grid& u, const Vector& x) {
  if (x.size() != u.dim()) throw InputError("gradient query has the wrong dimension");
  if (!u.contains(x.data(), /*strict=*/true)) {
    throw InputError("gradient query lies outside the open grid box");
  }
  const int dim = u.dim();
  int cell[kMaxDim] = {0, 0, 0};
  double frac[kMaxDim] = {0, 0, 0};
  for (int a = 0; a < dim; ++a) locate(u, x(a), cell[a], frac[a]);
  Vector g = Vector::Zero(dim);
  double node_grad[kMaxDim];
  for (int corner = 0; corner < (1 << dim); ++corner) {
    double w = 1.0;
    std::array<int, kMaxDim> ijk{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      const int bit = (corner >> a) & 1;
      w *= bit ? frac[a] : 1.0 - frac[a];
      ijk[a] = cell[a] + bit;
    }
    if (w == 0.0) continue;
    node_gradient(u, u.flatten(ijk), node_grad);
    for (int a = 0; a < dim; ++a) g(a) += w * node_grad[a];
  }
  return g;
}

// ---------------------------------------------------------------------------
// Quadrature

double integrate(const Grid& values, DecayCheck check) {
  const auto vals = values.values();
  if (check == DecayCheck::kEnforce) {
    double peak = 1.0;
    for (double v : vals) peak = std::max(peak, std::abs(v));
    const double limit = 1e-12 * peak;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!values.is_boundary(i) || std::abs(vals[i]) <= limit) continue;
      const auto ijk = values.unflatten(i);
      int axis = 0;
      bool upper = false;
      for (int a = 0; a < values.dim(); ++a) {
        if (ijk[a] == 0 || ijk[a] == values.points_per_axis() - 1) {
          axis = a;
          upper = ijk[a] != 0;
          break;
        }
      }
      std::ostringstream msg;
      msg << "integrand does not decay on face x" << axis << " = " << (upper ? "+" : "-")
          << values.half_width() << " (value " << vals[i] << ")";
      throw NumericalError(msg.str());
    }
  }
  // Pairwise-free fixed order: nodes in storage order.
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (vals[i] == 0.0) continue;
    acc += values.trapezoid_factor(i) * vals[i];
  }
  return acc * values.cell_volume();
}

}  // namespace lpjohn
