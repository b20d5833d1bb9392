#include "shearlet/group.hpp"

#include <cmath>
#include <string>

#include "shearlet/error.hpp"

namespace shearlet {

GroupMatrix GroupMatrix::identity(int dim) {
  GroupMatrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

GroupMatrix GroupMatrix::operator*(const GroupMatrix& rhs) const {
  if (rhs.n != n) throw Error(Errc::dimension, "matrix sizes differ");
  GroupMatrix out(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += (*this)(r, k) * rhs(k, c);
      out(r, c) = acc;
    }
  return out;
}

std::vector<double> GroupMatrix::apply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n) throw Error(Errc::dimension, "vector length differs from matrix size");
  std::vector<double> y(n, 0.0);
  for (int r = 0; r < n; ++r) {
    double acc = 0.0;
    for (int c = 0; c < n; ++c) acc += (*this)(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

GroupMatrix GroupMatrix::transpose() const {
  GroupMatrix out(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out(c, r) = (*this)(r, c);
  return out;
}

double GroupMatrix::determinant() const {
  // Gaussian elimination with partial pivoting; n is small.
  std::vector<double> m = entries;
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[r * n + col]) > std::abs(m[pivot * n + col])) pivot = r;
    if (m[pivot * n + col] == 0.0) return 0.0;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(m[pivot * n + c], m[col * n + c]);
      det = -det;
    }
    double p = m[col * n + col];
    det *= p;
    for (int r = col + 1; r < n; ++r) {
      double f = m[r * n + col] / p;
      for (int c = col; c < n; ++c) m[r * n + c] -= f * m[col * n + c];
    }
  }
  return det;
}

GroupElement GroupElement::identity(int n) {
  return GroupElement{1.0, std::vector<double>(n - 1, 0.0), std::vector<double>(n, 0.0)};
}

void validate(const GroupElement& g) {
  if (g.a == 0.0 || !std::isfinite(g.a)) throw Error(Errc::invalid_scale, "a must be a finite nonzero real");
  int n = g.dim();
  if (n < 2) throw Error(Errc::dimension, "dimension must be at least 2");
  if (static_cast<int>(g.s.size()) != n - 1)
    throw Error(Errc::dimension, "shear has length " + std::to_string(g.s.size()) + ", expected " + std::to_string(n - 1));
}

namespace {

void check_scale(double a, int n) {
  if (a == 0.0 || !std::isfinite(a)) throw Error(Errc::invalid_scale, "a must be a finite nonzero real");
  if (n < 2) throw Error(Errc::dimension, "dimension must be at least 2");
}

double diag_entry(double a, int n) { return std::copysign(std::pow(std::abs(a), 1.0 / n), a); }

}  // namespace

GroupMatrix scaling_matrix(double a, int n) {
  check_scale(a, n);
  GroupMatrix m(n);
  m(0, 0) = a;
  double d = diag_entry(a, n);
  for (int k = 1; k < n; ++k) m(k, k) = d;
  return m;
}

GroupMatrix shear_matrix(std::span<const double> s, int n) {
  if (n < 2) throw Error(Errc::dimension, "dimension must be at least 2");
  if (static_cast<int>(s.size()) != n - 1) throw Error(Errc::dimension, "shear length must be n-1");
  GroupMatrix m = GroupMatrix::identity(n);
  for (int k = 1; k < n; ++k) m(0, k) = s[k - 1];
  return m;
}

GroupMatrix msa_matrix(double a, std::span<const double> s, int n) { return shear_matrix(s, n) * scaling_matrix(a, n); }

GroupMatrix msa_inverse(double a, std::span<const double> s, int n) {
  std::vector<double> neg(s.begin(), s.end());
  for (double& v : neg) v = -v;
  return scaling_matrix(1.0 / a, n) * shear_matrix(neg, n);
}

double abs_det_scaling(double a, int n) {
  check_scale(a, n);
  return std::pow(std::abs(a), (2.0 * n - 1.0) / n);
}

GroupElement group_compose(const GroupElement& g, const GroupElement& h) {
  validate(g);
  validate(h);
  int n = g.dim();
  if (h.dim() != n) throw Error(Errc::dimension, "group elements have different dimensions");
  GroupElement out;
  out.a = g.a * h.a;
  double f = std::pow(std::abs(g.a), 1.0 - 1.0 / n);
  out.s.resize(n - 1);
  for (int k = 0; k < n - 1; ++k) out.s[k] = g.s[k] + f * h.s[k];
  std::vector<double> mt = msa_matrix(g.a, g.s, n).apply(h.t);
  out.t.resize(n);
  for (int k = 0; k < n; ++k) out.t[k] = g.t[k] + mt[k];
  return out;
}

GroupElement group_inverse(const GroupElement& g) {
  validate(g);
  int n = g.dim();
  GroupElement out;
  out.a = 1.0 / g.a;
  double f = std::pow(std::abs(g.a), 1.0 / n - 1.0);
  out.s.resize(n - 1);
  for (int k = 0; k < n - 1; ++k) out.s[k] = -f * g.s[k];
  std::vector<double> mt = msa_inverse(g.a, g.s, n).apply(g.t);
  out.t.resize(n);
  for (int k = 0; k < n; ++k) out.t[k] = -mt[k];
  return out;
}

double haar_weight(double a, int n) {
  check_scale(a, n);
  return std::pow(std::abs(a), -(n + 1.0));
}

namespace {

// Keys cubic convolution kernel weights for fractional offset u in [0,1).
void cubic_weights(double u, double w[4]) {
  constexpr double A = -0.5;
  auto near = [](double x) { return ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0; };
  auto far = [](double x) { return ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A; };
  w[0] = far(1.0 + u);
  w[1] = near(u);
  w[2] = near(1.0 - u);
  w[3] = far(2.0 - u);
}

}  // namespace

SampledSignal apply_unitary(const GroupElement& g, const SampledSignal& psi) {
  validate(g);
  const SpatialGrid& grid = psi.grid;
  int n = grid.dim();
  if (g.dim() != n) throw Error(Errc::dimension, "group element and signal dimensions differ");
  if (psi.domain != Domain::spatial) throw Error(Errc::domain, "apply_unitary needs a spatial signal");

  GroupMatrix minv = msa_inverse(g.a, g.s, n);
  double scale = 1.0 / std::sqrt(abs_det_scaling(g.a, n));

  SampledSignal out{grid, std::vector<cplx>(grid.size()), Domain::spatial, psi.notes};
  std::vector<double> x(n), diff(n);
  std::vector<std::size_t> base(n);
  std::vector<double> w(4 * n);
  std::vector<std::size_t> idx(n);
  std::size_t corners = std::size_t{1} << (2 * n);

  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.point(p, x);
    for (int k = 0; k < n; ++k) diff[k] = x[k] - g.t[k];
    std::vector<double> y = minv.apply(diff);
    // psi is taken to vanish outside its box; wrapping would read a ghost copy.
    bool outside = false;
    for (int k = 0; k < n; ++k) {
      double L = grid.half_extent(k);
      if (y[k] < -L || y[k] >= L) outside = true;
      double pos = (y[k] + L) / grid.spacing(k);
      double fl = std::floor(pos);
      cubic_weights(pos - fl, &w[4 * k]);
      auto N = static_cast<std::int64_t>(grid.samples(k));
      std::int64_t b = static_cast<std::int64_t>(fl) - 1;
      base[k] = static_cast<std::size_t>(((b % N) + N) % N);
    }
    if (outside) continue;
    cplx acc = 0.0;
    for (std::size_t c = 0; c < corners; ++c) {
      double weight = 1.0;
      for (int k = 0; k < n; ++k) {
        unsigned off = (c >> (2 * k)) & 3u;
        weight *= w[4 * k + off];
        idx[k] = (base[k] + off) % grid.samples(k);
      }
      acc += weight * psi.values[grid.flat(idx)];
    }
    out.values[p] = scale * acc;
  }
  double before = norm_sq(psi), after = norm_sq(out);
  if (before > 0.0 && after < (1.0 - 1e-3) * before)
    out.notes.push_back("truncation: the moved signal keeps " + std::to_string(after / before) +
                        " of the input energy inside the grid box");
  return out;
}

}  // namespace shearlet
