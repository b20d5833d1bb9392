#pragma once

#include <span>
#include <vector>

#include "shearlet/grid.hpp"

namespace shearlet {

// Dense n x n real matrix, row-major.
struct GroupMatrix {
  int n = 0;
  std::vector<double> entries;

  GroupMatrix() = default;
  explicit GroupMatrix(int dim) : n(dim), entries(static_cast<std::size_t>(dim) * dim, 0.0) {}

  double& operator()(int r, int c) { return entries[static_cast<std::size_t>(r) * n + c]; }
  double operator()(int r, int c) const { return entries[static_cast<std::size_t>(r) * n + c]; }

  static GroupMatrix identity(int dim);
  GroupMatrix operator*(const GroupMatrix& rhs) const;
  std::vector<double> apply(std::span<const double> x) const;
  GroupMatrix transpose() const;
  double determinant() const;
};

struct GroupElement {
  double a = 1.0;
  std::vector<double> s;
  std::vector<double> t;

  int dim() const { return static_cast<int>(t.size()); }
  static GroupElement identity(int n);
};

// Throws Errc::invalid_scale or Errc::dimension.
void validate(const GroupElement& g);

GroupMatrix scaling_matrix(double a, int n);
GroupMatrix shear_matrix(std::span<const double> s, int n);
GroupMatrix msa_matrix(double a, std::span<const double> s, int n);
// Closed-form inverse of S_s A_a.
GroupMatrix msa_inverse(double a, std::span<const double> s, int n);
// |det A_a| = |a|^{(2n-1)/n}.
double abs_det_scaling(double a, int n);

GroupElement group_compose(const GroupElement& g, const GroupElement& h);
GroupElement group_inverse(const GroupElement& g);

double haar_weight(double a, int n);

// U(g) psi (x) = |det M|^{-1/2} psi(M^{-1}(x - t)), evaluated on psi's own
// grid with cubic interpolation; psi is taken to vanish outside the box.
SampledSignal apply_unitary(const GroupElement& g, const SampledSignal& psi);

}  // namespace shearlet
