#include <cmath>
#include <random>

#include "doctest.h"
#include "shearlet/error.hpp"
#include "shearlet/grid.hpp"
#include "shearlet/group.hpp"

using namespace shearlet;

namespace {

GroupElement random_element(std::mt19937_64& rng, int n, double amin = 0.2, double amax = 5.0) {
  std::uniform_real_distribution<double> la(std::log(amin), std::log(amax));
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::bernoulli_distribution sign(0.5);
  GroupElement g;
  g.a = std::exp(la(rng)) * (sign(rng) ? -1.0 : 1.0);
  for (int k = 1; k < n; ++k) g.s.push_back(u(rng));
  for (int k = 0; k < n; ++k) g.t.push_back(u(rng));
  return g;
}

double max_diff(const GroupElement& g, const GroupElement& h) {
  double d = std::abs(g.a - h.a);
  for (std::size_t i = 0; i < g.s.size(); ++i) d = std::max(d, std::abs(g.s[i] - h.s[i]));
  for (std::size_t i = 0; i < g.t.size(); ++i) d = std::max(d, std::abs(g.t[i] - h.t[i]));
  return d;
}

double matrix_diff(const GroupMatrix& a, const GroupMatrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.entries.size(); ++i) d = std::max(d, std::abs(a.entries[i] - b.entries[i]));
  return d;
}

double rel_l2(const SampledSignal& a, const SampledSignal& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    num += std::norm(a.values[i] - b.values[i]);
    den += std::norm(b.values[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("scaling matrix") {
  CHECK(matrix_diff(scaling_matrix(1.0, 2), GroupMatrix::identity(2)) == 0.0);
  GroupMatrix a = scaling_matrix(4.0, 2);
  CHECK(a(0, 0) == 4.0);
  CHECK(a(1, 1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(a(0, 1) == 0.0);
  CHECK(std::abs(a.determinant()) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(abs_det_scaling(4.0, 2) == doctest::Approx(std::pow(4.0, 1.5)).epsilon(1e-14));
  GroupMatrix neg = scaling_matrix(-8.0, 3);
  CHECK(neg(1, 1) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(neg(2, 2) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK_THROWS_AS(scaling_matrix(0.0, 2), Error);
  CHECK_THROWS_AS(scaling_matrix(1.0, 1), Error);
}

TEST_CASE("shear matrix") {
  std::vector<double> zero{0.0};
  CHECK(matrix_diff(shear_matrix(zero, 2), GroupMatrix::identity(2)) == 0.0);
  std::vector<double> three{3.0};
  GroupMatrix s = shear_matrix(three, 2);
  CHECK(s(0, 0) == 1.0);
  CHECK(s(0, 1) == 3.0);
  CHECK(s(1, 0) == 0.0);
  CHECK(s(1, 1) == 1.0);
  std::vector<double> s12{1.0, 2.0};
  GroupMatrix s3 = shear_matrix(s12, 3);
  GroupMatrix expect = GroupMatrix::identity(3);
  expect(0, 1) = 1.0;
  expect(0, 2) = 2.0;
  CHECK(matrix_diff(s3, expect) == 0.0);
  CHECK_THROWS_AS(shear_matrix(s12, 2), Error);
}

TEST_CASE("msa matrix and its inverse") {
  std::vector<double> zero{0.0}, one{1.0};
  CHECK(matrix_diff(msa_matrix(1.0, zero, 2), GroupMatrix::identity(2)) < 1e-15);
  GroupMatrix m = msa_matrix(4.0, one, 2);
  GroupMatrix expect(2);
  expect(0, 0) = 4.0;
  expect(0, 1) = 2.0;
  expect(1, 1) = 2.0;
  CHECK(matrix_diff(m, expect) < 1e-14);

  std::mt19937_64 rng(7);
  for (int n = 2; n <= 4; ++n)
    for (int i = 0; i < 30; ++i) {
      GroupElement g = random_element(rng, n);
      GroupMatrix msa = msa_matrix(g.a, g.s, n);
      CHECK(msa.determinant() == doctest::Approx(scaling_matrix(g.a, n).determinant()).epsilon(1e-12));
      CHECK(matrix_diff(msa * msa_inverse(g.a, g.s, n), GroupMatrix::identity(n)) < 1e-12);
    }
}

TEST_CASE("composition examples") {
  GroupElement e = GroupElement::identity(2);
  GroupElement g{4.0, {1.0}, {0.0, 0.0}};
  CHECK(max_diff(group_compose(g, e), g) == 0.0);
  CHECK(max_diff(group_compose(e, g), g) == 0.0);
  GroupElement h{0.25, {0.0}, {1.0, 0.0}};
  GroupElement gh = group_compose(g, h);
  GroupElement expect{1.0, {1.0}, {4.0, 0.0}};
  CHECK(max_diff(gh, expect) < 1e-15);
}

TEST_CASE("composition matches affine matrix products") {
  // M(g.h) = M(g) M(h) and t(g.h) = t_g + M(g) t_h, evaluated with plain matrices.
  std::mt19937_64 rng(11);
  for (int n = 2; n <= 4; ++n)
    for (int i = 0; i < 50; ++i) {
      GroupElement g = random_element(rng, n), h = random_element(rng, n);
      GroupElement gh = group_compose(g, h);
      GroupMatrix mg = msa_matrix(g.a, g.s, n), mh = msa_matrix(h.a, h.s, n);
      CHECK(matrix_diff(msa_matrix(gh.a, gh.s, n), mg * mh) < 1e-11);
      std::vector<double> th = mg.apply(h.t);
      for (int k = 0; k < n; ++k) CHECK(gh.t[k] == doctest::Approx(g.t[k] + th[k]).epsilon(1e-13));
    }
}

TEST_CASE("associativity over random triples") {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    int n = 2 + i % 3;
    GroupElement g = random_element(rng, n, 0.5, 2.0), h = random_element(rng, n, 0.5, 2.0),
                 k = random_element(rng, n, 0.5, 2.0);
    worst = std::max(worst, max_diff(group_compose(group_compose(g, h), k), group_compose(g, group_compose(h, k))));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("inverse") {
  GroupElement e = GroupElement::identity(2);
  CHECK(max_diff(group_inverse(e), e) == 0.0);
  GroupElement g{4.0, {0.0}, {0.0, 0.0}};
  GroupElement inv = group_inverse(g);
  CHECK(inv.a == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(std::abs(inv.s[0]) == 0.0);
  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    int n = 2 + i % 3;
    GroupElement r = random_element(rng, n, 0.5, 2.0);
    GroupElement id = GroupElement::identity(n);
    worst = std::max(worst, max_diff(group_compose(r, group_inverse(r)), id));
    worst = std::max(worst, max_diff(group_compose(group_inverse(r), r), id));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("haar weight") {
  CHECK(haar_weight(1.0, 2) == 1.0);
  CHECK(haar_weight(2.0, 2) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(haar_weight(0.5, 3) == doctest::Approx(16.0).epsilon(1e-15));
  CHECK(haar_weight(-2.0, 2) == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(validate(GroupElement{0.0, {0.0}, {0.0, 0.0}}), Error);
  CHECK_THROWS_AS(validate(GroupElement{1.0, {0.0, 0.0}, {0.0, 0.0}}), Error);
  try {
    validate(GroupElement{0.0, {0.0}, {0.0, 0.0}});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_scale);
  }
}

TEST_CASE("unitary action on a sampled Gaussian") {
  SpatialGrid grid = make_grid(2, 8.0, 128);
  SampledSignal psi = gaussian_signal(grid, {0.0, 0.0}, {1.5, 1.5}, {0.0, 0.0});

  SampledSignal same = apply_unitary(GroupElement::identity(2), psi);
  double diff = 0.0;
  for (std::size_t i = 0; i < psi.values.size(); ++i) diff = std::max(diff, std::abs(same.values[i] - psi.values[i]));
  CHECK(diff < 1e-14);

  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> la(std::log(0.7), std::log(1.4)), us(-0.5, 0.5), ut(-1.0, 1.0);
  auto draw = [&] {
    return GroupElement{std::exp(la(rng)), {us(rng)}, {ut(rng), ut(rng)}};
  };
  double n0 = std::sqrt(norm_sq(psi));
  for (int i = 0; i < 10; ++i) {
    SampledSignal moved = apply_unitary(draw(), psi);
    CHECK(std::sqrt(norm_sq(moved)) / n0 == doctest::Approx(1.0).epsilon(1e-3));
  }
  for (int i = 0; i < 5; ++i) {
    GroupElement g = draw(), h = draw();
    SampledSignal two_step = apply_unitary(g, apply_unitary(h, psi));
    SampledSignal one_step = apply_unitary(group_compose(g, h), psi);
    CHECK(rel_l2(two_step, one_step) <= 1e-3);
  }
}
