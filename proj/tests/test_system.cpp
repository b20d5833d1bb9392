#include <gsl/gsl_integration.h>

#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "shearlet/error.hpp"
#include "shearlet/group.hpp"
#include "shearlet/system.hpp"

using namespace shearlet;

namespace {

double bump(double x, double alpha) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp(alpha * (4.0 - 1.0 / (x * (1.0 - x))));
}

double bump_sq(double x, void*) {
  double b = bump(x, 1.0);
  return b * b;
}

double bump_sq_integral() {
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(1000);
  gsl_function f{&bump_sq, nullptr};
  double r = 0.0, err = 0.0;
  gsl_integration_qags(&f, 0.0, 1.0, 0.0, 1e-13, 1000, w, &r, &err);
  gsl_integration_workspace_free(w);
  return r;
}

// Classical generator written out from its definition, independent of the library.
double generator_by_hand(double x1, double x2) {
  double r0 = 0.5, r1 = 1.0, beta = 1.0;
  if (x1 == 0.0) return 0.0;
  double w = bump((std::log(std::abs(x1)) - std::log(r0)) / std::log(r1 / r0), 1.0);
  double v = bump((x2 / x1 / beta + 1.0) / 2.0, 1.0);
  return w * v;
}

SpatialGrid default_grid() { return make_grid(2, 8.0, 256); }

const ShearletSystem& raw_system() {
  static const ShearletSystem sys = build_system(GeneratorSpec{}, default_grid(), ChannelSpec{});
  return sys;
}

}  // namespace

TEST_CASE("generator values") {
  GeneratorSpec spec;
  std::vector<double> origin_line{0.0, 0.3};
  CHECK(evaluate_generator_hat(spec, origin_line) == 0.0);
  std::vector<double> beyond{1.2, 0.0}, inside_low{0.45, 0.0}, wide{0.7, 0.8};
  CHECK(evaluate_generator_hat(spec, beyond) == 0.0);
  CHECK(evaluate_generator_hat(spec, inside_low) == 0.0);
  CHECK(evaluate_generator_hat(spec, wide) == 0.0);

  // Dense scan for the maximum: finite, inside the band, at the log-midpoint.
  double best = 0.0, where = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    double x = 0.3 + 0.9 * i / 20000.0;
    std::vector<double> xi{x, 0.0};
    double v = evaluate_generator_hat(spec, xi);
    if (v > best) {
      best = v;
      where = x;
    }
  }
  CHECK(std::isfinite(best));
  CHECK(best == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(where == doctest::Approx(std::sqrt(0.5)).epsilon(1e-3));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> xi{u(rng), u(rng)};
    CHECK(evaluate_generator_hat(spec, xi) == doctest::Approx(generator_by_hand(xi[0], xi[1])).epsilon(1e-14));
  }
  GeneratorSpec reversed;
  reversed.r0 = 1.0;
  reversed.r1 = 0.5;
  CHECK_THROWS_AS(reversed.validate(2), Error);
}

TEST_CASE("channel layout") {
  ChannelSet set = make_channels(ChannelSpec{}, 2);
  CHECK(set.channels.size() == 12 * 13);
  CHECK(set.scale_nodes.front() == 0.25);
  CHECK(set.scale_nodes.back() == 1.0);
  CHECK(set.shear_nodes[6] == 0.0);
  CHECK(set.shear_nodes.front() == -1.5);
  CHECK(set.shear_nodes.back() == 1.5);
  for (const Channel& c : set.channels)
    CHECK(c.haar == doctest::Approx(c.scale_weight * c.shear_weight / std::pow(c.a, 3.0)).epsilon(1e-14));
  ChannelSpec mirrored;
  mirrored.sign_mode = SignMode::mirrored;
  CHECK(make_channels(mirrored, 2).channels.size() == 2 * 12 * 13);
  ChannelSet three = make_channels(ChannelSpec{0.25, 1.0, 4, 1.5, 5}, 3);
  CHECK(three.channels.size() == 4 * 25);
  ChannelSpec even{0.25, 1.0, 12, 1.5, 12};
  CHECK_THROWS_AS(make_channels(even, 2), Error);
  ChannelSpec zero_scale{0.0, 1.0, 12, 1.5, 13};
  CHECK_THROWS_AS(make_channels(zero_scale, 2), Error);
}

TEST_CASE("identity channel samples the generator unchanged") {
  const ShearletSystem& sys = raw_system();
  std::size_t id = sys.channel_count();
  for (std::size_t c = 0; c < sys.channel_count(); ++c)
    if (sys.channels()[c].a == 1.0 && sys.channels()[c].s[0] == 0.0) id = c;
  REQUIRE(id < sys.channel_count());
  std::vector<double> dense = sys.dense_filter(id);
  std::vector<double> xi(2);
  double worst = 0.0;
  for (std::size_t p = 0; p < sys.grid().size(); ++p) {
    sys.grid().frequency_point(p, xi);
    worst = std::max(worst, std::abs(dense[p] - evaluate_generator_hat(sys.generator(), xi)));
  }
  CHECK(worst == 0.0);
}

TEST_CASE("filters use the transpose action") {
  const ShearletSystem& sys = raw_system();
  const SpatialGrid& grid = sys.grid();
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 20; ++trial) {
    std::size_t c = std::uniform_int_distribution<std::size_t>(0, sys.channel_count() - 1)(rng);
    const SparseFilter& f = sys.filter(c);
    if (f.index.empty()) continue;
    std::size_t k = std::uniform_int_distribution<std::size_t>(0, f.index.size() - 1)(rng);
    const Channel& ch = sys.channels()[c];
    std::vector<double> xi(2);
    grid.frequency_point(f.index[k], xi);
    double d = std::sqrt(ch.a);
    double by_formula = generator_by_hand(ch.a * xi[0], d * (ch.s[0] * xi[0] + xi[1]));
    std::vector<double> warped = msa_matrix(ch.a, ch.s, 2).transpose().apply(xi);
    double by_matrix = generator_by_hand(warped[0], warped[1]);
    CHECK(f.value[k] == doctest::Approx(by_formula).epsilon(1e-12));
    CHECK(f.value[k] == doctest::Approx(by_matrix).epsilon(1e-12));
    // The untransposed action gives a different value away from s = 0.
    if (ch.s[0] != 0.0 && f.value[k] > 0.1) {
      std::vector<double> plain = msa_matrix(ch.a, ch.s, 2).apply(xi);
      CHECK(std::abs(generator_by_hand(plain[0], plain[1]) - f.value[k]) > 1e-6);
    }
    ++checked;
  }
  CHECK(checked == 20);
}

TEST_CASE("doubling the shear count leaves shared filters bit-identical") {
  ChannelSpec coarse, fine;
  fine.shears = 25;
  ShearletSystem a = build_system(GeneratorSpec{}, default_grid(), coarse);
  ShearletSystem b = build_system(GeneratorSpec{}, default_grid(), fine);
  int matched = 0;
  for (std::size_t i = 0; i < a.channel_count(); ++i)
    for (std::size_t j = 0; j < b.channel_count(); ++j) {
      const Channel& ci = a.channels()[i];
      const Channel& cj = b.channels()[j];
      if (ci.a != cj.a || ci.s != cj.s) continue;
      CHECK(a.filter(i).index == b.filter(j).index);
      CHECK(a.filter(i).value == b.filter(j).value);
      ++matched;
    }
  CHECK(matched == 12 * 13);
}

TEST_CASE("admissibility against the separable reduction") {
  const ShearletSystem& sys = raw_system();
  const AdmissibilityResult& adm = sys.admissibility();
  CHECK(adm.field.size() >= 32);
  CHECK(adm.excluded == 0);
  CHECK(adm.coefficient_of_variation <= 0.02);
  // int |w(r)|^2 / r dr = ln(r1/r0) B and int |v|^2 du = 2 beta B with B = int bump^2.
  double B = bump_sq_integral();
  double separable = std::log(2.0) * B * 2.0 * B;
  CHECK(std::abs(adm.c_psi / separable - 1.0) <= 0.02);
  for (std::size_t p = 0; p < adm.field.size(); ++p) {
    std::span<const double> xi(adm.probes.data() + 2 * p, 2);
    CHECK(in_covered_cone(sys.generator(), sys.channel_spec(), xi));
  }
}

TEST_CASE("admissibility edge cases") {
  GeneratorSpec zero;
  zero.amplitude = 0.0;
  ShearletSystem z = build_system(zero, default_grid(), ChannelSpec{});
  CHECK(z.c_psi() == 0.0);
  CHECK_THROWS_AS(normalize_system(z), Error);

  // Extending the scale range by whole log-steps keeps the old nodes and only adds weight.
  ChannelSpec base;
  double step = std::log(4.0) / 11.0;
  ChannelSpec wider = base;
  wider.a_min = 0.25 * std::exp(-2.0 * step);
  wider.scales = 14;
  SpatialGrid fine = make_grid(2, 8.0, 512);
  ShearletSystem a = build_system(GeneratorSpec{}, fine, base);
  ShearletSystem b = build_system(GeneratorSpec{}, fine, wider);
  AdmissibilityResult on_same = admissibility(b, a.admissibility().probes);
  REQUIRE(on_same.field.size() == a.admissibility().field.size());
  for (std::size_t p = 0; p < on_same.field.size(); ++p)
    CHECK(on_same.field[p] >= a.admissibility().field[p] * (1.0 - 1e-12));

  std::vector<double> off_cone{0.01, 0.0, 3.0, 0.0};
  AdmissibilityResult none = admissibility(a, off_cone);
  CHECK(none.excluded == 2);
  CHECK(none.field.empty());
}

TEST_CASE("normalization") {
  ShearletSystem n1 = normalize_system(raw_system());
  CHECK(std::abs(n1.c_psi() - 1.0) <= 1e-10);
  ShearletSystem n2 = normalize_system(n1);
  CHECK(std::abs(n2.c_psi() - 1.0) <= 1e-10);
  double worst = 0.0;
  for (std::size_t c = 0; c < n1.channel_count(); ++c)
    for (std::size_t k = 0; k < n1.filter(c).value.size(); ++k)
      worst = std::max(worst, std::abs(n1.filter(c).value[k] - n2.filter(c).value[k]));
  CHECK(worst <= 1e-12);
  double scale = raw_system().c_psi();
  for (std::size_t p = 0; p < n1.frame_function().size(); p += 97)
    CHECK(n1.frame_function()[p] == doctest::Approx(raw_system().frame_function()[p] / scale).epsilon(1e-12));
}

TEST_CASE("aliasing and manifest") {
  SpatialGrid coarse = make_grid(2, 8.0, 32);
  try {
    build_system(GeneratorSpec{}, coarse, ChannelSpec{});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::aliasing);
  }
  auto manifest = nlohmann::json::parse(system_manifest(raw_system()));
  CHECK(manifest["admissibility"]["c_psi"].get<double>() == raw_system().c_psi());
  CHECK(manifest["channel_table"].size() == raw_system().channel_count());
  CHECK(manifest.dump().find("scale_nodes") != std::string::npos);
}

TEST_CASE("three-dimensional system") {
  SpatialGrid grid = make_grid(3, 2.0, 64);
  ChannelSpec spec{0.25, 1.0, 4, 1.25, 5};
  ShearletSystem sys = build_system(GeneratorSpec{}, grid, spec);
  CHECK(sys.channel_count() == 4 * 25);
  CHECK(sys.c_psi() > 0.0);
  CHECK(sys.admissibility().field.size() == 4 * 9 * 2);
}
