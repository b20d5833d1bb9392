#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "shearlet/error.hpp"
#include "shearlet/transform.hpp"

using namespace shearlet;

namespace {

std::shared_ptr<const ShearletSystem> normalized_system() {
  static auto sys =
      std::make_shared<const ShearletSystem>(normalize_system(build_system(GeneratorSpec{}, make_grid(2, 8.0, 256), ChannelSpec{})));
  return sys;
}

// Band-covered test signal: unit norm, width 2.5, modulated into the pass-band.
GaussianSignal covered(std::vector<double> center = {0.0, 0.0}) {
  return GaussianSignal{std::move(center), {2.5, 2.5}, {1.45, 0.0}, {}, 1.0};
}

double max_abs(std::span<const cplx> v) {
  double m = 0.0;
  for (const cplx& x : v) m = std::max(m, std::abs(x));
  return m;
}

std::size_t find_channel(const ShearletSystem& sys, double a, double s) {
  for (std::size_t c = 0; c < sys.channel_count(); ++c)
    if (sys.channels()[c].a == a && sys.channels()[c].s[0] == s) return c;
  return sys.channel_count();
}

}  // namespace

TEST_CASE("zero signal and linearity") {
  auto sys = normalized_system();
  const SpatialGrid& grid = sys->grid();
  SampledSignal zero{grid, std::vector<cplx>(grid.size()), Domain::spatial, {}};
  CoefficientField z = forward(zero, sys);
  CHECK(max_abs(z.values()) == 0.0);
  CHECK(energy(z) == 0.0);

  GaussianSignal g1 = covered(), g2{{1.0, -0.5}, {2.2, 1.9}, {1.3, 0.3}, {}, 1.0};
  SampledSignal f = gaussian_signal(grid, g1), g = gaussian_signal(grid, g2);
  cplx alpha(0.7, -0.2), beta(-1.1, 0.4);
  SampledSignal mix = f;
  for (std::size_t p = 0; p < grid.size(); ++p) mix.values[p] = alpha * f.values[p] + beta * g.values[p];
  CoefficientField cf = forward(f, sys), cg = forward(g, sys), cm = forward(mix, sys);
  double worst = 0.0;
  for (std::size_t i = 0; i < cm.values().size(); ++i)
    worst = std::max(worst, std::abs(cm.values()[i] - (alpha * cf.values()[i] + beta * cg.values()[i])));
  CHECK(worst <= 1e-13 * max_abs(cm.values()));

  SampledSignal twice = f;
  for (auto& v : twice.values) v *= 2.0;
  CHECK(energy(forward(twice, sys)) == 4.0 * energy(cf));
}

TEST_CASE("identity channel is a plain correlation") {
  auto raw = std::make_shared<const ShearletSystem>(build_system(GeneratorSpec{}, make_grid(2, 8.0, 256), ChannelSpec{}));
  const SpatialGrid& grid = raw->grid();
  GaussianSignal g = covered();
  SampledSignal f = gaussian_signal(grid, g);
  std::size_t id = find_channel(*raw, 1.0, 0.0);
  REQUIRE(id < raw->channel_count());
  SampledSignal spec = fourier(f, Direction::forward);
  std::vector<double> filter = raw->dense_filter(id);
  for (std::size_t p = 0; p < grid.size(); ++p) spec.values[p] *= filter[p];
  SampledSignal expect = fourier(spec, Direction::inverse);
  CoefficientField cf = forward(f, raw);
  auto got = cf.channel(id);
  double worst = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) worst = std::max(worst, std::abs(got[p] - expect.values[p]));
  CHECK(worst <= 1e-13 * max_abs(got));
}

TEST_CASE("translation covariance") {
  auto sys = normalized_system();
  const SpatialGrid& grid = sys->grid();
  // The modulation is not re-centred, so f(x - tau) = g1(x) e^{-2 pi i tau.nu}.
  GaussianSignal g0 = covered(), g1 = covered({0.5, -0.25});  // shift by (8h, -4h)
  cplx phase = std::polar(1.0, 2.0 * 3.14159265358979323846 * 0.5 * 1.45);
  CoefficientField c0 = forward(gaussian_signal(grid, g0), sys), c1 = forward(gaussian_signal(grid, g1), sys);
  std::vector<std::size_t> idx(2), src(2);
  double worst = 0.0, scale = max_abs(c0.values());
  for (std::size_t c = 0; c < sys->channel_count(); c += 7) {
    auto a = c0.channel(c), b = c1.channel(c);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      grid.unflat(p, idx);
      src[0] = (idx[0] + 256 - 8) % 256;
      src[1] = (idx[1] + 4) % 256;
      worst = std::max(worst, std::abs(b[p] - phase * a[grid.flat(src)]));
    }
  }
  CHECK(worst <= 1e-12 * scale);
}

TEST_CASE("self inner product of an analyzing function") {
  auto sys = normalized_system();
  const SpatialGrid& grid = sys->grid();
  std::size_t c = 40;
  const SparseFilter& flt = sys->filter(c);
  std::vector<double> t{1.5, -0.75}, xi(2);
  SampledSignal spec{grid, std::vector<cplx>(grid.size()), Domain::frequency, {}};
  for (std::size_t k = 0; k < flt.index.size(); ++k) {
    grid.frequency_point(flt.index[k], xi);
    double phase = -2.0 * 3.14159265358979323846 * (xi[0] * t[0] + xi[1] * t[1]);
    spec.values[flt.index[k]] = sys->det_sqrt(c) * flt.value[k] * cplx(std::cos(phase), std::sin(phase));
  }
  SampledSignal psi = fourier(spec, Direction::inverse);
  std::size_t at = 0;
  std::vector<double> x(2);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.point(p, x);
    if (x[0] == t[0] && x[1] == t[1]) at = p;
  }
  cplx value = 0.0;
  for_each_channel(psi, *sys, [&](std::size_t ch, std::span<const cplx> coeff, unsigned) {
    if (ch == c) value = coeff[at];
  });
  double nrm = norm_sq(psi);
  CHECK(std::abs(value - nrm) <= 1e-12 * nrm);
}

TEST_CASE("direct oracle agrees with the FFT route") {
  auto sys = normalized_system();
  const SpatialGrid& grid = sys->grid();
  GaussianSignal g = covered();
  SampledSignal f = gaussian_signal(grid, g);
  CoefficientField cf = forward(f, sys);
  DirectOracle oracle(sys);
  CHECK(oracle.table_tail() < 1e-9);
  SignalFunction fn = [&g](std::span<const double> x) { return g(x); };

  double global = max_abs(cf.values());
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::size_t> pick_c(0, sys->channel_count() - 1), pick_p(0, grid.size() - 1);
  int done = 0;
  std::vector<double> t(2);
  while (done < 10) {
    std::size_t c = pick_c(rng);
    auto ch = cf.channel(c);
    double peak = max_abs(ch);
    if (peak < 0.1 * global) continue;
    std::size_t p = pick_p(rng);
    if (std::abs(ch[p]) < 0.1 * peak) continue;
    grid.point(p, t);
    const Channel& chan = sys->channels()[c];
    cplx direct = oracle.coefficient(fn, chan.a, chan.s, t);
    INFO("channel " << c << " point " << p);
    CHECK(std::abs(direct - ch[p]) <= 1e-8 * std::abs(direct));
    ++done;
  }

  // Shift covariance of the oracle itself.
  GaussianSignal shifted = covered({0.5, -0.25});
  gaussian_signal(grid, shifted);
  SignalFunction fs = [&shifted](std::span<const double> x) { return shifted(x); };
  const Channel& chan = sys->channels()[60];
  std::vector<double> t0{0.8, 0.3}, t1{0.3, 0.55};
  cplx lhs = oracle.coefficient(fs, chan.a, chan.s, t0) * std::polar(1.0, -2.0 * 3.14159265358979323846 * 0.5 * 1.45);
  cplx rhs = oracle.coefficient(fn, chan.a, chan.s, t1);
  CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(rhs));
}

TEST_CASE("energy identity before and after normalization") {
  auto raw = std::make_shared<const ShearletSystem>(build_system(GeneratorSpec{}, make_grid(2, 8.0, 256), ChannelSpec{}));
  auto sys = normalized_system();
  GaussianSignal g = covered();
  SampledSignal f = gaussian_signal(sys->grid(), g);
  double e_raw = energy(forward(f, raw)), e = energy(forward(f, sys));
  CHECK(e_raw / norm_sq(f) == doctest::Approx(raw->c_psi()).epsilon(0.05));
  CHECK(e / norm_sq(f) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(e - 1.0) < std::abs(e_raw - 1.0));
}

TEST_CASE("Moyal relation") {
  auto sys = normalized_system();
  const SpatialGrid& grid = sys->grid();
  GaussianSignal a = covered(), b{{1.0, -0.5}, {2.2, 1.9}, {1.3, 0.3}, {}, 1.0};
  SampledSignal f = gaussian_signal(grid, a), g = gaussian_signal(grid, b);

  MoyalResult same = moyal(f, f, *sys);
  CHECK(same.lhs.real() == doctest::Approx(energy(forward(f, sys))).epsilon(1e-12));
  CHECK(std::abs(same.lhs.imag()) <= 1e-14);

  MoyalResult pair = moyal(f, g, *sys);
  CHECK(pair.relative_error <= 0.05);

  // Even and odd in x_2 about the same modulated Gaussian: exactly orthogonal.
  GaussianSignal odd{{0.0, 0.0}, {2.5, 2.5}, {1.45, 0.0}, {0, 1}, 1.0};
  SampledSignal h = gaussian_signal(grid, odd);
  MoyalResult orth = moyal(f, h, *sys);
  double scale = std::sqrt(norm_sq(f) * norm_sq(h));
  CHECK(std::abs(orth.rhs) <= 1e-12 * scale);
  CHECK(std::abs(orth.lhs) <= 1e-6 * scale);
}

TEST_CASE("weighted spectral identity") {
  auto sys = normalized_system();
  const SpatialGrid& grid = sys->grid();
  GaussianSignal g = covered();
  SampledSignal f = gaussian_signal(grid, g);
  std::vector<double> ones(grid.size(), 1.0);
  IdentityResult plain = weighted_spectral_identity(f, *sys, ones);
  CHECK(plain.lhs == doctest::Approx(energy(forward(f, sys))).epsilon(1e-12));
  IdentityResult log_id = weighted_spectral_identity(f, *sys, weight_field(grid, WeightKind::frequency_log));
  CHECK(log_id.relative_error <= 0.05);
  IdentityResult sq = weighted_spectral_identity(f, *sys, weight_field(grid, WeightKind::frequency_power, 2.0));
  CHECK(sq.relative_error <= 0.05);
  CHECK(sq.rhs == doctest::Approx(spectral_gradient_norm_sq(f).value * sys->c_psi()).epsilon(1e-12));
}

TEST_CASE("thread count does not change results") {
  auto sys = normalized_system();
  GaussianSignal g = covered();
  SampledSignal f = gaussian_signal(sys->grid(), g);
  TransformOptions one, three;
  one.threads = 1;
  three.threads = 3;
  CoefficientField a = forward(f, sys, one), b = forward(f, sys, three);
  CHECK(a.values() == b.values());
  CHECK(energy(a) == energy(b));
}

TEST_CASE("coefficient dump round trip and memory budget") {
  auto sys = std::make_shared<const ShearletSystem>(
      build_system(GeneratorSpec{}, make_grid(2, 8.0, 128), ChannelSpec{0.5, 1.0, 3, 1.0, 5}));
  GaussianSignal g = covered();
  SampledSignal f = gaussian_signal(sys->grid(), g);
  CoefficientField cf = forward(f, sys);
  std::stringstream buf;
  write_coefficients(buf, cf);
  CoefficientDump d = read_coefficients(buf);
  CHECK(d.n == 2);
  CHECK(d.samples == std::vector<std::size_t>{128, 128});
  CHECK(d.scale_nodes == sys->channel_set().scale_nodes);
  REQUIRE(d.channels.size() == sys->channel_count());
  for (std::size_t c = 0; c < d.channels.size(); ++c) {
    CHECK(d.channels[c].a == sys->channels()[c].a);
    CHECK(d.channels[c].s == sys->channels()[c].s);
    CHECK(d.channels[c].haar == sys->channels()[c].haar);
  }
  CHECK(d.values == cf.values());
  std::stringstream bad("SHSG");
  CHECK_THROWS_AS(read_coefficients(bad), Error);

  TransformOptions tight;
  tight.memory_budget = 1024;
  try {
    forward(f, sys, tight);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::memory_budget);
  }
  SampledSignal other = gaussian_signal(make_grid(2, 8.0, 256), g);
  CHECK_THROWS_AS(forward(other, sys), Error);
}

TEST_CASE("energy equals the frame-weighted spectrum in two and three dimensions") {
  // sum_c haar_c ||SH_c||^2 = int frame |f-hat|^2 holds exactly on the lattice.
  auto check = [](std::shared_ptr<const ShearletSystem> sys, GaussianSignal g) {
    SampledSignal f = gaussian_signal(sys->grid(), g);
    double e = energy(forward(f, sys));
    double framed = weighted_norm_sq(fourier(f, Direction::forward), sys->frame_function());
    CHECK(e == doctest::Approx(framed).epsilon(1e-12));
  };
  check(normalized_system(), covered());
  auto three = std::make_shared<const ShearletSystem>(
      build_system(GeneratorSpec{}, make_grid(3, 2.0, 64), ChannelSpec{0.25, 1.0, 4, 1.25, 5}));
  check(three, GaussianSignal{{0.0, 0.0, 0.0}, {0.8, 0.8, 0.8}, {1.45, 0.0, 0.0}, {}, 1.0});
}
