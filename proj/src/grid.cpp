#include "shearlet/grid.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "binary_io.hpp"
#include "shearlet/error.hpp"
#include "shearlet/fft.hpp"
#include "shearlet/specfun.hpp"

namespace shearlet {

SpatialGrid::SpatialGrid(std::vector<double> half_extent, std::vector<std::size_t> samples)
    : half_extent_(std::move(half_extent)), samples_(std::move(samples)) {
  if (half_extent_.empty() || half_extent_.size() != samples_.size())
    throw Error(Errc::invalid_grid, "half extents and sample counts must be nonempty and of equal length");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!(half_extent_[i] > 0.0) || !std::isfinite(half_extent_[i]))
      throw Error(Errc::invalid_grid, "half extent must be positive");
    if (samples_[i] < 2 || samples_[i] % 2 != 0) throw Error(Errc::invalid_grid, "sample count must be even");
  }
  strides_.assign(samples_.size(), 1);
  for (int i = static_cast<int>(samples_.size()) - 2; i >= 0; --i) strides_[i] = strides_[i + 1] * samples_[i + 1];
  size_ = strides_[0] * samples_[0];
}

SpatialGrid make_grid(int n, double half_extent, std::size_t samples) {
  if (n < 1) throw Error(Errc::dimension, "dimension must be positive");
  if (samples < 16 || (samples & (samples - 1)) != 0)
    throw Error(Errc::invalid_grid, "sample count must be a power of two >= 16");
  if (!(half_extent > 0.0)) throw Error(Errc::invalid_grid, "half extent must be positive");
  return SpatialGrid(std::vector<double>(n, half_extent), std::vector<std::size_t>(n, samples));
}

double SpatialGrid::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= spacing(i);
  return v;
}

double SpatialGrid::frequency_cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= frequency_spacing(i);
  return v;
}

std::int64_t SpatialGrid::signed_index(int axis, std::size_t k) const {
  auto N = static_cast<std::int64_t>(samples_[axis]);
  auto kk = static_cast<std::int64_t>(k);
  return kk < N / 2 ? kk : kk - N;
}

std::size_t SpatialGrid::storage_index(int axis, std::int64_t m) const {
  auto N = static_cast<std::int64_t>(samples_[axis]);
  return static_cast<std::size_t>(m >= 0 ? m : m + N);
}

std::size_t SpatialGrid::flat(std::span<const std::size_t> multi) const {
  std::size_t f = 0;
  for (std::size_t i = 0; i < multi.size(); ++i) f += multi[i] * strides_[i];
  return f;
}

void SpatialGrid::unflat(std::size_t flat_index, std::span<std::size_t> multi) const {
  for (std::size_t i = 0; i < strides_.size(); ++i) {
    multi[i] = flat_index / strides_[i];
    flat_index %= strides_[i];
  }
}

void SpatialGrid::point(std::size_t flat_index, std::span<double> x) const {
  for (std::size_t i = 0; i < strides_.size(); ++i) {
    x[i] = coordinate(static_cast<int>(i), flat_index / strides_[i]);
    flat_index %= strides_[i];
  }
}

void SpatialGrid::frequency_point(std::size_t flat_index, std::span<double> xi) const {
  for (std::size_t i = 0; i < strides_.size(); ++i) {
    xi[i] = frequency(static_cast<int>(i), flat_index / strides_[i]);
    flat_index %= strides_[i];
  }
}

std::size_t SpatialGrid::spatial_origin_index() const {
  std::size_t f = 0;
  for (std::size_t i = 0; i < strides_.size(); ++i) f += (samples_[i] / 2) * strides_[i];
  return f;
}

bool SpatialGrid::same_as(const SpatialGrid& other) const {
  return half_extent_ == other.half_extent_ && samples_ == other.samples_;
}

namespace {

int parity(const SpatialGrid& grid, std::size_t flat_index, std::vector<std::size_t>& multi) {
  grid.unflat(flat_index, multi);
  std::size_t s = 0;
  for (std::size_t k : multi) s += k;
  return static_cast<int>(s & 1u);
}

}  // namespace

SampledSignal fourier(const SampledSignal& signal, Direction direction) {
  const SpatialGrid& grid = signal.grid;
  if (signal.values.size() != grid.size()) throw Error(Errc::grid_mismatch, "signal shape differs from grid");
  bool fwd = direction == Direction::forward;
  if (fwd != (signal.domain == Domain::spatial))
    throw Error(Errc::domain, fwd ? "forward transform needs a spatial signal" : "inverse transform needs a spectrum");

  FftBuffer buf(grid.size());
  std::vector<std::size_t> multi(grid.dim());
  // The (-1)^{sum m} phase accounts for the grid starting at -L.
  double scale = fwd ? grid.cell_volume() : 1.0;
  if (!fwd)
    for (int i = 0; i < grid.dim(); ++i) scale /= 2.0 * grid.half_extent(i);
  for (std::size_t p = 0; p < grid.size(); ++p) buf[p] = signal.values[p];
  if (!fwd)
    for (std::size_t p = 0; p < grid.size(); ++p)
      if (parity(grid, p, multi)) buf[p] = -buf[p];
  cached_plan(grid.sample_counts(), fwd ? -1 : +1)->execute(buf);

  SampledSignal out{grid, std::vector<cplx>(grid.size()), fwd ? Domain::frequency : Domain::spatial, signal.notes};
  for (std::size_t p = 0; p < grid.size(); ++p) {
    cplx v = buf[p] * scale;
    if (fwd && parity(grid, p, multi)) v = -v;
    out.values[p] = v;
  }
  return out;
}

namespace {

// Fraction of the mass of u^{2k} exp(-u^2/(2 s^2)) on (A, inf).
double upper_tail(double A, double s, int k) {
  double z = A / (s * std::sqrt(2.0));
  if (k == 0) return 0.5 * std::erfc(z);
  if (k == 1) return A * std::exp(-z * z) / (s * std::sqrt(2.0 * kPi)) + 0.5 * std::erfc(z);
  throw Error(Errc::domain, "tail mass is only available for polynomial order 0 or 1");
}

double outside_fraction(const std::vector<double>& lo, const std::vector<double>& hi, const std::vector<double>& s,
                        const std::vector<int>& k) {
  double inside = 1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double out = upper_tail(hi[i], s[i], k[i]) + upper_tail(lo[i], s[i], k[i]);
    inside *= std::max(0.0, 1.0 - out);
  }
  return 1.0 - inside;
}

std::vector<int> orders(const GaussianSignal& g) {
  std::vector<int> k = g.hermite;
  k.resize(g.dim(), 0);
  return k;
}

void check_gaussian(const GaussianSignal& g, int n) {
  if (g.dim() != n || static_cast<int>(g.sigma.size()) != n || static_cast<int>(g.modulation.size()) != n)
    throw Error(Errc::dimension, "gaussian parameters must match the grid dimension");
  for (double s : g.sigma)
    if (!(s > 0.0)) throw Error(Errc::domain, "gaussian widths must be positive");
  for (int k : g.hermite)
    if (k < 0) throw Error(Errc::domain, "polynomial order must be nonnegative");
}

}  // namespace

cplx GaussianSignal::operator()(std::span<const double> x) const {
  double env = 0.0, poly = 1.0, phase = 0.0;
  for (int i = 0; i < dim(); ++i) {
    double u = x[i] - center[i];
    env += u * u / (sigma[i] * sigma[i]);
    if (i < static_cast<int>(hermite.size()))
      for (int j = 0; j < hermite[i]; ++j) poly *= u;
    phase += x[i] * modulation[i];
  }
  double mag = amplitude * poly * std::exp(-kPi * env);
  double arg = 2.0 * kPi * phase;
  return {mag * std::cos(arg), mag * std::sin(arg)};
}

double GaussianSignal::tail_mass(const SpatialGrid& grid) const {
  int n = dim();
  std::vector<double> lo(n), hi(n), s(n);
  for (int i = 0; i < n; ++i) {
    hi[i] = grid.half_extent(i) - center[i];
    lo[i] = grid.half_extent(i) + center[i];
    s[i] = sigma[i] / (2.0 * std::sqrt(kPi));
  }
  return outside_fraction(lo, hi, s, orders(*this));
}

double GaussianSignal::spectral_tail_mass(const SpatialGrid& grid) const {
  int n = dim();
  std::vector<double> lo(n), hi(n), s(n);
  for (int i = 0; i < n; ++i) {
    double nyq = grid.nyquist(i);
    hi[i] = nyq - modulation[i];
    lo[i] = nyq + modulation[i];
    s[i] = 1.0 / (2.0 * std::sqrt(kPi) * sigma[i]);
  }
  return outside_fraction(lo, hi, s, orders(*this));
}

SampledSignal sample(const SpatialGrid& grid, const std::function<cplx(std::span<const double>)>& f) {
  SampledSignal out{grid, std::vector<cplx>(grid.size()), Domain::spatial, {}};
  std::vector<double> x(grid.dim());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.point(p, x);
    out.values[p] = f(x);
  }
  return out;
}

SampledSignal gaussian_signal(const SpatialGrid& grid, GaussianSignal& g, const GaussianOptions& options) {
  check_gaussian(g, grid.dim());
  double tail = g.tail_mass(grid);
  if (tail >= options.tail_tolerance) {
    std::ostringstream msg;
    msg << "gaussian tail mass " << tail << " outside the grid box exceeds " << options.tail_tolerance;
    throw Error(Errc::support, msg.str());
  }
  SampledSignal out = sample(grid, std::cref(g));
  double spectral_tail = g.spectral_tail_mass(grid);
  if (spectral_tail >= options.tail_tolerance) {
    std::ostringstream msg;
    msg << "spectral tail mass " << spectral_tail << " beyond the lattice band";
    out.notes.push_back(msg.str());
  }
  if (options.normalize) {
    double nrm = std::sqrt(norm_sq(out));
    if (nrm == 0.0) throw Error(Errc::domain, "gaussian sampled to zero");
    g.amplitude /= nrm;
    for (cplx& v : out.values) v /= nrm;
  }
  return out;
}

SampledSignal gaussian_signal(const SpatialGrid& grid, std::vector<double> center, std::vector<double> sigma,
                              std::vector<double> modulation, const GaussianOptions& options) {
  GaussianSignal g{std::move(center), std::move(sigma), std::move(modulation), {}, 1.0};
  return gaussian_signal(grid, g, options);
}

bool is_frequency_kind(WeightKind kind) {
  return kind == WeightKind::frequency_inverse_power || kind == WeightKind::frequency_log ||
         kind == WeightKind::frequency_power;
}

std::string weight_kind_name(WeightKind kind) {
  switch (kind) {
    case WeightKind::spatial_power: return "|t|^p";
    case WeightKind::spatial_log: return "ln|t|";
    case WeightKind::spatial_log_sobolev: return "ln((1+|t|^2)/2)";
    case WeightKind::frequency_inverse_power: return "|xi|^-p";
    case WeightKind::frequency_log: return "ln|xi|";
    case WeightKind::frequency_power: return "|xi|^p";
  }
  throw Error(Errc::domain, "unsupported weight kind");
}

namespace {

// Tensor Gauss-Legendre integral of f over prod [-d_i, d_i] (dimension m >= 0).
double box_integral(std::span<const double> d, const std::function<double(std::span<const double>)>& f) {
  constexpr std::size_t kNodes = 48;
  static gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(kNodes);
  std::size_t m = d.size();
  std::vector<double> nodes(kNodes), weights(kNodes);
  for (std::size_t i = 0; i < kNodes; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &nodes[i], &weights[i], table);
  std::vector<std::size_t> idx(m, 0);
  std::vector<double> y(m);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      y[k] = d[k] * nodes[idx[k]];
      w *= d[k] * weights[idx[k]];
    }
    total += w * f(y);
    std::size_t k = 0;
    while (k < m && ++idx[k] == kNodes) idx[k++] = 0;
    if (k == m) break;
  }
  return total;
}

// Sum over the faces x_j = +-d_j of g(face integral, d_j), via the pyramid
// decomposition of the box with apex at the origin.
template <class FaceTerm>
double pyramid_mean(std::span<const double> d, FaceTerm term) {
  std::size_t n = d.size();
  double volume = 1.0;
  for (double v : d) volume *= 2.0 * v;
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> rest;
    for (std::size_t i = 0; i < n; ++i)
      if (i != j) rest.push_back(d[i]);
    double dj = d[j];
    total += 2.0 * dj * term(rest, dj);
  }
  return total / volume;
}

}  // namespace

double cell_mean_power(std::span<const double> half_widths, double p) {
  double n = static_cast<double>(half_widths.size());
  if (!(p > -n)) throw Error(Errc::domain, "cell mean of |x|^p diverges for p <= -n");
  return pyramid_mean(half_widths, [&](std::span<const double> rest, double dj) {
    double face = box_integral(rest, [&](std::span<const double> y) {
      double r2 = dj * dj;
      for (double v : y) r2 += v * v;
      return std::pow(r2, 0.5 * p);
    });
    return face / (p + n);
  });
}

double cell_mean_log(std::span<const double> half_widths) {
  double n = static_cast<double>(half_widths.size());
  return pyramid_mean(half_widths, [&](std::span<const double> rest, double dj) {
    double area = 1.0;
    for (double v : rest) area *= 2.0 * v;
    double face = box_integral(rest, [&](std::span<const double> y) {
      double r2 = dj * dj;
      for (double v : y) r2 += v * v;
      return 0.5 * std::log(r2);
    });
    return face / n - area / (n * n);
  });
}

std::vector<double> weight_field(const SpatialGrid& grid, WeightKind kind, double exponent) {
  int n = grid.dim();
  bool freq = is_frequency_kind(kind);
  std::vector<double> w(grid.size());
  std::vector<double> x(n);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (freq)
      grid.frequency_point(p, x);
    else
      grid.point(p, x);
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    double r = std::sqrt(r2);
    switch (kind) {
      case WeightKind::spatial_power:
      case WeightKind::frequency_power: w[p] = exponent == 0.0 ? 1.0 : std::pow(r, exponent); break;
      case WeightKind::frequency_inverse_power: w[p] = exponent == 0.0 ? 1.0 : r > 0.0 ? std::pow(r, -exponent) : 0.0; break;
      case WeightKind::spatial_log:
      case WeightKind::frequency_log: w[p] = r > 0.0 ? std::log(r) : 0.0; break;
      case WeightKind::spatial_log_sobolev: w[p] = std::log(0.5 * (1.0 + r2)); break;
    }
  }
  if (kind == WeightKind::spatial_log_sobolev) return w;

  std::vector<double> half(n);
  for (int i = 0; i < n; ++i) half[i] = 0.5 * (freq ? grid.frequency_spacing(i) : grid.spacing(i));
  std::size_t origin = freq ? grid.frequency_origin_index() : grid.spatial_origin_index();
  switch (kind) {
    case WeightKind::spatial_power:
    case WeightKind::frequency_power:
      if (exponent < 0.0) w[origin] = cell_mean_power(half, exponent);
      break;
    case WeightKind::frequency_inverse_power:
      if (exponent > 0.0) w[origin] = cell_mean_power(half, -exponent);
      break;
    case WeightKind::spatial_log:
    case WeightKind::frequency_log: w[origin] = cell_mean_log(half); break;
    default: break;
  }
  return w;
}

double RegionSpec::measure(int n) const {
  switch (kind) {
    case RegionKind::empty: return 0.0;
    case RegionKind::ball: {
      double r = extent.at(0);
      return std::pow(kPi, 0.5 * n) * std::pow(r, n) / gamma(0.5 * n + 1.0);
    }
    case RegionKind::box: {
      double v = 1.0;
      for (int i = 0; i < n; ++i) v *= 2.0 * extent.at(extent.size() == 1 ? 0 : i);
      return v;
    }
  }
  return 0.0;
}

bool RegionSpec::contains(std::span<const double> x) const {
  switch (kind) {
    case RegionKind::empty: return false;
    case RegionKind::ball: {
      double r2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        double u = x[i] - center[i];
        r2 += u * u;
      }
      return r2 <= extent[0] * extent[0];
    }
    case RegionKind::box:
      for (std::size_t i = 0; i < x.size(); ++i)
        if (std::abs(x[i] - center[i]) > extent[extent.size() == 1 ? 0 : i]) return false;
      return true;
  }
  return false;
}

std::string RegionSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  auto vec = [&](const std::vector<double>& v) {
    os << '(';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ')';
  };
  switch (kind) {
    case RegionKind::empty: os << "empty"; break;
    case RegionKind::ball:
      os << "ball";
      vec(center);
      os << "r=" << extent.at(0);
      break;
    case RegionKind::box:
      os << "box";
      vec(center);
      os << "w=";
      vec(extent);
      break;
  }
  return os.str();
}

namespace {

void check_region(const RegionSpec& region, int n) {
  if (region.kind == RegionKind::empty) return;
  if (static_cast<int>(region.center.size()) != n) throw Error(Errc::dimension, "region center has wrong length");
  if (region.kind == RegionKind::ball && region.extent.size() != 1)
    throw Error(Errc::domain, "ball needs exactly one radius");
  if (region.kind == RegionKind::box && region.extent.size() != 1 && static_cast<int>(region.extent.size()) != n)
    throw Error(Errc::dimension, "box needs one or n half-widths");
  for (double e : region.extent)
    if (!(e > 0.0)) throw Error(Errc::domain, "region extents must be positive");
}

}  // namespace

RegionMask region_mask(const SpatialGrid& grid, const RegionSpec& region, bool complement, Domain domain) {
  int n = grid.dim();
  check_region(region, n);
  RegionMask mask;
  mask.complement = complement;
  mask.measure = region.measure(n);
  mask.values.assign(grid.size(), 0.0);
  std::vector<double> x(n);
  std::size_t inside = 0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (domain == Domain::spatial)
      grid.point(p, x);
    else
      grid.frequency_point(p, x);
    bool in = region.contains(x);
    inside += in ? 1 : 0;
    mask.values[p] = (in != complement) ? 1.0 : 0.0;
  }
  if (region.kind != RegionKind::empty && inside == 0)
    mask.notes.push_back("warning: region contains no grid sample");
  return mask;
}

double weighted_norm_sq(const SampledSignal& signal, std::span<const double> weights) {
  if (weights.size() != signal.values.size()) throw Error(Errc::grid_mismatch, "weight shape differs from signal");
  std::vector<double> terms(weights.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = weights[i] * std::norm(signal.values[i]);
  double cell = signal.domain == Domain::spatial ? signal.grid.cell_volume() : signal.grid.frequency_cell_volume();
  return cell * pairwise_sum(terms);
}

double norm_sq(const SampledSignal& signal) {
  std::vector<double> terms(signal.values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::norm(signal.values[i]);
  double cell = signal.domain == Domain::spatial ? signal.grid.cell_volume() : signal.grid.frequency_cell_volume();
  return cell * pairwise_sum(terms);
}

GradientNorm spectral_gradient_norm_sq(const SampledSignal& signal) {
  if (signal.domain != Domain::spatial) throw Error(Errc::domain, "gradient norm needs a spatial signal");
  SampledSignal spectrum = fourier(signal, Direction::forward);
  GradientNorm g;
  g.value = weighted_norm_sq(spectrum, weight_field(signal.grid, WeightKind::frequency_power, 2.0));
  g.calculus = 4.0 * kPi * kPi * g.value;
  return g;
}

void write_signal(std::ostream& out, const SampledSignal& signal) {
  if (signal.domain != Domain::spatial) throw Error(Errc::domain, "signal dumps hold spatial samples");
  using namespace detail;
  put_magic(out, "SHSG");
  put<std::uint16_t>(out, 1);
  const SpatialGrid& g = signal.grid;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  for (int i = 0; i < g.dim(); ++i) put<std::uint32_t>(out, static_cast<std::uint32_t>(g.samples(i)));
  for (int i = 0; i < g.dim(); ++i) put<double>(out, g.half_extent(i));
  for (const cplx& v : signal.values) {
    put<double>(out, v.real());
    put<double>(out, v.imag());
  }
  if (!out) throw Error(Errc::io, "failed to write signal dump");
}

SampledSignal read_signal(std::istream& in) {
  using namespace detail;
  expect_magic(in, "SHSG");
  auto version = get<std::uint16_t>(in);
  if (version != 1) throw Error(Errc::io, "unsupported signal dump version");
  auto n = get<std::uint32_t>(in);
  if (n == 0 || n > 16) throw Error(Errc::io, "implausible dimension in signal dump");
  std::vector<std::size_t> samples(n);
  std::vector<double> half(n);
  for (auto& s : samples) s = get<std::uint32_t>(in);
  for (auto& h : half) h = get<double>(in);
  SampledSignal out{SpatialGrid(half, samples), {}, Domain::spatial, {}};
  out.values.resize(out.grid.size());
  for (cplx& v : out.values) {
    double re = get<double>(in);
    double im = get<double>(in);
    v = {re, im};
  }
  return out;
}

}  // namespace shearlet
