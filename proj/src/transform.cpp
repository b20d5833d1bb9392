#include "shearlet/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "binary_io.hpp"
#include "shearlet/error.hpp"
#include "shearlet/group.hpp"

namespace shearlet {

namespace {

// Produces SH f for one channel at a time from a fixed spectrum.
class ChannelEngine {
 public:
  ChannelEngine(const ShearletSystem& system, const SampledSignal& spectrum)
      : system_(system), spectrum_(spectrum), inverse_(cached_plan(system.grid().sample_counts(), +1)) {
    const SpatialGrid& grid = system.grid();
    sign_.resize(grid.size());
    std::vector<std::size_t> multi(grid.dim());
    for (std::size_t p = 0; p < grid.size(); ++p) {
      grid.unflat(p, multi);
      std::size_t s = 0;
      for (std::size_t k : multi) s += k;
      sign_[p] = (s & 1u) ? -1.0 : 1.0;
    }
    scale_ = 1.0;
    for (int i = 0; i < grid.dim(); ++i) scale_ /= 2.0 * grid.half_extent(i);
  }

  // Inverse t-transform of |det A|^{1/2} f-hat conj(filter), written to buf.
  void compute(std::size_t c, FftBuffer& buf) const {
    buf.fill_zero();
    const SparseFilter& f = system_.filter(c);
    double w = scale_ * system_.det_sqrt(c);
    for (std::size_t i = 0; i < f.index.size(); ++i) {
      std::uint32_t p = f.index[i];
      buf[p] = (w * f.value[i] * sign_[p]) * spectrum_.values[p];
    }
    inverse_->execute(buf);
  }

 private:
  const ShearletSystem& system_;
  const SampledSignal& spectrum_;
  std::shared_ptr<const FftPlan> inverse_;
  std::vector<double> sign_;
  double scale_ = 1.0;
};

void check_input(const SampledSignal& f, const ShearletSystem& system) {
  if (f.domain != Domain::spatial) throw Error(Errc::domain, "transform input must be a spatial signal");
  if (!f.grid.same_as(system.grid())) throw Error(Errc::grid_mismatch, "signal grid differs from system grid");
  if (f.values.size() != system.grid().size()) throw Error(Errc::grid_mismatch, "signal shape differs from grid");
}

double abs2_sum(std::span<const cplx> v) {
  std::vector<double> terms(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) terms[i] = std::norm(v[i]);
  return pairwise_sum(terms);
}

}  // namespace

void for_each_channel(const SampledSignal& f, const ShearletSystem& system, const ChannelVisitor& visit,
                      const TransformOptions& options) {
  check_input(f, system);
  SampledSignal spectrum = fourier(f, Direction::forward);
  ChannelEngine engine(system, spectrum);
  unsigned threads = std::max(1u, std::min<unsigned>(resolve_threads(options.threads),
                                                     static_cast<unsigned>(system.channel_count())));
  std::vector<FftBuffer> buffers;
  for (unsigned w = 0; w < threads; ++w) buffers.emplace_back(system.grid().size());
  parallel_for(system.channel_count(), threads, [&](std::size_t c, unsigned worker) {
    FftBuffer& buf = buffers[worker];
    engine.compute(c, buf);
    visit(c, std::span<const cplx>(buf.data(), buf.size()), worker);
  });
}

CoefficientField::CoefficientField(std::shared_ptr<const ShearletSystem> system, std::vector<cplx> values)
    : system_(std::move(system)), values_(std::move(values)) {
  if (values_.size() != system_->channel_count() * system_->grid().size())
    throw Error(Errc::grid_mismatch, "coefficient array has the wrong size");
}

std::span<const cplx> CoefficientField::channel(std::size_t c) const {
  std::size_t n = system_->grid().size();
  return std::span<const cplx>(values_).subspan(c * n, n);
}

CoefficientField forward(const SampledSignal& f, std::shared_ptr<const ShearletSystem> system,
                         const TransformOptions& options) {
  std::size_t points = system->grid().size();
  double bytes = static_cast<double>(system->channel_count()) * static_cast<double>(points) * sizeof(cplx);
  if (bytes > static_cast<double>(options.memory_budget))
    throw Error(Errc::memory_budget, "materialized field needs " + std::to_string(bytes / (1 << 20)) +
                                         " MiB; stream channels with for_each_channel instead");
  std::vector<cplx> values(system->channel_count() * points);
  for_each_channel(
      f, *system,
      [&](std::size_t c, std::span<const cplx> coeff, unsigned) {
        std::copy(coeff.begin(), coeff.end(), values.begin() + static_cast<std::ptrdiff_t>(c * points));
      },
      options);
  return CoefficientField(std::move(system), std::move(values));
}

double energy(const CoefficientField& coeffs) {
  const ShearletSystem& sys = coeffs.system();
  double cell = sys.grid().cell_volume();
  std::vector<double> per(coeffs.channel_count());
  for (std::size_t c = 0; c < per.size(); ++c) per[c] = coeffs.haar(c) * cell * abs2_sum(coeffs.channel(c));
  return pairwise_sum(per);
}

DirectOracle::DirectOracle(std::shared_ptr<const ShearletSystem> system, const OracleOptions& options)
    : system_(std::move(system)) {
  int n = system_->dim();
  auto samples = static_cast<std::size_t>(std::llround(2.0 * options.half_extent / options.spacing));
  if (samples % 2) ++samples;
  double total = std::pow(static_cast<double>(samples), n);
  if (total > static_cast<double>(std::size_t{1} << 26))
    throw Error(Errc::memory_budget, "oracle table too large; reduce half_extent or increase spacing");
  double L = 0.5 * static_cast<double>(samples) * options.spacing;
  table_grid_ = SpatialGrid(std::vector<double>(n, L), std::vector<std::size_t>(n, samples));

  GeneratorSpec spec = system_->generator();
  SampledSignal hat{table_grid_, std::vector<cplx>(table_grid_.size()), Domain::frequency, {}};
  std::vector<double> xi(n);
  for (std::size_t p = 0; p < table_grid_.size(); ++p) {
    table_grid_.frequency_point(p, xi);
    hat.values[p] = evaluate_generator_hat(spec, xi);
  }
  psi_ = fourier(hat, Direction::inverse).values;

  // Tail indicator: share of sum |psi| in the outer shell |y|_inf > 0.9 L.
  std::vector<double> x(n);
  double all = 0.0, shell = 0.0;
  for (std::size_t p = 0; p < psi_.size(); ++p) {
    table_grid_.point(p, x);
    double r = 0.0;
    for (double v : x) r = std::max(r, std::abs(v));
    double m = std::abs(psi_[p]);
    all += m;
    if (r > 0.9 * L) shell += m;
  }
  table_tail_ = all > 0.0 ? shell / all : 0.0;
}

cplx DirectOracle::coefficient(const SignalFunction& f, double a, std::span<const double> s,
                               std::span<const double> t) const {
  int n = system_->dim();
  if (static_cast<int>(t.size()) != n || static_cast<int>(s.size()) != n - 1)
    throw Error(Errc::dimension, "oracle point has the wrong dimension");
  GroupMatrix M = msa_matrix(a, s, n);
  const SpatialGrid& sg = system_->grid();
  std::vector<double> period(n), half(n);
  for (int k = 0; k < n; ++k) {
    half[k] = sg.half_extent(k);
    period[k] = 2.0 * half[k];
  }
  std::size_t row = table_grid_.samples(n - 1);
  std::size_t rows = table_grid_.size() / row;
  std::vector<cplx> row_sums(rows);
  std::vector<double> y(n), x(n);
  std::vector<cplx> terms(row);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t q = 0; q < row; ++q) {
      std::size_t p = r * row + q;
      table_grid_.point(p, y);
      for (int i = 0; i < n; ++i) {
        double acc = t[i];
        for (int j = 0; j < n; ++j) acc += M(i, j) * y[j];
        x[i] = acc - period[i] * std::floor((acc + half[i]) / period[i]);
      }
      terms[q] = f(x) * std::conj(psi_[p]);
    }
    row_sums[r] = pairwise_sum(std::span<const cplx>(terms));
  }
  double scale = std::sqrt(abs_det_scaling(a, n)) * table_grid_.cell_volume();
  return scale * pairwise_sum(std::span<const cplx>(row_sums));
}

cplx direct_oracle(const SignalFunction& f, double a, std::span<const double> s, std::span<const double> t,
                   std::shared_ptr<const ShearletSystem> system, const OracleOptions& options) {
  return DirectOracle(std::move(system), options).coefficient(f, a, s, t);
}

MoyalResult moyal(const SampledSignal& f, const SampledSignal& g, const ShearletSystem& system,
                  const TransformOptions& options) {
  check_input(f, system);
  check_input(g, system);
  SampledSignal fh = fourier(f, Direction::forward);
  SampledSignal gh = fourier(g, Direction::forward);
  ChannelEngine ef(system, fh), eg(system, gh);
  std::size_t points = system.grid().size();
  unsigned threads = std::max(1u, std::min<unsigned>(resolve_threads(options.threads),
                                                     static_cast<unsigned>(system.channel_count())));
  std::vector<FftBuffer> bf, bg;
  std::vector<std::vector<cplx>> scratch(threads, std::vector<cplx>(points));
  for (unsigned w = 0; w < threads; ++w) {
    bf.emplace_back(points);
    bg.emplace_back(points);
  }
  std::vector<cplx> per(system.channel_count());
  double cell = system.grid().cell_volume();
  parallel_for(system.channel_count(), threads, [&](std::size_t c, unsigned w) {
    ef.compute(c, bf[w]);
    eg.compute(c, bg[w]);
    for (std::size_t p = 0; p < points; ++p) scratch[w][p] = bf[w][p] * std::conj(bg[w][p]);
    per[c] = system.channels()[c].haar * cell * pairwise_sum(std::span<const cplx>(scratch[w]));
  });
  MoyalResult res;
  res.lhs = pairwise_sum(std::span<const cplx>(per));
  std::vector<cplx> inner(points);
  for (std::size_t p = 0; p < points; ++p) inner[p] = f.values[p] * std::conj(g.values[p]);
  res.rhs = system.c_psi() * cell * pairwise_sum(std::span<const cplx>(inner));
  double scale = system.c_psi() * std::sqrt(norm_sq(f) * norm_sq(g));
  res.relative_error = scale > 0.0 ? std::abs(res.lhs - res.rhs) / scale : std::abs(res.lhs - res.rhs);
  return res;
}

IdentityResult weighted_spectral_identity(const SampledSignal& f, const ShearletSystem& system,
                                          std::span<const double> weights, const TransformOptions& options) {
  check_input(f, system);
  const SpatialGrid& grid = system.grid();
  if (weights.size() != grid.size()) throw Error(Errc::grid_mismatch, "weight field differs from grid");
  auto fwd = cached_plan(grid.sample_counts(), -1);
  double h = grid.cell_volume();
  double dxi = grid.frequency_cell_volume();
  std::vector<double> per(system.channel_count());
  unsigned threads = std::max(1u, std::min<unsigned>(resolve_threads(options.threads),
                                                     static_cast<unsigned>(system.channel_count())));
  std::vector<FftBuffer> buffers;
  std::vector<std::vector<double>> scratch(threads, std::vector<double>(grid.size()));
  for (unsigned w = 0; w < threads; ++w) buffers.emplace_back(grid.size());
  TransformOptions opts = options;
  opts.threads = threads;
  for_each_channel(
      f, system,
      [&](std::size_t c, std::span<const cplx> coeff, unsigned w) {
        FftBuffer& buf = buffers[w];
        std::copy(coeff.begin(), coeff.end(), buf.data());
        fwd->execute(buf);
        // |F_t SH|^2 = h^{2n} |DFT|^2; the grid-offset phase drops out.
        for (std::size_t p = 0; p < grid.size(); ++p) scratch[w][p] = weights[p] * std::norm(buf[p]);
        per[c] = system.channels()[c].haar * h * h * dxi * pairwise_sum(std::span<const double>(scratch[w]));
      },
      opts);
  IdentityResult res;
  res.lhs = pairwise_sum(per);
  SampledSignal spectrum = fourier(f, Direction::forward);
  res.rhs = system.c_psi() * weighted_norm_sq(spectrum, weights);
  double denom = std::abs(res.rhs);
  res.relative_error = denom > 0.0 ? std::abs(res.lhs - res.rhs) / denom : std::abs(res.lhs - res.rhs);
  return res;
}

void write_coefficients(std::ostream& out, const CoefficientField& coeffs) {
  using namespace detail;
  const ShearletSystem& sys = coeffs.system();
  const SpatialGrid& g = sys.grid();
  int n = g.dim();
  put_magic(out, "SHLC");
  put<std::uint16_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  for (int i = 0; i < n; ++i) put<std::uint32_t>(out, static_cast<std::uint32_t>(g.samples(i)));
  for (int i = 0; i < n; ++i) put<double>(out, g.half_extent(i));
  const auto& nodes = sys.channel_set().scale_nodes;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(nodes.size()));
  for (double a : nodes) put<double>(out, a);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(sys.channel_count()));
  for (const Channel& ch : sys.channels()) {
    put<double>(out, ch.a);
    for (double s : ch.s) put<double>(out, s);
    put<double>(out, ch.haar);
  }
  for (const cplx& v : coeffs.values()) {
    put<double>(out, v.real());
    put<double>(out, v.imag());
  }
  if (!out) throw Error(Errc::io, "failed to write coefficient dump");
}

CoefficientDump read_coefficients(std::istream& in) {
  using namespace detail;
  expect_magic(in, "SHLC");
  if (get<std::uint16_t>(in) != 1) throw Error(Errc::io, "unsupported coefficient dump version");
  CoefficientDump d;
  d.n = static_cast<int>(get<std::uint32_t>(in));
  if (d.n < 2 || d.n > 16) throw Error(Errc::io, "implausible dimension in coefficient dump");
  d.samples.resize(d.n);
  d.half_extent.resize(d.n);
  for (auto& s : d.samples) s = get<std::uint32_t>(in);
  for (auto& h : d.half_extent) h = get<double>(in);
  d.scale_nodes.resize(get<std::uint32_t>(in));
  for (double& a : d.scale_nodes) a = get<double>(in);
  d.channels.resize(get<std::uint32_t>(in));
  for (Channel& ch : d.channels) {
    ch.a = get<double>(in);
    ch.s.resize(d.n - 1);
    for (double& s : ch.s) s = get<double>(in);
    ch.haar = get<double>(in);
  }
  std::size_t points = 1;
  for (auto s : d.samples) points *= s;
  d.values.resize(points * d.channels.size());
  for (cplx& v : d.values) {
    double re = get<double>(in);
    double im = get<double>(in);
    v = {re, im};
  }
  return d;
}

}  // namespace shearlet
