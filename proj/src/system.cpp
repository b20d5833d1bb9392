#include "shearlet/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "shearlet/error.hpp"
#include "shearlet/group.hpp"

namespace shearlet {

namespace {

constexpr double kEffectiveFloor = 1e-16;

double gaussian_radial(double r, double r0, int order) {
  double q = r / r0;
  return std::pow(q, order) * std::exp(0.5 * order * (1.0 - q * q));
}

// Root of gaussian_radial(r) = floor on the side of r0 selected by upper.
double gaussian_band_edge(double r0, int order, bool upper) {
  if (!upper && order == 0) return 0.0;
  double lo = upper ? r0 : 0.0;
  double hi = upper ? r0 * 64.0 : r0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    bool above = gaussian_radial(mid, r0, order) > kEffectiveFloor;
    if (above == upper)
      lo = mid;
    else
      hi = mid;
  }
  return upper ? hi : lo;
}

}  // namespace

double smooth_bump(double x, double sharpness) {
  if (!(x > 0.0 && x < 1.0)) return 0.0;
  return std::exp(sharpness * (4.0 - 1.0 / (x * (1.0 - x))));
}

void GeneratorSpec::validate(int n) const {
  if (n < 2) throw Error(Errc::dimension, "dimension must be at least 2");
  if (!(r0 > 0.0)) throw Error(Errc::domain, "radial band start must be positive");
  if (kind == GeneratorKind::classical && !(r1 > r0)) throw Error(Errc::domain, "radial band must satisfy r0 < r1");
  if (!(beta > 0.0)) throw Error(Errc::domain, "angular half-width must be positive");
  if (!(radial_sharpness > 0.0) || !(angular_sharpness > 0.0)) throw Error(Errc::domain, "sharpness must be positive");
  if (order < 0) throw Error(Errc::domain, "derivative order must be nonnegative");
  if (!std::isfinite(amplitude)) throw Error(Errc::domain, "amplitude must be finite");
}

double GeneratorSpec::radial(double xi1) const {
  double r = std::abs(xi1);
  if (r == 0.0) return 0.0;
  if (kind == GeneratorKind::gaussian_derivative) return gaussian_radial(r, r0, order);
  if (r <= r0 || r >= r1) return 0.0;
  return smooth_bump((std::log(r) - std::log(r0)) / std::log(r1 / r0), radial_sharpness);
}

double GeneratorSpec::angular(double u) const {
  if (kind == GeneratorKind::gaussian_derivative) return std::exp(-0.5 * u * u / (beta * beta));
  return smooth_bump(0.5 * (u / beta + 1.0), angular_sharpness);
}

double GeneratorSpec::band_outer() const {
  return kind == GeneratorKind::classical ? r1 : gaussian_band_edge(r0, order, true);
}

double GeneratorSpec::band_inner() const {
  return kind == GeneratorKind::classical ? r0 : gaussian_band_edge(r0, order, false);
}

double GeneratorSpec::angular_extent() const {
  return kind == GeneratorKind::classical ? beta : beta * std::sqrt(-2.0 * std::log(kEffectiveFloor));
}

double evaluate_generator_hat(const GeneratorSpec& spec, std::span<const double> xi) {
  double x1 = xi[0];
  if (x1 == 0.0 || spec.amplitude == 0.0) return 0.0;
  double value = spec.radial(x1);
  for (std::size_t k = 1; k < xi.size() && value != 0.0; ++k) value *= spec.angular(xi[k] / x1);
  return spec.amplitude * value;
}

std::vector<double> evaluate_generator_hat(const GeneratorSpec& spec, std::span<const double> points, int n) {
  if (n < 2 || points.size() % n != 0) throw Error(Errc::dimension, "points must hold n coordinates each");
  std::vector<double> out(points.size() / n);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = evaluate_generator_hat(spec, points.subspan(i * n, n));
  return out;
}

void ChannelSpec::validate() const {
  if (!(a_min > 0.0) || !(a_max >= a_min)) throw Error(Errc::invalid_scale, "scale range must satisfy 0 < a_min <= a_max");
  if (scales < 2) throw Error(Errc::empty_channels, "need at least two scale nodes");
  if (shears < 3 || shears % 2 == 0) throw Error(Errc::empty_channels, "shear count must be odd and at least 3");
  if (!(shear_limit > 0.0)) throw Error(Errc::domain, "shear limit must be positive");
}

ChannelSet make_channels(const ChannelSpec& spec, int n) {
  spec.validate();
  if (n < 2) throw Error(Errc::dimension, "dimension must be at least 2");
  ChannelSet set;
  int J = spec.scales;
  double dl = std::log(spec.a_max / spec.a_min) / (J - 1);
  for (int j = 0; j < J; ++j) {
    double a = j == J - 1 ? spec.a_max : spec.a_min * std::exp(dl * j);
    double w = a * dl * ((j == 0 || j == J - 1) ? 0.5 : 1.0);
    set.scale_nodes.push_back(a);
    set.scale_weights.push_back(w);
  }
  int K = spec.shears;
  double ds = 2.0 * spec.shear_limit / (K - 1);
  for (int k = 0; k < K; ++k) {
    int c = k - (K - 1) / 2;  // symmetric about zero, s = 0 exact
    set.shear_nodes.push_back(c * ds);
    set.shear_weights.push_back(ds * ((k == 0 || k == K - 1) ? 0.5 : 1.0));
  }
  std::size_t per_scale = 1;
  for (int d = 0; d < n - 1; ++d) per_scale *= static_cast<std::size_t>(K);
  int signs = spec.sign_mode == SignMode::mirrored ? 2 : 1;
  for (int sign = 0; sign < signs; ++sign)
    for (int j = 0; j < J; ++j)
      for (std::size_t m = 0; m < per_scale; ++m) {
        Channel ch;
        ch.a = sign == 0 ? set.scale_nodes[j] : -set.scale_nodes[j];
        ch.scale_index = j;
        ch.scale_weight = set.scale_weights[j];
        ch.shear_weight = 1.0;
        std::size_t rem = m;
        ch.shear_index.assign(n - 1, 0);
        ch.s.assign(n - 1, 0.0);
        for (int d = n - 2; d >= 0; --d) {
          int k = static_cast<int>(rem % K);
          rem /= K;
          ch.shear_index[d] = k;
          ch.s[d] = set.shear_nodes[k];
          ch.shear_weight *= set.shear_weights[k];
        }
        ch.haar = ch.scale_weight * ch.shear_weight * haar_weight(ch.a, n);
        set.channels.push_back(std::move(ch));
      }
  return set;
}

std::vector<double> channel_support_box(const GeneratorSpec& spec, double a, std::span<const double> s) {
  std::size_t n = s.size() + 1;
  double outer = spec.band_outer() / std::abs(a);
  double spread = spec.angular_extent() * std::pow(std::abs(a), 1.0 - 1.0 / static_cast<double>(n));
  std::vector<double> box(n);
  box[0] = outer;
  for (std::size_t k = 1; k < n; ++k) box[k] = outer * (std::abs(s[k - 1]) + spread);
  return box;
}

namespace {

// M^T xi for M = S_s A_a: (a xi_1, d (s_k xi_1 + xi_k)).
void warp(double a, double d, std::span<const double> s, std::span<const double> xi, std::span<double> out) {
  out[0] = a * xi[0];
  for (std::size_t k = 1; k < xi.size(); ++k) out[k] = d * (s[k - 1] * xi[0] + xi[k]);
}

SparseFilter build_filter(const GeneratorSpec& spec, const SpatialGrid& grid, const Channel& ch) {
  int n = grid.dim();
  double d = std::copysign(std::pow(std::abs(ch.a), 1.0 / n), ch.a);
  double inner = spec.band_inner() / std::abs(ch.a);
  double outer = spec.band_outer() / std::abs(ch.a);
  double spread = spec.angular_extent() * std::pow(std::abs(ch.a), 1.0 - 1.0 / n);

  SparseFilter f;
  std::vector<double> xi(n), warped(n);
  std::vector<std::int64_t> lo(n), hi(n), m(n);
  std::vector<std::size_t> multi(n);
  double d1 = grid.frequency_spacing(0);
  auto h0 = static_cast<std::int64_t>(grid.samples(0) / 2);
  std::int64_t m1_max = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(outer / d1)), h0 - 1);
  std::int64_t m1_min = std::max<std::int64_t>(static_cast<std::int64_t>(std::ceil(inner / d1)), 1);
  for (std::int64_t sgn : {-1, 1}) {
    for (std::int64_t a1 = m1_min; a1 <= m1_max; ++a1) {
      m[0] = sgn * a1;
      xi[0] = static_cast<double>(m[0]) * d1;
      for (int k = 1; k < n; ++k) {
        double dk = grid.frequency_spacing(k);
        double e1 = xi[0] * (-spread - ch.s[k - 1]);
        double e2 = xi[0] * (spread - ch.s[k - 1]);
        auto hk = static_cast<std::int64_t>(grid.samples(k) / 2);
        lo[k] = std::max<std::int64_t>(static_cast<std::int64_t>(std::ceil(std::min(e1, e2) / dk)), -hk);
        hi[k] = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(std::max(e1, e2) / dk)), hk - 1);
        m[k] = lo[k];
      }
      if (n > 1) {
        bool empty = false;
        for (int k = 1; k < n; ++k) empty = empty || lo[k] > hi[k];
        if (empty) continue;
      }
      while (true) {
        for (int k = 1; k < n; ++k) xi[k] = static_cast<double>(m[k]) * grid.frequency_spacing(k);
        warp(ch.a, d, ch.s, xi, warped);
        double v = evaluate_generator_hat(spec, warped);
        if (v != 0.0) {
          for (int k = 0; k < n; ++k) multi[k] = grid.storage_index(k, m[k]);
          f.index.push_back(static_cast<std::uint32_t>(grid.flat(multi)));
          f.value.push_back(v);
        }
        int k = n - 1;
        while (k >= 1 && ++m[k] > hi[k]) {
          m[k] = lo[k];
          --k;
        }
        if (k < 1) break;
      }
    }
  }
  // Storage order keeps scatter and reductions independent of loop layout.
  std::vector<std::size_t> order(f.index.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return f.index[x] < f.index[y]; });
  SparseFilter sorted;
  sorted.index.reserve(order.size());
  sorted.value.reserve(order.size());
  for (std::size_t i : order) {
    sorted.index.push_back(f.index[i]);
    sorted.value.push_back(f.value[i]);
  }
  return sorted;
}

std::string truncation_note(const ChannelSpec& c, int n) {
  std::ostringstream os;
  os << "a in [" << c.a_min << ", " << c.a_max << "] (" << c.scales << " nodes"
     << (c.sign_mode == SignMode::mirrored ? ", mirrored" : "") << "), s in [-" << c.shear_limit << ", "
     << c.shear_limit << "]^" << (n - 1) << " (" << c.shears << " nodes per axis)";
  return os.str();
}

}  // namespace

bool in_covered_cone(const GeneratorSpec& spec, const ChannelSpec& channels, std::span<const double> xi) {
  int n = static_cast<int>(xi.size());
  double r = std::abs(xi[0]);
  if (r == 0.0) return false;
  double lo = spec.band_outer() / channels.a_max;
  double hi = spec.band_inner() / channels.a_min;
  if (r < lo || r > hi) return false;
  double limit = channels.shear_limit - spec.angular_extent() * std::pow(channels.a_max, 1.0 - 1.0 / n);
  for (int k = 1; k < n; ++k)
    if (std::abs(xi[k] / xi[0]) > limit) return false;
  return true;
}

std::vector<double> default_probes(const GeneratorSpec& spec, const ChannelSpec& channels, int n) {
  double lo = spec.band_outer() / channels.a_max;
  double hi = spec.band_inner() / channels.a_min;
  double limit = channels.shear_limit - spec.angular_extent() * std::pow(channels.a_max, 1.0 - 1.0 / n);
  std::vector<double> probes;
  if (!(hi > lo) || !(limit > 0.0)) return probes;
  int radii = n == 2 ? 8 : 4;
  int angles = n == 2 ? 5 : 3;
  double llo = std::log(lo), lhi = std::log(hi);
  double margin = 0.1 * (lhi - llo);
  std::size_t per_axis = 1;
  for (int k = 1; k < n; ++k) per_axis *= static_cast<std::size_t>(angles);
  for (int sign : {1, -1})
    for (int i = 0; i < radii; ++i) {
      double r = std::exp(llo + margin + (lhi - llo - 2.0 * margin) * i / (radii - 1));
      for (std::size_t m = 0; m < per_axis; ++m) {
        probes.push_back(sign * r);
        std::size_t rem = m;
        for (int k = 1; k < n; ++k) {
          int q = static_cast<int>(rem % angles);
          rem /= angles;
          double u = 0.8 * limit * (-1.0 + 2.0 * q / (angles - 1));
          probes.push_back(sign * r * u);
        }
      }
    }
  return probes;
}

AdmissibilityResult admissibility(const ShearletSystem& system, std::span<const double> probes) {
  int n = system.dim();
  if (probes.size() % n != 0) throw Error(Errc::dimension, "probes must hold n coordinates each");
  const GeneratorSpec& spec = system.generator();
  AdmissibilityResult res;
  res.truncation_note = truncation_note(system.channel_spec(), n);
  std::vector<double> warped(n);
  for (std::size_t p = 0; p < probes.size() / n; ++p) {
    auto xi = probes.subspan(p * n, n);
    if (!in_covered_cone(spec, system.channel_spec(), xi)) {
      ++res.excluded;
      continue;
    }
    std::vector<double> terms;
    terms.reserve(system.channel_count());
    for (const Channel& ch : system.channels()) {
      double d = std::copysign(std::pow(std::abs(ch.a), 1.0 / n), ch.a);
      warp(ch.a, d, ch.s, xi, warped);
      double v = evaluate_generator_hat(spec, warped);
      terms.push_back(v * v * ch.haar * abs_det_scaling(ch.a, n));
    }
    res.probes.insert(res.probes.end(), xi.begin(), xi.end());
    res.field.push_back(pairwise_sum(terms));
  }
  if (res.excluded > 0)
    res.truncation_note += "; " + std::to_string(res.excluded) + " probe(s) outside the covered cone excluded";
  if (res.field.empty()) {
    res.truncation_note += "; no probe inside the covered cone";
    return res;
  }
  res.c_psi = pairwise_sum(res.field) / static_cast<double>(res.field.size());
  if (res.c_psi > 0.0) {
    std::vector<double> dev(res.field.size());
    for (std::size_t i = 0; i < dev.size(); ++i) dev[i] = (res.field[i] - res.c_psi) * (res.field[i] - res.c_psi);
    res.coefficient_of_variation = std::sqrt(pairwise_sum(dev) / static_cast<double>(dev.size())) / res.c_psi;
  }
  return res;
}

ShearletSystem build_system(const GeneratorSpec& spec, const SpatialGrid& grid, const ChannelSpec& channels,
                            const BuildOptions& options) {
  int n = grid.dim();
  spec.validate(n);
  ShearletSystem sys;
  sys.generator_ = spec;
  sys.channel_spec_ = channels;
  sys.channels_ = make_channels(channels, n);
  sys.grid_ = grid;

  std::vector<std::string> offending;
  for (std::size_t c = 0; c < sys.channels_.channels.size(); ++c) {
    const Channel& ch = sys.channels_.channels[c];
    std::vector<double> box = channel_support_box(spec, ch.a, ch.s);
    for (int k = 0; k < n; ++k)
      if (box[k] > grid.nyquist(k) * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "#" << c << " (a=" << ch.a << ", |xi_" << (k + 1) << "| up to " << box[k] << " > " << grid.nyquist(k)
           << ")";
        offending.push_back(os.str());
        break;
      }
  }
  if (!offending.empty()) {
    std::ostringstream os;
    os << offending.size() << " channel(s) exceed the Nyquist box:";
    for (std::size_t i = 0; i < offending.size() && i < 8; ++i) os << ' ' << offending[i];
    if (offending.size() > 8) os << " ...";
    throw Error(Errc::aliasing, os.str());
  }

  sys.filters_.resize(sys.channels_.channels.size());
  parallel_for(sys.filters_.size(), options.threads, [&](std::size_t c, unsigned) {
    sys.filters_[c] = build_filter(spec, grid, sys.channels_.channels[c]);
  });

  sys.frame_.assign(grid.size(), 0.0);
  for (std::size_t c = 0; c < sys.filters_.size(); ++c) {
    const Channel& ch = sys.channels_.channels[c];
    double w = ch.haar * abs_det_scaling(ch.a, n);
    const SparseFilter& f = sys.filters_[c];
    for (std::size_t i = 0; i < f.index.size(); ++i) sys.frame_[f.index[i]] += w * f.value[i] * f.value[i];
  }

  std::vector<double> probes = options.probes.empty() ? default_probes(spec, channels, n) : options.probes;
  sys.admissibility_ = admissibility(sys, probes);
  return sys;
}

std::vector<double> ShearletSystem::dense_filter(std::size_t c) const {
  std::vector<double> out(grid_.size(), 0.0);
  const SparseFilter& f = filters_.at(c);
  for (std::size_t i = 0; i < f.index.size(); ++i) out[f.index[i]] = f.value[i];
  return out;
}

double ShearletSystem::det_sqrt(std::size_t c) const { return std::sqrt(abs_det_scaling(channels()[c].a, dim())); }

ShearletSystem normalize_system(const ShearletSystem& system) {
  double c = system.c_psi();
  if (!(c > 0.0)) throw Error(Errc::precondition, "cannot normalize a system with c_psi = 0");
  double factor = 1.0 / std::sqrt(c);
  ShearletSystem out = system;
  out.generator_.amplitude *= factor;
  for (SparseFilter& f : out.filters_)
    for (double& v : f.value) v *= factor;
  for (double& v : out.frame_) v /= c;
  out.admissibility_ = admissibility(out, system.admissibility().probes);
  return out;
}

std::string system_manifest(const ShearletSystem& system) {
  const GeneratorSpec& g = system.generator();
  const ChannelSpec& cs = system.channel_spec();
  nlohmann::ordered_json j;
  j["generator"] = {{"kind", g.kind == GeneratorKind::classical ? "classical" : "gaussian-derivative"},
                    {"radial_band", {g.r0, g.r1}},
                    {"radial_sharpness", g.radial_sharpness},
                    {"angular_half_width", g.beta},
                    {"angular_sharpness", g.angular_sharpness},
                    {"order", g.order},
                    {"amplitude", g.amplitude}};
  const SpatialGrid& grid = system.grid();
  j["grid"] = {{"half_extent", grid.half_extents()}, {"samples", grid.sample_counts()}};
  j["channels"] = {{"scale_range", {cs.a_min, cs.a_max}},
                   {"scales", cs.scales},
                   {"shear_limit", cs.shear_limit},
                   {"shears", cs.shears},
                   {"sign_mode", cs.sign_mode == SignMode::mirrored ? "mirrored" : "positive"},
                   {"scale_nodes", system.channel_set().scale_nodes},
                   {"scale_weights", system.channel_set().scale_weights},
                   {"shear_nodes", system.channel_set().shear_nodes},
                   {"shear_weights", system.channel_set().shear_weights}};
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const Channel& ch : system.channels()) list.push_back({{"a", ch.a}, {"s", ch.s}, {"haar", ch.haar}});
  j["channel_table"] = list;
  const AdmissibilityResult& adm = system.admissibility();
  j["admissibility"] = {{"c_psi", adm.c_psi},
                        {"coefficient_of_variation", adm.coefficient_of_variation},
                        {"probes", adm.field.size()},
                        {"excluded", adm.excluded},
                        {"truncation", adm.truncation_note}};
  return j.dump(2) + "\n";
}

}  // namespace shearlet
