#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shearlet/numeric.hpp"

namespace shearlet {

// Uniform periodic grid on [-L_i, L_i) with N_i samples per axis. Arrays on the
// grid are row-major with axis 0 slowest. The dual lattice is xi_m = m/(2L),
// m in [-N/2, N/2), stored in unshifted DFT order.
class SpatialGrid {
 public:
  SpatialGrid() = default;
  SpatialGrid(std::vector<double> half_extent, std::vector<std::size_t> samples);

  int dim() const { return static_cast<int>(half_extent_.size()); }
  double half_extent(int axis) const { return half_extent_[axis]; }
  std::size_t samples(int axis) const { return samples_[axis]; }
  const std::vector<double>& half_extents() const { return half_extent_; }
  const std::vector<std::size_t>& sample_counts() const { return samples_; }
  std::size_t size() const { return size_; }

  double spacing(int axis) const { return 2.0 * half_extent_[axis] / static_cast<double>(samples_[axis]); }
  double frequency_spacing(int axis) const { return 0.5 / half_extent_[axis]; }
  double nyquist(int axis) const { return static_cast<double>(samples_[axis]) * frequency_spacing(axis) / 2.0; }
  double cell_volume() const;
  double frequency_cell_volume() const;

  double coordinate(int axis, std::size_t k) const { return -half_extent_[axis] + static_cast<double>(k) * spacing(axis); }
  // Signed DFT index for storage index k.
  std::int64_t signed_index(int axis, std::size_t k) const;
  double frequency(int axis, std::size_t k) const { return static_cast<double>(signed_index(axis, k)) * frequency_spacing(axis); }
  // Storage index of signed frequency index m (m in [-N/2, N/2)).
  std::size_t storage_index(int axis, std::int64_t m) const;

  std::size_t flat(std::span<const std::size_t> multi) const;
  void unflat(std::size_t flat_index, std::span<std::size_t> multi) const;
  void point(std::size_t flat_index, std::span<double> x) const;
  void frequency_point(std::size_t flat_index, std::span<double> xi) const;
  // Flat index of the sample x = 0 (spatial) and of xi = 0 (frequency).
  std::size_t spatial_origin_index() const;
  std::size_t frequency_origin_index() const { return 0; }

  bool same_as(const SpatialGrid& other) const;

 private:
  std::vector<double> half_extent_;
  std::vector<std::size_t> samples_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

SpatialGrid make_grid(int n, double half_extent, std::size_t samples);

enum class Domain { spatial, frequency };

struct SampledSignal {
  SpatialGrid grid;
  std::vector<cplx> values;
  Domain domain = Domain::spatial;
  std::vector<std::string> notes;
};

enum class Direction { forward, inverse };

SampledSignal fourier(const SampledSignal& signal, Direction direction);

// exp(-pi sum ((x_i - c_i)/sigma_i)^2) prod (x_i - c_i)^{k_i} e^{2 pi i x.nu}, times an amplitude.
struct GaussianSignal {
  std::vector<double> center;
  std::vector<double> sigma;
  std::vector<double> modulation;
  std::vector<int> hermite;  // polynomial order per axis; empty means all zero
  double amplitude = 1.0;

  int dim() const { return static_cast<int>(center.size()); }
  cplx operator()(std::span<const double> x) const;
  // Fraction of |f|^2 outside [-L, L)^n, from the closed-form marginals.
  double tail_mass(const SpatialGrid& grid) const;
  // Fraction of |f-hat|^2 outside the lattice band [-nyq, nyq)^n.
  double spectral_tail_mass(const SpatialGrid& grid) const;
};

struct GaussianOptions {
  bool normalize = true;
  double tail_tolerance = 1e-12;
};

// Samples g on the grid. With normalize, g.amplitude is rescaled so that the
// discrete L2 norm is one; the adjusted callable is written back through g.
SampledSignal gaussian_signal(const SpatialGrid& grid, GaussianSignal& g, const GaussianOptions& options = {});
SampledSignal gaussian_signal(const SpatialGrid& grid, std::vector<double> center, std::vector<double> sigma,
                              std::vector<double> modulation, const GaussianOptions& options = {});

SampledSignal sample(const SpatialGrid& grid, const std::function<cplx(std::span<const double>)>& f);

enum class WeightKind {
  spatial_power,          // |t|^p
  spatial_log,            // ln|t|
  spatial_log_sobolev,    // ln((1 + |t|^2)/2)
  frequency_inverse_power,// |xi|^{-p}
  frequency_log,          // ln|xi|
  frequency_power,        // |xi|^p
};

bool is_frequency_kind(WeightKind kind);
std::string weight_kind_name(WeightKind kind);

// Pointwise weights in storage order of the matching domain. Where the weight
// is singular at the origin (negative powers, logarithms) the origin sample
// carries the exact mean of the weight over its cell.
std::vector<double> weight_field(const SpatialGrid& grid, WeightKind kind, double exponent = 0.0);

// Mean of |x|^p over the cube prod [-d_i, d_i] (p > -n), and of ln|x|.
double cell_mean_power(std::span<const double> half_widths, double p);
double cell_mean_log(std::span<const double> half_widths);

enum class RegionKind { empty, ball, box };

struct RegionSpec {
  RegionKind kind = RegionKind::empty;
  std::vector<double> center;
  std::vector<double> extent;  // radius (one entry) for balls, half-widths for boxes

  double measure(int n) const;
  bool contains(std::span<const double> x) const;
  std::string describe() const;
};

struct RegionMask {
  std::vector<double> values;  // 0 or 1
  double measure = 0.0;        // closed-form measure of the region itself
  bool complement = false;
  std::vector<std::string> notes;
};

RegionMask region_mask(const SpatialGrid& grid, const RegionSpec& region, bool complement,
                       Domain domain = Domain::spatial);

// h^n sum w |f|^2 (spatial) or (2L)^{-n} sum w |f-hat|^2 (frequency).
double weighted_norm_sq(const SampledSignal& signal, std::span<const double> weights);
double norm_sq(const SampledSignal& signal);

struct GradientNorm {
  double value = 0.0;     // integral of |xi|^2 |f-hat|^2
  double calculus = 0.0;  // (2 pi)^2 value, i.e. the integral of |grad f|^2
};

GradientNorm spectral_gradient_norm_sq(const SampledSignal& signal);

void write_signal(std::ostream& out, const SampledSignal& signal);
SampledSignal read_signal(std::istream& in);

}  // namespace shearlet
