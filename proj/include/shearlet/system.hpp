#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "shearlet/grid.hpp"
#include "shearlet/numeric.hpp"

namespace shearlet {

enum class GeneratorKind { classical, gaussian_derivative };

// Classical kind: psi-hat(xi) = amplitude w(xi_1) prod_k v(xi_k / xi_1) with
//   w(r) = bump((ln|r| - ln r0) / ln(r1/r0)),  v(u) = bump((u/beta + 1)/2),
//   bump(x) = exp(sharpness (4 - 1/(x(1-x)))) on (0,1).
// Gaussian-derivative kind: amplitude (|xi_1|/r0)^order exp(order (1 - (xi_1/r0)^2) / 2)
//   prod_k exp(-(xi_k/xi_1)^2 / (2 beta^2)), peak one at |xi_1| = r0. It is not
// compactly supported; support boxes use the region where it exceeds 1e-16.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::classical;
  double r0 = 0.5;
  double r1 = 1.0;
  double radial_sharpness = 1.0;
  double beta = 1.0;
  double angular_sharpness = 1.0;
  int order = 2;
  double amplitude = 1.0;

  void validate(int n) const;
  double radial(double xi1) const;
  double angular(double u) const;
  // Largest |xi_1| and |xi_k/xi_1| where the generator is nonzero.
  double band_outer() const;
  double band_inner() const;
  double angular_extent() const;
};

double evaluate_generator_hat(const GeneratorSpec& spec, std::span<const double> xi);
std::vector<double> evaluate_generator_hat(const GeneratorSpec& spec, std::span<const double> points, int n);

double smooth_bump(double x, double sharpness);

enum class SignMode { positive, mirrored };

struct ChannelSpec {
  double a_min = 0.25;
  double a_max = 1.0;
  int scales = 12;
  double shear_limit = 1.5;
  int shears = 13;
  SignMode sign_mode = SignMode::positive;

  void validate() const;
};

struct Channel {
  double a = 1.0;
  std::vector<double> s;
  int scale_index = 0;
  std::vector<int> shear_index;
  double haar = 0.0;  // da ds / |a|^{n+1}
  double scale_weight = 0.0;
  double shear_weight = 0.0;
};

struct ChannelSet {
  std::vector<double> scale_nodes;
  std::vector<double> scale_weights;
  std::vector<double> shear_nodes;
  std::vector<double> shear_weights;
  std::vector<Channel> channels;
};

ChannelSet make_channels(const ChannelSpec& spec, int n);

// Nonzero filter samples of one channel on the frequency lattice.
struct SparseFilter {
  std::vector<std::uint32_t> index;
  std::vector<double> value;
};

struct AdmissibilityResult {
  double c_psi = 0.0;
  std::vector<double> probes;  // flattened, n per probe
  std::vector<double> field;
  double coefficient_of_variation = 0.0;
  std::size_t excluded = 0;
  std::string truncation_note;
};

struct BuildOptions {
  unsigned threads = 1;
  // Probe frequencies (flattened, n each). Empty selects the default set.
  std::vector<double> probes;
};

class ShearletSystem {
 public:
  const GeneratorSpec& generator() const { return generator_; }
  const ChannelSpec& channel_spec() const { return channel_spec_; }
  const ChannelSet& channel_set() const { return channels_; }
  const std::vector<Channel>& channels() const { return channels_.channels; }
  std::size_t channel_count() const { return channels_.channels.size(); }
  const SpatialGrid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  const SparseFilter& filter(std::size_t c) const { return filters_[c]; }
  std::vector<double> dense_filter(std::size_t c) const;
  const AdmissibilityResult& admissibility() const { return admissibility_; }
  double c_psi() const { return admissibility_.c_psi; }
  // Discrete frame function sum_c haar_c |det A_c| |filter_c(xi)|^2 on the lattice.
  const std::vector<double>& frame_function() const { return frame_; }
  // sqrt |det A_a| for channel c.
  double det_sqrt(std::size_t c) const;

 private:
  friend ShearletSystem build_system(const GeneratorSpec&, const SpatialGrid&, const ChannelSpec&, const BuildOptions&);
  friend ShearletSystem normalize_system(const ShearletSystem&);
  friend AdmissibilityResult admissibility(const ShearletSystem&, std::span<const double>);

  GeneratorSpec generator_;
  ChannelSpec channel_spec_;
  ChannelSet channels_;
  SpatialGrid grid_;
  std::vector<SparseFilter> filters_;
  std::vector<double> frame_;
  AdmissibilityResult admissibility_;
};

ShearletSystem build_system(const GeneratorSpec& spec, const SpatialGrid& grid, const ChannelSpec& channels,
                            const BuildOptions& options = {});

// Closed-form bounding box of channel c's support: |xi_i| <= bound[i].
std::vector<double> channel_support_box(const GeneratorSpec& spec, double a, std::span<const double> s);

// C(xi) = sum_c |psi-hat(M_c^T xi)|^2 da ds / |a|^{(n^2-n+1)/n} at each probe.
// Probes outside the covered cone are excluded and counted.
AdmissibilityResult admissibility(const ShearletSystem& system, std::span<const double> probes);

// Deterministic probe set inside the covered cone (both signs of xi_1).
std::vector<double> default_probes(const GeneratorSpec& spec, const ChannelSpec& channels, int n);
bool in_covered_cone(const GeneratorSpec& spec, const ChannelSpec& channels, std::span<const double> xi);

ShearletSystem normalize_system(const ShearletSystem& system);

std::string system_manifest(const ShearletSystem& system);

}  // namespace shearlet
