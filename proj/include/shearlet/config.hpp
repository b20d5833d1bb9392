#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "shearlet/grid.hpp"
#include "shearlet/system.hpp"
#include "shearlet/verify.hpp"

namespace shearlet {

struct SignalConfig {
  std::string name;
  GaussianSignal gaussian;
};

struct NazarovPair {
  RegionSpec e1;
  RegionSpec e2;
};

struct VerifierConfig {
  std::vector<double> pitt_lambdas{0.0, 0.25, 0.5, 0.75};
  std::vector<RegionSpec> nazarov_regions;
  std::vector<NazarovPair> nazarov_pairs;
  std::vector<RegionSpec> local_regions;
  std::vector<double> local_alphas{0.25, 0.5, 0.75};
};

struct LadderRung {
  std::size_t samples = 256;
  int scales = 12;
  int shears = 13;
};

struct RunConfig {
  int dimension = 2;
  double half_extent = 8.0;
  std::size_t samples = 256;
  GeneratorSpec generator;
  ChannelSpec channels;
  bool normalize = true;
  std::vector<SignalConfig> signals;
  VerifierConfig verifiers;
  Tolerances tolerances;
  std::vector<LadderRung> ladder;
  std::optional<SignalConfig> ladder_signal;
  int oracle_samples = 10;
  bool dump = false;
  std::uint64_t seed = 1;
};

// Parses JSON text; errors carry "line L, column C" or the offending key path.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
nlohmann::ordered_json config_to_json(const RunConfig& config);
// FNV-1a of the canonical JSON echo, as 16 hex digits.
std::string config_hash(const RunConfig& config);

// Isotropic and anisotropic Gaussians exp(-pi sum (x_i/sigma_i)^2) modulated by nu,
// sigma_1 = w sqrt(rho), sigma_2 = w / sqrt(rho).
std::vector<SignalConfig> gaussian_family(const std::vector<double>& widths, const std::vector<double>& anisotropies,
                                          const std::vector<double>& modulation);
// f(x/c) for each factor: widths scale by c, modulation by 1/c.
std::vector<SignalConfig> dilation_family(const SignalConfig& base, const std::vector<double>& factors);

RunConfig default_config();

}  // namespace shearlet
