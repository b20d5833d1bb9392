#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "shearlet/fft.hpp"
#include "shearlet/grid.hpp"
#include "shearlet/system.hpp"

namespace shearlet {

struct TransformOptions {
  unsigned threads = 1;
  std::size_t memory_budget = std::size_t{2} << 30;  // bytes, for materialized fields
};

// Called once per channel, in parallel; coefficients are on the system grid.
using ChannelVisitor = std::function<void(std::size_t channel, std::span<const cplx> coefficients, unsigned worker)>;

// Streams SH f over all channels without holding the whole field.
void for_each_channel(const SampledSignal& f, const ShearletSystem& system, const ChannelVisitor& visit,
                      const TransformOptions& options = {});

class CoefficientField {
 public:
  CoefficientField(std::shared_ptr<const ShearletSystem> system, std::vector<cplx> values);

  const ShearletSystem& system() const { return *system_; }
  std::shared_ptr<const ShearletSystem> system_ptr() const { return system_; }
  std::size_t channel_count() const { return system_->channel_count(); }
  std::size_t points() const { return system_->grid().size(); }
  std::span<const cplx> channel(std::size_t c) const;
  double haar(std::size_t c) const { return system_->channels()[c].haar; }
  const std::vector<cplx>& values() const { return values_; }

 private:
  std::shared_ptr<const ShearletSystem> system_;
  std::vector<cplx> values_;
};

CoefficientField forward(const SampledSignal& f, std::shared_ptr<const ShearletSystem> system,
                         const TransformOptions& options = {});

// Haar-weighted energy sum_c haar_c h^n sum_t |SH|^2.
double energy(const CoefficientField& coeffs);

using SignalFunction = std::function<cplx(std::span<const double>)>;

struct OracleOptions {
  double half_extent = 160.0;
  double spacing = 0.125;
};

// Evaluates <f^per, psi_{a,s,t}> by quadrature in the variable y = M^{-1}(x - t):
//   |det M|^{1/2} h_y^n sum_y f^per(M y + t) conj psi(y),
// with psi tabulated once by an inverse FFT of the unwarped generator. f is
// an analytic callable that must vanish outside the system's grid box; it is
// evaluated at points wrapped into that box.
class DirectOracle {
 public:
  DirectOracle(std::shared_ptr<const ShearletSystem> system, const OracleOptions& options = {});

  cplx coefficient(const SignalFunction& f, double a, std::span<const double> s, std::span<const double> t) const;
  // Fraction of sum |psi| carried by the outer 10% shell of the table.
  double table_tail() const { return table_tail_; }
  const SpatialGrid& table_grid() const { return table_grid_; }

 private:
  std::shared_ptr<const ShearletSystem> system_;
  SpatialGrid table_grid_;
  std::vector<cplx> psi_;
  double table_tail_ = 0.0;
};

cplx direct_oracle(const SignalFunction& f, double a, std::span<const double> s, std::span<const double> t,
                   std::shared_ptr<const ShearletSystem> system, const OracleOptions& options = {});

struct MoyalResult {
  cplx lhs;
  cplx rhs;
  double relative_error = 0.0;  // |lhs - rhs| / (c_psi ||f|| ||g||)
};

MoyalResult moyal(const SampledSignal& f, const SampledSignal& g, const ShearletSystem& system,
                  const TransformOptions& options = {});

struct IdentityResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_error = 0.0;
};

// lhs = sum_c haar_c int w |F_t SH_c|^2 using the t-spectra of the streamed
// coefficients; rhs = c_psi int w |f-hat|^2. weights are on the lattice.
IdentityResult weighted_spectral_identity(const SampledSignal& f, const ShearletSystem& system,
                                          std::span<const double> weights, const TransformOptions& options = {});

void write_coefficients(std::ostream& out, const CoefficientField& coeffs);
struct CoefficientDump {
  int n = 0;
  std::vector<std::size_t> samples;
  std::vector<double> half_extent;
  std::vector<double> scale_nodes;
  std::vector<Channel> channels;
  std::vector<cplx> values;
};
CoefficientDump read_coefficients(std::istream& in);

}  // namespace shearlet
