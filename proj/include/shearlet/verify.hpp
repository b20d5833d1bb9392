#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "shearlet/grid.hpp"
#include "shearlet/system.hpp"
#include "shearlet/transform.hpp"

namespace shearlet {

enum class Relation { at_least, equal };

struct Tolerances {
  double inequality = 1e-3;
  double equality = 0.05;
};

struct InequalityReport {
  std::string name;
  std::string signal;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
  double tolerance = 0.0;
  Relation relation = Relation::at_least;
  double c_psi = 0.0;
  double uncovered_mass = 0.0;
  std::vector<std::pair<std::string, double>> metadata;
  std::vector<std::string> notes;
};

// at_least: slack >= -tol max(|lhs|, |rhs|, 1).
// equal:    |slack| <= tol max(|lhs|, |rhs|), the relative gap.
bool pass_predicate(Relation relation, double lhs, double rhs, double tolerance);
InequalityReport make_report(std::string name, double lhs, double rhs, Relation relation, double tolerance);

struct EmpiricalConstantReport {
  std::string name;
  std::string signal;
  double constant = 0.0;
  double secondary = 0.0;
  std::string secondary_label;
  std::vector<std::pair<std::string, double>> inputs;
  std::vector<std::string> notes;
};

// Spatial weights evaluated on every coefficient channel during one pass.
class MomentPlan {
 public:
  static std::string power_key(double p);
  static std::string log_key() { return "ln|t|"; }
  static std::string log_sobolev_key() { return "ln((1+|t|^2)/2)"; }
  static std::string outside_key(const RegionSpec& region);

  MomentPlan& power(double p);
  MomentPlan& log();
  MomentPlan& log_sobolev();
  MomentPlan& outside(const RegionSpec& region);

  const std::vector<std::string>& keys() const { return keys_; }
  std::vector<std::vector<double>> fields(const SpatialGrid& grid) const;

 private:
  struct Entry {
    std::string key;
    WeightKind kind;
    double exponent = 0.0;
    RegionSpec region;
    bool is_region = false;
  };
  void add(Entry entry);
  std::vector<std::string> keys_;
  std::vector<Entry> entries_;
};

// Everything the verifiers need about one signal, from a single forward pass.
class SignalContext {
 public:
  SignalContext(const SampledSignal& f, std::shared_ptr<const ShearletSystem> system, const MomentPlan& plan,
                const TransformOptions& options = {}, std::string label = "signal");

  const std::string& label() const { return label_; }
  const SampledSignal& signal() const { return f_; }
  const SampledSignal& spectrum() const { return spectrum_; }
  const ShearletSystem& system() const { return *system_; }
  double c_psi() const { return system_->c_psi(); }
  double norm_sq() const { return norm_sq_; }
  double energy() const { return energy_; }
  double uncovered_mass() const { return uncovered_; }
  bool has(const std::string& key) const { return moments_.count(key) != 0; }
  // Haar-weighted coefficient moment sum_c haar_c h^n sum_t w(t) |SH_c(t)|^2.
  double coefficient_moment(const std::string& key) const;
  // int w(xi) |f-hat|^2 over the lattice.
  double spectral_moment(WeightKind kind, double exponent = 0.0) const;
  double spectral_mass(const RegionSpec& region, bool complement) const;
  double spatial_mass(const RegionSpec& region, bool complement) const;
  double spatial_moment(WeightKind kind, double exponent = 0.0) const;

 private:
  std::string label_;
  SampledSignal f_;
  SampledSignal spectrum_;
  std::shared_ptr<const ShearletSystem> system_;
  double norm_sq_ = 0.0;
  double energy_ = 0.0;
  double uncovered_ = 0.0;
  std::map<std::string, double> moments_;
};

// Fraction of |f-hat|^2 where the frame function is below c_psi / 2.
double uncovered_spectral_mass(const SampledSignal& spectrum, const ShearletSystem& system);

InequalityReport verify_pitt(const SignalContext& ctx, double lambda, const Tolerances& tol = {});
InequalityReport verify_beckner(const SignalContext& ctx, const Tolerances& tol = {});
InequalityReport verify_heisenberg(const SignalContext& ctx, const Tolerances& tol = {});
InequalityReport verify_sobolev_log(const SignalContext& ctx, const Tolerances& tol = {});
InequalityReport verify_nazarov_concentration(const SignalContext& ctx, const RegionSpec& e1,
                                              const Tolerances& tol = {});
EmpiricalConstantReport nazarov_empirical_constant(const SignalContext& ctx, const RegionSpec& e1,
                                                   const RegionSpec& e2);
EmpiricalConstantReport verify_local(const SignalContext& ctx, const RegionSpec& e, double alpha);
InequalityReport verify_local_sobolev(const SignalContext& ctx, const Tolerances& tol = {});
// sum_c haar_c int ln|xi| |F_t SH_c|^2 against c_psi int ln|xi| |f-hat|^2, an equality.
InequalityReport verify_log_identity(const SignalContext& ctx, const TransformOptions& options = {},
                                     const Tolerances& tol = {});

// Single-signal conveniences that run their own forward pass.
InequalityReport verify_pitt(const SampledSignal& f, std::shared_ptr<const ShearletSystem> system, double lambda,
                             const Tolerances& tol = {});
InequalityReport verify_beckner(const SampledSignal& f, std::shared_ptr<const ShearletSystem> system,
                                const Tolerances& tol = {});

// Smallest K > 0 with rhs(K) = target for rhs strictly decreasing.
double solve_decreasing(const std::function<double(double)>& rhs, double target);

}  // namespace shearlet
