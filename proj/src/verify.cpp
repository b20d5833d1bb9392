#include "shearlet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "shearlet/error.hpp"
#include "shearlet/specfun.hpp"

namespace shearlet {

bool pass_predicate(Relation relation, double lhs, double rhs, double tolerance) {
  double slack = lhs - rhs;
  if (!std::isfinite(slack)) return false;
  if (relation == Relation::at_least) return slack >= -tolerance * std::max({std::abs(lhs), std::abs(rhs), 1.0});
  double scale = std::max(std::abs(lhs), std::abs(rhs));
  return std::abs(slack) <= tolerance * scale;
}

InequalityReport make_report(std::string name, double lhs, double rhs, Relation relation, double tolerance) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = lhs - rhs;
  r.relation = relation;
  r.tolerance = tolerance;
  r.pass = pass_predicate(relation, lhs, rhs, tolerance);
  return r;
}

namespace {

std::string number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void annotate(InequalityReport& r, const SignalContext& ctx) {
  r.signal = ctx.label();
  r.c_psi = ctx.c_psi();
  r.uncovered_mass = ctx.uncovered_mass();
  if (ctx.uncovered_mass() > 1e-3)
    r.notes.push_back("coverage-degraded: " + number(ctx.uncovered_mass()) +
                      " of the spectral mass lies outside the channel pass-bands");
}

}  // namespace

std::string MomentPlan::power_key(double p) { return "|t|^" + number(p); }

std::string MomentPlan::outside_key(const RegionSpec& region) { return "outside " + region.describe(); }

void MomentPlan::add(Entry entry) {
  if (std::find(keys_.begin(), keys_.end(), entry.key) != keys_.end()) return;
  keys_.push_back(entry.key);
  entries_.push_back(std::move(entry));
}

MomentPlan& MomentPlan::power(double p) {
  add({power_key(p), WeightKind::spatial_power, p, {}, false});
  return *this;
}

MomentPlan& MomentPlan::log() {
  add({log_key(), WeightKind::spatial_log, 0.0, {}, false});
  return *this;
}

MomentPlan& MomentPlan::log_sobolev() {
  add({log_sobolev_key(), WeightKind::spatial_log_sobolev, 0.0, {}, false});
  return *this;
}

MomentPlan& MomentPlan::outside(const RegionSpec& region) {
  add({outside_key(region), WeightKind::spatial_power, 0.0, region, true});
  return *this;
}

std::vector<std::vector<double>> MomentPlan::fields(const SpatialGrid& grid) const {
  std::vector<std::vector<double>> out;
  for (const Entry& e : entries_) {
    if (e.is_region)
      out.push_back(region_mask(grid, e.region, true).values);
    else
      out.push_back(weight_field(grid, e.kind, e.exponent));
  }
  return out;
}

double uncovered_spectral_mass(const SampledSignal& spectrum, const ShearletSystem& system) {
  if (spectrum.domain != Domain::frequency) throw Error(Errc::domain, "coverage needs a spectrum");
  const std::vector<double>& frame = system.frame_function();
  double threshold = 0.5 * system.c_psi();
  std::vector<double> total(frame.size()), out(frame.size());
  for (std::size_t p = 0; p < frame.size(); ++p) {
    total[p] = std::norm(spectrum.values[p]);
    out[p] = frame[p] < threshold ? total[p] : 0.0;
  }
  double t = pairwise_sum(total);
  return t > 0.0 ? pairwise_sum(out) / t : 0.0;
}

SignalContext::SignalContext(const SampledSignal& f, std::shared_ptr<const ShearletSystem> system,
                             const MomentPlan& plan, const TransformOptions& options, std::string label)
    : label_(std::move(label)), f_(f), system_(std::move(system)) {
  spectrum_ = fourier(f_, Direction::forward);
  norm_sq_ = shearlet::norm_sq(f_);
  uncovered_ = uncovered_spectral_mass(spectrum_, *system_);

  const SpatialGrid& grid = system_->grid();
  std::vector<std::vector<double>> fields = plan.fields(grid);
  std::size_t nf = fields.size();
  std::size_t channels = system_->channel_count();
  // per[c][0] is the plain energy, per[c][1 + i] the i-th planned moment.
  std::vector<std::vector<double>> per(channels, std::vector<double>(nf + 1));
  unsigned threads = std::max(1u, std::min<unsigned>(resolve_threads(options.threads), static_cast<unsigned>(channels)));
  std::vector<std::vector<double>> abs2(threads, std::vector<double>(grid.size()));
  std::vector<std::vector<double>> terms(threads, std::vector<double>(grid.size()));
  double cell = grid.cell_volume();
  TransformOptions opts = options;
  opts.threads = threads;
  for_each_channel(
      f_, *system_,
      [&](std::size_t c, std::span<const cplx> coeff, unsigned w) {
        std::vector<double>& a = abs2[w];
        std::vector<double>& t = terms[w];
        for (std::size_t p = 0; p < a.size(); ++p) a[p] = std::norm(coeff[p]);
        double haar = system_->channels()[c].haar;
        per[c][0] = haar * cell * pairwise_sum(a);
        for (std::size_t i = 0; i < nf; ++i) {
          const std::vector<double>& field = fields[i];
          for (std::size_t p = 0; p < a.size(); ++p) t[p] = field[p] * a[p];
          per[c][i + 1] = haar * cell * pairwise_sum(t);
        }
      },
      opts);
  std::vector<double> column(channels);
  for (std::size_t i = 0; i <= nf; ++i) {
    for (std::size_t c = 0; c < channels; ++c) column[c] = per[c][i];
    double v = pairwise_sum(column);
    if (i == 0)
      energy_ = v;
    else
      moments_[plan.keys()[i - 1]] = v;
  }
}

double SignalContext::coefficient_moment(const std::string& key) const {
  auto it = moments_.find(key);
  if (it == moments_.end()) throw Error(Errc::precondition, "moment '" + key + "' was not planned for this signal");
  return it->second;
}

double SignalContext::spectral_moment(WeightKind kind, double exponent) const {
  if (!is_frequency_kind(kind)) throw Error(Errc::domain, "spectral moment needs a frequency weight");
  return weighted_norm_sq(spectrum_, weight_field(f_.grid, kind, exponent));
}

double SignalContext::spatial_moment(WeightKind kind, double exponent) const {
  if (is_frequency_kind(kind)) throw Error(Errc::domain, "spatial moment needs a spatial weight");
  return weighted_norm_sq(f_, weight_field(f_.grid, kind, exponent));
}

double SignalContext::spectral_mass(const RegionSpec& region, bool complement) const {
  return weighted_norm_sq(spectrum_, region_mask(f_.grid, region, complement, Domain::frequency).values);
}

double SignalContext::spatial_mass(const RegionSpec& region, bool complement) const {
  return weighted_norm_sq(f_, region_mask(f_.grid, region, complement, Domain::spatial).values);
}

InequalityReport verify_pitt(const SignalContext& ctx, double lambda, const Tolerances& tol) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw Error(Errc::domain, "lambda must lie in [0, 1)");
  int n = ctx.system().dim();
  double C = pitt_constant(lambda, n);
  double coeff = lambda == 0.0 ? ctx.energy() : ctx.coefficient_moment(MomentPlan::power_key(lambda));
  double spectral = ctx.spectral_moment(WeightKind::frequency_inverse_power, lambda);
  bool equality = lambda == 0.0;
  InequalityReport r = make_report("pitt[lambda=" + number(lambda) + "]", C * coeff, ctx.c_psi() * spectral,
                                   equality ? Relation::equal : Relation::at_least,
                                   equality ? tol.equality : tol.inequality);
  annotate(r, ctx);
  r.metadata = {{"lambda", lambda}, {"pitt_constant", C}};
  return r;
}

InequalityReport verify_beckner(const SignalContext& ctx, const Tolerances& tol) {
  int n = ctx.system().dim();
  UncertaintyConstants k = uncertainty_constants(n);
  double coeff = ctx.coefficient_moment(MomentPlan::log_key());
  double spectral = ctx.spectral_moment(WeightKind::frequency_log);
  InequalityReport r = make_report("beckner", coeff + ctx.c_psi() * spectral, ctx.c_psi() * k.beckner * ctx.norm_sq(),
                                   Relation::at_least, tol.inequality);
  annotate(r, ctx);
  r.metadata = {{"coefficient_log_moment", coeff},
                {"spectral_log_moment", spectral},
                {"beckner_constant", k.beckner}};
  return r;
}

namespace {

void require_normalized(const SignalContext& ctx, const char* who) {
  if (std::abs(ctx.c_psi() - 1.0) > 1e-10)
    throw Error(Errc::precondition, std::string(who) + " needs a normalized system (c_psi = 1)");
}

}  // namespace

InequalityReport verify_heisenberg(const SignalContext& ctx, const Tolerances& tol) {
  require_normalized(ctx, "heisenberg");
  int n = ctx.system().dim();
  UncertaintyConstants k = uncertainty_constants(n);
  double spatial = ctx.coefficient_moment(MomentPlan::power_key(2.0));
  double spectral = ctx.spectral_moment(WeightKind::frequency_power, 2.0);
  double lhs = std::sqrt(spatial) * std::sqrt(spectral);
  double nf = ctx.norm_sq();
  InequalityReport r = make_report("heisenberg", lhs, k.heisenberg_digamma * nf, Relation::at_least, tol.inequality);
  annotate(r, ctx);
  r.metadata = {{"coefficient_second_moment", spatial},
                {"spectral_second_moment", spectral},
                {"bound_digamma", k.heisenberg_digamma * nf}};
  if (n == 2) {
    double quarter = k.heisenberg_quarter_pi * nf;
    r.metadata.push_back({"bound_quarter_pi", quarter});
    r.metadata.push_back({"slack_quarter_pi", lhs - quarter});
    r.metadata.push_back({"pass_quarter_pi", pass_predicate(Relation::at_least, lhs, quarter, tol.inequality) ? 1.0 : 0.0});
    r.notes.push_back("pass is judged against exp(digamma(n/4) - ln pi); the 1/(4 pi) bound is recorded only");
  }
  return r;
}

InequalityReport verify_sobolev_log(const SignalContext& ctx, const Tolerances& tol) {
  int n = ctx.system().dim();
  UncertaintyConstants k = uncertainty_constants(n);
  double coeff = ctx.coefficient_moment(MomentPlan::log_sobolev_key());
  double spectral = ctx.spectral_moment(WeightKind::frequency_log);
  InequalityReport r = make_report("sobolev_log", coeff + ctx.c_psi() * spectral,
                                   k.sobolev * ctx.c_psi() * ctx.norm_sq(), Relation::at_least, tol.inequality);
  annotate(r, ctx);
  r.metadata = {{"coefficient_moment", coeff}, {"spectral_log_moment", spectral}, {"sobolev_constant", k.sobolev}};
  r.notes.push_back("ordinary-frequency convention; the bound is convention dependent for spectra near the origin");
  return r;
}

InequalityReport verify_nazarov_concentration(const SignalContext& ctx, const RegionSpec& e1, const Tolerances& tol) {
  double coeff = e1.kind == RegionKind::empty ? ctx.energy() : ctx.coefficient_moment(MomentPlan::outside_key(e1));
  double outside = ctx.spatial_mass(e1, true);
  bool equality = e1.kind == RegionKind::empty;
  InequalityReport r = make_report("nazarov_concentration[E1=" + e1.describe() + "]", coeff, ctx.c_psi() * outside,
                                   equality ? Relation::equal : Relation::at_least,
                                   equality ? tol.equality : tol.inequality);
  annotate(r, ctx);
  r.metadata = {{"measure_E1", e1.measure(ctx.system().dim())}, {"signal_mass_outside", outside}};
  return r;
}

double solve_decreasing(const std::function<double(double)>& rhs, double target) {
  if (!(target > 0.0)) return std::numeric_limits<double>::infinity();
  double lo = 1.0, hi = 1.0;
  while (rhs(lo) <= target && lo > 1e-300) lo *= 0.5;
  while (rhs(hi) > target && hi < 1e300) hi *= 2.0;
  for (int it = 0; it < 400 && hi / lo > 1.0 + 1e-15; ++it) {
    double mid = std::sqrt(lo * hi);
    if (rhs(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

EmpiricalConstantReport nazarov_empirical_constant(const SignalContext& ctx, const RegionSpec& e1,
                                                   const RegionSpec& e2) {
  int n = ctx.system().dim();
  double coeff = e1.kind == RegionKind::empty ? ctx.energy() : ctx.coefficient_moment(MomentPlan::outside_key(e1));
  double spectral_tail = ctx.spectral_mass(e2, true);
  double D = coeff + ctx.c_psi() * spectral_tail;
  double m1 = e1.measure(n), m2 = e2.measure(n);
  double m = m1 * m2;
  double full = ctx.c_psi() * ctx.norm_sq();

  EmpiricalConstantReport r;
  r.name = "nazarov_constant[E1=" + e1.describe() + ",E2=" + e2.describe() + "]";
  r.signal = ctx.label();
  r.secondary_label = "statement_form";
  r.inputs = {{"measure_E1", m1}, {"measure_E2", m2}, {"D", D}, {"c_psi_norm_sq", full},
              {"coefficient_tail", coeff}, {"spectral_tail", spectral_tail}};
  r.notes.push_back("empirical for this signal and these regions; universality is not claimed");
  if (!(D > 0.0)) {
    r.constant = r.secondary = std::numeric_limits<double>::infinity();
    r.notes.push_back("D = 0: no finite constant");
    return r;
  }
  r.constant = solve_decreasing([&](double K) { return full / (K * std::exp(K * m)); }, D);
  if (D >= full) {
    r.secondary = 0.0;
    r.notes.push_back("D >= c_psi ||f||^2: the statement form holds for every K >= 0");
  } else if (m == 0.0) {
    r.secondary = std::numeric_limits<double>::infinity();
    r.notes.push_back("|E1||E2| = 0 with D < c_psi ||f||^2: the statement form admits no finite K");
  } else {
    r.secondary = std::log(full / D) / m;
  }
  return r;
}

EmpiricalConstantReport verify_local(const SignalContext& ctx, const RegionSpec& e, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::domain, "alpha must lie in (0, 1)");
  int n = ctx.system().dim();
  double lhs = ctx.coefficient_moment(MomentPlan::power_key(2.0 * alpha));
  if (!(lhs > 0.0)) throw Error(Errc::precondition, "coefficient moment vanishes (zero signal)");
  double mass = ctx.spectral_mass(e, false);
  double measure = e.measure(n);
  double spatial = ctx.spatial_moment(WeightKind::spatial_power, 2.0 * alpha);
  double ea = std::pow(measure, alpha);

  EmpiricalConstantReport r;
  r.name = "local[alpha=" + number(alpha) + ",E=" + e.describe() + "]";
  r.signal = ctx.label();
  r.constant = ea > 0.0 ? ctx.c_psi() * mass / (ea * lhs) : std::numeric_limits<double>::infinity();
  r.secondary_label = "classical";
  r.secondary = ea > 0.0 && spatial > 0.0 ? mass / (ea * spatial) : std::numeric_limits<double>::infinity();
  double ratio = ctx.energy() / (ctx.c_psi() * ctx.norm_sq());
  r.inputs = {{"alpha", alpha}, {"measure_E", measure}, {"spectral_mass_E", mass},
              {"coefficient_moment", lhs}, {"signal_moment", spatial}, {"energy_ratio", ratio},
              {"consistent", r.constant <= r.secondary * ratio * (1.0 + 1e-12) ? 1.0 : 0.0}};
  r.notes.push_back("empirical for this signal and region; universality is not claimed");
  if (mass == 0.0) r.notes.push_back("no spectral mass inside E");
  return r;
}

InequalityReport verify_local_sobolev(const SignalContext& ctx, const Tolerances& tol) {
  require_normalized(ctx, "local sobolev");
  int n = ctx.system().dim();
  UncertaintyConstants k = uncertainty_constants(n);
  double nf = ctx.norm_sq();
  double norm = std::sqrt(nf);
  double lhs = ctx.coefficient_moment(MomentPlan::power_key(2.0));
  double grad = std::sqrt(ctx.spectral_moment(WeightKind::frequency_power, 2.0));
  if (!(grad > 0.0)) throw Error(Errc::precondition, "gradient norm vanishes");
  double e = std::exp(k.sobolev);
  double rhs = 2.0 / grad * e * nf * norm - nf;
  InequalityReport r = make_report("local_sobolev", lhs, rhs, Relation::at_least, tol.inequality);
  annotate(r, ctx);
  double grad_calc = 2.0 * kPi * grad;
  r.metadata = {{"normalization_factor", norm > 0.0 ? 1.0 / norm : 0.0},
                {"gradient_norm", grad},
                {"gradient_norm_calculus", grad_calc},
                {"rhs_calculus", 2.0 / grad_calc * e * nf * norm - nf}};
  return r;
}

InequalityReport verify_log_identity(const SignalContext& ctx, const TransformOptions& options,
                                     const Tolerances& tol) {
  std::vector<double> w = weight_field(ctx.signal().grid, WeightKind::frequency_log, 0.0);
  IdentityResult id = weighted_spectral_identity(ctx.signal(), ctx.system(), w, options);
  InequalityReport r = make_report("log_identity", id.lhs, id.rhs, Relation::equal, tol.equality);
  annotate(r, ctx);
  r.metadata = {{"relative_error", id.relative_error}};
  return r;
}

InequalityReport verify_pitt(const SampledSignal& f, std::shared_ptr<const ShearletSystem> system, double lambda,
                             const Tolerances& tol) {
  MomentPlan plan;
  if (lambda != 0.0) plan.power(lambda);
  return verify_pitt(SignalContext(f, std::move(system), plan), lambda, tol);
}

InequalityReport verify_beckner(const SampledSignal& f, std::shared_ptr<const ShearletSystem> system,
                                const Tolerances& tol) {
  MomentPlan plan;
  plan.log();
  return verify_beckner(SignalContext(f, std::move(system), plan), tol);
}

}  // namespace shearlet
