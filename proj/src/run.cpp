#include "shearlet/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "shearlet/config.hpp"
#include "shearlet/error.hpp"
#include "shearlet/report.hpp"
#include "shearlet/transform.hpp"
#include "shearlet/verify.hpp"

namespace shearlet {

using json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kVerifiers{"pitt",    "beckner",          "log_identity", "heisenberg", "sobolev_log",
                                          "nazarov", "nazarov_constant", "local",        "local_sobolev"};

struct Session {
  RunConfig config;
  json echo;
  std::string hash;
  std::string out_dir;
  unsigned threads = 1;
};

std::shared_ptr<const ShearletSystem> build(const Session& s, std::size_t samples, const ChannelSpec& channels) {
  const RunConfig& c = s.config;
  SpatialGrid grid = make_grid(c.dimension, c.half_extent, samples);
  BuildOptions opts;
  opts.threads = s.threads;
  ShearletSystem sys = build_system(c.generator, grid, channels, opts);
  if (c.normalize) sys = normalize_system(sys);
  return std::make_shared<const ShearletSystem>(std::move(sys));
}

SampledSignal sample_signal(const SpatialGrid& grid, SignalConfig& s) {
  if (s.gaussian.dim() != grid.dim())
    throw Error(Errc::config, "signal '" + s.name + "' has the wrong dimension");
  return gaussian_signal(grid, s.gaussian);
}

void require_signals(const RunConfig& c) {
  if (c.signals.empty()) throw Error(Errc::config, "the config lists no signals");
}

ReportSet run_admissibility(const Session& s) {
  auto sys = build(s, s.config.samples, s.config.channels);
  std::filesystem::create_directories(s.out_dir);
  std::ofstream(std::filesystem::path(s.out_dir) / "system.json", std::ios::binary) << system_manifest(*sys) << "\n";
  const AdmissibilityResult& adm = sys->admissibility();
  ReportSet rs;
  InequalityReport cv = make_report("admissibility_cv", 0.02, adm.coefficient_of_variation, Relation::at_least, 0.0);
  cv.signal = "-";
  cv.c_psi = sys->c_psi();
  cv.metadata = {{"probes", static_cast<double>(adm.field.size())}, {"excluded", static_cast<double>(adm.excluded)}};
  if (!adm.truncation_note.empty()) cv.notes.push_back(adm.truncation_note);
  rs.inequalities.push_back(cv);
  EmpiricalConstantReport c;
  c.name = "c_psi";
  c.signal = "-";
  c.constant = sys->c_psi();
  c.secondary = adm.coefficient_of_variation;
  c.secondary_label = "coefficient_of_variation";
  c.inputs = {{"channels", static_cast<double>(sys->channel_count())}};
  rs.constants.push_back(c);
  return rs;
}

struct OracleSample {
  std::size_t channel = 0;
  std::uint64_t seed = 0;
  std::size_t point = 0;
  cplx fft;
};

ReportSet run_transform(Session& s) {
  RunConfig& c = s.config;
  require_signals(c);
  auto sys = build(s, c.samples, c.channels);
  const SpatialGrid& grid = sys->grid();
  TransformOptions topts;
  topts.threads = s.threads;
  ReportSet rs;
  for (auto& sig : c.signals) {
    SampledSignal f = sample_signal(grid, sig);
    CoefficientField field = forward(f, sys, topts);
    double e = energy(field);
    InequalityReport r = make_report("transform_energy", e, sys->c_psi() * norm_sq(f), Relation::equal,
                                     c.tolerances.equality);
    r.signal = sig.name;
    r.c_psi = sys->c_psi();
    rs.inequalities.push_back(r);
    if (c.dump) {
      std::filesystem::create_directories(s.out_dir);
      std::ofstream sf(std::filesystem::path(s.out_dir) / (sig.name + ".shsg"), std::ios::binary);
      write_signal(sf, f);
      std::ofstream cf(std::filesystem::path(s.out_dir) / (sig.name + ".shlc"), std::ios::binary);
      write_coefficients(cf, field);
      if (!sf || !cf) throw Error(Errc::io, "cannot write dumps for '" + sig.name + "'");
    }
  }
  if (c.oracle_samples == 0) return rs;

  // Oracle agreement on one band-covered signal: the ladder signal when present.
  SignalConfig probe = c.ladder_signal ? *c.ladder_signal : c.signals.front();
  SampledSignal f = sample_signal(grid, probe);
  // Relative error is only meaningful where the coefficient is well above round-off,
  // so draws are restricted to channels and points carrying a tenth of the peak.
  std::vector<double> peaks(sys->channel_count(), 0.0);
  for_each_channel(
      f, *sys,
      [&](std::size_t ch, std::span<const cplx> coeff, unsigned) {
        double peak = 0.0;
        for (const cplx& v : coeff) peak = std::max(peak, std::abs(v));
        peaks[ch] = peak;
      },
      topts);
  double global = *std::max_element(peaks.begin(), peaks.end());
  std::vector<std::size_t> eligible;
  for (std::size_t ch = 0; ch < peaks.size(); ++ch)
    if (peaks[ch] >= 0.1 * global) eligible.push_back(ch);
  std::mt19937_64 rng(c.seed);
  std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
  std::vector<OracleSample> samples(static_cast<std::size_t>(c.oracle_samples));
  for (auto& o : samples) {
    o.channel = eligible[pick(rng)];
    o.seed = rng();
  }
  for_each_channel(
      f, *sys,
      [&](std::size_t ch, std::span<const cplx> coeff, unsigned) {
        for (auto& o : samples) {
          if (o.channel != ch) continue;
          std::mt19937_64 local(o.seed);
          std::uniform_int_distribution<std::size_t> at(0, coeff.size() - 1);
          std::size_t p = at(local);
          while (std::abs(coeff[p]) < 0.1 * peaks[ch]) p = at(local);
          o.point = p;
          o.fft = coeff[p];
        }
      },
      topts);
  DirectOracle oracle(sys);
  GaussianSignal g = probe.gaussian;
  SignalFunction fn = [&g](std::span<const double> x) { return g(x); };
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const OracleSample& o = samples[i];
    const Channel& ch = sys->channels()[o.channel];
    std::vector<double> t(grid.dim());
    grid.point(o.point, t);
    cplx direct = oracle.coefficient(fn, ch.a, ch.s, t);
    double err = std::abs(o.fft - direct) / std::max(std::abs(direct), 1e-300);
    InequalityReport r = make_report("oracle_agreement[" + std::to_string(i) + "]", 1e-8, err, Relation::at_least, 0.0);
    r.signal = probe.name;
    r.c_psi = sys->c_psi();
    r.metadata = {{"channel", static_cast<double>(o.channel)},
                  {"a", ch.a},
                  {"point", static_cast<double>(o.point)},
                  {"fft_re", o.fft.real()},
                  {"fft_im", o.fft.imag()},
                  {"direct_re", direct.real()},
                  {"direct_im", direct.imag()},
                  {"relative_error", err},
                  {"channel_peak", peaks[o.channel]},
                  {"table_tail", oracle.table_tail()}};
    rs.inequalities.push_back(r);
  }
  return rs;
}

ReportSet run_energy(Session& s) {
  RunConfig& c = s.config;
  require_signals(c);
  auto sys = build(s, c.samples, c.channels);
  TransformOptions topts;
  topts.threads = s.threads;
  ReportSet rs;
  for (auto& sig : c.signals) {
    SampledSignal f = sample_signal(sys->grid(), sig);
    SignalContext ctx(f, sys, MomentPlan{}, topts, sig.name);
    InequalityReport r = make_report("energy", ctx.energy(), ctx.c_psi() * ctx.norm_sq(), Relation::equal,
                                     c.tolerances.equality);
    r.signal = sig.name;
    r.c_psi = ctx.c_psi();
    r.uncovered_mass = ctx.uncovered_mass();
    double full = ctx.c_psi() * ctx.norm_sq();
    r.metadata = {{"ratio", full > 0.0 ? ctx.energy() / full : 0.0}};
    rs.inequalities.push_back(r);
  }
  return rs;
}

bool selected(const std::vector<std::string>& names, const std::string& n) {
  return std::find(names.begin(), names.end(), n) != names.end();
}

ReportSet run_verify(Session& s, const std::string& which) {
  RunConfig& c = s.config;
  require_signals(c);
  std::vector<std::string> names = which == "all" ? kVerifiers : std::vector<std::string>{which};
  auto sys = build(s, c.samples, c.channels);
  const VerifierConfig& v = c.verifiers;
  MomentPlan plan;
  if (selected(names, "pitt"))
    for (double l : v.pitt_lambdas)
      if (l != 0.0) plan.power(l);
  if (selected(names, "beckner")) plan.log();
  if (selected(names, "heisenberg") || selected(names, "local_sobolev")) plan.power(2.0);
  if (selected(names, "sobolev_log")) plan.log_sobolev();
  if (selected(names, "nazarov"))
    for (const auto& r : v.nazarov_regions)
      if (r.kind != RegionKind::empty) plan.outside(r);
  if (selected(names, "nazarov_constant"))
    for (const auto& p : v.nazarov_pairs)
      if (p.e1.kind != RegionKind::empty) plan.outside(p.e1);
  if (selected(names, "local"))
    for (double a : v.local_alphas) plan.power(2.0 * a);

  TransformOptions topts;
  topts.threads = s.threads;
  const Tolerances& tol = c.tolerances;
  ReportSet rs;
  for (auto& sig : c.signals) {
    SampledSignal f = sample_signal(sys->grid(), sig);
    SignalContext ctx(f, sys, plan, topts, sig.name);
    for (const auto& name : names) {
      if (name == "pitt") {
        for (double l : v.pitt_lambdas) rs.inequalities.push_back(verify_pitt(ctx, l, tol));
      } else if (name == "beckner") {
        rs.inequalities.push_back(verify_beckner(ctx, tol));
      } else if (name == "log_identity") {
        rs.inequalities.push_back(verify_log_identity(ctx, topts, tol));
      } else if (name == "heisenberg") {
        rs.inequalities.push_back(verify_heisenberg(ctx, tol));
      } else if (name == "sobolev_log") {
        rs.inequalities.push_back(verify_sobolev_log(ctx, tol));
      } else if (name == "nazarov") {
        for (const auto& r : v.nazarov_regions) rs.inequalities.push_back(verify_nazarov_concentration(ctx, r, tol));
      } else if (name == "nazarov_constant") {
        for (const auto& p : v.nazarov_pairs) rs.constants.push_back(nazarov_empirical_constant(ctx, p.e1, p.e2));
      } else if (name == "local") {
        for (const auto& r : v.local_regions)
          for (double a : v.local_alphas) rs.constants.push_back(verify_local(ctx, r, a));
      } else if (name == "local_sobolev") {
        rs.inequalities.push_back(verify_local_sobolev(ctx, tol));
      }
    }
  }
  return rs;
}

ReportSet run_convergence(Session& s) {
  RunConfig& c = s.config;
  if (c.ladder.empty()) throw Error(Errc::config, "the config has no ladder rungs");
  SignalConfig sig = c.ladder_signal ? *c.ladder_signal : (require_signals(c), c.signals.front());
  TransformOptions topts;
  topts.threads = s.threads;
  ReportSet rs;
  std::vector<double> deviations;
  for (const LadderRung& rung : c.ladder) {
    ChannelSpec ch = c.channels;
    ch.scales = rung.scales;
    ch.shears = rung.shears;
    auto sys = build(s, rung.samples, ch);
    SignalConfig local = sig;
    SampledSignal f = sample_signal(sys->grid(), local);
    SignalContext ctx(f, sys, MomentPlan{}, topts, sig.name);
    double full = ctx.c_psi() * ctx.norm_sq();
    double dev = std::abs(ctx.energy() / full - 1.0);
    deviations.push_back(dev);
    InequalityReport r = make_report("convergence[N=" + std::to_string(rung.samples) + ",J=" +
                                         std::to_string(rung.scales) + ",K=" + std::to_string(rung.shears) + "]",
                                     ctx.energy(), full, Relation::equal, c.tolerances.equality);
    r.signal = sig.name;
    r.c_psi = ctx.c_psi();
    r.uncovered_mass = ctx.uncovered_mass();
    r.metadata = {{"deviation", dev}, {"coefficient_of_variation", sys->admissibility().coefficient_of_variation}};
    rs.inequalities.push_back(r);
  }
  double steps = 0.0, decreasing = 0.0;
  for (std::size_t i = 1; i < deviations.size(); ++i) {
    steps += 1.0;
    if (deviations[i] < deviations[i - 1]) decreasing += 1.0;
  }
  InequalityReport m = make_report("convergence_monotone", decreasing, steps, Relation::equal, 0.0);
  m.signal = sig.name;
  for (std::size_t i = 0; i < deviations.size(); ++i) m.metadata.push_back({"deviation_" + std::to_string(i), deviations[i]});
  rs.inequalities.push_back(m);
  return rs;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Continuous shearlet transform and uncertainty inequality checks", "shearlet-tool"};
  app.require_subcommand(1);
  std::string config_path, out_dir = "shearlet-out", verifier;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--threads", threads, "worker threads, 0 for all cores");
  };
  CLI::App* adm = app.add_subcommand("admissibility", "build the system and report C_psi and its spread");
  CLI::App* tr = app.add_subcommand("transform", "forward transforms, optional dumps, direct-oracle checks");
  CLI::App* en = app.add_subcommand("energy", "energy identity per signal");
  CLI::App* ve = app.add_subcommand("verify", "run one verifier or all of them");
  CLI::App* co = app.add_subcommand("convergence", "energy deviation over the refinement ladder");
  for (CLI::App* sub : {adm, tr, en, ve, co}) common(sub);
  std::vector<std::string> choices = kVerifiers;
  choices.push_back("all");
  ve->add_option("name", verifier, "verifier name or 'all'")->required()->check(CLI::IsMember(choices));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    Session s;
    s.config = load_config(config_path);
    auto* sub = app.get_subcommands().front();
    if (sub->count("--seed")) s.config.seed = seed;
    s.echo = config_to_json(s.config);
    s.hash = config_hash(s.config);
    s.out_dir = out_dir;
    s.threads = resolve_threads(threads);

    ReportSet rs;
    std::string stem = sub->get_name();
    if (sub == adm)
      rs = run_admissibility(s);
    else if (sub == tr)
      rs = run_transform(s);
    else if (sub == en)
      rs = run_energy(s);
    else if (sub == ve) {
      rs = run_verify(s, verifier);
      stem += "-" + verifier;
    } else
      rs = run_convergence(s);

    emit_report(rs, s.echo, s.hash, s.out_dir, stem);
    std::size_t failed = 0;
    for (const auto& r : rs.inequalities) {
      if (!r.pass) {
        ++failed;
        err << "FAIL " << r.name << " [" << r.signal << "] lhs=" << r.lhs << " rhs=" << r.rhs << "\n";
      }
    }
    out << stem << ": " << rs.inequalities.size() << " checks, " << failed << " failed, " << rs.constants.size()
        << " constants; reports in " << s.out_dir << "\n";
    return failed == 0 ? 0 : 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace shearlet
