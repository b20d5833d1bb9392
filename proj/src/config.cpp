#include "shearlet/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "shearlet/error.hpp"

namespace shearlet {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(Errc::config, (path.empty() ? std::string("<root>") : path) + ": " + what);
}

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path, "expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) fail(path + "/" + it.key(), "unknown key");
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

long long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(path, "expected an integer");
  return j.get<long long>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], path + "/" + std::to_string(i)));
  return v;
}

template <class T, class F>
void optional_field(const json& j, const char* key, const std::string& path, T& target, F read) {
  if (j.contains(key)) target = read(j.at(key), path + "/" + key);
}

SignalConfig read_signal(const json& j, const std::string& path, int n) {
  allow_keys(j, path, {"name", "center", "sigma", "modulation", "hermite"});
  SignalConfig s;
  if (!j.contains("name")) fail(path, "signal needs a name");
  s.name = text(j.at("name"), path + "/name");
  s.gaussian.center = j.contains("center") ? numbers(j.at("center"), path + "/center") : std::vector<double>(n, 0.0);
  if (!j.contains("sigma")) fail(path, "signal needs sigma");
  s.gaussian.sigma = numbers(j.at("sigma"), path + "/sigma");
  s.gaussian.modulation =
      j.contains("modulation") ? numbers(j.at("modulation"), path + "/modulation") : std::vector<double>(n, 0.0);
  if (j.contains("hermite")) {
    for (double v : numbers(j.at("hermite"), path + "/hermite")) s.gaussian.hermite.push_back(static_cast<int>(v));
  }
  if (static_cast<int>(s.gaussian.center.size()) != n || static_cast<int>(s.gaussian.sigma.size()) != n ||
      static_cast<int>(s.gaussian.modulation.size()) != n)
    fail(path, "center, sigma and modulation need one entry per dimension");
  for (double v : s.gaussian.sigma)
    if (!(v > 0.0)) fail(path + "/sigma", "widths must be positive");
  return s;
}

json signal_json(const SignalConfig& s) {
  json j;
  j["name"] = s.name;
  j["center"] = s.gaussian.center;
  j["sigma"] = s.gaussian.sigma;
  j["modulation"] = s.gaussian.modulation;
  if (!s.gaussian.hermite.empty()) j["hermite"] = s.gaussian.hermite;
  return j;
}

RegionSpec read_region(const json& j, const std::string& path, int n) {
  allow_keys(j, path, {"kind", "center", "radius", "half_width"});
  RegionSpec r;
  std::string kind = j.contains("kind") ? text(j.at("kind"), path + "/kind") : "";
  if (kind == "empty") {
    r.kind = RegionKind::empty;
    return r;
  }
  r.center = j.contains("center") ? numbers(j.at("center"), path + "/center") : std::vector<double>(n, 0.0);
  if (static_cast<int>(r.center.size()) != n) fail(path + "/center", "needs one entry per dimension");
  if (kind == "ball") {
    r.kind = RegionKind::ball;
    if (!j.contains("radius")) fail(path, "ball needs a radius");
    r.extent = {number(j.at("radius"), path + "/radius")};
  } else if (kind == "box") {
    r.kind = RegionKind::box;
    if (!j.contains("half_width")) fail(path, "box needs half_width");
    const json& w = j.at("half_width");
    r.extent = w.is_array() ? numbers(w, path + "/half_width") : std::vector<double>{number(w, path + "/half_width")};
    if (r.extent.size() != 1 && static_cast<int>(r.extent.size()) != n)
      fail(path + "/half_width", "needs one entry or one per dimension");
  } else {
    fail(path + "/kind", "expected \"empty\", \"ball\" or \"box\"");
  }
  for (double e : r.extent)
    if (!(e > 0.0)) fail(path, "region extents must be positive");
  return r;
}

json region_json(const RegionSpec& r) {
  json j;
  switch (r.kind) {
    case RegionKind::empty: j["kind"] = "empty"; break;
    case RegionKind::ball:
      j["kind"] = "ball";
      j["center"] = r.center;
      j["radius"] = r.extent.at(0);
      break;
    case RegionKind::box:
      j["kind"] = "box";
      j["center"] = r.center;
      j["half_width"] = r.extent;
      break;
  }
  return j;
}

std::vector<RegionSpec> read_regions(const json& j, const std::string& path, int n) {
  if (!j.is_array()) fail(path, "expected an array of regions");
  std::vector<RegionSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_region(j[i], path + "/" + std::to_string(i), n));
  return out;
}

std::string line_anchor(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::string width_label(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::vector<SignalConfig> gaussian_family(const std::vector<double>& widths, const std::vector<double>& anisotropies,
                                          const std::vector<double>& modulation) {
  std::vector<SignalConfig> out;
  int n = static_cast<int>(modulation.size());
  for (double w : widths)
    for (double rho : anisotropies) {
      SignalConfig s;
      s.name = "gauss_w" + width_label(w) + "_rho" + width_label(rho);
      s.gaussian.center.assign(n, 0.0);
      s.gaussian.sigma.assign(n, w / std::sqrt(rho));
      s.gaussian.sigma[0] = w * std::sqrt(rho);
      s.gaussian.modulation = modulation;
      out.push_back(std::move(s));
    }
  return out;
}

std::vector<SignalConfig> dilation_family(const SignalConfig& base, const std::vector<double>& factors) {
  std::vector<SignalConfig> out;
  for (double c : factors) {
    SignalConfig s = base;
    s.name = base.name + "_dil" + width_label(c);
    for (double& v : s.gaussian.sigma) v *= c;
    for (double& v : s.gaussian.modulation) v /= c;
    for (double& v : s.gaussian.center) v *= c;
    out.push_back(std::move(s));
  }
  return out;
}

RunConfig parse_config(const std::string& source) {
  json j;
  try {
    j = json::parse(source);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    auto pos = msg.find(": ");
    throw Error(Errc::config, line_anchor(source, e.byte > 0 ? e.byte - 1 : 0) + ": " +
                                  (pos == std::string::npos ? msg : msg.substr(pos + 2)));
  }
  allow_keys(j, "", {"dimension", "grid", "generator", "channels", "normalize", "signals", "family", "dilations",
                     "verifiers", "tolerances", "ladder", "oracle_samples", "dump", "seed"});
  RunConfig c;
  if (j.contains("dimension")) c.dimension = static_cast<int>(integer(j.at("dimension"), "/dimension"));
  if (c.dimension < 2 || c.dimension > 4) fail("/dimension", "supported dimensions are 2, 3 and 4");
  int n = c.dimension;

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    allow_keys(g, "/grid", {"half_extent", "samples"});
    optional_field(g, "half_extent", "/grid", c.half_extent, number);
    if (g.contains("samples")) c.samples = static_cast<std::size_t>(integer(g.at("samples"), "/grid/samples"));
  }
  if (!(c.half_extent > 0.0)) fail("/grid/half_extent", "must be positive");
  if (c.samples < 16 || (c.samples & (c.samples - 1)) != 0) fail("/grid/samples", "must be a power of two >= 16");

  if (j.contains("generator")) {
    const json& g = j.at("generator");
    allow_keys(g, "/generator",
               {"kind", "radial_band", "radial_sharpness", "angular_half_width", "angular_sharpness", "order"});
    if (g.contains("kind")) {
      std::string k = text(g.at("kind"), "/generator/kind");
      if (k == "classical")
        c.generator.kind = GeneratorKind::classical;
      else if (k == "gaussian-derivative")
        c.generator.kind = GeneratorKind::gaussian_derivative;
      else
        fail("/generator/kind", "expected \"classical\" or \"gaussian-derivative\"");
    }
    if (g.contains("radial_band")) {
      auto band = numbers(g.at("radial_band"), "/generator/radial_band");
      if (band.size() != 2) fail("/generator/radial_band", "expected [r0, r1]");
      c.generator.r0 = band[0];
      c.generator.r1 = band[1];
    }
    optional_field(g, "radial_sharpness", "/generator", c.generator.radial_sharpness, number);
    optional_field(g, "angular_half_width", "/generator", c.generator.beta, number);
    optional_field(g, "angular_sharpness", "/generator", c.generator.angular_sharpness, number);
    if (g.contains("order")) c.generator.order = static_cast<int>(integer(g.at("order"), "/generator/order"));
  }
  try {
    c.generator.validate(n);
  } catch (const Error& e) {
    fail("/generator", e.what());
  }

  if (j.contains("channels")) {
    const json& g = j.at("channels");
    allow_keys(g, "/channels", {"scale_range", "scales", "shear_limit", "shears", "sign_mode"});
    if (g.contains("scale_range")) {
      auto r = numbers(g.at("scale_range"), "/channels/scale_range");
      if (r.size() != 2) fail("/channels/scale_range", "expected [a_min, a_max]");
      c.channels.a_min = r[0];
      c.channels.a_max = r[1];
    }
    if (g.contains("scales")) c.channels.scales = static_cast<int>(integer(g.at("scales"), "/channels/scales"));
    optional_field(g, "shear_limit", "/channels", c.channels.shear_limit, number);
    if (g.contains("shears")) c.channels.shears = static_cast<int>(integer(g.at("shears"), "/channels/shears"));
    if (g.contains("sign_mode")) {
      std::string m = text(g.at("sign_mode"), "/channels/sign_mode");
      if (m == "positive")
        c.channels.sign_mode = SignMode::positive;
      else if (m == "mirrored")
        c.channels.sign_mode = SignMode::mirrored;
      else
        fail("/channels/sign_mode", "expected \"positive\" or \"mirrored\"");
    }
  }
  try {
    c.channels.validate();
  } catch (const Error& e) {
    fail("/channels", e.what());
  }

  if (j.contains("normalize")) c.normalize = boolean(j.at("normalize"), "/normalize");

  if (j.contains("signals")) {
    const json& s = j.at("signals");
    if (!s.is_array()) fail("/signals", "expected an array");
    for (std::size_t i = 0; i < s.size(); ++i) c.signals.push_back(read_signal(s[i], "/signals/" + std::to_string(i), n));
  }
  if (j.contains("family")) {
    const json& f = j.at("family");
    allow_keys(f, "/family", {"widths", "anisotropies", "modulation"});
    auto widths = numbers(f.value("widths", json::array()), "/family/widths");
    auto aniso = f.contains("anisotropies") ? numbers(f.at("anisotropies"), "/family/anisotropies") : std::vector<double>{1.0};
    auto mod = f.contains("modulation") ? numbers(f.at("modulation"), "/family/modulation") : std::vector<double>(n, 0.0);
    if (static_cast<int>(mod.size()) != n) fail("/family/modulation", "needs one entry per dimension");
    for (double v : widths)
      if (!(v > 0.0)) fail("/family/widths", "widths must be positive");
    for (double v : aniso)
      if (!(v > 0.0)) fail("/family/anisotropies", "anisotropies must be positive");
    for (auto& s : gaussian_family(widths, aniso, mod)) c.signals.push_back(std::move(s));
  }
  if (j.contains("dilations")) {
    const json& d = j.at("dilations");
    allow_keys(d, "/dilations", {"base", "factors"});
    if (!d.contains("base")) fail("/dilations", "needs a base signal");
    SignalConfig base = read_signal(d.at("base"), "/dilations/base", n);
    auto factors = numbers(d.value("factors", json::array()), "/dilations/factors");
    for (double v : factors)
      if (!(v > 0.0)) fail("/dilations/factors", "factors must be positive");
    for (auto& s : dilation_family(base, factors)) c.signals.push_back(std::move(s));
  }
  {
    std::set<std::string> names;
    for (const auto& s : c.signals)
      if (!names.insert(s.name).second) fail("/signals", "duplicate signal name '" + s.name + "'");
  }

  if (j.contains("verifiers")) {
    const json& v = j.at("verifiers");
    allow_keys(v, "/verifiers", {"pitt_lambdas", "nazarov_regions", "nazarov_pairs", "local_regions", "local_alphas"});
    if (v.contains("pitt_lambdas")) c.verifiers.pitt_lambdas = numbers(v.at("pitt_lambdas"), "/verifiers/pitt_lambdas");
    for (double l : c.verifiers.pitt_lambdas)
      if (!(l >= 0.0 && l < 1.0)) fail("/verifiers/pitt_lambdas", "lambda must lie in [0, 1)");
    if (v.contains("nazarov_regions"))
      c.verifiers.nazarov_regions = read_regions(v.at("nazarov_regions"), "/verifiers/nazarov_regions", n);
    if (v.contains("nazarov_pairs")) {
      const json& p = v.at("nazarov_pairs");
      if (!p.is_array()) fail("/verifiers/nazarov_pairs", "expected an array");
      for (std::size_t i = 0; i < p.size(); ++i) {
        std::string path = "/verifiers/nazarov_pairs/" + std::to_string(i);
        allow_keys(p[i], path, {"E1", "E2"});
        if (!p[i].contains("E1") || !p[i].contains("E2")) fail(path, "needs E1 and E2");
        c.verifiers.nazarov_pairs.push_back(
            {read_region(p[i].at("E1"), path + "/E1", n), read_region(p[i].at("E2"), path + "/E2", n)});
      }
    }
    if (v.contains("local_regions"))
      c.verifiers.local_regions = read_regions(v.at("local_regions"), "/verifiers/local_regions", n);
    if (v.contains("local_alphas")) c.verifiers.local_alphas = numbers(v.at("local_alphas"), "/verifiers/local_alphas");
    for (double a : c.verifiers.local_alphas)
      if (!(a > 0.0 && a < 1.0)) fail("/verifiers/local_alphas", "alpha must lie in (0, 1)");
  }

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    allow_keys(t, "/tolerances", {"inequality", "equality"});
    optional_field(t, "inequality", "/tolerances", c.tolerances.inequality, number);
    optional_field(t, "equality", "/tolerances", c.tolerances.equality, number);
    if (!(c.tolerances.inequality >= 0.0) || !(c.tolerances.equality >= 0.0)) fail("/tolerances", "must be >= 0");
  }

  if (j.contains("ladder")) {
    const json& l = j.at("ladder");
    allow_keys(l, "/ladder", {"rungs", "signal"});
    if (l.contains("rungs")) {
      const json& r = l.at("rungs");
      if (!r.is_array()) fail("/ladder/rungs", "expected an array of [samples, scales, shears]");
      for (std::size_t i = 0; i < r.size(); ++i) {
        std::string path = "/ladder/rungs/" + std::to_string(i);
        if (!r[i].is_array() || r[i].size() != 3) fail(path, "expected [samples, scales, shears]");
        LadderRung rung{static_cast<std::size_t>(integer(r[i][0], path + "/0")),
                        static_cast<int>(integer(r[i][1], path + "/1")), static_cast<int>(integer(r[i][2], path + "/2"))};
        if (rung.samples < 16 || (rung.samples & (rung.samples - 1)) != 0) fail(path, "samples must be a power of two");
        c.ladder.push_back(rung);
      }
    }
    if (l.contains("signal")) c.ladder_signal = read_signal(l.at("signal"), "/ladder/signal", n);
  }
  if (j.contains("oracle_samples")) c.oracle_samples = static_cast<int>(integer(j.at("oracle_samples"), "/oracle_samples"));
  if (c.oracle_samples < 0) fail("/oracle_samples", "must be >= 0");
  if (j.contains("dump")) c.dump = boolean(j.at("dump"), "/dump");
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned() && !s.is_number_integer()) fail("/seed", "expected an unsigned integer");
    c.seed = s.get<std::uint64_t>();
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::config, "cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const Error& e) {
    throw Error(Errc::config, path + ": " + std::string(e.what()).substr(std::string(errc_name(Errc::config)).size() + 2));
  }
}

json config_to_json(const RunConfig& c) {
  json j;
  j["dimension"] = c.dimension;
  j["grid"] = {{"half_extent", c.half_extent}, {"samples", c.samples}};
  const GeneratorSpec& g = c.generator;
  j["generator"] = {{"kind", g.kind == GeneratorKind::classical ? "classical" : "gaussian-derivative"},
                    {"radial_band", {g.r0, g.r1}},
                    {"radial_sharpness", g.radial_sharpness},
                    {"angular_half_width", g.beta},
                    {"angular_sharpness", g.angular_sharpness},
                    {"order", g.order}};
  const ChannelSpec& ch = c.channels;
  j["channels"] = {{"scale_range", {ch.a_min, ch.a_max}},
                   {"scales", ch.scales},
                   {"shear_limit", ch.shear_limit},
                   {"shears", ch.shears},
                   {"sign_mode", ch.sign_mode == SignMode::mirrored ? "mirrored" : "positive"}};
  j["normalize"] = c.normalize;
  json sigs = json::array();
  for (const auto& s : c.signals) sigs.push_back(signal_json(s));
  j["signals"] = sigs;
  json v;
  v["pitt_lambdas"] = c.verifiers.pitt_lambdas;
  json regions = json::array();
  for (const auto& r : c.verifiers.nazarov_regions) regions.push_back(region_json(r));
  v["nazarov_regions"] = regions;
  json pairs = json::array();
  for (const auto& p : c.verifiers.nazarov_pairs) pairs.push_back({{"E1", region_json(p.e1)}, {"E2", region_json(p.e2)}});
  v["nazarov_pairs"] = pairs;
  json local = json::array();
  for (const auto& r : c.verifiers.local_regions) local.push_back(region_json(r));
  v["local_regions"] = local;
  v["local_alphas"] = c.verifiers.local_alphas;
  j["verifiers"] = v;
  j["tolerances"] = {{"inequality", c.tolerances.inequality}, {"equality", c.tolerances.equality}};
  json rungs = json::array();
  for (const auto& r : c.ladder) rungs.push_back({r.samples, r.scales, r.shears});
  json ladder;
  ladder["rungs"] = rungs;
  if (c.ladder_signal) ladder["signal"] = signal_json(*c.ladder_signal);
  j["ladder"] = ladder;
  j["oracle_samples"] = c.oracle_samples;
  j["dump"] = c.dump;
  j["seed"] = c.seed;
  return j;
}

std::string config_hash(const RunConfig& config) {
  std::string text = config_to_json(config).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig default_config() {
  RunConfig c;
  std::vector<double> nu{1.45, 0.0};
  c.signals = gaussian_family({1.6, 1.9, 2.2, 2.5, 2.8}, {1.0, 1.5, 1.0 / 1.5}, nu);
  SignalConfig base{"gauss_dilation", {{0.0, 0.0}, {2.0, 2.0}, {1.45, 0.0}, {}, 1.0}};
  for (auto& s : dilation_family(base, {0.8, 1.0, 1.25})) c.signals.push_back(std::move(s));
  RegionSpec empty;
  RegionSpec ball1{RegionKind::ball, {0.0, 0.0}, {1.0}};
  RegionSpec box2{RegionKind::box, {0.0, 0.0}, {2.0}};
  c.verifiers.nazarov_regions = {empty, ball1, box2};
  RegionSpec spec_ball{RegionKind::ball, {1.45, 0.0}, {0.5}};
  c.verifiers.nazarov_pairs = {{RegionSpec{RegionKind::ball, {0.0, 0.0}, {2.0}}, spec_ball},
                               {RegionSpec{RegionKind::ball, {0.0, 0.0}, {3.0}}, RegionSpec{RegionKind::ball, {1.45, 0.0}, {1.0}}}};
  c.verifiers.local_regions = {spec_ball, ball1};
  c.ladder = {{256, 12, 13}, {512, 24, 25}, {512, 48, 49}};
  c.ladder_signal = SignalConfig{"ladder_gauss_w2.5", {{0.0, 0.0}, {2.5, 2.5}, {1.45, 0.0}, {}, 1.0}};
  return c;
}

}  // namespace shearlet
