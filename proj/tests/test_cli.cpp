#include <filesystem>
#include <fstream>
#include <sstream>
#include <cstdlib>
#include <sys/wait.h>

#include "doctest.h"
#include "shearlet/config.hpp"
#include "shearlet/error.hpp"
#include "shearlet/report.hpp"
#include "shearlet/run.hpp"

using namespace shearlet;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "dimension": 2,
  "grid": {"half_extent": 3.5, "samples": 128},
  "channels": {"scale_range": [0.25, 1.0], "scales": 12, "shear_limit": 1.5, "shears": 13},
  "signals": [{"name": "g", "center": [0, 0], "sigma": [1.6, 1.6], "modulation": [1.45, 0]}],
  "verifiers": {"pitt_lambdas": [0.0, 0.5], "local_alphas": [0.5],
                "local_regions": [{"kind": "ball", "center": [1.45, 0], "radius": 0.5}],
                "nazarov_regions": [{"kind": "empty"}, {"kind": "ball", "center": [0, 0], "radius": 1}]}
})";

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("shearlet_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  fs::path dir = scratch("usage");
  CHECK(run({"energy", "--config", (dir / "missing.json").string()}).code == 2);
  CHECK(run({"frobnicate", "--config", "x"}).code == 2);
  CHECK(run({"energy"}).code == 2);
  CHECK(run({"--help"}).code == 0);

  Outcome bad = run({"energy", "--config", write(dir, "bad.json", "{\n  \"dimension\": 2,\n  oops\n}").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 3") != std::string::npos);

  Outcome key = run({"energy", "--config", write(dir, "key.json", R"({"grid": {"samples": 64, "spacing": 1}})").string()});
  CHECK(key.code == 2);
  CHECK(key.err.find("/grid/spacing") != std::string::npos);

  CHECK(run({"verify", "nonsense", "--config", write(dir, "ok.json", kSmall).string()}).code == 2);
}

TEST_CASE("config echo is stable") {
  RunConfig c = parse_config(kSmall);
  RunConfig again = parse_config(config_to_json(c).dump());
  CHECK(config_hash(c) == config_hash(again));
  CHECK(config_hash(c).size() == 16);
  RunConfig d = default_config();
  CHECK(config_hash(parse_config(config_to_json(d).dump())) == config_hash(d));
  c.seed = 7;
  CHECK(config_hash(c) != config_hash(again));
  CHECK_THROWS_AS(parse_config(R"({"dimension": 5})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"signals": [{"name": "a", "sigma": [1, 1]}, {"name": "a", "sigma": [1, 1]}]})"),
                  Error);
}

TEST_CASE("energy and verify write reports") {
  fs::path dir = scratch("energy");
  fs::path cfg = write(dir, "small.json", kSmall);
  Outcome e = run({"energy", "--config", cfg.string(), "--out", (dir / "out").string()});
  CHECK(e.code == 0);
  CHECK(fs::exists(dir / "out" / "energy.json"));
  CHECK(fs::exists(dir / "out" / "energy.csv"));
  auto j = nlohmann::json::parse(slurp(dir / "out" / "energy.json"));
  CHECK(j["records"].size() == 1);
  CHECK(j["config_hash"] == config_hash(parse_config(kSmall)));

  Outcome v = run({"verify", "pitt", "--config", cfg.string(), "--out", (dir / "out").string()});
  CHECK(v.code == 0);
  auto p = nlohmann::json::parse(slurp(dir / "out" / "verify-pitt.json"));
  CHECK(p["records"].size() == 2);
  std::string csv = slurp(dir / "out" / "verify-pitt.csv");
  CHECK(csv.rfind("name,signal,lhs,rhs,slack,pass\n", 0) == 0);
}

TEST_CASE("reports are identical across thread counts") {
  fs::path dir = scratch("threads");
  fs::path cfg = write(dir, "small.json", kSmall);
  CHECK(run({"verify", "all", "--config", cfg.string(), "--out", (dir / "a").string(), "--threads", "1"}).code == 0);
  CHECK(run({"verify", "all", "--config", cfg.string(), "--out", (dir / "b").string(), "--threads", "2"}).code == 0);
  std::string a = slurp(dir / "a" / "verify-all.json"), b = slurp(dir / "b" / "verify-all.json");
  CHECK(!a.empty());
  CHECK(a == b);
  CHECK(slurp(dir / "a" / "verify-all.csv") == slurp(dir / "b" / "verify-all.csv"));
}

TEST_CASE("output failures") {
  fs::path dir = scratch("io");
  fs::path cfg = write(dir, "small.json", kSmall);
  fs::path blocker = write(dir, "file", "x");
  CHECK(run({"energy", "--config", cfg.string(), "--out", (blocker / "sub").string()}).code == 2);

  ReportSet empty;
  CHECK_THROWS_AS(emit_report(empty, nlohmann::ordered_json::object(), "0", dir.string(), "x"), Error);
  ReportSet one;
  one.inequalities.push_back(make_report("r", 1.0, 0.5, Relation::at_least, 0.0));
  CHECK_THROWS_AS(emit_report(one, nlohmann::ordered_json::object(), "0", (blocker / "sub").string(), "x"), Error);
  emit_report(one, nlohmann::ordered_json::object(), "0", dir.string(), "x");
  CHECK(fs::exists(dir / "x.json"));
}

#ifdef SHEARLET_TOOL
TEST_CASE("tool binary") {
  fs::path dir = scratch("tool");
  fs::path cfg = write(dir, "small.json", kSmall);
  std::string cmd = std::string("\"") + SHEARLET_TOOL + "\" admissibility --config " + cfg.string() + " --out " +
                    (dir / "out").string() + " > " + (dir / "log").string() + " 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "out" / "system.json"));
  CHECK(fs::exists(dir / "out" / "admissibility.json"));
  std::string none = std::string("\"") + SHEARLET_TOOL + "\" energy > /dev/null 2>&1";
  int status = std::system(none.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
#endif
