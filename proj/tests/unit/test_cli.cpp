#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include <doctest.h>

#include "bpdl/cli/commands.hpp"
#include "bpdl/cli/config.hpp"
#include "bpdl/cli/output.hpp"
#include "bpdl/errors.hpp"

using namespace bpdl;
using namespace bpdl::cli;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bpdl_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path dir = scratch(name);
  fs::create_directories(dir);
  const fs::path p = dir / "config.yaml";
  std::ofstream(p) << text;
  return p;
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

const char* kSmallModel = R"(
model:
  gamma: 5
  mu: 1
  alpha: 1
  competition: {shape: tophat, radius: 0.5, height: 1}
  dispersal: {shape: tophat, radius: 3}
  domain: {mode: torus, dim: 1, side: 20}
)";

}  // namespace

TEST_CASE("json output uses 17 digits and NA for non-finite numbers") {
  Json j;
  j["x"] = 0.1;
  j["bad"] = std::nan("");
  j["inf"] = INFINITY;
  j["v"] = {1.0, 2.5};
  j["n"] = 3;
  const std::string s = dump_json(j);
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("\"bad\": \"NA\"") != std::string::npos);
  CHECK(s.find("\"inf\": \"NA\"") != std::string::npos);
  CHECK(s.find("[1, 2.5]") != std::string::npos);
  CHECK(s.find("\"n\": 3") != std::string::npos);
  CHECK(format_number(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("sha256 of known inputs") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config errors name the field") {
  const YAML::Node missing_radius = YAML::Load(R"(
gamma: 1
mu: 1
alpha: 1
competition: {shape: tophat, height: 1}
dispersal: {shape: tophat, radius: 3}
domain: {mode: torus, dim: 1, side: 20}
)");
  const std::string e1 = error_of([&] { parse_model(Section(missing_radius, "model")); });
  CHECK(e1.find("BadConfig") != std::string::npos);
  CHECK(e1.find("model.competition.radius") != std::string::npos);

  const YAML::Node bad_shape = YAML::Load(R"(
gamma: 1
mu: 1
alpha: 1
competition: {shape: tophat, radius: 0.5}
dispersal: {shape: hexagon, radius: 3}
domain: {mode: torus, dim: 1, side: 20}
)");
  const std::string e2 = error_of([&] { parse_model(Section(bad_shape, "model")); });
  CHECK(e2.find("hexagon") != std::string::npos);
  CHECK(e2.find("model.dispersal.shape") != std::string::npos);
  CHECK(e2.find("line 6") != std::string::npos);

  const YAML::Node bad_number = YAML::Load("gamma: fast\nmu: 1\nalpha: 1\n");
  const std::string e3 = error_of([&] { parse_rate(Section(bad_number, "model"), "gamma"); });
  CHECK(e3.find("model.gamma") != std::string::npos);

  const YAML::Node negative = YAML::Load("gamma: -1\n");
  CHECK_THROWS_AS(parse_rate(Section(negative, "model"), "gamma"), BadConfig);
}

TEST_CASE("preset merge and lookup") {
  const auto names = preset_names();
  for (const char* want : {"fig1", "fig2a", "fig2b", "fig3", "logistic-oracle", "dbc-decay",
                           "fixed-point"}) {
    CHECK(std::find(names.begin(), names.end(), want) != names.end());
  }
  for (const auto& e : experiment_names()) {
    CHECK_MESSAGE(std::find(names.begin(), names.end(), e) != names.end(), e);
  }
  // every shipped preset loads and names its command
  for (const auto& n : names) {
    const YAML::Node cfg = load_config(n, std::nullopt);
    CHECK_MESSAGE(cfg["command"], n);
  }

  const YAML::Node base = YAML::Load("a: 1\nb: {c: 2, d: 3}\nl: [1, 2]\n");
  const YAML::Node over = YAML::Load("b: {d: 4}\nl: [5]\ne: x\n");
  const YAML::Node m = merge(base, over);
  CHECK(m["a"].as<int>() == 1);
  CHECK(m["b"]["c"].as<int>() == 2);
  CHECK(m["b"]["d"].as<int>() == 4);
  CHECK(m["l"].size() == 1);
  CHECK(m["e"].as<std::string>() == "x");

  const std::string e = error_of([] { load_config(std::string("no-such-preset"), std::nullopt); });
  CHECK(e.find("fig1") != std::string::npos);
}

TEST_CASE("unknown experiment lists the valid names") {
  Invocation inv;
  inv.command = "experiment";
  inv.experiment = "nonsense";
  inv.preset = "slivnyak";
  inv.out = scratch("unknown");
  std::string msg;
  try {
    execute(inv);
  } catch (const UnknownExperiment& ex) {
    msg = ex.what();
  }
  REQUIRE_FALSE(msg.empty());
  for (const auto& n : experiment_names()) CHECK(msg.find(n) != std::string::npos);
}

TEST_CASE("mismatched command and guarded experiments are config errors") {
  Invocation inv;
  inv.command = "simulate";
  inv.preset = "logistic-oracle";
  inv.out = scratch("mismatch");
  CHECK_THROWS_AS(execute(inv), BadConfig);

  Invocation c2;
  c2.command = "experiment";
  c2.preset = "scaling-c2";
  c2.out = scratch("c2");
  CHECK_THROWS_AS(execute(c2), BadConfig);
}

TEST_CASE("simulate is byte-identical across thread counts and the manifest digests match") {
  const fs::path cfg = write_config("repro", std::string("command: simulate\n") + kSmallModel + R"(
initial: {count: 3, at: [0]}
run:
  replicates: 12
  horizon: 3
  snapshots: {every: 0.5, positions: true}
analysis:
  count_window: 2
  load_radius: 2
  histogram: {half_width: 4, bin: 1, times: [3]}
  average: {from: 1, to: 3}
  write_positions: true
)");
  std::map<int, fs::path> outs;
  for (int threads : {1, 3}) {
    Invocation inv;
    inv.command = "simulate";
    inv.config = cfg;
    inv.seed = 42;
    inv.threads = threads;
    inv.out = scratch("repro_out" + std::to_string(threads));
    CHECK(execute(inv) == kExitOk);
    outs[threads] = inv.out;
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(outs[1])) {
    const std::string name = entry.path().filename().string();
    if (name == "manifest.json") continue;
    CHECK_MESSAGE(slurp(entry.path()) == slurp(outs[3] / name), name);
    ++compared;
  }
  CHECK(compared >= 8);

  const Json manifest = Json::parse(slurp(outs[1] / "manifest.json"));
  CHECK(manifest["seed"] == 42);
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["config"].get<std::string>().find("seed: 42") != std::string::npos);
  REQUIRE(manifest["outputs"].size() >= 8);
  for (const auto& f : manifest["outputs"]) {
    const std::string bytes = slurp(outs[1] / f["file"].get<std::string>());
    CHECK(f["bytes"] == bytes.size());
    CHECK(f["sha256"] == sha256_hex(bytes));
  }

  // the recorded config and seed reproduce the run
  const fs::path again = write_config("repro_again", manifest["config"].get<std::string>());
  Invocation inv;
  inv.command = "simulate";
  inv.config = again;
  inv.out = scratch("repro_again_out");
  CHECK(execute(inv) == kExitOk);
  CHECK(slurp(inv.out / "traces.csv") == slurp(outs[1] / "traces.csv"));
  CHECK(slurp(inv.out / "summary.json") == slurp(outs[1] / "summary.json"));
}

TEST_CASE("simulate output layout") {
  const fs::path cfg = write_config("layout", std::string("command: simulate\n") + kSmallModel + R"(
initial: {uniform: 5}
run:
  replicates: 3
  horizon: 1
  engine: faithful
  snapshots: {at: [0.5, 1]}
)");
  Invocation inv;
  inv.command = "simulate";
  inv.config = cfg;
  inv.out = scratch("layout_out");
  CHECK(execute(inv) == kExitOk);
  const std::string traces = slurp(inv.out / "traces.csv");
  CHECK(traces.rfind("replicate_id,t,count,births_cum,ndeaths_cum,cdeaths_cum,fictitious_cum", 0) == 0);
  const Json summary = Json::parse(slurp(inv.out / "summary.json"));
  CHECK(summary["replicates"] == 3);
  CHECK(summary["pass"] == true);
  CHECK(fs::exists(inv.out / "plot.gp"));
  CHECK(fs::exists(inv.out / "counts.dat"));

  const fs::path bad = write_config("layout_bad", std::string("command: simulate\n") + kSmallModel +
                                                      "initial: {count: 1}\nrun: {replicates: 2}\n");
  inv.config = bad;
  const std::string e = error_of([&] { execute(inv); });
  CHECK(e.find("'run.horizon'") != std::string::npos);
}

TEST_CASE("meanfield logistic preset passes") {
  Invocation inv;
  inv.command = "meanfield";
  inv.preset = "logistic-oracle";
  inv.out = scratch("logistic");
  CHECK(execute(inv) == kExitOk);
  const Json summary = Json::parse(slurp(inv.out / "summary.json"));
  CHECK(summary["logistic"]["max_error"].get<double>() < 1e-6);
  CHECK(fs::exists(inv.out / "logistic.dat"));
}

TEST_CASE("a failing acceptance flag gives exit code 3") {
  // lattice survival where the sufficient condition fails
  const fs::path cfg = write_config("fail", R"(
command: experiment
experiment: lattice-survival
plan: {gamma: 2, mu: 1, alpha: 2, horizon: 5, replicates: 20}
)");
  Invocation inv;
  inv.command = "experiment";
  inv.config = cfg;
  inv.out = scratch("fail_out");
  CHECK(execute(inv) == kExitFailed);
  const Json summary = Json::parse(slurp(inv.out / "summary.json"));
  CHECK(summary["lattice_survival_condition"] == false);
  CHECK(summary["pass"] == false);
}
