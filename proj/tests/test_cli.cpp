#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "app/util.hpp"

using namespace qmcst;
using namespace qmcst::app;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("qmcst_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qmcst");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void write(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config(nlohmann::json::parse(R"({
    "seed": 4, "n": 8, "d": 3, "oversample_k": 4,
    "weights": {"mode": "superposition", "gammas": [1, 0.5, 0.5], "s": 2},
    "init": {"kind": "sobol", "scramble": "owen"},
    "walk": {"mode": "strict", "delta": 0.25},
    "shift": {"target": "points"},
    "repetitions": 3, "workers": 2
  })"));
  CHECK(cfg.seed == 4);
  CHECK(cfg.d == 3);
  CHECK(cfg.weight_mode == WeightMode::Superposition);
  CHECK(cfg.init_kind == InitKind::Sobol);
  CHECK(cfg.init_scramble == ScrambleKind::Owen);
  CHECK(cfg.strict_walk);
  CHECK(cfg.shift_target == ShiftTarget::Points);
  const auto tc = cfg.transference(8, 1);
  CHECK(tc.profile.s_eff() == 2);
  CHECK(tc.walk.strict());
  CHECK(tc.shift_target == ShiftTarget::Points);
  CHECK(tc.walk.seed != cfg.transference(8, 0).walk.seed);

  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"sed": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"walk": {"mode": "fast"}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"weights": {"mode": "full", "x": 1}})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"d": "two"})")), ConfigError);
}

TEST_CASE("csv schemas") {
  std::vector<BenchRow> rows{{"iid", 8, 2, 0, -0.25, 0.5}, {"iid", 8, 2, 1, 0.5, std::nullopt},
                             {"iid", 16, 2, 0, 0.125, std::nullopt}, {"iid", 16, 2, 1, -0.125, std::nullopt}};
  CHECK(bench_raw_csv(rows) ==
        "method,n,d,seed,error,abs_error,stardisc\n"
        "iid,8,2,0,-0.25,0.25,0.5\n"
        "iid,8,2,1,0.5,0.5,\n"
        "iid,16,2,0,0.125,0.125,\n"
        "iid,16,2,1,-0.125,0.125,\n");
  CHECK(bench_summary_csv(rows) ==
        "method,n,mae,iqr_lo,iqr_hi,alpha\n"
        "iid,8,0.375,0.3125,0.4375,1.5849625007211559\n"
        "iid,16,0.125,0.125,0.125,1.5849625007211559\n");
}

TEST_CASE("generate is reproducible and audits clean") {
  TempDir tmp("gen");
  write(tmp.file("cfg.json"),
        R"({"seed": 1, "n": 8, "d": 2, "oversample_k": 16, "init": {"kind": "iid", "seed": 1}})");
  auto a = cli({"--config", tmp.file("cfg.json"), "--out", tmp.file("a"), "generate"});
  REQUIRE(a.code == kExitOk);
  auto b = cli({"--config", tmp.file("cfg.json"), "--out", tmp.file("b"), "generate"});
  REQUIRE(b.code == kExitOk);
  std::size_t sets = 0;
  for (const auto& e : fs::directory_iterator(tmp.path / "a")) {
    const auto name = e.path().filename().string();
    CHECK(read_file(e.path().string()) == read_file((tmp.path / "b" / name).string()));
    if (name.rfind("set_", 0) == 0) {
      ++sets;
      CHECK(load_qmcpts(e.path().string()).size() == 8);
    }
  }
  CHECK(sets == 16);

  const std::string manifest = tmp.file("a/manifest.json");
  auto ok = cli({"--seed", "3", "audit", manifest, "--random-dyadic", "100"});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("PASS") != std::string::npos);

  write(tmp.file("empty.txt"), "");
  auto vac = cli({"audit", manifest, tmp.file("empty.txt")});
  CHECK(vac.code == kExitOk);
  CHECK(vac.out.find("vacuous") != std::string::npos);

  write(tmp.file("regions.txt"), "0 0.5 0 0.5\n# comment\n0.25 0.75 0 1\n");
  CHECK(cli({"audit", manifest, tmp.file("regions.txt")}).code == kExitOk);

  auto m = nlohmann::json::parse(read_file(manifest));
  auto& signs = m["nodes"][0]["signs"];
  signs[0] = -signs[0].get<int>();
  write(tmp.file("a/manifest.json"), m.dump());
  auto bad = cli({"--seed", "3", "audit", manifest, "--random-dyadic", "100"});
  CHECK(bad.code == kExitFailure);
  CHECK(bad.out.find("FAIL") != std::string::npos);
}

TEST_CASE("usage and config errors exit with 2") {
  TempDir tmp("err");
  write(tmp.file("n12.json"), R"({"n": 12, "d": 2})");
  auto r = cli({"--config", tmp.file("n12.json"), "--out", tmp.file("o"), "generate"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("power of two") != std::string::npos);
  write(tmp.file("unknown.json"), R"({"n": 8, "colour": 1})");
  CHECK(cli({"--config", tmp.file("unknown.json"), "generate"}).code == kExitUsage);
  CHECK(cli({"audit", tmp.file("missing.json")}).code == kExitUsage);
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
}

TEST_CASE("stardisc command") {
  TempDir tmp("sd");
  write(tmp.file("p.qmcpts"), "# qmcpts v1 d=2 n=1\n0.5 0.5\n");
  auto r = cli({"stardisc", tmp.file("p.qmcpts")});
  CHECK(r.code == kExitOk);
  CHECK(first_line(r.out) == "stardisc 0.75");
  CHECK(r.out.find("method exact") != std::string::npos);
}

TEST_CASE("bench writes both tables and a constant integrand has zero error") {
  TempDir tmp("bench");
  write(tmp.file("const.txt"), "0 0 0.5 0\n");
  write(tmp.file("cfg.json"), R"({"seed": 2, "n_sweep": [8, 16], "d": 2, "oversample_k": 4,
      "repetitions": 2, "integrand": {"name": "fourier:)" + tmp.file("const.txt") + R"("}})");
  auto r = cli({"--config", tmp.file("cfg.json"), "--out", tmp.file("o"), "bench"});
  REQUIRE(r.code == kExitOk);
  const std::string raw = read_file(tmp.file("o/bench_raw.csv"));
  const std::string summary = read_file(tmp.file("o/bench_summary.csv"));
  CHECK(first_line(raw) == "method,n,d,seed,error,abs_error,stardisc");
  CHECK(first_line(summary) == "method,n,mae,iqr_lo,iqr_hi,alpha");
  // per n: wsubgtrans 2*4, iid 2*4, sobol-owen 2*4, sobol 1
  CHECK(line_count(raw) == 1 + 2 * 25);
  std::istringstream rows(raw);
  std::string line;
  std::getline(rows, line);
  while (std::getline(rows, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    REQUIRE(f.size() >= 6);
    CHECK(f[4] == "0");
  }
}

TEST_CASE("shipped configs parse") {
  std::size_t count = 0;
  for (const auto& e : fs::directory_iterator(QMCST_CONFIG_DIR)) {
    CAPTURE(e.path().string());
    const auto cfg = load_config(e.path().string());
    CHECK_NOTHROW(validate_transference(cfg));
    ++count;
  }
  CHECK(count == 4);
}
