#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "pllranges/cli.hpp"
#include "pllranges/config.hpp"
#include "pllranges/error.hpp"

using namespace pllranges;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "pllranges");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kExample1 = R"({"pd": {"kind": "sinusoidal-half", "period": "2pi"},
  "filter": {"num": [1, 0.5], "den": [1, 0.5, 0.5]}, "loop": {"L": 8}})";

}  // namespace

TEST_CASE("config parsing") {
  const auto spec = parse_config(kExample1);
  CHECK(spec.L == 8.0);
  CHECK(spec.omega == 0.0);
  CHECK(spec.pd.kind() == PdKind::sinusoidal_half);
  CHECK(spec.tf.den_degree() == 2);
  CHECK_FALSE(spec.realization);
}

TEST_CASE("config errors carry the key path") {
  CHECK(config_error("") == "loop.L: missing loop.L");
  CHECK(config_error(R"({"loop": {"L": 8}})").rfind("pd:", 0) == 0);
  const std::string degenerate = config_error(
      R"({"pd": {"kind": "sinusoidal-half", "period": "2pi"}, "filter": {"num": [1], "den": [0, 0]}, "loop": {"L": 8}})");
  CHECK(degenerate.rfind("filter.den:", 0) == 0);
  CHECK(degenerate.find("degenerate") != std::string::npos);
  const std::string improper = config_error(
      R"({"pd": {"kind": "sinusoidal-half", "period": "2pi"}, "filter": {"num": [1, 1, 1], "den": [1, 1]}, "loop": {"L": 8}})");
  CHECK(improper.rfind("filter.num:", 0) == 0);
  CHECK(config_error(R"({"pd": {"kind": "sinusoidal-half", "period": "2pi", "phase": 1},
      "filter": {"num": [1], "den": [1]}, "loop": {"L": 8}})") == "pd.phase: unknown key");
  CHECK(config_error(R"({"pd": {"kind": "square", "period": "2pi"},
      "filter": {"num": [1], "den": [1]}, "loop": {"L": 8}})").rfind("pd.kind:", 0) == 0);
  CHECK(config_error(R"({"pd": {"kind": "sinusoidal-half", "period": "tau"},
      "filter": {"num": [1], "den": [1]}, "loop": {"L": 8}})").rfind("pd.period:", 0) == 0);
  CHECK(config_error(R"({"pd": {"kind": "sinusoidal-half", "period": "2pi"},
      "filter": {"num": [1], "den": [1]}, "loop": {"L": -1}})").rfind("loop.L:", 0) == 0);
  CHECK(config_error("{ not json").rfind("<root>:", 0) == 0);
}

TEST_CASE("bundled configs load") {
  for (const char* name : {"example1", "example2", "example3", "fig8", "fig9", "fig10", "fig11", "pi_unit_sine"})
    CHECK_NOTHROW(load_config(fixtures::config_path(name)));
  CHECK(load_config(fixtures::config_path("fig8")).realization.has_value());
}

TEST_CASE("holdin report") {
  const auto r = run({"holdin", "--config", fixtures::config_path("example2")});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["hold_in"]["intervals"].size() == 2);
  CHECK(j["loop"]["realization"]["order"] == 3);
}

TEST_CASE("lockin report") {
  const auto r = run({"lockin", "--config", fixtures::config_path("fig9"), "--band", "61.5", "--no-verify"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["lock_in"]["omega_l"].get<double>() > 63.0);
  CHECK(j["lock_in"]["omega_l"].get<double>() < 69.0);
  CHECK(j["band"]["half_width"].get<double>() == doctest::Approx(0.0110).epsilon(1e-2));
}

TEST_CASE("lyapunov-check") {
  const auto r = run({"lyapunov-check", "--config", fixtures::config_path("pi_unit_sine")});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("V non-increasing: PASS", 0) == 0);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 2);
  CHECK(run({"holdin"}).code == 2);
  CHECK(run({"holdin", "--config", "/nonexistent/file.json"}).code == 2);
  CHECK(run({"holdin", "--config", fixtures::config_path("example1"), "--grid", "3"}).code == 2);
  CHECK(run({"simulate", "--config", fixtures::config_path("example1"), "--rtol", "-1"}).code == 2);
  CHECK(run({"simulate", "--config", fixtures::config_path("example1"), "--x0", "1"}).code == 2);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("holdin") != std::string::npos);
  const auto refused = run({"portrait", "--config", fixtures::config_path("example1"), "--no-domain"});
  CHECK(refused.code == 1);
  CHECK(refused.err.rfind("refused: scalar-filter-required: ", 0) == 0);
  CHECK(std::count(refused.err.begin(), refused.err.end(), '\n') == 1);
  const auto fail = run({"simulate", "--config", fixtures::config_path("fig8"), "--x0=-0.1318", "--rtol",
                         "1e-12", "--atol", "1e-14", "--min-step", "0.05", "--max-step", "0.1"});
  CHECK(fail.code == 1);
  CHECK(fail.err.rfind("refused: integration-failure: ", 0) == 0);
}

TEST_CASE("outputs are deterministic and written to the output directory") {
  const auto dir = std::filesystem::temp_directory_path() / "pllranges_cli_test";
  std::filesystem::remove_all(dir);
  const auto a = run({"simulate", "--config", fixtures::config_path("fig10"), "--x0", "0.01", "--theta0", "1",
                      "--out", dir.string()});
  const auto b = run({"simulate", "--config", fixtures::config_path("fig10"), "--x0", "0.01", "--theta0", "1"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(std::filesystem::exists(dir / "simulate.json"));
  CHECK(std::filesystem::exists(dir / "trajectory.csv"));
  const auto h1 = run({"holdin", "--config", fixtures::config_path("example2"), "--jobs", "1"});
  const auto h4 = run({"holdin", "--config", fixtures::config_path("example2"), "--jobs", "4"});
  CHECK(h1.out == h4.out);
  const auto p = run({"portrait", "--config", fixtures::config_path("fig10"), "--raster", "8,8", "--out",
                      dir.string()});
  CHECK(p.code == 0);
  for (const char* f : {"portrait.json", "portrait.svg", "separatrices.csv", "separatrices_mirror.csv",
                        "locus.csv", "domain_plus.csv", "domain_minus.csv", "domain_intersection.csv"})
    CHECK(std::filesystem::exists(dir / f));
  std::filesystem::remove_all(dir);
}
