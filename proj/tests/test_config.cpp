#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>

#include "schr/config.hpp"

using namespace schr;
using nlohmann::json;

TEST_CASE("dense system literal with complex entries") {
  const json j = json::parse(R"({
    "dim": 2, "A": [[-1, [0, 1]], [[0, 1], -2]], "b": [1, 0], "u0": [[1, 1], 0], "T": 0.5
  })");
  const DynamicalSystem sys = system_from_json(j);
  CHECK(sys.dim() == 2);
  CHECK(sys.a(0.0)(0, 1) == cplx(0.0, 1.0));
  CHECK(sys.u0()(0) == cplx(1.0, 1.0));
  CHECK(sys.horizon() == 0.5);
  CHECK(!sys.time_dependent());
}

TEST_CASE("modulated system is time dependent") {
  const json j = json::parse(R"({"A": [[-1]], "A1": [[-0.5]], "omega": 2, "u0": [1], "T": 1})");
  const DynamicalSystem sys = system_from_json(j);
  CHECK(sys.time_dependent());
  CHECK(sys.a(0.25)(0, 0).real() == doctest::Approx(-1.0 - 0.5 * std::sin(0.5)));
}

TEST_CASE("builtin generators") {
  const DynamicalSystem d = system_from_json(json::parse(R"({"builtin": "diag", "values": [-1, -2, -3]})"));
  CHECK(d.dim() == 3);
  CHECK(d.a(0.0)(2, 2) == cplx(-3.0, 0.0));
  const DynamicalSystem cd =
      system_from_json(json::parse(R"({"builtin": "convection-diffusion-1d", "n": 8, "diffusion": 0.05})"));
  CHECK(cd.dim() == 8);
  CHECK(std::abs(cd.u0()(0) - std::sin(std::numbers::pi / 9.0)) < 1e-15);
  CHECK(system_from_json(json::parse(R"({"builtin": "std2"})")).dim() == 2);
  CHECK(resolve_system("scalar-td").time_dependent());
}

TEST_CASE("invalid systems are configuration errors") {
  CHECK_THROWS_AS(system_from_json(json::parse(R"({"A": [[-1]], "u0": [1], "T": 1, "extra": 1})")), ConfigError);
  CHECK_THROWS_AS(system_from_json(json::parse(R"({"A": [[-1, 0]], "u0": [1], "T": 1})")), ConfigError);
  CHECK_THROWS_AS(system_from_json(json::parse(R"({"A": [[-1]], "u0": [1, 2], "T": 1})")), ConfigError);
  CHECK_THROWS_AS(system_from_json(json::parse(R"({"A": [["x"]], "u0": [1], "T": 1})")), ConfigError);
  CHECK_THROWS_AS(system_from_json(json::parse(R"({"A": [[1]], "u0": [1], "T": 1})")), ConfigError);
  CHECK_THROWS_AS(system_from_json(json::parse(R"({"builtin": "nope"})")), ConfigError);
  CHECK_THROWS_AS(system_from_json(json::parse(R"({"builtin": "diag"})")), ConfigError);
  CHECK_THROWS_AS(resolve_system("/no/such/system.json"), ConfigError);
}

TEST_CASE("run configuration") {
  const RunConfig c = run_config_from_json(json::parse(R"({
    "system": "scalar-decay", "psi": "cutoff:d=2", "eps": 1e-4, "np": 256,
    "lift": {"enabled": true, "ns": 128}, "threads": 2
  })"));
  CHECK(c.system == "scalar-decay");
  CHECK(c.psi == "cutoff:d=2");
  CHECK(c.n_p.value() == 256);
  CHECK(c.force_lift);
  const PipelineOptions o = pipeline_options(c, 1.0);
  REQUIRE(o.lift.has_value());
  CHECK(o.lift->n_s == 128);
  CHECK(o.threads == 2);
  const RunConfig back = run_config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));

  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"eps": 2})")), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"bogus": 1})")), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"np": "many"})")), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"lift": {"x": 1}})")), ConfigError);
}

TEST_CASE("config files") {
  const auto dir = std::filesystem::temp_directory_path() / "schr_config_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "sys.json") << R"({"A": [[-1]], "b": [1], "u0": [0], "T": 1})";
  std::ofstream(dir / "run.json") << R"({"system": "sys.json", "eps": 1e-5})";
  const RunConfig c = load_run_config((dir / "run.json").string());
  const DynamicalSystem sys = build_system(c);
  CHECK(sys.dim() == 1);
  CHECK(c.epsilon == 1e-5);
  try {
    load_run_config((dir / "missing.json").string());
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("missing.json") != std::string::npos);
  }
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK_THROWS_AS(load_run_config((dir / "broken.json").string()), ConfigError);
  std::filesystem::remove_all(dir);
}
