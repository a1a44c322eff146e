#include <catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include "finsler/config.hpp"

using namespace finsler;

TEST_CASE("empty config yields defaults") {
  RunConfig c = parse_config("{}");
  CHECK(c.command.empty());
  CHECK(c.family.empty());
  CHECK(c.params.n == 3);
  CHECK(c.params.lambda == 2.0);
  CHECK(c.params.eps == 1.0);
  CHECK_FALSE(c.eps_given);
  CHECK(c.p == 2.0);
  CHECK(c.alpha == 0.0);
  CHECK(c.knots.empty());
  CHECK(c.delta == 0.0);
  CHECK(c.w_scale == 1.0);
  CHECK(c.tol == 1e-8);
  CHECK(c.scan.lo == 0.1);
  CHECK(c.scan.hi == 10.0);
  CHECK(c.scan.count == 10000);
  CHECK_FALSE(c.mc.enabled);
  CHECK(c.threads == 0);
}

TEST_CASE("a full document parses into the expected fields") {
  const char* text = R"({
    "command": "quotient",
    "family": "ball",
    "preset": "mckean",
    "params": {"n": 2, "lambda": 3, "eps": 0.25, "kappa": 1.5, "h": 0.2,
               "p": 2.5, "alpha": 1},
    "knots": [1, 2, 3, 4],
    "delta": 10,
    "deltas": [10, 20],
    "w_scale": 1.05,
    "tol": 1e-9,
    "quadrature": {"method": "adaptive_simpson", "abs_tol": 1e-13,
                   "rel_tol": 1e-12, "max_subdivisions": 500},
    "grid": {"lo": 0.5, "hi": 2.0, "count": 10},
    "eps_list": [0.1, 1.0],
    "scan": {"lo": 0.2, "hi": 50, "count": 100},
    "mc": {"samples": 5000, "seed": 7},
    "threads": 2
  })";
  RunConfig c = parse_config(text);
  CHECK(c.command == "quotient");
  CHECK(c.family == "ball");
  CHECK(c.preset == "mckean");
  CHECK(c.params.n == 2);
  CHECK(c.params.lambda == 3.0);
  CHECK(c.params.eps == 0.25);
  CHECK(c.eps_given);
  CHECK(c.params.kappa == 1.5);
  CHECK(c.params.h == 0.2);
  CHECK(c.p == 2.5);
  CHECK(c.alpha == 1.0);
  REQUIRE(c.knots.size() == 4);
  CHECK(c.knots[3] == 4.0);
  CHECK(c.delta == 10.0);
  CHECK(c.deltas == std::vector<double>{10.0, 20.0});
  CHECK(c.w_scale == 1.05);
  CHECK(c.tol == 1e-9);
  CHECK(c.quad.method == QuadMethod::adaptive_simpson);
  CHECK(c.quad.abs_tol == 1e-13);
  CHECK(c.quad.max_subdivisions == 500);
  CHECK(c.grid.lo == 0.5);
  CHECK(c.grid.count == 10);
  CHECK(c.eps_list == std::vector<double>{0.1, 1.0});
  CHECK(c.scan.hi == 50.0);
  CHECK(c.mc.enabled);
  CHECK(c.mc.samples == 5000);
  CHECK(c.mc.seed == 7);
  CHECK(c.threads == 2);
}

TEST_CASE("unknown keys are rejected with their path") {
  CHECK_THROWS_WITH(parse_config(R"({"comand": "sweep"})"),
                    Catch::Matchers::ContainsSubstring("unknown key 'comand'"));
  CHECK_THROWS_WITH(
      parse_config(R"({"params": {"lamda": 2}})"),
      Catch::Matchers::ContainsSubstring("unknown key 'params.lamda'"));
  CHECK_THROWS_WITH(
      parse_config(R"({"mc": {"sample": 10}})"),
      Catch::Matchers::ContainsSubstring("unknown key 'mc.sample'"));
  CHECK_THROWS_WITH(
      parse_config(R"({"quadrature": {"tol": 1e-10}})"),
      Catch::Matchers::ContainsSubstring("unknown key 'quadrature.tol'"));
}

TEST_CASE("malformed documents raise ConfigError") {
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1,2]"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"family": "torus"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"preset": "poincare"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"params": {"n": "three"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"knots": [1, 2, 3]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"knots": [1, 2, "a", 4]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"w_scale": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"tol": -1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"quadrature": {"method": "romberg"}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"lo": 2, "hi": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"count": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"eps_list": [0.1, -0.5]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"mc": {"samples": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"threads": -1})"), ConfigError);
}

TEST_CASE("load_config reads a file and rejects missing paths") {
  const std::string path = "test_config_roundtrip.json";
  {
    std::ofstream f(path);
    f << R"({"command": "sweep", "preset": "hardy"})";
  }
  RunConfig c = load_config(path);
  CHECK(c.command == "sweep");
  CHECK(c.preset == "hardy");
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config("no_such_file.json"), ConfigError);
}
