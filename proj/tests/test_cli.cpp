#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nijhydro/cli.hpp"
#include "nijhydro/selftest.hpp"

using namespace nijhydro;

namespace {

const char* kPairConfig = R"({
  "operator": {"blocks": [{"type": "jordan", "size": 2}, {"type": "jordan", "size": 2}]},
  "curve": {"components": ["1", "x", "1", "1 + x"], "variable": "x",
            "domain": [-0.5, 0.5], "order": 4},
  "hierarchy": "standard",
  "grids": {"x": {"min": -0.04, "max": 0.04, "count": 3},
            "t": {"min": -0.01, "max": 0.01, "count": 3}},
  "seed": 0
})";

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("well-formed configs load") {
        RunConfig cfg = parse_config_text(kPairConfig);
        CHECK(cfg.n == 4);
        CHECK(cfg.spec.blocks.size() == 2);
        CHECK(cfg.t_axes.size() == 3);
        CHECK(cfg.x_nodes.size() == 3);
        CHECK(cfg.curve.has_value());
        CHECK(cfg.standard_hierarchy_requested);
    }
    SUBCASE("unknown keys are rejected") {
        CHECK_THROWS_AS(parse_config_text(R"({"operator": {"blocks": [{"type": "jordan",
            "size": 2}]}, "unknown_top": 1})"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_text(R"({"operator": {"blocks": [{"type": "jordan",
            "size": 2, "what": 3}]}})"),
                        ConfigError);
    }
    SUBCASE("malformed json and expressions are rejected") {
        CHECK_THROWS_AS(parse_config_text("{"), ConfigError);
        CHECK_THROWS_AS(parse_config_text(R"({"operator": {"blocks":
            [{"type": "diagonal", "lambda": "s +"}]}})"),
                        ConfigError);
    }
    SUBCASE("curve domain must contain the base parameter") {
        CHECK_THROWS_AS(parse_config_text(R"({"operator": {"blocks": [{"type": "jordan",
            "size": 2}]}, "curve": {"components": ["1", "x"], "variable": "x",
            "domain": [0.5, 1.0]}})"),
                        ConfigError);
    }
    SUBCASE("per-axis t grids must match the dimension") {
        CHECK_THROWS_AS(parse_config_text(R"({"operator": {"blocks": [{"type": "jordan",
            "size": 2}]}, "grids": {"x": {"min": 0, "max": 1, "count": 3},
            "t": [{"min": 0, "max": 1, "count": 3}, {"min": 0, "max": 1, "count": 3}]}})"),
                        ConfigError);
    }
    SUBCASE("builtin operators") {
        RunConfig cfg = parse_config_text(R"({"operator": {"builtin": "counterexample2"}})");
        CHECK(cfg.builtin);
        CHECK(cfg.n == 3);
        CHECK_THROWS_AS(parse_config_text(R"({"operator": {"builtin": "nope"}})"), ConfigError);
    }
}

TEST_CASE("run_verify expectations and exit codes") {
    SUBCASE("passing expectations give 0") {
        RunConfig cfg = parse_config_text(R"({
          "operator": {"blocks": [{"type": "jordan", "size": 3}]},
          "verify": {"probes": 10, "checks": [{"check": "torsion", "expect": "pass"}]}})");
        std::ostringstream out;
        CHECK(run_verify(cfg, out) == 0);
        CHECK(out.str().find("pass") != std::string::npos);
    }
    SUBCASE("violated expectations give 1") {
        RunConfig cfg = parse_config_text(R"({
          "operator": {"blocks": [{"type": "jordan", "size": 3}]},
          "verify": {"probes": 10, "checks": [{"check": "torsion", "expect": "fail"}]}})");
        std::ostringstream out;
        CHECK(run_verify(cfg, out) == 1);
    }
    SUBCASE("verify without checks is a config error") {
        RunConfig cfg = parse_config_text(R"({"operator": {"blocks": [{"type": "jordan",
            "size": 2}]}})");
        std::ostringstream out;
        CHECK_THROWS_AS(run_verify(cfg, out), ConfigError);
    }
}

TEST_CASE("run_solve error paths") {
    SUBCASE("non-cyclic curve velocity names the offending x") {
        RunConfig cfg = parse_config_text(R"({
          "operator": {"blocks": [{"type": "diagonal", "lambda": "s"},
                                  {"type": "diagonal", "lambda": "s"}]},
          "curve": {"components": ["1 + x", "2"], "variable": "x", "domain": [-0.1, 0.1],
                    "order": 3},
          "hierarchy": "standard",
          "grids": {"x": {"min": -0.01, "max": 0.01, "count": 3},
                    "t": {"min": -0.01, "max": 0.01, "count": 3}}})");
        std::ostringstream out;
        CHECK(run_solve(cfg, "/tmp/nijhydro-test-noncyclic", out) == 1);
        CHECK(out.str().find("not cyclic") != std::string::npos);
        CHECK(out.str().find("x = -0.1") != std::string::npos);
        CHECK(out.str().find("cyclicity hypothesis") != std::string::npos);
    }
    SUBCASE("missing sections are config errors") {
        RunConfig cfg = parse_config_text(R"({"operator": {"blocks": [{"type": "jordan",
            "size": 2}]}})");
        std::ostringstream out;
        CHECK_THROWS_AS(run_solve(cfg, "/tmp/nowhere", out), ConfigError);
    }
}

TEST_CASE("run_solve writes deterministic CSV on a small grid") {
    RunConfig cfg = parse_config_text(kPairConfig);
    std::ostringstream out1, out2;
    REQUIRE(run_solve(cfg, "/tmp/nijhydro-test-a", out1) == 0);
    REQUIRE(run_solve(cfg, "/tmp/nijhydro-test-b", out2) == 0);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    const std::string a = slurp("/tmp/nijhydro-test-a/solution.csv");
    const std::string b = slurp("/tmp/nijhydro-test-b/solution.csv");
    REQUIRE(!a.empty());
    CHECK(a == b);
    CHECK(a.find("t1,t2,t3,x,u1,u2,u3,u4,converged") == 0);
}

TEST_CASE("seeded hierarchies drive the hierarchy and solve commands") {
    const char* cfg_text = R"({
      "operator": {"blocks": [{"type": "diagonal", "lambda": "s"},
                              {"type": "diagonal", "lambda": "s"}]},
      "curve": {"components": ["1 + x", "2 + x"], "variable": "x", "domain": [-0.7, 0.7],
                "order": 3},
      "hierarchy": {"seed": "u1 + u2"},
      "grids": {"x": {"min": -0.02, "max": 0.02, "count": 3},
                "t": {"min": -0.005, "max": 0.005, "count": 3}},
      "verify": {"probes": 5, "box": {"min": [0.9, 1.9], "max": [1.1, 2.1]},
                 "checks": [{"check": "torsion", "expect": "pass"}]}})";
    RunConfig cfg = parse_config_text(cfg_text);
    CHECK_FALSE(cfg.standard_hierarchy_requested);
    std::ostringstream out;
    CHECK(run_hierarchy(cfg, "/tmp/nijhydro-test-seedh", out) == 0);
    std::ostringstream out2;
    CHECK(run_solve(cfg, "/tmp/nijhydro-test-seedsolve", out2) == 0);
}

TEST_CASE("selftest corpus passes") {
    std::ostringstream out;
    CHECK(run_selftest_cmd(out) == 0);
    CHECK(out.str().find("all checks passed") != std::string::npos);
}

TEST_CASE("thread cap honors the environment") {
    ::setenv("NIJHYDRO_THREADS", "2", 1);
    CHECK(effective_threads(8) == 2);
    CHECK(effective_threads(1) == 1);
    ::unsetenv("NIJHYDRO_THREADS");
    CHECK(effective_threads(8) == 8);
}
