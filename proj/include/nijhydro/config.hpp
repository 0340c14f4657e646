#pragma once

#include <optional>
#include <string>

#include "nijhydro/solver.hpp"

namespace nijhydro {

/// One verification item: a residual check with a declared expectation.
struct VerifyCheck {
    std::string kind;        // torsion | symmetry | strong_symmetry | conservation_law
    bool expect_pass = true;
    std::optional<OperatorField> M;  // symmetry checks
    std::optional<ScalarField> f;    // conservation-law checks
    std::string label;
};

struct RunConfig {
    int n = 0;
    OperatorField L;
    BlockSpec spec;          // empty blocks for builtin operators
    bool builtin = false;
    std::string builtin_name;

    std::optional<Curve> curve;
    bool standard_hierarchy_requested = true;
    std::optional<ScalarField> seed_field;

    bool has_grids = false;
    std::vector<double> x_nodes;
    std::vector<std::vector<double>> t_axes;

    Tolerances tol;
    uint64_t seed = 0;
    std::string out_dir = ".";
    int threads = 1;

    int verify_probes = 20;
    std::optional<Box> probe_box;
    std::vector<VerifyCheck> checks;
};

/// Parses the JSON configuration; unknown keys are rejected (ConfigError).
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

}  // namespace nijhydro
