#pragma once

#include <iosfwd>

#include "nijhydro/config.hpp"

namespace nijhydro {

/// Command implementations behind the CLI front end. Return values follow the
/// CLI contract: 0 ok, 1 expectation/convergence failure (config errors throw
/// ConfigError and are mapped to exit 2 by the driver).
int run_verify(const RunConfig& cfg, std::ostream& out);
int run_hierarchy(const RunConfig& cfg, const std::string& out_dir, std::ostream& out);
int run_solve(const RunConfig& cfg, const std::string& out_dir, std::ostream& out);
int run_selftest_cmd(std::ostream& out);

/// Effective thread count: the config value capped by NIJHYDRO_THREADS.
int effective_threads(int requested);

}  // namespace nijhydro
