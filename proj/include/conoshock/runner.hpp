#ifndef CONOSHOCK_RUNNER_HPP
#define CONOSHOCK_RUNNER_HPP

#include <string>

#include "conoshock/config.hpp"
#include "conoshock/iteration.hpp"

namespace conoshock {

// Builds the full case context (background, grids, perturbation descriptors)
// from a parsed config.
CaseSetup setup_from_config(const CaseConfig& cfg);

// Subcommands: polar, background, linsolve, solve, sweep. Returns the process
// exit status; artifacts land under out_dir with a manifest.
int run_subcommand(const std::string& name, const CaseConfig& cfg,
                   const std::string& out_dir);

}  // namespace conoshock

#endif
