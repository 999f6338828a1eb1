#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "dualact/scenario.hpp"

namespace dualact {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  int threads = 1;
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
};

/// Subcommand engines. Each writes report.json (byte-stable for a fixed
/// scenario and seed) plus its own artifacts into out_dir, and meta.json
/// with the non-reproducible run metadata (timestamp, wall time).
/// Return value is the process exit status: 0 when every asserted check
/// passed, 1 otherwise. Input problems (unreadable files, bad scenarios)
/// throw; the CLI maps those to exit status 2.

int run_solve(const Scenario& scenario, const RunOptions& options);
int run_conjugate_check(const Scenario& scenario, const RunOptions& options);
int run_verify(const Scenario& scenario, const RunOptions& options,
               const std::filesystem::path& field_csv);
int run_conserve(const Scenario& scenario, const RunOptions& options,
                 const std::optional<std::filesystem::path>& field_csv);
int run_sweep(const Scenario& scenario, const RunOptions& options);

}  // namespace dualact
