#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace patchflow::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kConfigError = 2 };

/// Worker count for sweeps: PATCHFLOW_WORKERS if set and positive, else the
/// hardware concurrency.
int worker_count();

int cmd_simulate(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_invariants(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);
int cmd_oracle_test(std::uint64_t seed, int count, bool inject_ct_bug, std::ostream& out, std::ostream& err);

}  // namespace patchflow::cli
