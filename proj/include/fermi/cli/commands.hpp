#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fermi/cli/manifest.hpp"
#include "fermi/config.hpp"

namespace fermi::cli {

enum ExitCode : int { kOk = 0, kPartialFailure = 1, kConfigError = 2, kRuntimeFailure = 3 };

struct Context {
    std::filesystem::path out;
    unsigned jobs = 1;
    bool verbose = false;
    std::ostream* log = nullptr;   // diagnostics; std::cerr when null
    /// Executes sweep points in a shuffled order (results do not depend on it).
    std::optional<std::uint64_t> shuffle_seed;
};

/// Files a single-run command produces, computed fully in memory.
struct Products {
    std::vector<OutputFile> files;
    Json discretization;
};

Products produce_simulate(const AppConfig& cfg);
Products produce_causality(const AppConfig& cfg);
Products produce_perturb(const AppConfig& cfg);
Products produce_design(const AppConfig& cfg);

/// Runs `command` (simulate, causality, perturb, design, sweep) on a parsed
/// document and writes into ctx.out. Returns the process exit code; nothing
/// is written when the configuration is rejected.
int run_command(const std::string& command, const Json& doc, const Context& ctx);
int run_command_file(const std::string& command, const std::string& config_path, const Context& ctx);

}  // namespace fermi::cli
