#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wta/backend.hpp"
#include "wta/mission.hpp"

namespace wta {

enum ExitCode : int { kExitOk = 0, kExitBreach = 1, kExitUsage = 2, kExitInternal = 3 };

class UsageError : public std::runtime_error {
public:
    UsageError(const std::string& what, bool help_requested = false)
        : std::runtime_error(what), help_requested_(help_requested) {}
    bool help_requested() const { return help_requested_; }

private:
    bool help_requested_;
};

struct RunConfig {
    std::string command;  // "run" or "replay"
    std::filesystem::path scenario_path;
    AssignerKind assigner = AssignerKind::hungarian;
    BackendConfig backend;
    std::uint64_t seed = 0;
    std::optional<double> epoch_dt;
    std::filesystem::path output_dir = "out";
    bool emit_plots = false;
    std::optional<double> switch_penalty;
    std::optional<bool> coverage;
    std::optional<ThreatSense> threat_sense;
    std::filesystem::path replay_log;
};

/// args excludes the program name. Throws UsageError with the usage text.
RunConfig parse_args(const std::vector<std::string>& args);

/// Applies the command-line overrides to a loaded scenario.
Scenario apply_overrides(Scenario scenario, const RunConfig& config);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wta
