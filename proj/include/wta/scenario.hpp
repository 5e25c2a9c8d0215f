#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wta/dynamics.hpp"
#include "wta/vec3.hpp"

namespace wta {

struct AssetSpec {
    int id = 0;
    Vec3 position;
    double priority = 1.0;           // (0, 1]
    double protection_radius = 1.0;  // km
    friend bool operator==(const AssetSpec&, const AssetSpec&) = default;
};

struct TargetSpec {
    int id = 0;
    AgentState initial_state;
    double threat_level = 1.0;  // (0, 1]
    Vec3 maneuver_accel;        // constant bounded input, km/s^2
    std::optional<int> intended_asset;
};

struct InterceptorSpec {
    int id = 0;
    AgentState initial_state;
    double nav_constant = 4.0;
};

struct CostWeights {
    double w_d = 1.0;
    double w_v = 1.0;
    double w_theta = 1.0;
    double w_psi = 1.0;

    friend bool operator==(const CostWeights&, const CostWeights&) = default;
};

enum class ThreatSense { literal, inverted };

/// Assignment-layer settings that travel with the scenario file.
struct ScenarioOptions {
    bool coverage = true;
    double tau_ref = 60.0;  // s, time scale of the asset-relevance metric
    double switch_penalty = 0.0;
    ThreatSense threat_sense = ThreatSense::inverted;
    bool normalize = true;

    friend bool operator==(const ScenarioOptions&, const ScenarioOptions&) = default;
};

struct Scenario {
    std::string name;
    std::vector<InterceptorSpec> interceptors;
    std::vector<TargetSpec> targets;
    std::vector<AssetSpec> assets;
    double a_max = 0.05;      // km/s^2
    double x_max = 1000.0;    // km
    double sim_dt = 0.1;      // s
    double epoch_dt = 2.0;    // s
    double t_final = 600.0;   // s
    double kill_radius = 0.1; // km
    CostWeights cost_weights;
    ScenarioOptions options;
};

class ScenarioError : public std::runtime_error {
public:
    ScenarioError(const std::string& what, std::vector<std::string> violations = {})
        : std::runtime_error(what), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Every violated invariant, in a stable order. Empty when the scenario is valid.
std::vector<std::string> validate_scenario(const Scenario& s);

/// Parses and validates a scenario file. Throws ScenarioError on malformed
/// input or on any invariant violation (all violations are listed).
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text);

std::string serialize_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

const char* to_string(ThreatSense sense);
ThreatSense threat_sense_from_string(const std::string& text);

}  // namespace wta
