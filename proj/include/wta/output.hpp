#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wta/mission.hpp"

namespace wta {

class OutputError : public std::runtime_error {
public:
    explicit OutputError(const std::string& what) : std::runtime_error(what) {}
};

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

inline constexpr const char* kTrajectoryHeader =
    "time_s,side,id,px_km,py_km,pz_km,vx_km_s,vy_km_s,vz_km_s,assigned_target";

/// One row per (time, agent) sorted by (time, side, id); assets appear once at t = 0.
std::string trajectory_csv(const MissionLog& log);
void write_trajectory_csv(const MissionLog& log, const std::filesystem::path& path);

/// Parses a trajectory CSV back into samples (values at the rendered precision).
std::vector<TrajectorySample> read_trajectory_csv(const std::filesystem::path& path);

/// Metrics plus the full event list, as JSON.
std::string metrics_json(const MissionLog& log);
void write_metrics(const MissionLog& log, const std::filesystem::path& path);

/// SVG snapshot of the engagement at `time` (clamped to the logged span).
std::string render_plot(const MissionLog& log, double time);
void emit_plot(const MissionLog& log, double time, const std::filesystem::path& path);

}  // namespace wta
