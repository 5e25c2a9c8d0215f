#pragma once

#include <stdexcept>
#include <string>

#include "wta/dynamics.hpp"
#include "wta/vec3.hpp"

namespace wta {

/// Below this separation (km) a pair counts as coincident; the LOS rate is undefined.
inline constexpr double kRangeEpsilon = 1e-6;

class CoincidentError : public std::runtime_error {
public:
    explicit CoincidentError(const std::string& what) : std::runtime_error(what) {}
};

/// Interceptor-relative geometry of one pair: r = p_i - p_k, v = v_i - v_k.
struct RelativeKinematics {
    Vec3 r;
    Vec3 v;
    Vec3 r_hat;
    double range = 0.0;
    Vec3 los_rate;  // (r x v) / |r|^2, rad/s
    double closing_speed = 0.0;  // -(r.v)/|r|, positive when closing
};

RelativeKinematics relative_kinematics(const AgentState& interceptor, const AgentState& target);

/// N |v| (los_rate x LOS), LOS pointing from interceptor to target; before saturation.
Vec3 png_command_raw(const RelativeKinematics& rk, double nav_constant);

/// Proportional navigation command saturated to a_max (a_max may be +inf).
Vec3 png_command(const RelativeKinematics& rk, double nav_constant, double a_max);

}  // namespace wta
