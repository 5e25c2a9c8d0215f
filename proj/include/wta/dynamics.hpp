#pragma once

#include <stdexcept>
#include <string>

#include "wta/vec3.hpp"

namespace wta {

/// Position (km) and velocity (km/s) of one interceptor or target.
struct AgentState {
    Vec3 position;
    Vec3 velocity;

    friend bool operator==(const AgentState&, const AgentState&) = default;
};

class DynamicsError : public std::runtime_error {
public:
    explicit DynamicsError(const std::string& what) : std::runtime_error(what) {}
};

/// Scales u onto the ball of radius a_max, preserving direction.
/// a_max may be +inf (no saturation).
Vec3 saturate_accel(const Vec3& u, double a_max);

/// Advances a double-integrator state by one RK4 step with u held constant.
AgentState step_state(const AgentState& s, const Vec3& u, double dt);

/// True when the position norm exceeds the state bound x_max.
bool exceeds_state_bound(const AgentState& s, double x_max);

}  // namespace wta
