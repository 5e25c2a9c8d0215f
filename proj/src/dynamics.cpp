#include "wta/dynamics.hpp"

#include <cmath>

namespace wta {

namespace {

// Time derivative of (p, v) under the double integrator with input u.
struct Derivative {
    Vec3 dp;
    Vec3 dv;
};

Derivative double_integrator(const AgentState& s, const Vec3& u) { return {s.velocity, u}; }

AgentState advance(const AgentState& s, const Derivative& d, double h) {
    return {s.position + d.dp * h, s.velocity + d.dv * h};
}

}  // namespace

Vec3 saturate_accel(const Vec3& u, double a_max) {
    if (!is_finite(u)) throw DynamicsError("saturate_accel: non-finite acceleration");
    if (!(a_max > 0.0)) throw DynamicsError("saturate_accel: a_max must be positive");
    const double mag = norm(u);
    if (mag <= a_max) return u;
    return u * (a_max / mag);
}

AgentState step_state(const AgentState& s, const Vec3& u, double dt) {
    if (!is_finite(s.position) || !is_finite(s.velocity)) {
        throw DynamicsError("step_state: non-finite state");
    }
    if (!is_finite(u)) throw DynamicsError("step_state: non-finite input");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DynamicsError("step_state: dt must be positive");

    const Derivative k1 = double_integrator(s, u);
    const Derivative k2 = double_integrator(advance(s, k1, 0.5 * dt), u);
    const Derivative k3 = double_integrator(advance(s, k2, 0.5 * dt), u);
    const Derivative k4 = double_integrator(advance(s, k3, dt), u);

    const double w = dt / 6.0;
    AgentState out = s;
    out.position += (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp) * w;
    out.velocity += (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv) * w;
    return out;
}

bool exceeds_state_bound(const AgentState& s, double x_max) { return norm(s.position) > x_max; }

}  // namespace wta
