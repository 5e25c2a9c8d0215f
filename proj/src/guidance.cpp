#include "wta/guidance.hpp"

namespace wta {

RelativeKinematics relative_kinematics(const AgentState& interceptor, const AgentState& target) {
    RelativeKinematics rk;
    rk.r = interceptor.position - target.position;
    rk.v = interceptor.velocity - target.velocity;
    rk.range = norm(rk.r);
    if (!(rk.range > kRangeEpsilon)) {
        throw CoincidentError("relative_kinematics: interceptor and target positions coincide");
    }
    rk.r_hat = rk.r * (1.0 / rk.range);
    rk.los_rate = cross(rk.r, rk.v) * (1.0 / (rk.range * rk.range));
    rk.closing_speed = -dot(rk.r, rk.v) / rk.range;
    return rk;
}

Vec3 png_command_raw(const RelativeKinematics& rk, double nav_constant) {
    if (!(nav_constant > 0.0)) throw std::invalid_argument("png_command: nav_constant must be > 0");
    // r_hat points from target to interceptor; the command turns along the
    // interceptor-to-target LOS, i.e. los_rate x (-r_hat).
    return cross(rk.r_hat, rk.los_rate) * (nav_constant * norm(rk.v));
}

Vec3 png_command(const RelativeKinematics& rk, double nav_constant, double a_max) {
    return saturate_accel(png_command_raw(rk, nav_constant), a_max);
}

}  // namespace wta
