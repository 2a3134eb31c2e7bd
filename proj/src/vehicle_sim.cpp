#include "lander/vehicle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lander {

Pose VehicleState::pose() const {
    Pose p;
    p.position = position;
    p.orientation = euler_to_rotation(0.0, 0.0, yaw);
    p.frame = Frame::World;
    p.body = Frame::DroneBody;
    return p;
}

VehicleState step_dynamics(const VehicleState& s, const ControlCommand& cmd, double dt,
                           const VehicleParams& p) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_dynamics: dt must be positive");

    VehicleState n = s;
    n.t = s.t + dt;

    Vec3 setpoint;  // world-frame velocity setpoint
    bool direct_vertical = false;
    double direct_vz = 0.0;

    switch (s.mode) {
        case FlightMode::AutoTakeoff:
            n.airborne = true;
            direct_vertical = true;
            direct_vz = p.takeoff_climb_rate;
            n.yaw_rate = 0.0;
            break;
        case FlightMode::CommitDescent:
            direct_vertical = true;
            direct_vz = -p.commit_descent_speed;
            n.yaw_rate = 0.0;
            break;
        case FlightMode::Normal: {
            if (!s.airborne) return n;  // grounded: commands have no effect
            const double c = std::cos(s.yaw);
            const double sn = std::sin(s.yaw);
            const double fwd = cmd.pitch * p.max_speed;
            const double right = cmd.roll * p.max_speed;
            setpoint.x = fwd * c - right * sn;
            setpoint.y = fwd * sn + right * c;
            setpoint.z = cmd.throttle * p.max_speed;
            n.yaw_rate = cmd.yaw * p.yaw_rate_per_unit;
            n.gimbal_tilt = std::clamp(
                s.gimbal_tilt + cmd.gimbal_tilt * p.gimbal_rate_per_unit * dt,
                kGimbalTiltMin, kGimbalTiltMax);
            break;
        }
    }
    setpoint.x += p.wind_bias_north;
    setpoint.y += p.wind_bias_east;

    const double alpha = 1.0 - std::exp(-dt / p.velocity_tau);
    n.velocity = s.velocity + (setpoint - s.velocity) * alpha;
    if (s.mode == FlightMode::CommitDescent) {
        // Blind descent: no planar control, the vehicle keeps whatever
        // horizontal velocity it entered the commit with.
        n.velocity.x = s.velocity.x;
        n.velocity.y = s.velocity.y;
    }
    if (direct_vertical) n.velocity.z = direct_vz;  // automated vertical channel

    n.position = s.position + n.velocity * dt;
    n.yaw = wrap_angle(s.yaw + n.yaw_rate * dt);
    if (n.position.z <= 0.0) {
        n.position.z = 0.0;
        n.velocity.z = std::max(0.0, n.velocity.z);
    }
    return n;
}

std::optional<LandingOutcome> touchdown_check(const VehicleState& s, const Pose& pad,
                                              double pad_extent, const VehicleParams& p) {
    const double altitude = s.position.z - pad.position.z;
    if (altitude > p.touchdown_altitude) return std::nullopt;
    LandingOutcome out;
    out.radius = (s.position - pad.position).planar_norm();
    out.on_pad = out.radius <= pad_extent;
    return out;
}

LatencyPipeline::LatencyPipeline(double min_delay, double max_delay, double frame_interval)
    : min_delay_(min_delay), max_delay_(max_delay), frame_interval_(frame_interval) {
    if (min_delay < 0.0 || max_delay < min_delay || !(frame_interval > 0.0)) {
        throw std::invalid_argument("LatencyPipeline: invalid delay or interval");
    }
}

void LatencyPipeline::push(const Detection& det, double t, Rng& rng) {
    const double delay = rng.uniform(min_delay_, max_delay_);
    // Capture order is preserved and outputs are spaced at least one frame
    // interval apart, like the serial detect-and-transmit chain they model.
    const double release = std::max(t + delay, last_release_ + frame_interval_);
    last_release_ = release;
    queue_.push_back({det, release});
}

std::optional<Detection> LatencyPipeline::pop(double t) {
    if (queue_.empty() || queue_.front().release_time > t) return std::nullopt;
    Detection det = queue_.front().det;
    queue_.pop_front();
    return det;
}

}  // namespace lander
