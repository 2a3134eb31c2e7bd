// Drone and gimbal dynamics responding to velocity-setpoint commands, plus
// the video-link latency pipeline that delays and rate-limits detections on
// their way to the controller.

#pragma once

#include <deque>
#include <optional>

#include "lander/controller.hpp"
#include "lander/geometry.hpp"
#include "lander/marker_model.hpp"
#include "lander/rng.hpp"

namespace lander {

struct VehicleParams {
    double velocity_tau = 0.4;        // s; first-order lag of the velocity response
    double max_speed = 0.32;          // m/s per unit command (VirtualStick full scale)
    double yaw_rate_per_unit = 0.85;  // rad/s per unit yaw command
    double gimbal_rate_per_unit = 0.9;  // rad/s per unit gimbal command
    double touchdown_altitude = 0.02; // m; below this the vehicle is on the ground
    double commit_descent_speed = 0.3;  // m/s; blind descent rate during landing commit
    double takeoff_climb_rate = 0.4;  // m/s; automated climb rate during takeoff
    double wind_bias_north = 0.0;     // m/s; constant disturbance hook
    double wind_bias_east = 0.0;
};

/// Who owns the vertical channel. Takeoff and the final blind descent are
/// automated by the flight stack rather than flown through rate commands.
enum class FlightMode { Normal, AutoTakeoff, CommitDescent };

struct VehicleState {
    Vec3 position;            // world N/E/Up, m
    Vec3 velocity;            // world, m/s
    double yaw = 0.0;         // rad, clockwise positive
    double yaw_rate = 0.0;    // rad/s
    double gimbal_tilt = 0.0; // rad, within the mechanical range
    bool airborne = false;
    FlightMode mode = FlightMode::Normal;
    double t = 0.0;

    Pose pose() const;  // world <- drone-body
};

/// Advances the vehicle by dt under an already-clamped command.
VehicleState step_dynamics(const VehicleState& s, const ControlCommand& cmd, double dt,
                           const VehicleParams& p);

struct LandingOutcome {
    bool on_pad = false;
    double radius = 0.0;  // horizontal distance to the pad center at touchdown, m
};

/// Reports the landing outcome once altitude reaches the touchdown threshold,
/// empty while still in the air. The pad boundary is inclusive.
std::optional<LandingOutcome> touchdown_check(const VehicleState& s, const Pose& pad,
                                              double pad_extent, const VehicleParams& p);

/// FIFO model of the frame-offload link: each detection is released after a
/// delay sampled uniformly from [min_delay, max_delay], in capture order, and
/// never faster than one per frame_interval (the serial processing chain).
class LatencyPipeline {
public:
    LatencyPipeline(double min_delay, double max_delay, double frame_interval);

    void push(const Detection& det, double t, Rng& rng);
    /// Oldest detection whose release time has passed, if any.
    std::optional<Detection> pop(double t);

    std::size_t pending() const { return queue_.size(); }
    double min_delay() const { return min_delay_; }
    double max_delay() const { return max_delay_; }

private:
    struct Entry {
        Detection det;
        double release_time;
    };
    double min_delay_;
    double max_delay_;
    double frame_interval_;
    double last_release_ = -1e18;
    std::deque<Entry> queue_;
};

}  // namespace lander
