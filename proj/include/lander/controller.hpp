// Landing phase state machine and per-phase control laws. All laws are
// proportional with saturation; every emitted command is clamped to the
// VirtualStick-style limits before it leaves this module.

#pragma once

#include <optional>
#include <string_view>

#include "lander/geometry.hpp"
#include "lander/marker_model.hpp"

namespace lander {

// Rate command limits. Throttle can only command downward motion.
constexpr double kCommandLimit = 0.2;
constexpr double kThrottleMax = 0.0;

enum class Phase {
    Takeoff,
    Search,
    Approach,
    YawAlign,
    Descent,
    LandingCommit,
    Landed,
};

std::string_view phase_name(Phase p);
std::optional<Phase> parse_phase_name(std::string_view name);

/// Five clamped rate channels. pitch: forward velocity, roll: right velocity,
/// yaw: clockwise yaw velocity, throttle: up velocity (non-positive),
/// gimbal_tilt: tilt velocity of the gimbal.
struct ControlCommand {
    double pitch = 0.0;
    double roll = 0.0;
    double yaw = 0.0;
    double throttle = 0.0;
    double gimbal_tilt = 0.0;
};

struct ControllerConfig {
    double takeoff_altitude = 1.2;       // m; hand off to search above this
    double search_yaw_rate = 0.15;       // command units; spin rate while searching
    double gimbal_sweep_period = 20.0;   // s; one full up-down sweep
    double gimbal_sweep_range = deg_to_rad(85.0);  // rad; tilt span covered by the sweep
    double nominal_gimbal_rate = 0.9;    // rad/s per command unit, used to size the sweep command
    double deadzone_radius = 0.1;        // m; planar corrections disabled inside
    double approach_gain = 0.3;          // command units per m of planar offset
    double tracking_gain_u = 0.8;        // yaw command per unit of pixel u
    double tracking_gain_v = 0.8;        // gimbal command per unit of pixel v
    double yaw_align_gain = 1.0;         // yaw command per rad of pad yaw error
    double descent_rate = 0.15;          // command units; constant downward rate in descent
    int lock_count = 3;                  // consecutive detections to confirm acquisition
    double loss_timeout = 2.0;           // s without detections before falling back to search
    double commit_altitude = 0.35;       // m; blind landing below this (per marker system)
    double altitude_gate_slack = 0.3;    // m; tolerated gap between a target up reading and own altitude
    double approach_handoff_radius = 0.5;  // m; planar distance to start yaw alignment
    double yaw_align_tolerance = deg_to_rad(10.0);

    /// Default blind-landing height for a marker system: the AprilTag variants
    /// track to low altitude, the WhyCode variants occlude earlier.
    static double default_commit_altitude(FiducialId id);
};

/// Channel-wise saturation: [-0.2, 0.2] everywhere, throttle additionally
/// capped at 0. Throws on non-finite input.
ControlCommand clamp_command(const ControlCommand& raw);

/// Search pattern: spin counterclockwise while the gimbal sweeps the tilt
/// range as a triangle wave in angle (the rate command is a square wave).
ControlCommand search_command(double t, const ControllerConfig& cfg);

struct TrackRates {
    double yaw = 0.0;
    double gimbal_tilt = 0.0;
};

/// Proportional centering of the pad in the image: yaw chases u, gimbal
/// chases v (pad below center tilts the camera down).
TrackRates track_command(const Detection& det, const ControllerConfig& cfg);

ControlCommand approach_command(const Detection& det, const ControllerConfig& cfg);
ControlCommand yaw_align_command(const Detection& det, const ControllerConfig& cfg);
ControlCommand descent_command(const Detection& det, const ControllerConfig& cfg);

/// Phase state machine. Advance with step() once per delivered detection and
/// on a periodic heartbeat; a single caller owns the instance.
class Controller {
public:
    explicit Controller(const ControllerConfig& cfg);

    struct Output {
        ControlCommand command;
        Phase phase = Phase::Takeoff;
    };

    /// One control tick. `det` is empty on heartbeat ticks; `touchdown` is the
    /// vehicle's touchdown report, only meaningful during the landing commit.
    Output step(const std::optional<Detection>& det, double altitude_estimate, double t,
                bool touchdown = false);

    Phase phase() const { return phase_; }
    const ControllerConfig& config() const { return cfg_; }

private:
    ControllerConfig cfg_;
    Phase phase_ = Phase::Takeoff;
    int consecutive_detections_ = 0;
    double last_detection_time_ = 0.0;
    bool seen_detection_ = false;
};

}  // namespace lander
