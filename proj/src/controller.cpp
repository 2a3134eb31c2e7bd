#include "lander/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lander {

namespace {

double clamp_rate(double v) { return std::clamp(v, -kCommandLimit, kCommandLimit); }

/// Planar correction toward the pad center, zero inside the deadzone. A
/// target that places the drone at or below the pad plane is impossible in
/// flight (the usual signature of a flipped orientation seen from overhead)
/// and holds position instead of acting.
void planar_correction(const Detection& det, const ControllerConfig& cfg, ControlCommand& cmd) {
    const double dist = det.position_target.planar_norm();
    if (dist < cfg.deadzone_radius || det.position_target.z <= 0.0) {
        cmd.pitch = 0.0;
        cmd.roll = 0.0;
        return;
    }
    // position_target is drone minus pad, so the error points the other way.
    cmd.pitch = clamp_rate(cfg.approach_gain * -det.position_target.x);
    cmd.roll = clamp_rate(cfg.approach_gain * -det.position_target.y);
}

}  // namespace

std::string_view phase_name(Phase p) {
    switch (p) {
        case Phase::Takeoff: return "takeoff";
        case Phase::Search: return "search";
        case Phase::Approach: return "approach";
        case Phase::YawAlign: return "yaw-align";
        case Phase::Descent: return "descent";
        case Phase::LandingCommit: return "landing-commit";
        case Phase::Landed: return "landed";
    }
    return "unknown";
}

std::optional<Phase> parse_phase_name(std::string_view name) {
    for (const Phase p : {Phase::Takeoff, Phase::Search, Phase::Approach, Phase::YawAlign,
                          Phase::Descent, Phase::LandingCommit, Phase::Landed}) {
        if (name == phase_name(p)) return p;
    }
    return std::nullopt;
}

double ControllerConfig::default_commit_altitude(FiducialId id) {
    return is_whycode(id) ? 0.6 : 0.35;
}

ControlCommand clamp_command(const ControlCommand& raw) {
    for (const double v : {raw.pitch, raw.roll, raw.yaw, raw.throttle, raw.gimbal_tilt}) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("clamp_command: non-finite channel value");
        }
    }
    ControlCommand out;
    out.pitch = clamp_rate(raw.pitch);
    out.roll = clamp_rate(raw.roll);
    out.yaw = clamp_rate(raw.yaw);
    out.throttle = std::clamp(raw.throttle, -kCommandLimit, kThrottleMax);
    out.gimbal_tilt = clamp_rate(raw.gimbal_tilt);
    return out;
}

ControlCommand search_command(double t, const ControllerConfig& cfg) {
    ControlCommand cmd;
    // Positive yaw is clockwise, so searching spins with a negative command.
    cmd.yaw = -std::abs(cfg.search_yaw_rate);

    // Square-wave tilt rate whose integral is a triangle sweep over
    // gimbal_sweep_range: down for the first half period, up for the second.
    const double period = cfg.gimbal_sweep_period;
    const double rate_cmd = std::min(
        kCommandLimit,
        cfg.gimbal_sweep_range / (0.5 * period) / cfg.nominal_gimbal_rate);
    double phase_t = std::fmod(t, period);
    if (phase_t < 0.0) phase_t += period;
    cmd.gimbal_tilt = (phase_t < 0.5 * period) ? -rate_cmd : rate_cmd;
    return clamp_command(cmd);
}

TrackRates track_command(const Detection& det, const ControllerConfig& cfg) {
    TrackRates rates;
    rates.yaw = clamp_rate(cfg.tracking_gain_u * det.u);
    rates.gimbal_tilt = clamp_rate(-cfg.tracking_gain_v * det.v);
    return rates;
}

ControlCommand approach_command(const Detection& det, const ControllerConfig& cfg) {
    ControlCommand cmd;
    planar_correction(det, cfg, cmd);
    const TrackRates track = track_command(det, cfg);
    cmd.yaw = track.yaw;
    cmd.gimbal_tilt = track.gimbal_tilt;
    cmd.throttle = 0.0;
    return clamp_command(cmd);
}

ControlCommand yaw_align_command(const Detection& det, const ControllerConfig& cfg) {
    ControlCommand cmd;
    planar_correction(det, cfg, cmd);
    cmd.yaw = clamp_rate(cfg.yaw_align_gain * wrap_angle(det.pad_yaw));
    cmd.gimbal_tilt = track_command(det, cfg).gimbal_tilt;
    cmd.throttle = 0.0;
    return clamp_command(cmd);
}

ControlCommand descent_command(const Detection& det, const ControllerConfig& cfg) {
    ControlCommand cmd;
    planar_correction(det, cfg, cmd);
    const TrackRates track = track_command(det, cfg);
    cmd.yaw = track.yaw;
    cmd.gimbal_tilt = track.gimbal_tilt;
    cmd.throttle = -std::abs(cfg.descent_rate);
    return clamp_command(cmd);
}

Controller::Controller(const ControllerConfig& cfg) : cfg_(cfg) {}

Controller::Output Controller::step(const std::optional<Detection>& det,
                                    double altitude_estimate, double t, bool touchdown) {
    if (det) {
        ++consecutive_detections_;
        last_detection_time_ = t;
        seen_detection_ = true;
    }
    const bool detection_lost =
        seen_detection_ && (t - last_detection_time_) > cfg_.loss_timeout;
    // Phase decisions only trust detections whose up target agrees with the
    // vehicle's own altitude; a flipped orientation corrupts the target, and
    // acting on one would let a bad frame skip the drone ahead a phase.
    // Commands are not filtered this way, so flips still jolt the outputs.
    const bool det_plausible =
        det && det->position_target.z > 0.0 &&
        std::abs(det->position_target.z - altitude_estimate) <= cfg_.altitude_gate_slack;

    // Phase transitions (at most one per tick).
    switch (phase_) {
        case Phase::Takeoff:
            if (altitude_estimate >= cfg_.takeoff_altitude) phase_ = Phase::Search;
            break;
        case Phase::Search:
            if (detection_lost) consecutive_detections_ = 0;
            if (consecutive_detections_ >= cfg_.lock_count) phase_ = Phase::Approach;
            break;
        case Phase::Approach:
            if (detection_lost) {
                phase_ = Phase::Search;
                consecutive_detections_ = 0;
            } else if (det_plausible &&
                       det->position_target.planar_norm() < cfg_.approach_handoff_radius) {
                phase_ = Phase::YawAlign;
            }
            break;
        case Phase::YawAlign:
            if (detection_lost) {
                phase_ = Phase::Search;
                consecutive_detections_ = 0;
            } else if (det_plausible &&
                       std::abs(wrap_angle(det->pad_yaw)) < cfg_.yaw_align_tolerance) {
                phase_ = Phase::Descent;
            }
            break;
        case Phase::Descent:
            if (detection_lost) {
                phase_ = Phase::Search;
                consecutive_detections_ = 0;
            } else if (det_plausible && altitude_estimate <= cfg_.commit_altitude) {
                // The vehicle's own altitude decides the commit; the plausible
                // detection confirms the pad is still tracked.
                phase_ = Phase::LandingCommit;
            }
            break;
        case Phase::LandingCommit:
            if (touchdown) phase_ = Phase::Landed;
            break;
        case Phase::Landed:
            break;
    }

    Output out;
    out.phase = phase_;
    switch (phase_) {
        case Phase::Takeoff:
        case Phase::LandingCommit:
        case Phase::Landed:
            out.command = ControlCommand{};  // neutral; the flight stack owns these phases
            break;
        case Phase::Search:
            out.command = search_command(t, cfg_);
            break;
        case Phase::Approach:
            out.command = det ? approach_command(*det, cfg_) : ControlCommand{};
            break;
        case Phase::YawAlign:
            out.command = det ? yaw_align_command(*det, cfg_) : ControlCommand{};
            break;
        case Phase::Descent:
            out.command = det ? descent_command(*det, cfg_) : ControlCommand{};
            break;
    }
    return out;
}

}  // namespace lander
