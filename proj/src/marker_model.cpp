#include "lander/marker_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lander {

std::string_view fiducial_name(FiducialId id) {
    switch (id) {
        case FiducialId::AprilTag48h12: return "apriltag48h12";
        case FiducialId::AprilTag24h10: return "apriltag24h10";
        case FiducialId::WhyCodeOrig: return "whycode-orig";
        case FiducialId::WhyCodeEllipse: return "whycode-ellipse";
        case FiducialId::WhyCodeMulti: return "whycode-multi";
    }
    return "unknown";
}

std::optional<FiducialId> parse_fiducial_name(std::string_view name) {
    for (const FiducialId id : kAllFiducialIds) {
        if (name == fiducial_name(id)) return id;
    }
    return std::nullopt;
}

bool is_whycode(FiducialId id) {
    return id == FiducialId::WhyCodeOrig || id == FiducialId::WhyCodeEllipse ||
           id == FiducialId::WhyCodeMulti;
}

FiducialProfile FiducialProfile::builtin(FiducialId id) {
    FiducialProfile p;
    p.id = id;
    p.baseline_loss = 0.02;
    p.max_range_m = 8.0;
    p.view_bias_gain = 0.0;
    switch (id) {
        case FiducialId::WhyCodeEllipse:
            p.ambiguity_base = 0.05;
            p.detection_rate_hz = 25.0;
            p.min_range_m = 0.5;
            p.acquisition_loss = 0.05;
            p.position_noise_sigma = 0.008;
            break;
        case FiducialId::AprilTag48h12:
            p.ambiguity_base = 0.08;
            p.detection_rate_hz = 10.0;
            p.min_range_m = 0.1;
            p.acquisition_loss = 0.30;
            p.position_noise_sigma = 0.03;
            break;
        case FiducialId::WhyCodeOrig:
            p.ambiguity_base = 0.15;
            p.detection_rate_hz = 30.0;
            p.min_range_m = 0.5;
            p.acquisition_loss = 0.05;
            p.position_noise_sigma = 0.008;
            break;
        case FiducialId::WhyCodeMulti:
            p.ambiguity_base = 0.25;
            p.detection_rate_hz = 20.0;
            p.min_range_m = 0.5;
            p.acquisition_loss = 0.05;
            p.position_noise_sigma = 0.008;
            p.view_bias_gain = 2.5;
            break;
        case FiducialId::AprilTag24h10:
            p.ambiguity_base = 0.35;
            p.detection_rate_hz = 8.0;
            p.min_range_m = 0.1;
            p.acquisition_loss = 0.30;
            p.position_noise_sigma = 0.025;
            break;
    }
    return p;
}

void FiducialProfile::validate() const {
    auto is_prob = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!is_prob(ambiguity_base) || !is_prob(acquisition_loss) || !is_prob(baseline_loss)) {
        throw std::invalid_argument("FiducialProfile: probabilities must be in [0, 1]");
    }
    if (!(min_range_m > 0.0) || !(max_range_m > min_range_m)) {
        throw std::invalid_argument("FiducialProfile: need 0 < min_range < max_range");
    }
    if (!(detection_rate_hz > 0.0)) {
        throw std::invalid_argument("FiducialProfile: detection_rate must be positive");
    }
    if (position_noise_sigma < 0.0 || view_bias_gain < 0.0) {
        throw std::invalid_argument("FiducialProfile: negative noise or bias gain");
    }
}

double incidence_angle(const Pose& camera_pose, const Pose& pad_pose) {
    const Vec3 boresight_rev = -camera_pose.orientation.rotate({1.0, 0.0, 0.0});
    const Vec3 normal = pad_pose.orientation.rotate({0.0, 0.0, 1.0});
    const double c = std::clamp(boresight_rev.dot(normal), -1.0, 1.0);
    return std::acos(c);
}

double los_incidence_angle(const Pose& camera_pose, const Pose& pad_pose) {
    const Vec3 to_camera = camera_pose.position - pad_pose.position;
    const Vec3 normal = pad_pose.orientation.rotate({0.0, 0.0, 1.0});
    if (to_camera.norm() < 1e-12) return 0.0;
    const double c = std::clamp(to_camera.normalized().dot(normal), -1.0, 1.0);
    return std::acos(c);
}

double ambiguity_probability(double theta, const FiducialProfile& profile) {
    const double t = std::clamp(theta, 0.0, kPi / 2.0);
    const double c = std::cos(t);
    const double floor = 0.02 * profile.ambiguity_base;
    return std::min(profile.ambiguity_base, (profile.ambiguity_base - floor) * c * c + floor);
}

double detection_interval(const FiducialProfile& profile, double link_rate_hz) {
    if (!(link_rate_hz > 0.0)) {
        throw std::invalid_argument("detection_interval: link rate must be positive");
    }
    return 1.0 / std::min(profile.detection_rate_hz, link_rate_hz);
}

std::optional<Detection> synthesize_detection(const Pose& true_drone, double gimbal_tilt,
                                              const Pose& pad, const FiducialProfile& profile,
                                              const CameraModel& cam, const SynthesisFlags& flags,
                                              Rng& rng, double t) {
    const Pose camera = gimbal_camera_pose(true_drone, gimbal_tilt);

    // 1-2: geometric visibility and range gates.
    const auto pixel = project(camera, pad.position, cam);
    if (!pixel) return std::nullopt;
    const double range = (pad.position - camera.position).norm();
    if (range < profile.min_range_m || range > profile.max_range_m) return std::nullopt;

    // 3: stochastic losses (glare/shadow baseline, motion blur while sweeping).
    if (flags.loss) {
        if (rng.uniform() < profile.baseline_loss) return std::nullopt;
        if (flags.sweeping && rng.uniform() < profile.acquisition_loss) return std::nullopt;
    }

    // True marker pose in the camera frame.
    const Pose marker_in_camera = compose(invert(camera), pad);
    Vec3 measured_position = marker_in_camera.position;

    // 4: position noise.
    if (flags.noise && profile.position_noise_sigma > 0.0) {
        measured_position.x += profile.position_noise_sigma * rng.normal();
        measured_position.y += profile.position_noise_sigma * rng.normal();
        measured_position.z += profile.position_noise_sigma * rng.normal();
    }

    // 5: orientation ambiguity, a sign flip of the reported roll and pitch.
    Rotation reported_orientation = marker_in_camera.orientation;
    bool flipped = false;
    if (flags.ambiguity) {
        const double theta = incidence_angle(camera, pad);
        if (rng.uniform() < ambiguity_probability(theta, profile)) {
            if (const auto e = rotation_to_euler(reported_orientation)) {
                reported_orientation = euler_to_rotation(-e->roll, -e->pitch, e->yaw);
                flipped = true;
            }
            // At the degenerate pitch the flip is undefined; the frame passes unflipped.
        }
    }

    // 6-7: level into a position target, then apply the multi-marker bias.
    Pose reported = marker_in_camera;
    reported.position = measured_position;
    reported.orientation = reported_orientation;
    const LevelTarget level = level_pad_target(reported);

    Detection det;
    det.position_target = level.position_target;
    if (flags.view_bias && profile.view_bias_gain > 0.0) {
        // The reconstructed pad center slides away from the camera along its
        // horizontal heading, worst when viewing the marker head-on.
        const double theta_los = los_incidence_angle(camera, pad);
        det.position_target.x -= profile.view_bias_gain * (kPi / 2.0 - theta_los);
    }
    det.u = pixel->u;
    det.v = pixel->v;
    det.pad_yaw = level.pad_yaw;
    det.timestamp = t;
    det.marker_id = profile.id;
    det.ambiguity_flipped = flipped;
    return det;
}

}  // namespace lander
