// Synthesizes detections from ground truth according to a per-fiducial-system
// profile, reproducing each system's documented failure modes: orientation
// ambiguity (Euler sign flips, worst at normal incidence), close-range
// occlusion, acquisition loss under camera motion, position noise, and the
// view-angle-dependent position bias of the multi-marker variant.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "lander/geometry.hpp"
#include "lander/rng.hpp"

namespace lander {

enum class FiducialId {
    AprilTag48h12,
    AprilTag24h10,
    WhyCodeOrig,
    WhyCodeEllipse,
    WhyCodeMulti,
};

constexpr std::array<FiducialId, 5> kAllFiducialIds = {
    FiducialId::AprilTag48h12, FiducialId::AprilTag24h10, FiducialId::WhyCodeOrig,
    FiducialId::WhyCodeEllipse, FiducialId::WhyCodeMulti,
};

std::string_view fiducial_name(FiducialId id);
std::optional<FiducialId> parse_fiducial_name(std::string_view name);
bool is_whycode(FiducialId id);

struct FiducialProfile {
    FiducialId id = FiducialId::AprilTag48h12;
    double ambiguity_base = 0.08;      // flip probability at normal incidence
    double detection_rate_hz = 10.0;   // detector output rate, before link capping
    double min_range_m = 0.1;          // closer than this the marker occludes the view
    double max_range_m = 8.0;
    double acquisition_loss = 0.3;     // miss probability while the search sweep is moving
    double baseline_loss = 0.02;       // glare/shadow misses, always on
    double position_noise_sigma = 0.01;  // m, per axis on the measured marker position
    double view_bias_gain = 0.0;       // m per rad of viewing-angle complement (multi only)

    static FiducialProfile builtin(FiducialId id);
    void validate() const;  // throws std::invalid_argument on bad values
};

/// What the perception stack hands the controller for one frame.
struct Detection {
    Vec3 position_target;        // drone relative to pad center, level N/E/Up frame, m
    double u = 0.0;              // normalized pixel position of the pad, [-1, 1]
    double v = 0.0;
    double pad_yaw = 0.0;        // pad heading relative to camera heading, rad
    double timestamp = 0.0;      // capture time, s
    FiducialId marker_id = FiducialId::AprilTag48h12;
    bool ambiguity_flipped = false;  // diagnostic: Euler signs were flipped this frame
};

/// Angle between the reversed camera boresight and the pad normal.
/// 0 means the camera is exactly normal to the marker (looking straight at it).
double incidence_angle(const Pose& camera_pose, const Pose& pad_pose);

/// Same angle measured along the camera-to-marker line of sight instead of
/// the boresight. Differs from incidence_angle only when the marker sits
/// off-center in the image.
double los_incidence_angle(const Pose& camera_pose, const Pose& pad_pose);

/// Flip probability at incidence theta: ambiguity_base * cos^2(theta) plus a
/// floor of 0.02 * ambiguity_base, monotone non-increasing on [0, pi/2].
double ambiguity_probability(double theta, const FiducialProfile& profile);

/// Effective seconds between detections given the video link rate.
double detection_interval(const FiducialProfile& profile, double link_rate_hz);

struct SynthesisFlags {
    bool sweeping = false;   // search sweep in motion (enables acquisition loss)
    bool noise = true;
    bool ambiguity = true;
    bool loss = true;
    bool view_bias = true;
};

/// Produces the detection a fiducial system would report for the current
/// ground truth, or nothing when the marker is not detected this frame.
///
/// Pipeline: geometric visibility, range gates, stochastic loss, position
/// noise, probabilistic Euler sign flip of the reported orientation, leveling
/// into a position target, and the multi-marker view bias.
std::optional<Detection> synthesize_detection(const Pose& true_drone, double gimbal_tilt,
                                              const Pose& pad, const FiducialProfile& profile,
                                              const CameraModel& cam, const SynthesisFlags& flags,
                                              Rng& rng, double t);

}  // namespace lander
