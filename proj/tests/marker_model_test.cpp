// Marker model tests: incidence geometry, the ambiguity curve, the synthesis
// pipeline gates, and the statistical and determinism contracts.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <vector>

#include "lander/marker_model.hpp"

using namespace lander;

namespace {

Pose level_pad_at(const Vec3& pos, double yaw = 0.0) {
    Pose p;
    p.position = pos;
    p.orientation = euler_to_rotation(0, 0, yaw);
    p.frame = Frame::World;
    p.body = Frame::Marker;
    return p;
}

Pose drone_at(const Vec3& pos, double yaw) {
    Pose p;
    p.position = pos;
    p.orientation = euler_to_rotation(0, 0, yaw);
    p.frame = Frame::World;
    p.body = Frame::DroneBody;
    return p;
}

SynthesisFlags all_disabled() {
    SynthesisFlags f;
    f.noise = f.ambiguity = f.loss = f.view_bias = false;
    return f;
}

}  // namespace

TEST_CASE("incidence angle endpoints") {
    const Pose pad = level_pad_at({0, 0, 0});
    // Gimbal floor leaves the boresight 5 degrees short of the nadir.
    const Pose down = gimbal_camera_pose(drone_at({0, 0, 2}, 0.7), kGimbalTiltMin);
    CHECK(incidence_angle(down, pad) == doctest::Approx(kPi / 2 + kGimbalTiltMin).epsilon(1e-9));

    Pose nadir;  // constructed directly; the gimbal cannot reach -90
    nadir.position = {0, 0, 2};
    nadir.orientation = euler_to_rotation(0, -kPi / 2, 0);
    nadir.frame = Frame::World;
    nadir.body = Frame::Camera;
    CHECK(incidence_angle(nadir, pad) < 1e-9);

    // Level forward camera over a level pad: grazing.
    const Pose level = gimbal_camera_pose(drone_at({0, 0, 1}, 0.0), 0.0);
    CHECK(incidence_angle(level, pad) == doctest::Approx(kPi / 2).epsilon(1e-9));
}

TEST_CASE("incidence angle at 45 degrees oblique") {
    const Pose cam = gimbal_camera_pose(drone_at({0, 0, 1}, 0.0), -kPi / 4);
    CHECK(incidence_angle(cam, level_pad_at({1, 0, 0})) == doctest::Approx(kPi / 4).epsilon(1e-9));
}

TEST_CASE("line-of-sight incidence follows the viewing ray, not the boresight") {
    const Pose pad = level_pad_at({0, 0, 0});
    const Pose cam = gimbal_camera_pose(drone_at({2, 0, 2}, kPi), kGimbalTiltMin);
    // Camera sits 45 degrees oblique from the pad regardless of where it points.
    CHECK(los_incidence_angle(cam, pad) == doctest::Approx(kPi / 4).epsilon(1e-9));
}

TEST_CASE("ambiguity probability endpoints and monotonicity") {
    const FiducialProfile p = FiducialProfile::builtin(FiducialId::WhyCodeOrig);
    CHECK(ambiguity_probability(0.0, p) == doctest::Approx(p.ambiguity_base).epsilon(1e-12));
    CHECK(ambiguity_probability(kPi / 2, p) ==
          doctest::Approx(0.02 * p.ambiguity_base).epsilon(1e-12));
    double prev = ambiguity_probability(0.0, p);
    for (int i = 1; i <= 100; ++i) {
        const double cur = ambiguity_probability(kPi / 2 * i / 100.0, p);
        CHECK(cur <= prev + 1e-15);
        prev = cur;
    }
}

TEST_CASE("detection interval caps at the link rate") {
    FiducialProfile p = FiducialProfile::builtin(FiducialId::WhyCodeOrig);
    p.detection_rate_hz = 30.0;
    CHECK(detection_interval(p, 7.0) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
    p.detection_rate_hz = 4.0;
    CHECK(detection_interval(p, 7.0) == doctest::Approx(0.25).epsilon(1e-12));
    p.detection_rate_hz = 7.0;
    CHECK(detection_interval(p, 7.0) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("built-in profiles preserve both precursor orderings") {
    const auto amb = [](FiducialId id) { return FiducialProfile::builtin(id).ambiguity_base; };
    CHECK(amb(FiducialId::WhyCodeEllipse) < amb(FiducialId::AprilTag48h12));
    CHECK(amb(FiducialId::AprilTag48h12) < amb(FiducialId::WhyCodeOrig));
    CHECK(amb(FiducialId::WhyCodeOrig) < amb(FiducialId::WhyCodeMulti));
    CHECK(amb(FiducialId::WhyCodeMulti) < amb(FiducialId::AprilTag24h10));

    const auto rate = [](FiducialId id) { return FiducialProfile::builtin(id).detection_rate_hz; };
    CHECK(rate(FiducialId::WhyCodeOrig) > rate(FiducialId::WhyCodeEllipse));
    CHECK(rate(FiducialId::WhyCodeEllipse) > rate(FiducialId::WhyCodeMulti));
    CHECK(rate(FiducialId::WhyCodeMulti) > rate(FiducialId::AprilTag48h12));
    CHECK(rate(FiducialId::AprilTag48h12) > rate(FiducialId::AprilTag24h10));
}

TEST_CASE("synthesis gates: field of view and ranges") {
    const FiducialProfile whycode = FiducialProfile::builtin(FiducialId::WhyCodeOrig);
    const CameraModel cam;
    Rng rng(1);

    // Pad behind the drone, camera forward: no detection.
    CHECK_FALSE(synthesize_detection(drone_at({0, 0, 1.2}, 0.0), 0.0, level_pad_at({-3, 0, 0}),
                                     whycode, cam, all_disabled(), rng, 0.0)
                    .has_value());

    // Closer than the occlusion range: no detection for a WhyCode profile.
    const Pose close_drone = drone_at({0, 0, 0.3}, 0.0);
    CHECK_FALSE(synthesize_detection(close_drone, kGimbalTiltMin, level_pad_at({0.05, 0, 0}),
                                     whycode, cam, all_disabled(), rng, 0.0)
                    .has_value());

    // Same geometry passes for an AprilTag profile (min range 0.1).
    const FiducialProfile april = FiducialProfile::builtin(FiducialId::AprilTag48h12);
    CHECK(synthesize_detection(close_drone, kGimbalTiltMin, level_pad_at({0.05, 0, 0}), april, cam,
                               all_disabled(), rng, 0.0)
              .has_value());
}

TEST_CASE("ideal synthesis recovers ground truth whenever visible") {
    const CameraModel cam;
    const FiducialProfile profile = FiducialProfile::builtin(FiducialId::AprilTag48h12);
    Rng rng(99);
    Rng sample(7);
    int checked = 0;
    double max_err = 0.0;
    while (checked < 500) {
        const Pose drone = drone_at(
            {sample.uniform(-3, 3), sample.uniform(-3, 3), sample.uniform(0.3, 3.0)},
            sample.uniform(-kPi, kPi));
        const double tilt = sample.uniform(kGimbalTiltMin, kGimbalTiltMax);
        const Pose pad = level_pad_at({sample.uniform(-3, 3), sample.uniform(-3, 3), 0},
                                      sample.uniform(-kPi, kPi));
        const auto det =
            synthesize_detection(drone, tilt, pad, profile, cam, all_disabled(), rng, 0.0);
        if (!det) continue;

        const double cam_yaw = pose_yaw(gimbal_camera_pose(drone, tilt));
        const Vec3 delta = drone.position - pad.position;
        const Vec3 expected{delta.x * std::cos(cam_yaw) + delta.y * std::sin(cam_yaw),
                            -delta.x * std::sin(cam_yaw) + delta.y * std::cos(cam_yaw), delta.z};
        max_err = std::max(max_err, (det->position_target - expected).norm());
        CHECK(std::abs(det->u) <= 1.0);
        CHECK(std::abs(det->v) <= 1.0);
        ++checked;
    }
    CHECK(max_err < 1e-6);
}

TEST_CASE("multi-marker bias displaces the target along the camera heading") {
    // Geometry with a known line-of-sight incidence: drone 45 degrees oblique.
    const double h = 1.5;
    const Pose drone = drone_at({0, 0, h}, 0.0);
    const Pose pad = level_pad_at({h, 0, 0});
    const double theta = kPi / 4;
    const double tilt = -kPi / 4;  // boresight on the pad

    const FiducialProfile multi = FiducialProfile::builtin(FiducialId::WhyCodeMulti);
    const CameraModel cam;
    Rng rng(5);

    SynthesisFlags no_bias = all_disabled();
    SynthesisFlags with_bias = all_disabled();
    with_bias.view_bias = true;

    const auto clean = synthesize_detection(drone, tilt, pad, multi, cam, no_bias, rng, 0.0);
    const auto biased = synthesize_detection(drone, tilt, pad, multi, cam, with_bias, rng, 0.0);
    REQUIRE(clean.has_value());
    REQUIRE(biased.has_value());

    const Vec3 shift = biased->position_target - clean->position_target;
    // Magnitude grows as the view gets closer to head-on; here the complement
    // of the 45 degree viewing angle sets it.
    const double expected = multi.view_bias_gain * (kPi / 2 - theta);
    CHECK(shift.z == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(shift.planar_norm() == doctest::Approx(expected).epsilon(1e-9));
    // The perceived pad slides away from the camera along its heading, so the
    // drone-relative target moves backward along level-frame north.
    CHECK(shift.x == doctest::Approx(-expected).epsilon(1e-9));
    CHECK(std::abs(shift.y) < 1e-12);
}

TEST_CASE("flip frequency tracks ambiguity probability within three sigma") {
    const FiducialProfile profile = FiducialProfile::builtin(FiducialId::AprilTag24h10);
    const CameraModel cam;
    // Fixed oblique geometry; every sample uses identical inputs.
    const Pose drone = drone_at({0, 0, 1.5}, 0.0);
    const Pose pad = level_pad_at({1.0, 0, 0});
    const double tilt = -std::atan2(1.5, 1.0);
    const double theta = incidence_angle(gimbal_camera_pose(drone, tilt), pad);
    const double p = ambiguity_probability(theta, profile);

    SynthesisFlags flags = all_disabled();
    flags.ambiguity = true;
    Rng rng(2024);
    const int n = 10000;
    int flips = 0;
    for (int i = 0; i < n; ++i) {
        const auto det = synthesize_detection(drone, tilt, pad, profile, cam, flags, rng, 0.0);
        REQUIRE(det.has_value());
        if (det->ambiguity_flipped) ++flips;
    }
    const double sigma = std::sqrt(p * (1 - p) * n);
    CHECK(std::abs(flips - p * n) <= 3.0 * sigma);
}

TEST_CASE("same seed and inputs give a bitwise identical detection stream") {
    const FiducialProfile profile = FiducialProfile::builtin(FiducialId::AprilTag24h10);
    const CameraModel cam;
    SynthesisFlags flags;  // everything enabled
    flags.sweeping = true;

    const auto run = [&](std::uint64_t seed) {
        Rng rng(seed);
        std::vector<Detection> dets;
        for (int i = 0; i < 200; ++i) {
            const Pose drone = drone_at({0.01 * i, 0, 1.2}, 0.002 * i);
            const auto det =
                synthesize_detection(drone, deg_to_rad(-25.0), level_pad_at({2.0, 0.3, 0}),
                                     profile, cam, flags, rng, 0.1 * i);
            if (det) dets.push_back(*det);
        }
        return dets;
    };

    const auto a = run(77);
    const auto b = run(77);
    REQUIRE(a.size() == b.size());
    CHECK(a.size() > 50);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::memcmp(&a[i], &b[i], sizeof(Detection)) == 0);
    }
}

TEST_CASE("profile names round trip and reject junk") {
    for (const FiducialId id : kAllFiducialIds) {
        const auto parsed = parse_fiducial_name(fiducial_name(id));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == id);
    }
    CHECK_FALSE(parse_fiducial_name("bogus").has_value());
}
