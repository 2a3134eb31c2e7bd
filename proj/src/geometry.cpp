#include "lander/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lander {

namespace {

constexpr double kUnitTol = 1e-9;

[[noreturn]] void contract_violation(const std::string& what) {
    throw std::invalid_argument(what);
}

}  // namespace

double wrap_angle(double angle) {
    double a = std::fmod(angle, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

double Vec3::norm() const { return std::sqrt(norm_sq()); }

double Vec3::planar_norm() const { return std::hypot(x, y); }

Vec3 Vec3::normalized() const {
    const double n = norm();
    if (n < 1e-12) contract_violation("Vec3::normalized: near-zero vector");
    return {x / n, y / n, z / n};
}

bool Vec3::finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

Rotation Rotation::from_axis_angle(const Vec3& axis, double angle) {
    const Vec3 u = axis.normalized();
    const double h = 0.5 * angle;
    const double s = std::sin(h);
    return {std::cos(h), u.x * s, u.y * s, u.z * s};
}

Rotation Rotation::about_x(double angle) {
    const double h = 0.5 * angle;
    return {std::cos(h), std::sin(h), 0.0, 0.0};
}

Rotation Rotation::about_y(double angle) {
    const double h = 0.5 * angle;
    return {std::cos(h), 0.0, std::sin(h), 0.0};
}

Rotation Rotation::about_z(double angle) {
    const double h = 0.5 * angle;
    return {std::cos(h), 0.0, 0.0, std::sin(h)};
}

Rotation Rotation::operator*(const Rotation& o) const {
    return {
        w * o.w - x * o.x - y * o.y - z * o.z,
        w * o.x + x * o.w + y * o.z - z * o.y,
        w * o.y - x * o.z + y * o.w + z * o.x,
        w * o.z + x * o.y - y * o.x + z * o.w,
    };
}

Vec3 Rotation::rotate(const Vec3& v) const {
    // v' = v + 2 w (q x v) + 2 q x (q x v)
    const Vec3 q{x, y, z};
    const Vec3 t = q.cross(v) * 2.0;
    return v + t * w + q.cross(t);
}

double Rotation::norm() const {
    return std::sqrt(w * w + x * x + y * y + z * z);
}

Rotation Rotation::normalized() const {
    const double n = norm();
    if (n < 1e-12) contract_violation("Rotation::normalized: near-zero quaternion");
    return {w / n, x / n, y / n, z / n};
}

Rotation Rotation::canonicalized() const {
    const Rotation q = normalized();
    bool negate = q.w < 0.0;
    if (q.w == 0.0) {
        if (q.x != 0.0) negate = q.x < 0.0;
        else if (q.y != 0.0) negate = q.y < 0.0;
        else negate = q.z < 0.0;
    }
    return negate ? Rotation{-q.w, -q.x, -q.y, -q.z} : q;
}

Rotation euler_to_rotation(double roll, double pitch, double yaw) {
    if (!std::isfinite(roll) || !std::isfinite(pitch) || !std::isfinite(yaw)) {
        contract_violation("euler_to_rotation: non-finite angle");
    }
    // Positive yaw turns north toward east, positive pitch raises the nose,
    // positive roll drops the right side (north/east/up world, z-up bodies).
    return Rotation::about_z(yaw) * Rotation::about_y(-pitch) * Rotation::about_x(-roll);
}

std::optional<EulerAngles> rotation_to_euler(const Rotation& rot) {
    const Rotation q = rot.normalized();
    // Rotation matrix entries needed for the ZYX decomposition.
    const double r20 = 2.0 * (q.x * q.z - q.w * q.y);  // sin(pitch)
    const double r21 = 2.0 * (q.y * q.z + q.w * q.x);
    const double r22 = 1.0 - 2.0 * (q.x * q.x + q.y * q.y);
    const double r10 = 2.0 * (q.x * q.y + q.w * q.z);
    const double r00 = 1.0 - 2.0 * (q.y * q.y + q.z * q.z);

    const double s = std::clamp(r20, -1.0, 1.0);
    const double pitch = std::asin(s);
    if (kPi / 2.0 - std::abs(pitch) < 1e-6) {
        return std::nullopt;  // gimbal lock: roll/yaw split is degenerate
    }
    EulerAngles e;
    e.pitch = pitch;
    e.roll = std::atan2(-r21, r22);
    e.yaw = std::atan2(r10, r00);
    return e;
}

std::string_view frame_name(Frame f) {
    switch (f) {
        case Frame::World: return "world";
        case Frame::DroneBody: return "drone-body";
        case Frame::Camera: return "camera";
        case Frame::Marker: return "marker";
    }
    return "unknown";
}

Pose compose(const Pose& a, const Pose& b) {
    if (b.frame != a.body) {
        contract_violation(
            "compose: frame mismatch, inner pose expressed in '" +
            std::string(frame_name(b.frame)) + "' but outer body is '" +
            std::string(frame_name(a.body)) + "'");
    }
    Pose out;
    out.position = a.position + a.orientation.rotate(b.position);
    out.orientation = (a.orientation * b.orientation).normalized();
    out.frame = a.frame;
    out.body = b.body;
    return out;
}

Pose invert(const Pose& a) {
    Pose out;
    out.orientation = a.orientation.inverse();
    out.position = -out.orientation.rotate(a.position);
    out.frame = a.body;
    out.body = a.frame;
    return out;
}

Vec3 transform_point(const Pose& a, const Vec3& p) {
    return a.position + a.orientation.rotate(p);
}

double pose_yaw(const Pose& p) {
    const Vec3 fwd = p.orientation.rotate({1.0, 0.0, 0.0});
    if (fwd.planar_norm() < 1e-12) {
        contract_violation("pose_yaw: forward axis is vertical");
    }
    return std::atan2(fwd.y, fwd.x);
}

std::optional<PixelCoords> project(const Pose& camera_pose, const Vec3& target,
                                   const CameraModel& cam) {
    if (!target.finite()) contract_violation("project: non-finite target");
    if (cam.hfov_half <= 0.0 || cam.hfov_half >= kPi / 2.0 ||
        cam.vfov_half <= 0.0 || cam.vfov_half >= kPi / 2.0 || cam.max_range <= 0.0) {
        contract_violation("project: invalid camera model");
    }
    const Vec3 p = invert(camera_pose).orientation.rotate(target - camera_pose.position);
    if (p.x <= 0.0) return std::nullopt;  // behind the image plane
    if (p.norm() > cam.max_range) return std::nullopt;

    PixelCoords px;
    px.u = (p.y / p.x) / std::tan(cam.hfov_half);
    px.v = (-p.z / p.x) / std::tan(cam.vfov_half);
    if (std::abs(px.u) > 1.0 || std::abs(px.v) > 1.0) return std::nullopt;
    return px;
}

Pose gimbal_camera_pose(const Pose& drone_pose, double gimbal_tilt) {
    if (!(gimbal_tilt >= kGimbalTiltMin - kUnitTol && gimbal_tilt <= kGimbalTiltMax + kUnitTol)) {
        contract_violation("gimbal_camera_pose: tilt outside mechanical range");
    }
    Pose cam;
    cam.position = drone_pose.position;
    cam.orientation = euler_to_rotation(0.0, gimbal_tilt, pose_yaw(drone_pose));
    cam.frame = drone_pose.frame;
    cam.body = Frame::Camera;
    return cam;
}

LevelTarget level_pad_target(const Pose& marker_pose_in_camera) {
    const Rotation marker_to_camera = marker_pose_in_camera.orientation.normalized();
    const Rotation camera_to_marker = marker_to_camera.inverse();

    // Camera position and axes expressed in the (assumed level) marker frame.
    const Vec3 camera_in_marker = -camera_to_marker.rotate(marker_pose_in_camera.position);
    const Vec3 boresight = camera_to_marker.rotate({1.0, 0.0, 0.0});
    Vec3 heading{boresight.x, boresight.y, 0.0};
    if (heading.planar_norm() < 1e-9) {
        // Boresight straight up or down: the camera's own up axis carries the heading.
        const Vec3 cam_up = camera_to_marker.rotate({0.0, 0.0, 1.0});
        heading = {cam_up.x, cam_up.y, 0.0};
    }
    if (heading.planar_norm() < 1e-9) {
        heading = {1.0, 0.0, 0.0};  // fully degenerate; fixed fallback keeps output deterministic
    }
    const Vec3 north = heading.normalized();
    const Vec3 east{-north.y, north.x, 0.0};  // up x north

    LevelTarget out;
    out.position_target = {camera_in_marker.dot(north), camera_in_marker.dot(east),
                           camera_in_marker.z};
    // Heading of the pad's forward axis in the same level frame.
    out.pad_yaw = std::atan2(east.x, north.x);
    return out;
}

}  // namespace lander
