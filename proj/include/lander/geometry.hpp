// Core geometry for the landing stack: frames, rotations, pinhole projection,
// gimbal pointing, and the level-pad transform that turns a marker pose seen
// by the camera into a position target for the controller.
//
// Conventions (used consistently across the library):
//   * World frame is North/East/Up, right handed.
//   * Body frames are x forward, y right, z up.
//   * Euler angles are ZYX (yaw, pitch, roll); positive yaw is clockwise
//     seen from above (north toward east), positive pitch is nose up,
//     positive roll is right side down.
//   * Camera boresight is body +x; image u grows to the right (+y),
//     image v grows downward (-z).

#pragma once

#include <numbers>
#include <optional>
#include <string_view>

namespace lander {

constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Mechanical tilt range of the gimbal: 0 is straight forward, negative is down.
constexpr double kGimbalTiltMin = deg_to_rad(-85.0);
constexpr double kGimbalTiltMax = 0.0;

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const;
    double norm_sq() const { return dot(*this); }
    /// Norm of the horizontal (x, y) part.
    double planar_norm() const;
    Vec3 normalized() const;  // throws on near-zero norm
    bool finite() const;
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Unit quaternion. Canonical (serialized) form keeps w >= 0; the double
/// cover means q and -q are the same rotation.
struct Rotation {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    static Rotation identity() { return {}; }
    static Rotation from_axis_angle(const Vec3& axis, double angle);
    static Rotation about_x(double angle);
    static Rotation about_y(double angle);
    static Rotation about_z(double angle);

    Rotation operator*(const Rotation& o) const;
    Rotation conjugate() const { return {w, -x, -y, -z}; }
    /// Inverse, assuming unit norm.
    Rotation inverse() const { return conjugate(); }

    Vec3 rotate(const Vec3& v) const;
    double norm() const;
    Rotation normalized() const;
    /// Sign-fixed representative with w >= 0 (ties broken on x, y, z).
    Rotation canonicalized() const;
};

struct EulerAngles {
    double roll = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;
};

/// Builds a rotation from ZYX Euler angles (applied yaw, then pitch, then roll).
Rotation euler_to_rotation(double roll, double pitch, double yaw);
inline Rotation euler_to_rotation(const EulerAngles& e) {
    return euler_to_rotation(e.roll, e.pitch, e.yaw);
}

/// Inverse of euler_to_rotation. Empty when |pitch| is within 1e-6 of pi/2,
/// where the decomposition degenerates (gimbal lock).
std::optional<EulerAngles> rotation_to_euler(const Rotation& r);

enum class Frame { World, DroneBody, Camera, Marker };

std::string_view frame_name(Frame f);

/// Rigid transform locating `body` relative to `frame`: position is the body
/// origin expressed in `frame`, orientation maps body coordinates into
/// `frame` coordinates.
struct Pose {
    Vec3 position;
    Rotation orientation;
    Frame frame = Frame::World;
    Frame body = Frame::DroneBody;
};

/// Chains a onto b; requires b to be expressed in a's body frame.
Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& a);
/// Maps a point from a's body coordinates into a's parent frame.
Vec3 transform_point(const Pose& a, const Vec3& p);

/// Yaw of the pose's forward axis projected onto the horizontal plane.
double pose_yaw(const Pose& p);

/// Pinhole camera with tangent-normalized image coordinates.
struct CameraModel {
    double hfov_half = 0.75;  // horizontal half field of view, rad
    double vfov_half = 0.72;  // vertical half field of view, rad
    double max_range = 8.0;   // detection range limit, m
};

struct PixelCoords {
    double u = 0.0;  // [-1, 1], positive right
    double v = 0.0;  // [-1, 1], positive down
};

/// Projects a world point into normalized image coordinates. Empty when the
/// point is behind the camera, outside the field of view, or beyond
/// max_range. u = tan(azimuth)/tan(hfov_half), v = tan(depression)/tan(vfov_half).
std::optional<PixelCoords> project(const Pose& camera_pose, const Vec3& target,
                                   const CameraModel& cam);

/// Camera pose for a drone with a pitch-only gimbal: the camera shares the
/// drone position and yaw, pitches by gimbal_tilt, and is roll stabilized.
/// Throws if gimbal_tilt is outside the mechanical range.
Pose gimbal_camera_pose(const Pose& drone_pose, double gimbal_tilt);

struct LevelTarget {
    Vec3 position_target;  // drone position relative to pad center, level N/E/Up frame
    double pad_yaw = 0.0;  // pad forward-axis heading in that frame, rad, clockwise positive
};

/// Recovers the drone's displacement from the pad assuming the pad is level.
///
/// The marker's reported normal is taken as world up and its in-plane axes
/// define pad yaw; the output frame's north axis is the camera heading
/// (horizontal boresight direction) deduced through the reported orientation.
/// When the reported orientation is exact the result matches ground truth;
/// when Euler signs were flipped upstream the result is deterministically
/// wrong in the way the flip dictates.
LevelTarget level_pad_target(const Pose& marker_pose_in_camera);

}  // namespace lander
