#pragma once

// Pinhole camera geometry shared by every other module.
//
// Frames:
//   camera  x right, y down (image rows), z forward.
//   level   gravity-aligned frame with the same axis layout as the camera at
//           the zero pose: x right/east, y down, z forward/north. World-up is
//           (0,-1,0) here. Rotation3 maps camera coordinates into this frame.
//   world   panorama frame (x east, y up, z north); obtained from the level
//           frame by negating y. See to_world_up().

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace camfield {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Thrown whenever an input falls outside an operation's domain.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// One view: roll, pitch, yaw and vertical field of view, all in radians.
///
/// Positive pitch tilts the view up, positive roll rotates the image content
/// clockwise on screen (a clockwise Dutch angle), positive yaw pans right.
struct CameraParams {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  double vfov = deg2rad(60.0);

  static CameraParams from_degrees(double roll_deg, double pitch_deg,
                                   double yaw_deg, double vfov_deg) {
    return {deg2rad(roll_deg), deg2rad(pitch_deg), deg2rad(yaw_deg),
            deg2rad(vfov_deg)};
  }

  bool operator==(const CameraParams &) const = default;
};

/// Throws DomainError for non-finite angles or vfov outside (0, pi).
void validate(const CameraParams &params);

/// Camera-to-level rotation. Always orthonormal with det +1.
class Rotation3 {
public:
  Rotation3() : m_(Mat3::Identity()) {}

  const Mat3 &matrix() const { return m_; }
  Vec3 operator*(const Vec3 &v) const { return m_ * v; }
  Rotation3 operator*(const Rotation3 &other) const {
    return Rotation3(m_ * other.m_);
  }
  Rotation3 inverse() const { return Rotation3(m_.transpose()); }

  /// Rotation about the camera's x axis; positive angles tilt forward upward.
  static Rotation3 about_x(double angle);
  /// Rotation about the camera's y (down) axis; positive angles pan right.
  static Rotation3 about_y(double angle);
  /// Rotation about the optical axis; standard right-hand sense in the
  /// y-down frame, so positive angles turn +x toward +y.
  static Rotation3 about_z(double angle);

private:
  explicit Rotation3(const Mat3 &m) : m_(m) {}
  Mat3 m_;
};

struct PixelGridSpec {
  int width = 512;
  int height = 512;

  bool operator==(const PixelGridSpec &) const = default;

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  double cx() const { return width / 2.0 - 0.5; }
  double cy() const { return height / 2.0 - 0.5; }
};

void validate(const PixelGridSpec &grid);

/// f = (height/2) / tan(vfov/2), in pixels.
double focal_from_vfov(double vfov, int height);

/// Inverse of focal_from_vfov.
double vfov_from_focal(double focal, int height);

/// R = R_yaw * R_pitch * R_roll, camera to level frame.
Rotation3 rotation_from_params(const CameraParams &params);

/// Unit ray through the centre of pixel (u, v), camera frame.
Vec3 pixel_ray(Vec2 pixel, const PixelGridSpec &grid, double vfov);

/// Pixel coordinates of a camera-frame point; throws when z <= 0.
Vec2 project(const Vec3 &point, const PixelGridSpec &grid, double vfov);

/// World-up expressed in the camera frame.
Vec3 up_in_camera(const CameraParams &params);

/// Level-frame direction to the y-up panorama world frame.
inline Vec3 to_world_up(const Vec3 &level) {
  return {level.x(), -level.y(), level.z()};
}

std::string describe(const CameraParams &params);

} // namespace camfield
