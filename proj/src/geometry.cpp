#include "camfield/geometry.hpp"

#include <cstdio>

namespace camfield {

void validate(const CameraParams &params) {
  if (!std::isfinite(params.roll) || !std::isfinite(params.pitch) ||
      !std::isfinite(params.yaw) || !std::isfinite(params.vfov)) {
    throw DomainError("camera parameters must be finite: " + describe(params));
  }
  if (!(params.vfov > 0.0 && params.vfov < kPi)) {
    throw DomainError("vfov must lie in (0, 180) degrees, got " +
                      std::to_string(rad2deg(params.vfov)));
  }
}

void validate(const PixelGridSpec &grid) {
  if (grid.width < 1 || grid.height < 1) {
    throw DomainError("pixel grid must be at least 1x1, got " +
                      std::to_string(grid.width) + "x" +
                      std::to_string(grid.height));
  }
}

double focal_from_vfov(double vfov, int height) {
  if (!std::isfinite(vfov) || !(vfov > 0.0 && vfov < kPi)) {
    throw DomainError("vfov must lie in (0, 180) degrees, got " +
                      std::to_string(rad2deg(vfov)));
  }
  if (height < 1) {
    throw DomainError("image height must be positive, got " +
                      std::to_string(height));
  }
  return (height / 2.0) / std::tan(vfov / 2.0);
}

double vfov_from_focal(double focal, int height) {
  if (!(focal > 0.0) || !std::isfinite(focal)) {
    throw DomainError("focal length must be positive, got " +
                      std::to_string(focal));
  }
  return 2.0 * std::atan((height / 2.0) / focal);
}

Rotation3 Rotation3::about_x(double angle) {
  // Forward (0,0,1) goes to (0,-sin,cos): up in the y-down frame.
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 m;
  m << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return Rotation3(m);
}

Rotation3 Rotation3::about_y(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 m;
  m << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return Rotation3(m);
}

Rotation3 Rotation3::about_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 m;
  m << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return Rotation3(m);
}

Rotation3 rotation_from_params(const CameraParams &params) {
  // Rolling the camera counterclockwise makes the scene appear clockwise.
  return Rotation3::about_y(params.yaw) * Rotation3::about_x(params.pitch) *
         Rotation3::about_z(-params.roll);
}

Vec3 pixel_ray(Vec2 pixel, const PixelGridSpec &grid, double vfov) {
  if (!(pixel.x() >= 0.0 && pixel.x() < grid.width && pixel.y() >= 0.0 &&
        pixel.y() < grid.height)) {
    throw DomainError("pixel (" + std::to_string(pixel.x()) + ", " +
                      std::to_string(pixel.y()) + ") outside " +
                      std::to_string(grid.width) + "x" +
                      std::to_string(grid.height) + " grid");
  }
  const double f = focal_from_vfov(vfov, grid.height);
  return Vec3(pixel.x() - grid.cx(), pixel.y() - grid.cy(), f).normalized();
}

Vec2 project(const Vec3 &point, const PixelGridSpec &grid, double vfov) {
  if (!(point.z() > 0.0)) {
    throw DomainError("cannot project a point behind the camera (z = " +
                      std::to_string(point.z()) + ")");
  }
  const double f = focal_from_vfov(vfov, grid.height);
  return {f * point.x() / point.z() + grid.cx(),
          f * point.y() / point.z() + grid.cy()};
}

Vec3 up_in_camera(const CameraParams &params) {
  return rotation_from_params(params).inverse() * Vec3(0.0, -1.0, 0.0);
}

std::string describe(const CameraParams &params) {
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "roll=%.4f pitch=%.4f yaw=%.4f vfov=%.4f (deg)",
                rad2deg(params.roll), rad2deg(params.pitch),
                rad2deg(params.yaw), rad2deg(params.vfov));
  return buf;
}

} // namespace camfield
