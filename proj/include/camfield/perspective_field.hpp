#pragma once

// Per-pixel perspective fields (up-vector + latitude), their 3-channel
// camera-map encoding, the PFLD file format, and horizon lines.

#include "camfield/geometry.hpp"

#include <filesystem>
#include <stdexcept>
#include <vector>

namespace camfield {

/// Malformed encoded data or files.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct FieldSample {
  Vec2 up;         // unit, image coordinates (y down)
  double latitude; // radians, positive above the horizon
};

/// Evaluates the analytic field of one camera at arbitrary pixel positions.
class FieldModel {
public:
  FieldModel(const CameraParams &params, const PixelGridSpec &grid);

  FieldSample at(double x, double y) const;

  const Vec3 &up_camera() const { return up_cam_; }
  double focal() const { return focal_; }

private:
  PixelGridSpec grid_;
  Vec3 up_cam_;
  double focal_;
};

struct PerspectiveField {
  PixelGridSpec grid;
  std::vector<Vec2> up;
  std::vector<double> latitude;

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * grid.width + x;
  }
  FieldSample at(int x, int y) const {
    const std::size_t i = index(x, y);
    return {up[i], latitude[i]};
  }
};

/// Channels (up_x, up_y, latitude / (pi/2)), interleaved, row-major.
struct CameraMapEncoding {
  PixelGridSpec grid;
  std::vector<float> channels;
};

/// Yaw does not enter: the field depends on gravity only.
PerspectiveField field_from_params(const CameraParams &params,
                                   const PixelGridSpec &grid,
                                   unsigned threads = 1);

CameraMapEncoding encode_camera_map(const PerspectiveField &field);

/// Throws FormatError for values outside [-1,1] by more than 1e-3.
PerspectiveField decode_camera_map(const CameraMapEncoding &enc);

/// PFLD: "PFLD", u32 width, u32 height, then H*W*3 float32, little-endian.
void write_camera_map(const std::filesystem::path &path,
                      const CameraMapEncoding &enc);
CameraMapEncoding read_camera_map(const std::filesystem::path &path);

std::vector<unsigned char> serialize_camera_map(const CameraMapEncoding &enc);
CameraMapEncoding parse_camera_map(const std::vector<unsigned char> &bytes);

struct HorizonLine {
  bool visible = false;
  Vec2 start = Vec2::Zero();
  Vec2 end = Vec2::Zero();
};

/// The zero-latitude line clipped to the image rectangle
/// [-0.5, W-0.5] x [-0.5, H-0.5].
HorizonLine horizon_from_params(const CameraParams &params,
                                const PixelGridSpec &grid);

} // namespace camfield
