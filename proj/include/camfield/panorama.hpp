#pragma once

// Equirectangular panoramas and pinhole view rendering.

#include "camfield/geometry.hpp"

#include <array>
#include <vector>

namespace camfield {

using Color = std::array<float, 3>;

/// Interleaved RGB float image with values in [0,1], row-major.
class RgbImage {
public:
  RgbImage() = default;
  RgbImage(int width, int height, Color fill = {0.f, 0.f, 0.f});

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<float> &data() const { return data_; }
  std::vector<float> &data() { return data_; }

  Color at(int x, int y) const {
    const float *p = &data_[index(x, y)];
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, const Color &c) {
    float *p = &data_[index(x, y)];
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  bool operator==(const RgbImage &) const = default;

private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

/// A full 360x180 degree panorama; width is exactly twice the height.
class EquirectPanorama {
public:
  /// Throws DomainError unless width == 2*height and every value is in [0,1].
  explicit EquirectPanorama(RgbImage image);

  int width() const { return image_.width(); }
  int height() const { return image_.height(); }
  const RgbImage &image() const { return image_; }

private:
  RgbImage image_;
};

struct RenderedView {
  RgbImage pixels;
  CameraParams params;
  PixelGridSpec grid;
};

/// Continuous panorama coordinates of a unit direction in the y-up world
/// frame. u lies in (-0.5, W-0.5] and is wrapped by the sampler; v = -0.5
/// at the zenith.
Vec2 dir_to_pano_uv(const Vec3 &direction, const EquirectPanorama &pano);

/// Bilinear lookup; wraps horizontally and clamps vertically.
Color sample_bilinear(const EquirectPanorama &pano, Vec2 uv);

/// Renders a pinhole view. Rows may be split across `threads` workers; the
/// output does not depend on the thread count.
RenderedView render_view(const EquirectPanorama &pano,
                         const CameraParams &params, const PixelGridSpec &grid,
                         unsigned threads = 1);

enum class PanoramaPattern {
  Constant,          // mid grey
  LongitudeGradient, // red encodes longitude, green latitude
  Checker,           // 10 degree checker with smooth colour ramps
};

/// Deterministic synthetic panorama, used when no real input is supplied.
EquirectPanorama procedural_panorama(int height, PanoramaPattern pattern);

} // namespace camfield
