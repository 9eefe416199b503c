#include "camfield/panorama.hpp"

#include "camfield/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace camfield {

RgbImage::RgbImage(int width, int height, Color fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw DomainError("image dimensions must be positive, got " +
                      std::to_string(width) + "x" + std::to_string(height));
  }
  data_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill[0];
    data_[i + 1] = fill[1];
    data_[i + 2] = fill[2];
  }
}

EquirectPanorama::EquirectPanorama(RgbImage image) : image_(std::move(image)) {
  if (image_.width() != 2 * image_.height()) {
    throw DomainError("equirectangular panorama must be 2:1, got " +
                      std::to_string(image_.width()) + "x" +
                      std::to_string(image_.height()));
  }
  for (float value : image_.data()) {
    if (!(value >= 0.0f && value <= 1.0f)) {
      throw DomainError("panorama values must lie in [0,1]");
    }
  }
}

Vec2 dir_to_pano_uv(const Vec3 &direction, const EquirectPanorama &pano) {
  const double norm = direction.norm();
  if (!(std::abs(norm - 1.0) <= 1e-9)) {
    throw DomainError("panorama lookup needs a unit direction, norm = " +
                      std::to_string(norm));
  }
  const double lon = std::atan2(direction.x(), direction.z());
  const double lat = std::asin(std::clamp(direction.y(), -1.0, 1.0));
  return {(lon / (2.0 * kPi) + 0.5) * pano.width() - 0.5,
          (0.5 - lat / kPi) * pano.height() - 0.5};
}

Color sample_bilinear(const EquirectPanorama &pano, Vec2 uv) {
  const int w = pano.width();
  const int h = pano.height();
  const double fx = std::floor(uv.x());
  const double fy = std::floor(uv.y());
  const double tx = uv.x() - fx;
  const double ty = uv.y() - fy;

  auto wrap = [w](double x) {
    const double m = std::fmod(x, static_cast<double>(w));
    return static_cast<int>(m < 0 ? m + w : m);
  };
  auto clamp_row = [h](double y) {
    return static_cast<int>(std::clamp(y, 0.0, static_cast<double>(h - 1)));
  };
  const int x0 = wrap(fx), x1 = wrap(fx + 1.0);
  const int y0 = clamp_row(fy), y1 = clamp_row(fy + 1.0);

  const RgbImage &img = pano.image();
  const Color c00 = img.at(x0, y0), c10 = img.at(x1, y0);
  const Color c01 = img.at(x0, y1), c11 = img.at(x1, y1);
  Color out;
  for (int k = 0; k < 3; ++k) {
    const double top = (1.0 - tx) * c00[k] + tx * c10[k];
    const double bottom = (1.0 - tx) * c01[k] + tx * c11[k];
    const double v = (1.0 - ty) * top + ty * bottom;
    out[k] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return out;
}

RenderedView render_view(const EquirectPanorama &pano,
                         const CameraParams &params, const PixelGridSpec &grid,
                         unsigned threads) {
  validate(params);
  validate(grid);
  const Mat3 rot = rotation_from_params(params).matrix();
  const double f = focal_from_vfov(params.vfov, grid.height);

  RenderedView view{RgbImage(grid.width, grid.height), params, grid};
  parallel_for(static_cast<std::size_t>(grid.height), threads,
               [&](std::size_t row) {
                 const int y = static_cast<int>(row);
                 for (int x = 0; x < grid.width; ++x) {
                   const Vec3 ray =
                       Vec3(x - grid.cx(), y - grid.cy(), f).normalized();
                   const Vec3 dir = to_world_up(rot * ray);
                   view.pixels.set(x, y, sample_bilinear(
                                             pano, dir_to_pano_uv(dir, pano)));
                 }
               });
  return view;
}

EquirectPanorama procedural_panorama(int height, PanoramaPattern pattern) {
  const int width = 2 * height;
  RgbImage img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double lon_frac = (x + 0.5) / width;
      const double lat_frac = (y + 0.5) / height;
      Color c{0.5f, 0.5f, 0.5f};
      switch (pattern) {
      case PanoramaPattern::Constant:
        break;
      case PanoramaPattern::LongitudeGradient:
        c = {static_cast<float>(lon_frac), static_cast<float>(lat_frac), 0.25f};
        break;
      case PanoramaPattern::Checker: {
        const int cell = (static_cast<int>(lon_frac * 36.0) +
                          static_cast<int>(lat_frac * 18.0)) % 2;
        const double sky = 1.0 - lat_frac;
        c = {static_cast<float>(0.15 + 0.7 * lon_frac * (cell ? 1.0 : 0.6)),
             static_cast<float>(0.1 + 0.8 * sky),
             static_cast<float>(cell ? 0.85 : 0.2)};
        break;
      }
      }
      img.set(x, y, c);
    }
  }
  return EquirectPanorama(std::move(img));
}

} // namespace camfield
