#include "camfield/perspective_field.hpp"

#include "camfield/parallel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>

namespace camfield {

namespace {

constexpr std::array<unsigned char, 4> kMagic{'P', 'F', 'L', 'D'};
constexpr double kDecodeSlack = 1e-3;

void put_u32(std::vector<unsigned char> &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) |
         static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 |
         static_cast<std::uint32_t>(p[3]) << 24;
}

} // namespace

FieldModel::FieldModel(const CameraParams &params, const PixelGridSpec &grid)
    : grid_(grid) {
  validate(params);
  validate(grid);
  up_cam_ = up_in_camera(params);
  focal_ = focal_from_vfov(params.vfov, grid.height);
}

FieldSample FieldModel::at(double x, double y) const {
  const Vec3 ray(x - grid_.cx(), y - grid_.cy(), focal_);
  const Vec3 &w = up_cam_;
  // Image-plane derivative of projecting the ray point moved along world-up;
  // the positive factor f / z^2 is dropped by the normalisation.
  Vec2 up(w.x() * ray.z() - ray.x() * w.z(), w.y() * ray.z() - ray.y() * w.z());
  const double norm = up.norm();
  if (norm > 1e-12 * ray.squaredNorm()) {
    up /= norm;
  } else {
    up = Vec2(0.0, -1.0);
  }
  const double s = std::clamp(ray.normalized().dot(w), -1.0, 1.0);
  return {up, std::asin(s)};
}

PerspectiveField field_from_params(const CameraParams &params,
                                   const PixelGridSpec &grid,
                                   unsigned threads) {
  const FieldModel model(params, grid);
  PerspectiveField field{grid, std::vector<Vec2>(grid.pixel_count()),
                         std::vector<double>(grid.pixel_count())};
  parallel_for(static_cast<std::size_t>(grid.height), threads,
               [&](std::size_t row) {
                 const int y = static_cast<int>(row);
                 for (int x = 0; x < grid.width; ++x) {
                   const FieldSample s = model.at(x, y);
                   const std::size_t i = field.index(x, y);
                   field.up[i] = s.up;
                   field.latitude[i] = s.latitude;
                 }
               });
  return field;
}

CameraMapEncoding encode_camera_map(const PerspectiveField &field) {
  CameraMapEncoding enc{field.grid, {}};
  enc.channels.resize(field.grid.pixel_count() * 3);
  for (std::size_t i = 0; i < field.grid.pixel_count(); ++i) {
    enc.channels[3 * i] = static_cast<float>(field.up[i].x());
    enc.channels[3 * i + 1] = static_cast<float>(field.up[i].y());
    enc.channels[3 * i + 2] =
        static_cast<float>(std::clamp(field.latitude[i] / (kPi / 2), -1.0, 1.0));
  }
  return enc;
}

PerspectiveField decode_camera_map(const CameraMapEncoding &enc) {
  validate(enc.grid);
  const std::size_t n = enc.grid.pixel_count();
  if (enc.channels.size() != 3 * n) {
    throw FormatError("camera map has " + std::to_string(enc.channels.size()) +
                      " values, expected " + std::to_string(3 * n));
  }
  PerspectiveField field{enc.grid, std::vector<Vec2>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double ux = enc.channels[3 * i];
    const double uy = enc.channels[3 * i + 1];
    const double lat = enc.channels[3 * i + 2];
    for (double v : {ux, uy, lat}) {
      if (!(std::abs(v) <= 1.0 + kDecodeSlack)) {
        throw FormatError("camera map value " + std::to_string(v) +
                          " at pixel " + std::to_string(i) +
                          " is outside [-1, 1]");
      }
    }
    Vec2 up(ux, uy);
    const double norm = up.norm();
    field.up[i] = norm > 0.0 ? Vec2(up / norm) : Vec2(0.0, -1.0);
    field.latitude[i] = std::clamp(lat, -1.0, 1.0) * (kPi / 2);
  }
  return field;
}

std::vector<unsigned char> serialize_camera_map(const CameraMapEncoding &enc) {
  validate(enc.grid);
  if (enc.channels.size() != 3 * enc.grid.pixel_count()) {
    throw FormatError("camera map channel count does not match its grid");
  }
  std::vector<unsigned char> out(kMagic.begin(), kMagic.end());
  out.reserve(12 + 4 * enc.channels.size());
  put_u32(out, static_cast<std::uint32_t>(enc.grid.width));
  put_u32(out, static_cast<std::uint32_t>(enc.grid.height));
  for (float v : enc.channels) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

CameraMapEncoding parse_camera_map(const std::vector<unsigned char> &bytes) {
  if (bytes.size() < 12 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw FormatError("not a PFLD camera map (bad magic)");
  }
  const std::uint32_t w = get_u32(&bytes[4]);
  const std::uint32_t h = get_u32(&bytes[8]);
  if (w == 0 || h == 0 || w > (1u << 16) || h > (1u << 16)) {
    throw FormatError("PFLD header has invalid size " + std::to_string(w) +
                      "x" + std::to_string(h));
  }
  CameraMapEncoding enc{{static_cast<int>(w), static_cast<int>(h)}, {}};
  const std::size_t count = enc.grid.pixel_count() * 3;
  if (bytes.size() != 12 + 4 * count) {
    throw FormatError("PFLD payload is " + std::to_string(bytes.size() - 12) +
                      " bytes, expected " + std::to_string(4 * count));
  }
  enc.channels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    enc.channels[i] = std::bit_cast<float>(get_u32(&bytes[12 + 4 * i]));
  }
  return enc;
}

void write_camera_map(const std::filesystem::path &path,
                      const CameraMapEncoding &enc) {
  const auto bytes = serialize_camera_map(enc);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

CameraMapEncoding read_camera_map(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  try {
    return parse_camera_map(bytes);
  } catch (const FormatError &e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

HorizonLine horizon_from_params(const CameraParams &params,
                                const PixelGridSpec &grid) {
  const FieldModel model(params, grid);
  const Vec3 &w = model.up_camera();
  // Zero latitude: w . (u - cx, v - cy, f) = 0.
  const double a = w.x(), b = w.y(), c = w.z() * model.focal();
  if (std::hypot(a, b) < 1e-12) return {};

  const double left = -0.5, right = grid.width - 0.5;
  const double top = -0.5, bottom = grid.height - 0.5;
  const double eps = 1e-9;
  std::vector<Vec2> hits;
  auto keep = [&](double u, double v) {
    if (u >= left - eps && u <= right + eps && v >= top - eps && v <= bottom + eps) {
      hits.emplace_back(std::clamp(u, left, right), std::clamp(v, top, bottom));
    }
  };
  if (std::abs(b) > 1e-15) {
    for (double u : {left, right}) {
      const double x = u - grid.cx();
      keep(u, -(a * x + c) / b + grid.cy());
    }
  }
  if (std::abs(a) > 1e-15) {
    for (double v : {top, bottom}) {
      const double y = v - grid.cy();
      keep(-(b * y + c) / a + grid.cx(), v);
    }
  }

  HorizonLine line;
  double best = 0.0;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    for (std::size_t j = i + 1; j < hits.size(); ++j) {
      const double d = (hits[i] - hits[j]).norm();
      if (d > best) {
        best = d;
        // Keep a left-to-right orientation for readability.
        const bool swap = hits[j].x() < hits[i].x();
        line.start = swap ? hits[j] : hits[i];
        line.end = swap ? hits[i] : hits[j];
      }
    }
  }
  line.visible = best > 1e-9;
  if (!line.visible) return {};
  return line;
}

} // namespace camfield
