#include "camfield/perspective_field.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>

using namespace camfield;

namespace {

CameraParams random_params(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> tilt(-45.0, 45.0), yaw(0.0, 360.0), fov(20.0, 105.0);
  return CameraParams::from_degrees(tilt(rng), tilt(rng), yaw(rng), fov(rng));
}

// Up direction straight from the limit definition: project the ray point and
// the same point nudged along world-up, take the normalised difference.
Vec2 finite_difference_up(const CameraParams &p, const PixelGridSpec &grid, int x, int y,
                          double c = 1e-6) {
  const Vec3 up_world_level(0.0, -1.0, 0.0);
  const Vec3 w = rotation_from_params(p).matrix().transpose() * up_world_level;
  const Vec3 X = pixel_ray({double(x), double(y)}, grid, p.vfov);
  const Vec2 d = project(X + c * w, grid, p.vfov) - project(X, grid, p.vfov);
  return d.normalized();
}

double angle_between(const Vec2 &a, const Vec2 &b) {
  return std::atan2(std::abs(a.x() * b.y() - a.y() * b.x()), a.dot(b));
}

// Bilinear lookup of a field at a fractional pixel.
FieldSample bilinear(const PerspectiveField &f, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
  const double tx = x - x0, ty = y - y0;
  Vec2 up = Vec2::Zero();
  double lat = 0.0;
  for (int dy = 0; dy < 2; ++dy) {
    for (int dx = 0; dx < 2; ++dx) {
      const double w = (dx ? tx : 1 - tx) * (dy ? ty : 1 - ty);
      const FieldSample s = f.at(x0 + dx, y0 + dy);
      up += w * s.up;
      lat += w * s.latitude;
    }
  }
  return {up.normalized(), lat};
}

} // namespace

TEST_CASE("field at the zero pose") {
  const PixelGridSpec grid{65, 65};
  const PerspectiveField f = field_from_params(CameraParams::from_degrees(0, 0, 0, 75), grid);
  for (const Vec2 &u : f.up) {
    CHECK(u.x() == 0.0);
    CHECK(u.y() == -1.0);
  }
  CHECK(f.at(32, 32).latitude == 0.0);
  CHECK(f.at(32, 0).latitude > 0.0); // top row is above the horizon
  CHECK(f.at(32, 64).latitude < 0.0);
}

TEST_CASE("latitude at the principal pixel equals pitch") {
  const PixelGridSpec grid{101, 101};
  for (double pitch : {-45.0, -20.0, 0.0, 20.0, 33.3, 45.0}) {
    const PerspectiveField f = field_from_params(CameraParams::from_degrees(0, pitch, 0, 70), grid);
    CHECK(std::abs(f.at(50, 50).latitude - deg2rad(pitch)) < 1e-9);
  }
}

TEST_CASE("analytic up vectors agree with the finite-difference limit") {
  std::mt19937_64 rng(3);
  const PixelGridSpec grid{128, 128};
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const CameraParams p = random_params(rng);
    const PerspectiveField f = field_from_params(p, grid);
    for (int y = 0; y < grid.height; y += 3) {
      for (int x = 0; x < grid.width; x += 3) {
        worst = std::max(worst, angle_between(f.at(x, y).up, finite_difference_up(p, grid, x, y)));
      }
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("field invariants") {
  std::mt19937_64 rng(5);
  const PixelGridSpec grid{40, 30};
  for (int trial = 0; trial < 30; ++trial) {
    const CameraParams p = random_params(rng);
    const PerspectiveField f = field_from_params(p, grid);
    for (std::size_t i = 0; i < f.up.size(); ++i) {
      CHECK(std::abs(f.up[i].norm() - 1.0) < 1e-9);
      CHECK(std::abs(f.latitude[i]) <= kPi / 2);
    }
    CameraParams other = p;
    other.yaw = std::fmod(p.yaw + 2.0, 2 * kPi);
    const PerspectiveField g = field_from_params(other, grid);
    CHECK(f.up == g.up);
    CHECK(f.latitude == g.latitude);
  }
}

TEST_CASE("roll equivariance") {
  const PixelGridSpec grid{129, 129};
  const double c = grid.cx();
  for (double roll : {-30.0, -7.0, 12.0, 40.0}) {
    const double delta = deg2rad(roll);
    const CameraParams base = CameraParams::from_degrees(0, 15, 0, 80);
    CameraParams rolled = base;
    rolled.roll = delta;
    const PerspectiveField f0 = field_from_params(base, grid);
    const PerspectiveField fr = field_from_params(rolled, grid);
    const Eigen::Rotation2Dd by_minus(-delta), by_plus(delta);
    double worst = 0.0;
    for (int y = 20; y < 109; y += 4) {
      for (int x = 20; x < 109; x += 4) {
        const Vec2 q = by_minus * Vec2(x - c, y - c) + Vec2(c, c);
        const FieldSample ref = bilinear(f0, q.x(), q.y());
        const FieldSample got = fr.at(x, y);
        worst = std::max(worst, angle_between(got.up, by_plus * ref.up));
        worst = std::max(worst, std::abs(got.latitude - ref.latitude));
      }
    }
    CHECK(worst < 1e-3);
  }
}

TEST_CASE("camera map encoding") {
  const PixelGridSpec grid{33, 33};
  const PerspectiveField zero = field_from_params(CameraParams::from_degrees(0, 0, 0, 60), grid);
  const CameraMapEncoding enc = encode_camera_map(zero);
  REQUIRE(enc.channels.size() == 33 * 33 * 3);
  for (int x = 0; x < 33; ++x) {
    const std::size_t i = 3 * zero.index(x, 16);
    CHECK(enc.channels[i] == 0.0f);
    CHECK(enc.channels[i + 1] == -1.0f);
    CHECK(enc.channels[i + 2] == 0.0f);
  }

  SUBCASE("zenith pixel encodes to +1") {
    const PerspectiveField up = field_from_params(CameraParams::from_degrees(0, 90, 0, 60), grid);
    const CameraMapEncoding e = encode_camera_map(up);
    CHECK(e.channels[3 * up.index(16, 16) + 2] == 1.0f);
    CHECK(up.at(16, 16).up == Vec2(0.0, -1.0)); // degenerate fallback
  }

  SUBCASE("decode inverts encode") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 10; ++t) {
      const PerspectiveField f = field_from_params(random_params(rng), grid);
      const PerspectiveField g = decode_camera_map(encode_camera_map(f));
      for (std::size_t i = 0; i < f.up.size(); ++i) {
        CHECK((f.up[i] - g.up[i]).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(std::abs(f.latitude[i] - g.latitude[i]) < 1e-6);
      }
      for (float v : encode_camera_map(f).channels) CHECK(std::abs(v) <= 1.0f);
    }
  }

  SUBCASE("decode rejects out-of-range values") {
    CameraMapEncoding bad = enc;
    bad.channels[5] = 1.0005f;
    CHECK_NOTHROW(decode_camera_map(bad));
    bad.channels[5] = 1.01f;
    CHECK_THROWS_AS(decode_camera_map(bad), FormatError);
    bad = enc;
    bad.channels.pop_back();
    CHECK_THROWS_AS(decode_camera_map(bad), FormatError);
  }
}

TEST_CASE("PFLD files") {
  const CameraMapEncoding enc =
      encode_camera_map(field_from_params(CameraParams::from_degrees(5, -10, 0, 50), {3, 2}));
  const auto bytes = serialize_camera_map(enc);
  REQUIRE(bytes.size() == 12 + 3 * 2 * 3 * 4);
  CHECK(std::memcmp(bytes.data(), "PFLD", 4) == 0);
  CHECK(bytes[4] == 3);
  CHECK(bytes[5] == 0);
  CHECK(bytes[8] == 2);
  float first;
  const unsigned char le[4] = {bytes[12], bytes[13], bytes[14], bytes[15]};
  std::memcpy(&first, le, 4); // little-endian host
  CHECK(first == enc.channels[0]);

  const auto path = std::filesystem::temp_directory_path() / "camfield_test_map.pfld";
  write_camera_map(path, enc);
  const CameraMapEncoding back = read_camera_map(path);
  CHECK(back.grid == enc.grid);
  CHECK(back.channels == enc.channels);
  std::filesystem::remove(path);

  auto broken = bytes;
  broken[0] = 'X';
  CHECK_THROWS_AS(parse_camera_map(broken), FormatError);
  broken = bytes;
  broken.pop_back();
  CHECK_THROWS_AS(parse_camera_map(broken), FormatError);
  CHECK_THROWS(read_camera_map("/nonexistent/dir/map.pfld"));
}

TEST_CASE("horizon lines") {
  const PixelGridSpec grid{512, 512};
  const HorizonLine level = horizon_from_params(CameraParams::from_degrees(0, 0, 0, 90), grid);
  REQUIRE(level.visible);
  CHECK(level.start.y() == doctest::Approx(255.5).epsilon(1e-12));
  CHECK(level.end.y() == doctest::Approx(255.5).epsilon(1e-12));
  CHECK(level.start.x() == -0.5);
  CHECK(level.end.x() == 511.5);

  SUBCASE("pitch shifts the horizon; column scan agrees") {
    for (double pitch : {-30.0, -10.0, 12.5, 25.0}) {
      const CameraParams p = CameraParams::from_degrees(0, pitch, 0, 80);
      const HorizonLine h = horizon_from_params(p, grid);
      REQUIRE(h.visible);
      const double expected = 255.5 + focal_from_vfov(p.vfov, 512) * std::tan(p.pitch);
      CHECK(h.start.y() == doctest::Approx(expected).epsilon(1e-9));

      const PerspectiveField f = field_from_params(p, grid);
      for (int x = 0; x < 512; x += 51) {
        for (int y = 0; y + 1 < 512; ++y) {
          const double a = f.at(x, y).latitude, b = f.at(x, y + 1).latitude;
          if ((a > 0) != (b > 0)) {
            CHECK(std::abs(y + a / (a - b) - expected) < 0.5);
          }
        }
      }
    }
  }

  SUBCASE("invisible when the view misses the horizon") {
    const CameraParams p = CameraParams::from_degrees(0, 45, 0, 40);
    const PerspectiveField f = field_from_params(p, grid);
    double min_abs = INFINITY;
    for (double lat : f.latitude) min_abs = std::min(min_abs, std::abs(lat));
    CHECK(min_abs > 0.0);
    CHECK_FALSE(horizon_from_params(p, grid).visible);
    CHECK_FALSE(horizon_from_params(CameraParams::from_degrees(0, 90, 0, 60), grid).visible);
  }

  SUBCASE("points on the line have zero latitude") {
    std::mt19937_64 rng(21);
    int visible = 0;
    for (int t = 0; t < 60; ++t) {
      const CameraParams p = random_params(rng);
      const HorizonLine h = horizon_from_params(p, grid);
      if (!h.visible) continue;
      ++visible;
      const FieldModel model(p, grid);
      for (int k = 0; k <= 20; ++k) {
        const Vec2 q = h.start + (h.end - h.start) * (k / 20.0);
        CHECK(std::abs(model.at(q.x(), q.y()).latitude) < 1e-6);
      }
    }
    CHECK(visible > 10);
  }
}
