#include "camfield/geometry.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace camfield;

namespace {

// Bisection on 2*atan((h/2)/f) = vfov; independent of the closed form.
double focal_by_bisection(double vfov, int height) {
  double lo = 1e-9, hi = 1e9;
  for (int i = 0; i < 400; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (2.0 * std::atan((height / 2.0) / mid) > vfov) lo = mid;
    else hi = mid;
  }
  return std::sqrt(lo * hi);
}

CameraParams random_params(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> tilt(-90.0, 90.0), yaw(0.0, 360.0), fov(10.0, 170.0);
  return CameraParams::from_degrees(tilt(rng), tilt(rng), yaw(rng), fov(rng));
}

} // namespace

TEST_CASE("focal length from vertical field of view") {
  CHECK(focal_from_vfov(deg2rad(90.0), 512) == doctest::Approx(256.0).epsilon(1e-15));

  const double vfov = deg2rad(53.13);
  const double oracle = focal_by_bisection(vfov, 512);
  CHECK(std::abs(focal_from_vfov(vfov, 512) - oracle) < 1e-6);
  CHECK(std::abs(focal_from_vfov(vfov, 512) - 512.0) < 0.01);
  CHECK(std::abs(vfov_from_focal(focal_from_vfov(vfov, 512), 512) - vfov) < 1e-14);

  SUBCASE("strictly decreasing, vanishing toward 180 degrees") {
    double prev = std::numeric_limits<double>::infinity();
    for (double deg = 0.5; deg < 180.0; deg += 0.5) {
      const double f = focal_from_vfov(deg2rad(deg), 512);
      CHECK(f > 0.0);
      CHECK(f < prev);
      prev = f;
    }
    CHECK(focal_from_vfov(kPi - 1e-9, 512) < 1e-6);
  }

  SUBCASE("domain errors") {
    CHECK_THROWS_AS(focal_from_vfov(0.0, 512), DomainError);
    CHECK_THROWS_AS(focal_from_vfov(kPi, 512), DomainError);
    CHECK_THROWS_AS(focal_from_vfov(std::nan(""), 512), DomainError);
    CHECK_THROWS_AS(focal_from_vfov(1.0, 0), DomainError);
    CHECK_THROWS_WITH_AS(focal_from_vfov(deg2rad(200.0), 512), doctest::Contains("200"),
                         DomainError);
  }
}

TEST_CASE("rotation from parameters") {
  CHECK(rotation_from_params({0, 0, 0, 1.0}).matrix().isIdentity(0.0));

  const double d = deg2rad(17.0);
  const Mat3 composed = rotation_from_params({d, 0, 0, 1.0}).matrix() *
                        rotation_from_params({-d, 0, 0, 1.0}).matrix();
  CHECK((composed - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);

  SUBCASE("positive pitch raises the forward axis") {
    const Vec3 fwd = rotation_from_params(CameraParams::from_degrees(0, 30, 0, 60)) * Vec3(0, 0, 1);
    // level frame is y-down: elevation = asin(-y)
    const Vec3 expected(0.0, -std::sin(deg2rad(30.0)), std::cos(deg2rad(30.0)));
    CHECK((fwd - expected).norm() < 1e-15);
    CHECK(rad2deg(std::asin(-fwd.y())) == doctest::Approx(30.0).epsilon(1e-12));
  }

  SUBCASE("positive yaw pans right, positive roll turns the scene clockwise") {
    const Vec3 fwd = rotation_from_params(CameraParams::from_degrees(0, 0, 90, 60)) * Vec3(0, 0, 1);
    CHECK((fwd - Vec3(1, 0, 0)).norm() < 1e-15);
    const Vec3 up = up_in_camera(CameraParams::from_degrees(10, 0, 0, 60));
    CHECK(up.x() == doctest::Approx(std::sin(deg2rad(10.0))));
    CHECK(up.y() == doctest::Approx(-std::cos(deg2rad(10.0))));
  }

  SUBCASE("orthonormal with unit determinant") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
      const Mat3 r = rotation_from_params(random_params(rng)).matrix();
      CHECK((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(r.determinant() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("pixel rays") {
  const PixelGridSpec odd{511, 511};
  CHECK((pixel_ray({255, 255}, odd, deg2rad(70.0)) - Vec3(0, 0, 1)).norm() == 0.0);

  const PixelGridSpec grid{512, 512};
  const Vec3 top = pixel_ray({255.5, 0.0}, grid, deg2rad(90.0));
  const double elevation = std::atan2(-top.y(), top.z());
  CHECK(std::abs(elevation - std::atan(255.5 / 256.0)) < 1e-14);
  CHECK(rad2deg(elevation) == doctest::Approx(44.944).epsilon(1e-4));

  for (int v = 0; v < 512; v += 37) {
    for (int u = 0; u < 512; u += 41) {
      const Vec3 a = pixel_ray({double(u), double(v)}, grid, deg2rad(65.0));
      const Vec3 b = pixel_ray({511.0 - u, double(v)}, grid, deg2rad(65.0));
      CHECK(a.x() == -b.x());
      CHECK(std::abs(a.norm() - 1.0) < 1e-12);
    }
  }

  CHECK_THROWS_AS(pixel_ray({512.0, 3.0}, grid, 1.0), DomainError);
  CHECK_THROWS_AS(pixel_ray({-0.1, 3.0}, grid, 1.0), DomainError);
}

TEST_CASE("projection") {
  const PixelGridSpec grid{512, 512};
  const Vec2 c = project({0, 0, 1}, grid, deg2rad(90.0));
  CHECK(c.x() == 255.5);
  CHECK(c.y() == 255.5);

  const Vec2 p = project({0.5, 0, 1}, grid, deg2rad(90.0));
  CHECK(p.x() == doctest::Approx(383.5).epsilon(1e-14));

  CHECK_THROWS_AS(project({0, 0, 0}, grid, 1.0), DomainError);
  CHECK_THROWS_AS(project({0, 0, -1}, grid, 1.0), DomainError);

  SUBCASE("inverse of pixel_ray on a lattice across field of view") {
    const PixelGridSpec wide{640, 480};
    double worst = 0.0;
    for (double fov = 10.5; fov < 170.0; fov += 7.5) {
      for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
          const Vec2 px(i * (wide.width - 1) / 8.0, j * (wide.height - 1) / 8.0);
          const Vec2 back = project(pixel_ray(px, wide, deg2rad(fov)), wide, deg2rad(fov));
          worst = std::max(worst, (back - px).norm());
        }
      }
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(validate(CameraParams::from_degrees(10, 10, 10, 60)));
  CHECK_THROWS_AS(validate(CameraParams{std::nan(""), 0, 0, 1.0}), DomainError);
  CHECK_THROWS_AS(validate(CameraParams{0, 0, INFINITY, 1.0}), DomainError);
  CHECK_THROWS_AS(validate(CameraParams{0, 0, 0, kPi}), DomainError);
  CHECK_THROWS_AS(validate(PixelGridSpec{0, 5}), DomainError);
}
