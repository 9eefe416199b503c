#include "camfield/metrics.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace camfield {

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

ParamStats stats_of(const std::vector<double> &errors) {
  return {median(errors), auc_at(errors, 1.0), auc_at(errors, 5.0), auc_at(errors, 10.0)};
}

} // namespace

double auc_at(std::span<const double> errors, double tau) {
  if (errors.empty()) throw DomainError("AUC needs at least one error value");
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw DomainError("AUC threshold must be positive, got " + std::to_string(tau));
  }
  // Each error e contributes recall mass 1/n on [e, tau].
  double area = 0.0;
  for (double e : errors) {
    if (!(e >= 0.0)) throw DomainError("errors must be non-negative, got " + std::to_string(e));
    if (e < tau) area += tau - e;
  }
  return 100.0 * area / (tau * static_cast<double>(errors.size()));
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty sample");
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw DomainError("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

ParamErrorSample param_errors(const CameraParams &pred, const CameraParams &gt) {
  double roll = std::fmod(std::abs(rad2deg(pred.roll - gt.roll)), 360.0);
  if (roll > 180.0) roll = 360.0 - roll;
  return {roll, std::abs(rad2deg(pred.pitch - gt.pitch)),
          std::abs(rad2deg(pred.vfov - gt.vfov))};
}

double gravity_error(const CameraParams &pred, const CameraParams &gt) {
  auto gravity = [](const CameraParams &p) {
    CameraParams level = p;
    level.yaw = 0.0;
    return Vec3(-up_in_camera(level));
  };
  const Vec3 a = gravity(pred), b = gravity(gt);
  return rad2deg(std::atan2(a.cross(b).norm(), a.dot(b)));
}

FieldErrors field_errors(const PerspectiveField &pred, const PerspectiveField &gt) {
  if (!(pred.grid == gt.grid)) {
    throw DomainError("field dimensions differ: " + std::to_string(pred.grid.width) + "x" +
                      std::to_string(pred.grid.height) + " vs " +
                      std::to_string(gt.grid.width) + "x" + std::to_string(gt.grid.height));
  }
  FieldErrors out;
  out.grid = gt.grid;
  const std::size_t n = gt.grid.pixel_count();
  out.up_deg.resize(n);
  out.latitude_deg.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 &a = pred.up[i];
    const Vec2 &b = gt.up[i];
    out.up_deg[i] = rad2deg(std::atan2(std::abs(a.x() * b.y() - a.y() * b.x()), a.dot(b)));
    out.latitude_deg[i] = rad2deg(std::abs(pred.latitude[i] - gt.latitude[i]));
  }
  out.up_mean = mean(out.up_deg);
  out.up_median = median(out.up_deg);
  out.latitude_mean = mean(out.latitude_deg);
  out.latitude_median = median(out.latitude_deg);
  return out;
}

double crop_fov_rescale(double vfov, double crop_ratio) {
  if (!(crop_ratio > 0.0 && crop_ratio <= 1.0)) {
    throw DomainError("crop ratio must lie in (0, 1], got " + std::to_string(crop_ratio));
  }
  if (!(vfov > 0.0 && vfov < kPi)) {
    throw DomainError("vfov must lie in (0, 180) degrees, got " + std::to_string(rad2deg(vfov)));
  }
  return 2.0 * std::atan(crop_ratio * std::tan(vfov / 2.0));
}

EvalReport evaluate(std::span<const CameraParams> pred, std::span<const CameraParams> gt,
                    const PixelGridSpec &field_grid) {
  if (pred.size() != gt.size()) {
    throw DomainError("prediction and ground-truth counts differ: " +
                      std::to_string(pred.size()) + " vs " + std::to_string(gt.size()));
  }
  if (gt.empty()) throw DomainError("nothing to evaluate");

  std::vector<double> roll, pitch, fov, gravity, up, lat;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const ParamErrorSample e = param_errors(pred[i], gt[i]);
    roll.push_back(e.roll_err);
    pitch.push_back(e.pitch_err);
    fov.push_back(e.fov_err);
    gravity.push_back(gravity_error(pred[i], gt[i]));
    const FieldErrors fe = field_errors(field_from_params(pred[i], field_grid),
                                        field_from_params(gt[i], field_grid));
    up.insert(up.end(), fe.up_deg.begin(), fe.up_deg.end());
    lat.insert(lat.end(), fe.latitude_deg.begin(), fe.latitude_deg.end());
  }

  EvalReport report;
  report.count = gt.size();
  report.roll = stats_of(roll);
  report.pitch = stats_of(pitch);
  report.fov = stats_of(fov);
  report.up_mean = mean(up);
  report.up_median = median(up);
  report.latitude_mean = mean(lat);
  report.latitude_median = median(lat);
  report.gravity_mean = mean(gravity);
  report.gravity_median = median(gravity);
  return report;
}

std::string format_report_table(const EvalReport &r) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %10s %8s %8s %8s\n", "param", "median[deg]",
                "AUC@1", "AUC@5", "AUC@10");
  out += line;
  auto row = [&](const char *name, const ParamStats &s) {
    std::snprintf(line, sizeof line, "%-8s %10s %8s %8s %8s\n", name, fixed2(s.median).c_str(),
                  fixed2(s.auc1).c_str(), fixed2(s.auc5).c_str(), fixed2(s.auc10).c_str());
    out += line;
  };
  row("roll", r.roll);
  row("pitch", r.pitch);
  row("vfov", r.fov);
  std::snprintf(line, sizeof line, "\n%-10s %10s %10s\n", "field", "mean[deg]", "median[deg]");
  out += line;
  auto frow = [&](const char *name, double m, double med) {
    std::snprintf(line, sizeof line, "%-10s %10s %10s\n", name, fixed2(m).c_str(),
                  fixed2(med).c_str());
    out += line;
  };
  frow("up", r.up_mean, r.up_median);
  frow("latitude", r.latitude_mean, r.latitude_median);
  frow("gravity", r.gravity_mean, r.gravity_median);
  out += "samples: " + std::to_string(r.count) + "\n";
  return out;
}

std::string format_report_kv(const EvalReport &r) {
  std::string out;
  auto kv = [&](const std::string &key, double v) { out += key + "=" + fixed2(v) + "\n"; };
  auto param = [&](const std::string &name, const ParamStats &s) {
    kv(name + "_median", s.median);
    kv(name + "_auc1", s.auc1);
    kv(name + "_auc5", s.auc5);
    kv(name + "_auc10", s.auc10);
  };
  out += "count=" + std::to_string(r.count) + "\n";
  param("roll", r.roll);
  param("pitch", r.pitch);
  param("vfov", r.fov);
  kv("up_mean", r.up_mean);
  kv("up_median", r.up_median);
  kv("latitude_mean", r.latitude_mean);
  kv("latitude_median", r.latitude_median);
  kv("gravity_mean", r.gravity_mean);
  kv("gravity_median", r.gravity_median);
  return out;
}

} // namespace camfield
