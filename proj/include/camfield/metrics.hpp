#pragma once

// Calibration and generation evaluation metrics.

#include "camfield/perspective_field.hpp"

#include <span>
#include <string>
#include <vector>

namespace camfield {

/// Absolute parameter errors in degrees.
struct ParamErrorSample {
  double roll_err = 0.0;
  double pitch_err = 0.0;
  double fov_err = 0.0;
};

/// Area under the recall curve on [0, tau], normalised by tau, in percent.
/// Recall(t) counts errors <= t.
double auc_at(std::span<const double> errors, double tau);

/// Middle order statistic; mean of the two middle ones for even sizes.
double median(std::vector<double> values);
double mean(std::span<const double> values);

ParamErrorSample param_errors(const CameraParams &pred, const CameraParams &gt);

/// Angle between the camera-frame gravity directions, degrees. Yaw is ignored.
double gravity_error(const CameraParams &pred, const CameraParams &gt);

struct FieldErrors {
  PixelGridSpec grid;
  std::vector<double> up_deg;
  std::vector<double> latitude_deg;
  double up_mean = 0.0;
  double up_median = 0.0;
  double latitude_mean = 0.0;
  double latitude_median = 0.0;
};

FieldErrors field_errors(const PerspectiveField &pred, const PerspectiveField &gt);

/// Vertical FoV of a central crop keeping `crop_ratio` of the height at the
/// same focal length.
double crop_fov_rescale(double vfov, double crop_ratio);

struct ParamStats {
  double median = 0.0;
  double auc1 = 0.0;
  double auc5 = 0.0;
  double auc10 = 0.0;
};

struct EvalReport {
  ParamStats roll, pitch, fov;
  double up_mean = 0.0, up_median = 0.0;
  double latitude_mean = 0.0, latitude_median = 0.0;
  double gravity_mean = 0.0, gravity_median = 0.0;
  std::size_t count = 0;
};

/// Pairs pred[i] with gt[i]. Field errors are pooled over every pixel of
/// every pair, rendered at `field_grid`; gravity is one value per pair.
EvalReport evaluate(std::span<const CameraParams> pred, std::span<const CameraParams> gt,
                    const PixelGridSpec &field_grid = {64, 64});

std::string format_report_table(const EvalReport &report);
/// One key=value per line, degrees and percentages with 2 decimals.
std::string format_report_kv(const EvalReport &report);

} // namespace camfield
