#pragma once

// Recovers roll, pitch and vfov from a dense perspective field: coarse grid
// search followed by Levenberg-Marquardt with a forward-difference Jacobian.

#include "camfield/perspective_field.hpp"

#include <Eigen/Core>

#include <vector>

namespace camfield {

struct ResidualWeights {
  double up = 1.0;
  double latitude = 1.0;
};

struct CalibrationSettings {
  int max_iterations = 100;
  double initial_damping = 1e-3;
  double step_tolerance = 1e-7;      // radians
  double relative_tolerance = 1e-10; // relative RMS change
  int subgrid = 64;                  // refine on subgrid x subgrid samples
  double jacobian_step = 1e-7;       // radians
  ResidualWeights weights;
};

struct CalibrationResult {
  CameraParams params; // yaw is always 0: the field carries no yaw
  double residual_rms = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> accepted_rms; // subgrid RMS after init and each accepted step
};

struct ResidualVector {
  std::vector<double> values; // per pixel: weighted up gap, weighted latitude gap
  double rms = 0.0;
};

/// Residuals over every pixel of the field.
ResidualVector residual(const CameraParams &params, const PerspectiveField &field,
                        const ResidualWeights &weights = {});

/// Signed angle from `predicted` to `observed`, in (-pi, pi].
double up_angle_gap(const Vec2 &observed, const Vec2 &predicted);

/// Least-squares objective over a uniform subgrid of a field, in terms of
/// x = (roll, pitch, vfov).
class FieldObjective {
public:
  FieldObjective(const PerspectiveField &field, int subgrid, ResidualWeights weights);

  Eigen::VectorXd residuals(const Eigen::Vector3d &x) const;
  double rms(const Eigen::Vector3d &x) const;
  Eigen::MatrixXd forward_jacobian(const Eigen::Vector3d &x, double step) const;
  Eigen::MatrixXd central_jacobian(const Eigen::Vector3d &x, double step) const;

  std::size_t sample_count() const { return samples_.size(); }

private:
  struct Sample {
    double x, y;
    Vec2 up;
    double latitude;
  };
  PixelGridSpec grid_;
  ResidualWeights weights_;
  std::vector<Sample> samples_;
};

/// Throws DomainError for fields smaller than 16x16 or with non-finite values.
CalibrationResult calibrate_from_field(const PerspectiveField &field,
                                       const CalibrationSettings &settings = {});

} // namespace camfield
