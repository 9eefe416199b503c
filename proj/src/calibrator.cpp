#include "camfield/calibrator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace camfield {

namespace {

constexpr double kMinVfov = deg2rad(1.0);
constexpr double kMaxVfov = deg2rad(179.0);

CameraParams to_params(const Eigen::Vector3d &x) {
  return {x[0], x[1], 0.0, std::clamp(x[2], kMinVfov, kMaxVfov)};
}

void check_field(const PerspectiveField &field) {
  if (field.grid.width < 16 || field.grid.height < 16) {
    throw DomainError("calibration needs a field of at least 16x16, got " +
                      std::to_string(field.grid.width) + "x" +
                      std::to_string(field.grid.height));
  }
  if (field.up.size() != field.grid.pixel_count() ||
      field.latitude.size() != field.grid.pixel_count()) {
    throw DomainError("field buffers do not match its grid");
  }
  for (std::size_t i = 0; i < field.up.size(); ++i) {
    if (!field.up[i].allFinite() || !std::isfinite(field.latitude[i])) {
      throw DomainError("field has a non-finite value at pixel " + std::to_string(i));
    }
  }
}

std::vector<int> subgrid_axis(int size, int samples) {
  if (samples <= 0 || samples >= size) {
    std::vector<int> all(size);
    for (int i = 0; i < size; ++i) all[i] = i;
    return all;
  }
  std::vector<int> idx(samples);
  for (int i = 0; i < samples; ++i) {
    idx[i] = static_cast<int>(std::floor((i + 0.5) * size / samples));
  }
  return idx;
}

} // namespace

double up_angle_gap(const Vec2 &observed, const Vec2 &predicted) {
  const double cross = predicted.x() * observed.y() - predicted.y() * observed.x();
  const double dot = predicted.dot(observed);
  return std::atan2(cross, dot);
}

ResidualVector residual(const CameraParams &params, const PerspectiveField &field,
                        const ResidualWeights &weights) {
  const FieldModel model(params, field.grid);
  const double su = std::sqrt(weights.up), sl = std::sqrt(weights.latitude);
  ResidualVector out;
  out.values.resize(2 * field.grid.pixel_count());
  double sum = 0.0;
  for (int y = 0; y < field.grid.height; ++y) {
    for (int x = 0; x < field.grid.width; ++x) {
      const std::size_t i = field.index(x, y);
      const FieldSample pred = model.at(x, y);
      const double ru = su * up_angle_gap(field.up[i], pred.up);
      const double rl = sl * (field.latitude[i] - pred.latitude);
      out.values[2 * i] = ru;
      out.values[2 * i + 1] = rl;
      sum += ru * ru + rl * rl;
    }
  }
  out.rms = std::sqrt(sum / static_cast<double>(out.values.size()));
  return out;
}

FieldObjective::FieldObjective(const PerspectiveField &field, int subgrid,
                               ResidualWeights weights)
    : grid_(field.grid), weights_(weights) {
  const auto xs = subgrid_axis(field.grid.width, subgrid);
  const auto ys = subgrid_axis(field.grid.height, subgrid);
  samples_.reserve(xs.size() * ys.size());
  for (int y : ys) {
    for (int x : xs) {
      const FieldSample s = field.at(x, y);
      samples_.push_back({static_cast<double>(x), static_cast<double>(y), s.up, s.latitude});
    }
  }
}

Eigen::VectorXd FieldObjective::residuals(const Eigen::Vector3d &x) const {
  const FieldModel model(to_params(x), grid_);
  const double su = std::sqrt(weights_.up), sl = std::sqrt(weights_.latitude);
  Eigen::VectorXd r(2 * samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const Sample &s = samples_[i];
    const FieldSample pred = model.at(s.x, s.y);
    r[2 * i] = su * up_angle_gap(s.up, pred.up);
    r[2 * i + 1] = sl * (s.latitude - pred.latitude);
  }
  return r;
}

double FieldObjective::rms(const Eigen::Vector3d &x) const {
  const Eigen::VectorXd r = residuals(x);
  return std::sqrt(r.squaredNorm() / static_cast<double>(r.size()));
}

Eigen::MatrixXd FieldObjective::forward_jacobian(const Eigen::Vector3d &x,
                                                 double step) const {
  const Eigen::VectorXd r0 = residuals(x);
  Eigen::MatrixXd jac(r0.size(), 3);
  for (int j = 0; j < 3; ++j) {
    Eigen::Vector3d xp = x;
    xp[j] += step;
    jac.col(j) = (residuals(xp) - r0) / step;
  }
  return jac;
}

Eigen::MatrixXd FieldObjective::central_jacobian(const Eigen::Vector3d &x,
                                                 double step) const {
  Eigen::MatrixXd jac(2 * samples_.size(), 3);
  for (int j = 0; j < 3; ++j) {
    Eigen::Vector3d xp = x, xm = x;
    xp[j] += step;
    xm[j] -= step;
    jac.col(j) = (residuals(xp) - residuals(xm)) / (2.0 * step);
  }
  return jac;
}

CalibrationResult calibrate_from_field(const PerspectiveField &field,
                                       const CalibrationSettings &settings) {
  check_field(field);
  const FieldObjective objective(field, settings.subgrid, settings.weights);

  // Coarse grid search.
  Eigen::Vector3d x;
  double best = std::numeric_limits<double>::infinity();
  for (int roll = -45; roll <= 45; roll += 15) {
    for (int pitch = -45; pitch <= 45; pitch += 15) {
      for (int fov = 25; fov <= 100; fov += 15) {
        const Eigen::Vector3d cand(deg2rad(roll), deg2rad(pitch), deg2rad(fov));
        const double cost = objective.rms(cand);
        if (cost < best) {
          best = cost;
          x = cand;
        }
      }
    }
  }

  CalibrationResult result;
  Eigen::VectorXd r = objective.residuals(x);
  double cost = r.squaredNorm();
  const double n = static_cast<double>(r.size());
  result.accepted_rms.push_back(std::sqrt(cost / n));

  double damping = settings.initial_damping;
  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    result.iterations = iter + 1;
    const Eigen::MatrixXd jac = objective.forward_jacobian(x, settings.jacobian_step);
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d grad = jac.transpose() * r;

    bool accepted = false;
    bool small_step = false;
    while (damping < 1e16) {
      Eigen::Matrix3d lhs = jtj;
      for (int k = 0; k < 3; ++k) lhs(k, k) += damping * std::max(jtj(k, k), 1e-12);
      const Eigen::Vector3d step = lhs.ldlt().solve(-grad);
      if (!step.allFinite()) {
        damping *= 10.0;
        continue;
      }
      if (step.norm() < settings.step_tolerance) {
        small_step = true;
        break;
      }
      Eigen::Vector3d trial = x + step;
      trial[2] = std::clamp(trial[2], kMinVfov, kMaxVfov);
      const Eigen::VectorXd r_trial = objective.residuals(trial);
      const double cost_trial = r_trial.squaredNorm();
      if (cost_trial < cost) {
        const double rel = (cost - cost_trial) / std::max(cost, 1e-300);
        x = trial;
        r = r_trial;
        cost = cost_trial;
        damping = std::max(damping / 10.0, 1e-12);
        accepted = true;
        result.accepted_rms.push_back(std::sqrt(cost / n));
        // Relative change of the RMS, not of the squared cost.
        if (1.0 - std::sqrt(1.0 - rel) < settings.relative_tolerance) small_step = true;
        break;
      }
      damping *= 10.0;
    }
    if (small_step) {
      result.converged = true;
      break;
    }
    if (!accepted) {
      // Damping saturated: no descent direction left at this precision.
      result.converged = cost / n < 1e-20;
      break;
    }
  }

  result.params = to_params(x);
  result.residual_rms = residual(result.params, field, settings.weights).rms;
  return result;
}

} // namespace camfield
