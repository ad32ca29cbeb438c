#include "d4orm/dynamics.hpp"

#include <stdexcept>

#include "d4orm/parallel.hpp"

namespace d4orm {

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::DiffDrive: return "diffdrive";
    case ModelKind::Holo2D: return "holo2d";
    case ModelKind::Holo3D: return "holo3d";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "diffdrive") return ModelKind::DiffDrive;
  if (name == "holo2d") return ModelKind::Holo2D;
  if (name == "holo3d") return ModelKind::Holo3D;
  throw std::invalid_argument("unknown model kind: " + name +
                              " (expected diffdrive, holo2d, or holo3d)");
}

DynamicsModel DynamicsModel::make(ModelKind kind, double control_limit) {
  if (!(control_limit > 0.0)) {
    throw std::invalid_argument("control_limit must be positive");
  }
  DynamicsModel model;
  model.kind = kind;
  model.state_dim = kind == ModelKind::Holo3D ? 6 : 4;
  model.control_dim = kind == ModelKind::Holo3D ? 3 : 2;
  model.control_lower = Vector::Constant(model.control_dim, -control_limit);
  model.control_upper = Vector::Constant(model.control_dim, control_limit);
  return model;
}

JointControls JointControls::zeros(int robots, int control_dim, int horizon) {
  if (robots < 1 || control_dim < 1 || horizon < 1) {
    throw std::invalid_argument("JointControls::zeros: dimensions must be positive");
  }
  return {robots, control_dim, Matrix::Zero(robots * control_dim, horizon)};
}

JointControls JointTrajectory::executed_controls() const {
  return {robots, control_dim, controls.leftCols(horizon())};
}

namespace {

void check_dims(const DynamicsModel& model, const Vector& x, const Vector& u, const char* what) {
  if (x.size() != model.state_dim) {
    throw std::invalid_argument(std::string(what) + ": state has dimension " +
                                std::to_string(x.size()) + ", model expects " +
                                std::to_string(model.state_dim));
  }
  if (u.size() != model.control_dim) {
    throw std::invalid_argument(std::string(what) + ": control has dimension " +
                                std::to_string(u.size()) + ", model expects " +
                                std::to_string(model.control_dim));
  }
}

template <int DX, int DU, class Fn>
void rollout_robot(const Fn& deriv, const DynamicsModel& model, int robot, const Matrix& starts,
                   const JointControls& controls, double dt, JointTrajectory& out) {
  using StateVec = Eigen::Matrix<double, DX, 1>;
  using ControlVec = Eigen::Matrix<double, DU, 1>;
  const int horizon = controls.horizon();
  const ControlVec lower = model.control_lower;
  const ControlVec upper = model.control_upper;

  StateVec x = starts.col(robot);
  out.states.col(0).segment(robot * DX, DX) = x;
  for (int t = 0; t < horizon; ++t) {
    const ControlVec raw = controls.u.col(t).segment(robot * DU, DU);
    const ControlVec u = raw.cwiseMax(lower).cwiseMin(upper);
    out.controls.col(t).segment(robot * DU, DU) = u;
    x = detail::rk4_with(deriv, x, u, dt);
    if (!x.allFinite()) {
      throw std::runtime_error("rollout: non-finite state for robot " + std::to_string(robot) +
                               " at step " + std::to_string(t + 1));
    }
    out.states.col(t + 1).segment(robot * DX, DX) = x;
  }
}

}  // namespace

Vector derivative(const DynamicsModel& model, const Vector& x, const Vector& u) {
  check_dims(model, x, u, "derivative");
  switch (model.kind) {
    case ModelKind::DiffDrive: return detail::DiffDriveDerivative{}(x, u);
    case ModelKind::Holo2D: return detail::Holo2DDerivative{}(x, u);
    case ModelKind::Holo3D: return detail::Holo3DDerivative{}(x, u);
  }
  throw std::invalid_argument("derivative: unknown model kind");
}

Vector rk4_step(const DynamicsModel& model, const Vector& x, const Vector& u, double dt) {
  check_dims(model, x, u, "rk4_step");
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
  Vector next;
  switch (model.kind) {
    case ModelKind::DiffDrive:
      next = detail::rk4_with(detail::DiffDriveDerivative{}, x, u, dt);
      break;
    case ModelKind::Holo2D:
      next = detail::rk4_with(detail::Holo2DDerivative{}, x, u, dt);
      break;
    case ModelKind::Holo3D:
      next = detail::rk4_with(detail::Holo3DDerivative{}, x, u, dt);
      break;
  }
  if (!next.allFinite()) {
    throw std::runtime_error("rk4_step: non-finite state after step");
  }
  return next;
}

JointTrajectory rollout(const DynamicsModel& model, const Matrix& starts,
                        const JointControls& controls, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("rollout: dt must be positive");
  if (starts.rows() != model.state_dim) {
    throw std::invalid_argument("rollout: starts have " + std::to_string(starts.rows()) +
                                " state entries, model expects " +
                                std::to_string(model.state_dim));
  }
  if (static_cast<int>(starts.cols()) != controls.robots) {
    throw std::invalid_argument("rollout: " + std::to_string(starts.cols()) +
                                " start states for " + std::to_string(controls.robots) +
                                " robots");
  }
  if (controls.control_dim != model.control_dim) {
    throw std::invalid_argument("rollout: control dimension mismatch");
  }
  if (controls.robots < 1 || controls.horizon() < 1) {
    throw std::invalid_argument("rollout: empty control trajectory");
  }
  if (!starts.allFinite()) {
    throw std::invalid_argument("rollout: non-finite start state");
  }

  const int n = controls.robots;
  const int horizon = controls.horizon();
  JointTrajectory out;
  out.robots = n;
  out.state_dim = model.state_dim;
  out.control_dim = model.control_dim;
  out.dt = dt;
  out.states.resize(n * model.state_dim, horizon + 1);
  out.controls = Matrix::Zero(n * model.control_dim, horizon + 1);

  for (int k = 0; k < n; ++k) {
    switch (model.kind) {
      case ModelKind::DiffDrive:
        rollout_robot<4, 2>(detail::DiffDriveDerivative{}, model, k, starts, controls, dt, out);
        break;
      case ModelKind::Holo2D:
        rollout_robot<4, 2>(detail::Holo2DDerivative{}, model, k, starts, controls, dt, out);
        break;
      case ModelKind::Holo3D:
        rollout_robot<6, 3>(detail::Holo3DDerivative{}, model, k, starts, controls, dt, out);
        break;
    }
  }
  return out;
}

std::vector<JointTrajectory> batch_rollout(const DynamicsModel& model, const Matrix& starts,
                                           const std::vector<JointControls>& batch, double dt,
                                           int workers) {
  std::vector<JointTrajectory> out(batch.size());
  parallel_for(static_cast<int>(batch.size()), workers, [&](int m) {
    try {
      out[m] = rollout(model, starts, batch[m], dt);
    } catch (const std::exception& e) {
      throw std::runtime_error("batch_rollout: member " + std::to_string(m) + ": " + e.what());
    }
  });
  return out;
}

}  // namespace d4orm
