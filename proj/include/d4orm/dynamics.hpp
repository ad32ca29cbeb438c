#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "d4orm/types.hpp"

namespace d4orm {

enum class ModelKind { DiffDrive, Holo2D, Holo3D };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Kinodynamic robot model, xdot = f(x, u) with a box-bounded control set.
///
/// State layouts:
///   DiffDrive  [p_x, p_y, theta, v]          controls [omega, a]
///   Holo2D     [p_x, p_y, v_x, v_y]          controls [a_x, a_y]
///   Holo3D     [p_x, p_y, p_z, v_x, v_y, v_z] controls [a_x, a_y, a_z]
struct DynamicsModel {
  ModelKind kind{ModelKind::Holo2D};
  int state_dim{4};
  int control_dim{2};
  Vector control_lower;
  Vector control_upper;

  int position_dim() const { return kind == ModelKind::Holo3D ? 3 : 2; }

  /// Default control bounds are +-limit on every axis (rad/s and m/s^2 for
  /// DiffDrive, m/s^2 for the holonomic models).
  static DynamicsModel make(ModelKind kind, double control_limit = 2.0);
};

/// Control sequences for the whole team. Rows [k*du, (k+1)*du) belong to
/// robot k; column t is the control held over the step t -> t+1.
struct JointControls {
  int robots{0};
  int control_dim{0};
  Matrix u;  // (robots * control_dim) x horizon

  int horizon() const { return static_cast<int>(u.cols()); }

  auto robot(int k) { return u.middleRows(k * control_dim, control_dim); }
  auto robot(int k) const { return u.middleRows(k * control_dim, control_dim); }

  static JointControls zeros(int robots, int control_dim, int horizon);
};

/// Rolled-out joint trajectory: H+1 states per robot (column 0 is the start)
/// and the executed, bound-clamped controls. Column H of `controls` is a zero
/// placeholder so states and controls share one time axis.
struct JointTrajectory {
  int robots{0};
  int state_dim{0};
  int control_dim{0};
  double dt{0.0};
  Matrix states;    // (robots * state_dim) x (H+1)
  Matrix controls;  // (robots * control_dim) x (H+1)

  int horizon() const { return static_cast<int>(states.cols()) - 1; }

  auto robot_states(int k) const { return states.middleRows(k * state_dim, state_dim); }
  auto robot_controls(int k) const { return controls.middleRows(k * control_dim, control_dim); }

  Vector state(int k, int t) const { return states.col(t).segment(k * state_dim, state_dim); }
  Vector control(int k, int t) const { return controls.col(t).segment(k * control_dim, control_dim); }

  /// Position of robot k at step t (the leading position_dim state entries).
  Vector position(int k, int t, int position_dim) const {
    return states.col(t).segment(k * state_dim, position_dim);
  }

  /// The H executed controls, usable as the base of a deformation update.
  JointControls executed_controls() const;
};

namespace detail {

struct DiffDriveDerivative {
  template <class Vec, class UVec>
  Vec operator()(const Vec& x, const UVec& u) const {
    Vec dx(x.size());
    const double theta = x[2];
    const double v = x[3];
    dx[0] = v * std::cos(theta);
    dx[1] = v * std::sin(theta);
    dx[2] = u[0];
    dx[3] = u[1];
    return dx;
  }
};

struct Holo2DDerivative {
  template <class Vec, class UVec>
  Vec operator()(const Vec& x, const UVec& u) const {
    Vec dx(x.size());
    dx[0] = x[2];
    dx[1] = x[3];
    dx[2] = u[0];
    dx[3] = u[1];
    return dx;
  }
};

struct Holo3DDerivative {
  template <class Vec, class UVec>
  Vec operator()(const Vec& x, const UVec& u) const {
    Vec dx(x.size());
    dx[0] = x[3];
    dx[1] = x[4];
    dx[2] = x[5];
    dx[3] = u[0];
    dx[4] = u[1];
    dx[5] = u[2];
    return dx;
  }
};

// One template shared by the dynamic-size public entry points and the
// fixed-size rollout loop, so the two paths agree bitwise.
template <class Fn, class Vec, class UVec>
inline Vec rk4_with(const Fn& f, const Vec& x, const UVec& u, double dt) {
  const Vec k1 = f(x, u);
  const Vec k2 = f(Vec(x + (0.5 * dt) * k1), u);
  const Vec k3 = f(Vec(x + (0.5 * dt) * k2), u);
  const Vec k4 = f(Vec(x + dt * k3), u);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

/// Closed-form xdot = f(x, u). Throws std::invalid_argument on dimension
/// mismatch.
Vector derivative(const DynamicsModel& model, const Vector& x, const Vector& u);

/// One RK4 step with the control held constant over dt. The caller is
/// responsible for clamping u; rollout() does so before integrating.
Vector rk4_step(const DynamicsModel& model, const Vector& x, const Vector& u, double dt);

/// Integrates every robot independently from its start state. Controls are
/// clamped to the model bounds exactly once, before the first stage
/// evaluation. Throws std::runtime_error naming the robot and step if a state
/// goes non-finite.
///
/// `starts` holds one start state per column (state_dim x robots).
JointTrajectory rollout(const DynamicsModel& model, const Matrix& starts,
                        const JointControls& controls, double dt);

/// Elementwise identical to mapping rollout() over the batch; members may be
/// integrated in parallel, results land in preassigned slots.
std::vector<JointTrajectory> batch_rollout(const DynamicsModel& model, const Matrix& starts,
                                           const std::vector<JointControls>& batch, double dt,
                                           int workers = 0);

}  // namespace d4orm
