#pragma once

#include <vector>

#include "primalign/distance.hpp"
#include "primalign/geometry.hpp"

namespace primalign {

// Parameters of the damped spring dynamics. All strictly positive.
struct DynamicsParams {
  double damping = 2.0;  // mu
  double mass = 1.0;     // m, per primitive
  double spring = 2.0;   // k
};

// Rigid body assembled from the pointed masses of the moving primitive set.
// Built once; the inertia and its Cholesky factor are constant in the body
// frame.
struct BodyModel {
  Vec3 x_bar = Vec3::Zero();        // initial center of mass
  std::vector<Vec3> x_ref;          // body-frame offsets, sum to zero
  Mat3 inertia = Mat3::Zero();      // J = m * sum(||x||^2 I - x x^T)
  Mat3 inertia_factor = Mat3::Zero();  // lower-triangular L with J = L L^T
  double mass = 1.0;                // per-primitive mass m
  double total_mass = 0.0;          // N m

  int size() const { return static_cast<int>(x_ref.size()); }
};

// Throws SingularInertiaError when the points are too few or collinear.
BodyModel build_body(const std::vector<Vec3>& points, double mass);

// 13-dimensional state: center of mass, body-to-global unit quaternion
// (x, y, z, w), linear velocity, and body-frame angular velocity.
struct BodyState {
  Vec3 x_c = Vec3::Zero();
  Quat q = Quat::Identity();
  Vec3 v_c = Vec3::Zero();
  Vec3 omega = Vec3::Zero();

  static BodyState at_rest(const Vec3& x) {
    BodyState s;
    s.x_c = x;
    return s;
  }
};

// Flat layout [x_c, q(x,y,z,w), v_c, omega] used for derivatives,
// perturbations and norms.
using StateVec = Eigen::Matrix<double, 13, 1>;

// External forces and their global-frame application points, one per primitive.
struct ForceSet {
  std::vector<Vec3> force;
  std::vector<Vec3> point;
};

struct TotalForce {
  Vec3 total = Vec3::Zero();        // f = sum of damped forces
  std::vector<Vec3> per_primitive;  // f_i' = f_i - mu m (v_c + R (omega x x_ref_i))
};

TotalForce total_force(const BodyState& state, const ForceSet& forces,
                       const BodyModel& body, const DynamicsParams& params);

// Body-frame torque about the center of mass,
// sum of R^T(p_i - x_c) x (R^T f_i').
Vec3 total_torque(const BodyState& state, const std::vector<Vec3>& f_prime,
                  const ForceSet& forces, const BodyModel& body);

// Equations of motion: xdot = v, qdot = q (*) (omega, 0) / 2, vdot = f / M,
// and omegadot from two triangular solves with the inertia factor.
StateVec state_derivative(const BodyState& state, const ForceSet& forces,
                          const BodyModel& body, const DynamicsParams& params);

// One explicit Euler step with quaternion renormalization.
BodyState apply_step(const BodyState& state, const StateVec& sdot, double dt);

struct Energies {
  double kinetic = 0.0;    // M ||v||^2 / 2 + omega^T J omega / 2
  double potential = 0.0;  // (k/2) sum of squared spring lengths
};

Energies energies(const BodyState& state, const BodyModel& body,
                  const std::vector<DistancePair>& spring_pairs, double spring);

}  // namespace primalign
