#include "primalign/dynamics.hpp"

#include <cmath>

#include "primalign/error.hpp"

namespace primalign {

BodyModel build_body(const std::vector<Vec3>& points, double mass) {
  const int n = static_cast<int>(points.size());
  if (n < 3) {
    throw SingularInertiaError("build_body: need at least 3 mass points");
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw SingularInertiaError("build_body: mass must be positive");
  }
  BodyModel body;
  body.mass = mass;
  body.total_mass = mass * n;
  body.x_bar = Vec3::Zero();
  for (const Vec3& p : points) body.x_bar += p;
  body.x_bar /= n;

  body.x_ref.reserve(points.size());
  Mat3 j = Mat3::Zero();
  for (const Vec3& p : points) {
    const Vec3 r = p - body.x_bar;
    body.x_ref.push_back(r);
    j += mass * (r.squaredNorm() * Mat3::Identity() - r * r.transpose());
  }
  body.inertia = 0.5 * (j + j.transpose());

  Eigen::SelfAdjointEigenSolver<Mat3> es(body.inertia);
  const double max_eig = es.eigenvalues().maxCoeff();
  if (!(es.eigenvalues().minCoeff() > 1e-12 * std::max(max_eig, 1e-300))) {
    throw SingularInertiaError("build_body: inertia not positive definite (collinear points)");
  }
  Eigen::LLT<Mat3> llt(body.inertia);
  if (llt.info() != Eigen::Success) {
    throw SingularInertiaError("build_body: inertia Cholesky failed");
  }
  body.inertia_factor = llt.matrixL();
  return body;
}

TotalForce total_force(const BodyState& state, const ForceSet& forces,
                       const BodyModel& body, const DynamicsParams& params) {
  const Mat3 r = quat_to_rotmat(state.q);
  TotalForce out;
  out.per_primitive.reserve(forces.force.size());
  for (int i = 0; i < body.size(); ++i) {
    // Damping acts against the global-frame velocity of the pointed mass.
    const Vec3 point_velocity = state.v_c + r * (state.omega.cross(body.x_ref[i]));
    const Vec3 fp = forces.force[i] - params.damping * params.mass * point_velocity;
    out.per_primitive.push_back(fp);
    out.total += fp;
  }
  return out;
}

Vec3 total_torque(const BodyState& state, const std::vector<Vec3>& f_prime,
                  const ForceSet& forces, const BodyModel& body) {
  const Mat3 rt = quat_to_rotmat(state.q).transpose();
  Vec3 tau = Vec3::Zero();
  for (int i = 0; i < body.size(); ++i) {
    const Vec3 lever = rt * (forces.point[i] - state.x_c);
    tau += lever.cross(rt * f_prime[i]);
  }
  return tau;
}

StateVec state_derivative(const BodyState& state, const ForceSet& forces,
                          const BodyModel& body, const DynamicsParams& params) {
  const TotalForce f = total_force(state, forces, body, params);
  const Vec3 tau = total_torque(state, f.per_primitive, forces, body);

  // J omega_dot = tau - omega x J omega, via the stored factor L L^T.
  const Vec3 rhs = tau - state.omega.cross(body.inertia * state.omega);
  const Vec3 half = body.inertia_factor.triangularView<Eigen::Lower>().solve(rhs);
  const Vec3 omega_dot =
      body.inertia_factor.transpose().triangularView<Eigen::Upper>().solve(half);

  const Quat qdot = quat_multiply(state.q, homogenize(state.omega));

  StateVec sdot;
  sdot.segment<3>(0) = state.v_c;
  sdot.segment<4>(3) = 0.5 * qdot.coeffs();  // (x, y, z, w)
  sdot.segment<3>(7) = f.total / body.total_mass;
  sdot.segment<3>(10) = omega_dot;
  return sdot;
}

BodyState apply_step(const BodyState& state, const StateVec& sdot, double dt) {
  BodyState next = state;
  next.x_c += dt * sdot.segment<3>(0);
  next.q.coeffs() += dt * sdot.segment<4>(3);
  const double qn = next.q.coeffs().norm();
  if (qn < 1e-12) {
    next.q = Quat::Identity();  // degenerate perturbation; reset orientation
  } else {
    next.q.coeffs() /= qn;
  }
  next.v_c += dt * sdot.segment<3>(7);
  next.omega += dt * sdot.segment<3>(10);
  return next;
}

Energies energies(const BodyState& state, const BodyModel& body,
                  const std::vector<DistancePair>& spring_pairs, double spring) {
  Energies e;
  e.kinetic = 0.5 * body.total_mass * state.v_c.squaredNorm() +
              0.5 * state.omega.dot(body.inertia * state.omega);
  for (const DistancePair& p : spring_pairs) {
    e.potential += 0.5 * spring * p.distance * p.distance;
  }
  return e;
}

}  // namespace primalign
