#pragma once

#include <array>
#include <vector>

#include "primalign/geometry.hpp"

namespace primalign {

// Sign-corrected SVD of the correlation matrix M = sum y_ref x_ref^T:
// M = U+ S' V+^T with U+, V+ proper rotations and
// S' = diag(s1, s2, s3 det(UV)), s1 >= s2 >= s3 >= 0.
struct SvdDecomposition {
  Mat3 correlation = Mat3::Zero();  // M
  Mat3 u_plus = Mat3::Identity();
  Mat3 v_plus = Mat3::Identity();
  Vec3 singular = Vec3::Zero();     // raw singular values, descending
  Vec3 sprime = Vec3::Zero();       // (s1, s2, s3 * det(UV))
};

Vec3 centroid(const std::vector<Vec3>& pts);

SvdDecomposition correlation_svd(const std::vector<Vec3>& x, const std::vector<Vec3>& y);

// Closed-form global minimizer of sum ||y_i - R x_i - t||^2:
// R = U+ V+^T, t = y_bar - R x_bar.
RigidTransform horn_svd(const std::vector<Vec3>& x, const std::vector<Vec3>& y);

struct HornResult {
  RigidTransform transform;
  SvdDecomposition svd;
  bool degenerate = false;  // repeated or vanishing singular values
};

HornResult horn_svd_full(const std::vector<Vec3>& x, const std::vector<Vec3>& y);

// Cost of the point registration objective at a transform.
double registration_cost(const std::vector<Vec3>& x, const std::vector<Vec3>& y,
                         const RigidTransform& t);

// || sum x_ref_i x (R^T y_ref_i) ||, the torque-balance residual of a rotation
// (computed on centered copies of the inputs).
double torque_residual(const std::vector<Vec3>& x, const std::vector<Vec3>& y, const Mat3& r);

// The four torque-balanced rotations of the spring dynamics on a generic
// point-cloud pair: U+ D V+^T for D in {I, diag(1,-1,-1), diag(-1,1,-1),
// diag(-1,-1,1)} with the shared translation x_c = y_bar. Index 0 is the cost
// minimizer; the other three sit a half-turn away and are unstable.
struct EquilibriumSet {
  std::array<Mat3, 4> rotations;
  Vec3 translation = Vec3::Zero();  // y_bar
  int optimal_index = 0;
  SvdDecomposition svd;
};

// Throws DegenerateConfigurationError unless s1 > s2 > s3 > 0 with margin
// 1e-8 * s1.
EquilibriumSet equilibrium_set(const std::vector<Vec3>& x, const std::vector<Vec3>& y);

struct InstabilityCertificate {
  Vec3 perturb_axis;   // global-frame rotation axis whose twist lowers the energy
  double energy_drop;  // k (1 - cos theta) * (pairwise sum of singular values)
};

// Energy decrease produced by twisting a spurious equilibrium by angle theta
// about the certificate axis. The index is 1-based over the equilibrium set
// (rotations[index - 1]), so valid spurious indices are 2, 3, 4; index 1 (the
// optimum) raises InvalidIndexError. Requires 0 < theta < pi.
InstabilityCertificate instability_certificate(const EquilibriumSet& eq, int spurious_index,
                                               double theta, double spring = 2.0);

}  // namespace primalign
