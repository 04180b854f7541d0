#include "primalign/oracle.hpp"

#include <cmath>

#include "primalign/error.hpp"

namespace primalign {

Vec3 centroid(const std::vector<Vec3>& pts) {
  Vec3 c = Vec3::Zero();
  for (const Vec3& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

namespace {

void check_cloud_sizes(const std::vector<Vec3>& x, const std::vector<Vec3>& y) {
  if (x.size() != y.size()) throw InvalidInputError("point clouds differ in size");
  if (x.size() < 3) throw InvalidInputError("need at least 3 correspondences");
}

}  // namespace

SvdDecomposition correlation_svd(const std::vector<Vec3>& x, const std::vector<Vec3>& y) {
  check_cloud_sizes(x, y);
  const Vec3 xb = centroid(x);
  const Vec3 yb = centroid(y);
  SvdDecomposition d;
  for (size_t i = 0; i < x.size(); ++i) {
    d.correlation += (y[i] - yb) * (x[i] - xb).transpose();
  }
  Eigen::JacobiSVD<Mat3> svd(d.correlation, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  const double det_uv = u.determinant() * v.determinant();
  d.u_plus = u;
  d.u_plus.col(2) *= u.determinant();
  d.v_plus = v;
  d.v_plus.col(2) *= v.determinant();
  d.singular = svd.singularValues();
  d.sprime = d.singular;
  d.sprime.z() *= det_uv;
  return d;
}

RigidTransform horn_svd(const std::vector<Vec3>& x, const std::vector<Vec3>& y) {
  return horn_svd_full(x, y).transform;
}

HornResult horn_svd_full(const std::vector<Vec3>& x, const std::vector<Vec3>& y) {
  HornResult res;
  res.svd = correlation_svd(x, y);
  res.transform.rotation = res.svd.u_plus * res.svd.v_plus.transpose();
  res.transform.translation = centroid(y) - res.transform.rotation * centroid(x);
  const Vec3& s = res.svd.singular;
  const double scale = std::max(s.x(), 1e-300);
  res.degenerate = (s.x() - s.y() <= 1e-8 * scale) || (s.y() - s.z() <= 1e-8 * scale) ||
                   (s.z() <= 1e-8 * scale);
  return res;
}

double registration_cost(const std::vector<Vec3>& x, const std::vector<Vec3>& y,
                         const RigidTransform& t) {
  check_cloud_sizes(x, y);
  double cost = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    cost += (y[i] - t.apply(x[i])).squaredNorm();
  }
  return cost;
}

double torque_residual(const std::vector<Vec3>& x, const std::vector<Vec3>& y, const Mat3& r) {
  check_cloud_sizes(x, y);
  const Vec3 xb = centroid(x);
  const Vec3 yb = centroid(y);
  Vec3 tau = Vec3::Zero();
  for (size_t i = 0; i < x.size(); ++i) {
    tau += (x[i] - xb).cross(r.transpose() * (y[i] - yb));
  }
  return tau.norm();
}

EquilibriumSet equilibrium_set(const std::vector<Vec3>& x, const std::vector<Vec3>& y) {
  const HornResult horn = horn_svd_full(x, y);
  if (horn.degenerate) {
    throw DegenerateConfigurationError(
        "equilibrium_set: singular values not distinct and positive");
  }
  EquilibriumSet eq;
  eq.svd = horn.svd;
  eq.translation = centroid(y);
  eq.optimal_index = 0;
  eq.rotations[0] = horn.transform.rotation;  // same expression, same bits
  const std::array<Vec3, 3> flips = {Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)};
  for (int j = 1; j < 4; ++j) {
    eq.rotations[j] =
        eq.svd.u_plus * flips[j - 1].asDiagonal() * eq.svd.v_plus.transpose();
  }
  return eq;
}

InstabilityCertificate instability_certificate(const EquilibriumSet& eq, int spurious_index,
                                               double theta, double spring) {
  if (spurious_index < 2 || spurious_index > 4) {
    throw InvalidIndexError("instability_certificate: spurious index must be 2, 3 or 4");
  }
  if (!(theta > 0.0) || !(theta < M_PI)) {
    throw InvalidInputError("instability_certificate: theta must lie in (0, pi)");
  }
  const Vec3& s = eq.svd.sprime;
  InstabilityCertificate cert;
  double pair_sum = 0.0;
  switch (spurious_index) {
    case 2:
      pair_sum = s.y() + s.z();
      cert.perturb_axis = eq.svd.u_plus.col(0);
      break;
    case 3:
      pair_sum = s.x() + s.z();
      cert.perturb_axis = eq.svd.u_plus.col(1);
      break;
    default:
      pair_sum = s.x() + s.y();
      cert.perturb_axis = eq.svd.u_plus.col(2);
      break;
  }
  cert.energy_drop = spring * (1.0 - std::cos(theta)) * pair_sum;
  return cert;
}

}  // namespace primalign
