#include "primalign/sue.hpp"

#include <cmath>

#include "primalign/error.hpp"

namespace primalign {

void validate_library(const CategoryLibrary& lib) {
  if (lib.num_shapes() < 2) {
    throw InvalidInputError("category library: need at least 2 instance shapes");
  }
  const int n = lib.num_keypoints();
  if (n < 1) throw InvalidInputError("category library: shapes have no keypoints");
  for (const auto& shape : lib.shapes) {
    if (shape.cols() != n) {
      throw InvalidInputError("category library: shapes disagree on keypoint count");
    }
    if (!shape.allFinite()) {
      throw InvalidInputError("category library: non-finite keypoint");
    }
  }
  if (!lib.keypoint_names.empty() && static_cast<int>(lib.keypoint_names.size()) != n) {
    throw InvalidInputError("category library: keypoint name count mismatch");
  }
}

double chi2_cdf_3dof(double x) {
  if (x <= 0.0) return 0.0;
  // P(chi2_3 <= x) = erf(sqrt(x/2)) - sqrt(2x/pi) exp(-x/2)
  return std::erf(std::sqrt(0.5 * x)) - std::sqrt(2.0 * x / M_PI) * std::exp(-0.5 * x);
}

double chi2_quantile_3dof(double eta) {
  if (!(eta > 0.0) || !(eta < 1.0)) {
    throw InvalidInputError("chi2_quantile_3dof: eta must lie in (0, 1)");
  }
  double lo = 0.0;
  double hi = 1.0;
  while (chi2_cdf_3dof(hi) < eta) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) break;  // eta this close to 1 saturates long before
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (chi2_cdf_3dof(mid) < eta ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double default_regularization(const CategoryLibrary& lib) {
  validate_library(lib);
  const int k = lib.num_shapes();
  const int n = lib.num_keypoints();
  Eigen::Matrix3Xd mean = Eigen::Matrix3Xd::Zero(3, n);
  for (const auto& shape : lib.shapes) mean += shape;
  mean /= k;
  double spread = 0.0;
  for (const auto& shape : lib.shapes) spread += (shape - mean).squaredNorm();
  spread /= static_cast<double>(k) * n;  // mean squared keypoint spread
  return std::max(1e-8, 1e-6 * spread);
}

SueModel build_sues(const CategoryLibrary& lib, double eta, double reg) {
  validate_library(lib);
  if (!(reg > 0.0)) throw InvalidInputError("build_sues: regularization must be positive");
  SueModel model;
  model.eta = eta;
  model.chi2 = chi2_quantile_3dof(eta);
  model.regularization = reg;

  const int k = lib.num_shapes();
  const int n = lib.num_keypoints();
  model.keypoints.resize(n);
  for (int i = 0; i < n; ++i) {
    SueKeypoint& kp = model.keypoints[i];
    for (int s = 0; s < k; ++s) kp.mean += lib.shapes[s].col(i);
    kp.mean /= k;
    Mat3 cov = Mat3::Zero();
    for (int s = 0; s < k; ++s) {
      const Vec3 d = Vec3(lib.shapes[s].col(i)) - kp.mean;
      cov += d * d.transpose();
    }
    kp.covariance = cov / k;

    Mat3 scaled = model.chi2 * (kp.covariance + reg * Mat3::Identity());
    Mat3 a = Eigen::LLT<Mat3>(scaled).solve(Mat3::Identity());
    kp.ellipsoid = 0.5 * (a + a.transpose());
  }
  return model;
}

SueModel build_sues(const CategoryLibrary& lib, double eta) {
  return build_sues(lib, eta, default_regularization(lib));
}

Eigen::Matrix3Xd synthesize_instance(const CategoryLibrary& lib,
                                     const std::vector<double>& weights) {
  validate_library(lib);
  if (static_cast<int>(weights.size()) != lib.num_shapes()) {
    throw InvalidInputError("synthesize_instance: one weight per shape required");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidInputError("synthesize_instance: weights must be nonnegative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidInputError("synthesize_instance: weights must sum to 1");
  }
  Eigen::Matrix3Xd out = Eigen::Matrix3Xd::Zero(3, lib.num_keypoints());
  for (int s = 0; s < lib.num_shapes(); ++s) out += weights[s] * lib.shapes[s];
  return out;
}

}  // namespace primalign
