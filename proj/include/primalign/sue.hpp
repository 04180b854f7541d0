#pragma once

#include <string>
#include <vector>

#include "primalign/geometry.hpp"

namespace primalign {

// A category described by K instance shapes, each a 3xN list of corresponding
// keypoints.
struct CategoryLibrary {
  std::vector<Eigen::Matrix3Xd> shapes;
  std::vector<std::string> keypoint_names;  // optional, may be empty

  int num_shapes() const { return static_cast<int>(shapes.size()); }
  int num_keypoints() const {
    return shapes.empty() ? 0 : static_cast<int>(shapes.front().cols());
  }
};

// Throws InvalidInputError unless K >= 2 and all shapes share N >= 1.
void validate_library(const CategoryLibrary& lib);

// Chi-square(3) distribution function, closed form via erf.
double chi2_cdf_3dof(double x);

// Quantile q with CDF(q) = eta, solved to 1e-10. Throws InvalidInputError
// outside (0, 1).
double chi2_quantile_3dof(double eta);

// Per-keypoint uncertainty ellipsoid of a category: mean keypoint position,
// population covariance across instances, and the confidence-eta containment
// ellipsoid {p : (p - mean)^T A (p - mean) <= 1} with
// A = (chi2_3(eta) * (C + reg I))^{-1}.
struct SueKeypoint {
  Vec3 mean = Vec3::Zero();
  Mat3 covariance = Mat3::Zero();       // population covariance, unregularized
  Mat3 ellipsoid = Mat3::Identity();    // A, symmetric positive definite
};

struct SueModel {
  std::vector<SueKeypoint> keypoints;
  double eta = 0.5;
  double chi2 = 0.0;            // chi2_3(eta) actually used
  double regularization = 0.0;  // reg actually used
};

// Default covariance regularization: 1e-6 of the mean squared keypoint spread
// across the library, floored at 1e-8 so identical-shape libraries still give
// valid ellipsoids.
double default_regularization(const CategoryLibrary& lib);

SueModel build_sues(const CategoryLibrary& lib, double eta, double reg);
SueModel build_sues(const CategoryLibrary& lib, double eta = 0.5);

// Convex combination of the library shapes. Weights must be nonnegative and
// sum to 1 within 1e-9.
Eigen::Matrix3Xd synthesize_instance(const CategoryLibrary& lib,
                                     const std::vector<double>& weights);

}  // namespace primalign
