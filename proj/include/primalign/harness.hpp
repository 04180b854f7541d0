#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "primalign/oracle.hpp"
#include "primalign/solver.hpp"
#include "primalign/sue.hpp"

namespace primalign {

struct NoiseSpec {
  double sigma_3d = 0.0;
  double sigma_2d = 0.0;
};

// Geodesic angle between two rotations, in degrees (0..180). Throws
// InvalidInputError when either argument is not a proper rotation.
double rotation_error_deg(const Mat3& r1, const Mat3& r2);

double translation_error(const Vec3& t1, const Vec3& t2);

// ---------------------------------------------------------------------------
// Scenario generators. All are pure functions of their seed and parameters
// and store the groundtruth transform in the scene.

// Point-cloud pair: n standard-normal points, random rigid motion, isotropic
// Gaussian noise of the given sigma on the targets.
Scene gen_pcr(uint64_t seed, int n = 100, double sigma = 0.01);

struct PrimitiveMix {
  int points = 50;
  int lines = 50;
  int planes = 50;
  int spheres = 0;
  int cylinders = 0;
  int cones = 0;

  int total() const { return points + lines + planes + spheres + cylinders + cones; }
};

// Random primitives inside a ball of the given radius; one point sampled on
// each primitive, carried through a random rigid motion and noised, becomes
// the source set.
Scene gen_primitive_reg(uint64_t seed, const PrimitiveMix& mix, double radius = 10.0,
                        double sigma = 0.01);

// Source: keypoints of a random convex combination of the library shapes under
// a random rigid motion. Target: the library's uncertainty ellipsoids.
Scene gen_category_reg(uint64_t seed, const CategoryLibrary& lib, double eta = 0.5);

// Absolute pose: n points in the [-2,2]x[-2,2]x[4,8] camera box, projected to
// the unit-focal image plane with 2D Gaussian noise; targets are the bearing
// lines through the origin, sources the world-frame points.
Scene gen_ape(uint64_t seed, int n, double sigma_2d = 0.01);

// Category absolute pose: sources are the library's uncertainty ellipsoids,
// targets the bearing lines of a synthesized instance seen by the camera.
Scene gen_category_ape(uint64_t seed, const CategoryLibrary& lib, double sigma_2d = 0.01,
                       double eta = 0.5);

enum class SymmetricKind { kTriangle, kSquare };

// Planar regular configurations (circumradius 1) where the source is the
// target rotated by theta and flipped across its own symmetry axis. The
// as-given placement balances all spring forces and torques, so the state
// derivative vanishes there for every theta.
Scene gen_symmetric(SymmetricKind kind, double theta);

// Random category library for synthetic experiments: a base shape inside the
// unit-ish ball plus per-instance Gaussian keypoint spread. spread = 0 gives
// identical shapes.
CategoryLibrary make_synthetic_library(uint64_t seed, int num_shapes = 3,
                                       int num_keypoints = 12, double spread = 0.05);

// ---------------------------------------------------------------------------
// Monte Carlo runner

struct TrialResult {
  uint64_t seed = 0;
  double rotation_error_deg = 0.0;
  double translation_error = 0.0;
  int iterations = 0;
  double final_cost = 0.0;
  bool success = false;
  double wall_time_s = 0.0;
};

enum class BenchFamily { kPcr, kPrimitive, kCategory, kApe, kCategoryApe, kSymmetric };

const char* family_name(BenchFamily family);

struct BenchOptions {
  BenchFamily family = BenchFamily::kPcr;
  int trials = 100;
  uint64_t seed = 0;
  int n = 100;             // points (pcr/ape), per-type count (primitive), keypoints (category)
  NoiseSpec noise{0.01, 0.01};  // 3D channel for the 3D-3D families, 2D for the ape ones
  double radius = 10.0;    // primitive scene radius
  double eta = 0.5;        // SUE confidence
  int category_shapes = 3;
  double category_spread = 0.05;
  double rot_success_deg = 5.0;
  double trans_success = 0.5;
  SolverConfig solver;     // per-trial seed is filled in by the runner
};

// Family defaults; the ape families get the larger step budget they need.
BenchOptions default_bench_options(BenchFamily family);

struct BenchSummary {
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double rot_err_median = 0.0;
  double rot_err_max = 0.0;
  double trans_err_median = 0.0;
  double trans_err_max = 0.0;
  double iters_median = 0.0;
  int iters_max = 0;
  double total_time_s = 0.0;
};

struct BenchRun {
  std::vector<TrialResult> results;  // in seed (trial) order
  BenchSummary summary;
};

// Runs options.trials independent trials with per-trial seeds derived from
// options.seed. Deterministic apart from the wall-clock fields.
BenchRun run_monte_carlo(const BenchOptions& options);

// CSV with header seed,rot_err_deg,trans_err,iters,cost,success,time_s.
// Unless include_timing is set the time column is written as zero so that
// repeated runs are byte-identical.
void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& results,
                      bool include_timing = false);

std::string summary_line(const BenchSummary& summary);

}  // namespace primalign
