#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "primalign/dynamics.hpp"
#include "primalign/random.hpp"

namespace primalign {

struct SolverConfig {
  double damping = 2.0;       // mu
  double mass = 1.0;          // m, per primitive
  double spring = 2.0;        // k
  bool escape_minimum = false;
  int max_trials = 5;         // perturbation budget when escaping
  double epsilon = 1e-6;      // equilibrium threshold on ||sdot||
  double dt = 0.3;
  int max_steps = 1000;
  uint64_t seed = 0;          // perturbation stream
  bool record_trace = false;

  DynamicsParams dynamics() const { return {damping, mass, spring}; }
};

// Corresponded primitive sets: source[i] (a point or an ellipsoid) is pulled
// toward target[i]. The optional groundtruth is carried for benchmarking only.
struct Scene {
  std::vector<Primitive> source;
  std::vector<Primitive> target;
  std::optional<RigidTransform> groundtruth;

  int size() const { return static_cast<int>(source.size()); }
};

// Throws InvalidInputError / UnsupportedPairError when the correspondences are
// malformed or outside the eight supported pairings.
void validate_scene(const Scene& scene);

enum class SolveStatus { kConverged, kMaxStepsReached };

struct TraceEntry {
  double sdot_norm;
  double potential;
};

struct SolveReport {
  RigidTransform transform;
  SolveStatus status = SolveStatus::kMaxStepsReached;
  int iterations = 0;
  double final_cost = 0.0;  // sum of squared shortest distances at `transform`
  BodyState final_state;    // the full state behind `transform`
  // (trial index, spring potential) recorded at each equilibrium before its
  // perturbation, when escape is enabled.
  std::vector<std::pair<int, double>> equilibrium_energies;
  std::vector<TraceEntry> trace;
};

// Simulates the damped spring dynamics of the source set pulled toward the
// fixed target set and reads the alignment off the equilibrium. With
// escape_minimum, the derivative is randomly redrawn at each detected
// equilibrium (up to max_trials times) and the minimum-potential state wins.
SolveReport damp_solve(const Scene& scene, const SolverConfig& config);

// The rigid transform that carries the source set from its initial pose to
// the pose encoded in `state`.
RigidTransform state_transform(const BodyModel& body, const BodyState& state);

// Shortest-distance pairs between the transformed sources and their targets.
std::vector<DistancePair> scene_pairs(const Scene& scene, const RigidTransform& pose);

// Spring forces k (y - x) applied at the source-side endpoints.
ForceSet spring_forces(const std::vector<DistancePair>& pairs, double spring);

// Cost of the alignment objective (sum of squared distances) at a pose.
double scene_cost(const Scene& scene, const RigidTransform& pose);

struct StepResult {
  BodyState state;
  double sdot_norm;
  double potential;  // from the spring endpoints used for this step
};

// One solver step: distance pairs, forces, derivative, Euler update with
// quaternion renormalization.
StepResult damp_step(const BodyState& state, const Scene& scene,
                     const BodyModel& body, const SolverConfig& config);

// Fresh standard-normal 13-vector replacing the state derivative (the random
// kick of the escape scheme). Deterministic given the generator state.
StateVec perturb_derivative(Rng& rng);

}  // namespace primalign
