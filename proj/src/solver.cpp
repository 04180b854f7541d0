#include "primalign/solver.hpp"

#include <algorithm>
#include <cmath>

#include "primalign/error.hpp"

namespace primalign {

void validate_scene(const Scene& scene) {
  if (scene.source.size() != scene.target.size()) {
    throw InvalidInputError("scene: source and target sizes differ");
  }
  if (scene.source.empty()) {
    throw InvalidInputError("scene: no correspondences");
  }
  for (int i = 0; i < scene.size(); ++i) {
    validate(scene.source[i]);
    validate(scene.target[i]);
    const PrimitiveKind kx = kind(scene.source[i]);
    if (kx != PrimitiveKind::kPoint && kx != PrimitiveKind::kEllipsoid) {
      throw UnsupportedPairError("scene: source primitives must be points or ellipsoids");
    }
    if (kx == PrimitiveKind::kEllipsoid && kind(scene.target[i]) != PrimitiveKind::kLine) {
      throw UnsupportedPairError("scene: ellipsoid sources pair only with line targets");
    }
  }
  if (scene.groundtruth && !scene.groundtruth->is_valid(1e-6)) {
    throw InvalidInputError("scene: groundtruth is not a rigid transform");
  }
}

RigidTransform state_transform(const BodyModel& body, const BodyState& state) {
  const Mat3 r = quat_to_rotmat(state.q);
  return {r, state.x_c - r * body.x_bar};
}

std::vector<DistancePair> scene_pairs(const Scene& scene, const RigidTransform& pose) {
  std::vector<DistancePair> pairs;
  pairs.reserve(scene.source.size());
  for (int i = 0; i < scene.size(); ++i) {
    pairs.push_back(shortest_distance_pair(transform_primitive(pose, scene.source[i]),
                                           scene.target[i]));
  }
  return pairs;
}

ForceSet spring_forces(const std::vector<DistancePair>& pairs, double spring) {
  ForceSet forces;
  forces.force.reserve(pairs.size());
  forces.point.reserve(pairs.size());
  for (const DistancePair& p : pairs) {
    forces.force.push_back(spring * (p.y_point - p.x_point));
    forces.point.push_back(p.x_point);
  }
  return forces;
}

double scene_cost(const Scene& scene, const RigidTransform& pose) {
  double cost = 0.0;
  for (const DistancePair& p : scene_pairs(scene, pose)) {
    cost += p.distance * p.distance;
  }
  return cost;
}

StateVec perturb_derivative(Rng& rng) {
  StateVec v;
  for (int i = 0; i < 13; ++i) v[i] = rng.normal();
  return v;
}

namespace {

std::vector<Vec3> source_anchors(const Scene& scene) {
  std::vector<Vec3> anchors;
  anchors.reserve(scene.source.size());
  for (const Primitive& p : scene.source) anchors.push_back(anchor(p));
  return anchors;
}

struct StepEval {
  std::vector<DistancePair> pairs;
  ForceSet forces;
  StateVec sdot;
  double sdot_norm;
  double potential;
};

StepEval eval_step(const BodyState& state, const Scene& scene, const BodyModel& body,
                   const SolverConfig& config) {
  StepEval ev;
  ev.pairs = scene_pairs(scene, state_transform(body, state));
  ev.forces = spring_forces(ev.pairs, config.spring);
  ev.sdot = state_derivative(state, ev.forces, body, config.dynamics());
  ev.sdot_norm = ev.sdot.norm();
  ev.potential = 0.0;
  for (const DistancePair& p : ev.pairs) {
    ev.potential += 0.5 * config.spring * p.distance * p.distance;
  }
  return ev;
}

}  // namespace

StepResult damp_step(const BodyState& state, const Scene& scene, const BodyModel& body,
                     const SolverConfig& config) {
  const StepEval ev = eval_step(state, scene, body, config);
  return {apply_step(state, ev.sdot, config.dt), ev.sdot_norm, ev.potential};
}

SolveReport damp_solve(const Scene& scene, const SolverConfig& config) {
  validate_scene(scene);
  const BodyModel body = build_body(source_anchors(scene), config.mass);
  BodyState state = BodyState::at_rest(body.x_bar);
  Rng rng(config.seed);

  SolveReport report;
  std::vector<BodyState> equilibrium_states;
  int trials = 0;
  bool broke_at_equilibrium = false;

  for (int step = 1; step <= config.max_steps; ++step) {
    report.iterations = step;
    StepEval ev = eval_step(state, scene, body, config);
    if (config.record_trace) report.trace.push_back({ev.sdot_norm, ev.potential});

    if (ev.sdot_norm < config.epsilon) {
      if (config.escape_minimum && trials <= config.max_trials) {
        report.equilibrium_energies.emplace_back(trials, ev.potential);
        equilibrium_states.push_back(state);
        ev.sdot = perturb_derivative(rng);  // random kick, used for this update only
        ++trials;
      } else {
        broke_at_equilibrium = true;
        break;
      }
    }
    state = apply_step(state, ev.sdot, config.dt);
  }

  if (config.escape_minimum && !equilibrium_states.empty()) {
    // Keep the lowest-potential equilibrium among those recorded, even when
    // the step budget ran out mid-trials.
    const auto best = std::min_element(
        report.equilibrium_energies.begin(), report.equilibrium_energies.end(),
        [](const auto& a, const auto& b) { return a.second < b.second; });
    state = equilibrium_states[static_cast<size_t>(
        best - report.equilibrium_energies.begin())];
    report.status = SolveStatus::kConverged;
  } else {
    report.status =
        broke_at_equilibrium ? SolveStatus::kConverged : SolveStatus::kMaxStepsReached;
  }

  report.final_state = state;
  report.transform = state_transform(body, state);
  report.final_cost = scene_cost(scene, report.transform);
  return report;
}

}  // namespace primalign
