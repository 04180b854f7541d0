#include <doctest.h>

#include "primalign/error.hpp"
#include "primalign/harness.hpp"
#include "primalign/oracle.hpp"
#include "primalign/solver.hpp"

using namespace primalign;

namespace {

Scene square_scene() {
  Scene scene;
  const std::vector<Vec3> pts = {Vec3(1, 1, 0), Vec3(-1, 1, 0), Vec3(-1, -1, 0),
                                 Vec3(1, -1, 1)};
  for (const Vec3& p : pts) {
    scene.source.push_back(Point{p});
    scene.target.push_back(Point{p});
  }
  return scene;
}

std::vector<Vec3> anchors_of(const std::vector<Primitive>& prims) {
  std::vector<Vec3> out;
  for (const Primitive& p : prims) out.push_back(anchor(p));
  return out;
}

}  // namespace

TEST_CASE("aligned scene converges immediately to the identity") {
  const Scene scene = square_scene();
  const SolveReport report = damp_solve(scene, SolverConfig{});
  CHECK(report.status == SolveStatus::kConverged);
  CHECK(report.iterations <= 2);
  CHECK((report.transform.rotation - Mat3::Identity()).norm() < 1e-6);
  CHECK(report.transform.translation.norm() < 1e-6);
  CHECK(report.final_cost < 1e-12);
}

TEST_CASE("point-cloud solve matches the closed-form optimum") {
  const Scene scene = gen_pcr(1234, 100, 0.01);
  const SolveReport report = damp_solve(scene, SolverConfig{});
  CHECK(report.status == SolveStatus::kConverged);
  CHECK(report.iterations <= 200);

  const RigidTransform horn =
      horn_svd(anchors_of(scene.source), anchors_of(scene.target));
  const double rot_diff_rad =
      rotation_error_deg(report.transform.rotation, horn.rotation) * M_PI / 180.0;
  CHECK(rot_diff_rad < 1e-3);
  CHECK(translation_error(report.transform.translation, horn.translation) < 1e-3);
}

TEST_CASE("converged status implies a small derivative at the returned state") {
  const Scene scene = gen_pcr(77, 50, 0.01);
  SolverConfig cfg;
  const SolveReport report = damp_solve(scene, cfg);
  REQUIRE(report.status == SolveStatus::kConverged);

  const BodyModel body = build_body(anchors_of(scene.source), cfg.mass);
  const auto pairs = scene_pairs(scene, state_transform(body, report.final_state));
  const ForceSet forces = spring_forces(pairs, cfg.spring);
  const StateVec sdot = state_derivative(report.final_state, forces, body, cfg.dynamics());
  CHECK(sdot.norm() < cfg.epsilon);
}

TEST_CASE("equilibrium necessary conditions at a converged point-cloud solution") {
  const Scene scene = gen_pcr(4321, 80, 0.01);
  const SolveReport report = damp_solve(scene, SolverConfig{});
  REQUIRE(report.status == SolveStatus::kConverged);

  const std::vector<Vec3> xs = anchors_of(scene.source);
  const std::vector<Vec3> ys = anchors_of(scene.target);
  CHECK((report.final_state.x_c - centroid(ys)).norm() < 1e-5);
  CHECK(torque_residual(xs, ys, report.transform.rotation) < 1e-4);
}

TEST_CASE("damp_step") {
  SUBCASE("rest with coincident pairs is a fixed point") {
    const Scene scene = square_scene();
    const BodyModel body = build_body(anchors_of(scene.source), 1.0);
    const BodyState rest = BodyState::at_rest(body.x_bar);
    const StepResult step = damp_step(rest, scene, body, SolverConfig{});
    CHECK(step.sdot_norm == 0.0);
    CHECK(step.potential == 0.0);
    CHECK((step.state.x_c - rest.x_c).norm() == 0.0);
    CHECK((step.state.q.coeffs() - rest.q.coeffs()).norm() == 0.0);
  }

  SUBCASE("one offset pair accelerates the center of mass") {
    Scene scene = square_scene();
    const Vec3 offset(0.0, 0.0, 2.0);
    scene.target[2] = Point{anchor(scene.source[2]) + offset};
    SolverConfig cfg;
    const BodyModel body = build_body(anchors_of(scene.source), cfg.mass);
    const BodyState rest = BodyState::at_rest(body.x_bar);
    const StepResult step = damp_step(rest, scene, body, cfg);
    const Vec3 expected = cfg.dt * (cfg.spring / body.total_mass) * offset;
    CHECK((step.state.v_c - expected).norm() < 1e-14);
    CHECK(std::abs(step.state.q.norm() - 1.0) < 1e-15);
    CHECK(step.potential == doctest::Approx(0.5 * cfg.spring * offset.squaredNorm()));
  }
}

TEST_CASE("perturb_derivative") {
  SUBCASE("seeded reproducibility and fresh draws") {
    Rng a(99), b(99);
    const StateVec v1 = perturb_derivative(a);
    const StateVec v2 = perturb_derivative(b);
    CHECK((v1 - v2).norm() == 0.0);
    const StateVec v3 = perturb_derivative(a);
    CHECK((v1 - v3).norm() > 0.0);
  }

  SUBCASE("standard-normal sample moments") {
    Rng rng(2024);
    Eigen::Matrix<double, 13, 1> mean = StateVec::Zero();
    Eigen::Matrix<double, 13, 1> sq = StateVec::Zero();
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      const StateVec v = perturb_derivative(rng);
      mean += v;
      sq += v.cwiseProduct(v);
    }
    mean /= draws;
    sq /= draws;
    for (int i = 0; i < 13; ++i) {
      CHECK(std::abs(mean[i]) < 0.05);
      CHECK(std::abs(sq[i] - mean[i] * mean[i] - 1.0) < 0.1);
    }
  }
}

TEST_CASE("escape keeps the lowest recorded equilibrium") {
  const Scene scene = gen_ape(5, 60, 0.01);
  SolverConfig cfg;
  cfg.escape_minimum = true;
  cfg.max_steps = 5000;
  cfg.seed = 5;
  const SolveReport report = damp_solve(scene, cfg);
  REQUIRE(!report.equilibrium_energies.empty());
  double best = report.equilibrium_energies.front().second;
  for (const auto& [trial, energy] : report.equilibrium_energies) {
    best = std::min(best, energy);
  }
  const double returned_potential = 0.5 * cfg.spring * report.final_cost;
  CHECK(std::abs(returned_potential - best) < 1e-9);
  // Trial indices are consecutive from zero.
  for (size_t i = 0; i < report.equilibrium_energies.size(); ++i) {
    CHECK(report.equilibrium_energies[i].first == static_cast<int>(i));
  }
}

TEST_CASE("identical configuration and seed reproduce the report exactly") {
  const Scene scene = gen_ape(11, 50, 0.01);
  SolverConfig cfg;
  cfg.escape_minimum = true;
  cfg.max_steps = 4000;
  cfg.seed = 42;
  cfg.record_trace = true;
  const SolveReport a = damp_solve(scene, cfg);
  const SolveReport b = damp_solve(scene, cfg);
  CHECK((a.transform.rotation - b.transform.rotation).norm() == 0.0);
  CHECK((a.transform.translation - b.transform.translation).norm() == 0.0);
  CHECK(a.iterations == b.iterations);
  CHECK(a.final_cost == b.final_cost);
  REQUIRE(a.equilibrium_energies.size() == b.equilibrium_energies.size());
  for (size_t i = 0; i < a.equilibrium_energies.size(); ++i) {
    CHECK(a.equilibrium_energies[i].second == b.equilibrium_energies[i].second);
  }
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].sdot_norm == b.trace[i].sdot_norm);
    CHECK(a.trace[i].potential == b.trace[i].potential);
  }
}

TEST_CASE("pre-rotating the targets maps the solution accordingly") {
  Rng rng(55);
  const Scene scene = gen_pcr(9, 60, 0.0);
  const SolveReport base = damp_solve(scene, SolverConfig{});

  const RigidTransform s{rng.rotation(), Vec3::Zero()};
  Scene rotated = scene;
  for (Primitive& y : rotated.target) y = transform_primitive(s, y);
  const SolveReport moved = damp_solve(rotated, SolverConfig{});

  const RigidTransform expected = s.compose(base.transform);
  CHECK(rotation_error_deg(moved.transform.rotation, expected.rotation) * M_PI / 180.0 <
        1e-3);
  CHECK(translation_error(moved.transform.translation, expected.translation) < 1e-3);
}

TEST_CASE("max_steps exhaustion reports max_steps_reached") {
  const Scene scene = gen_pcr(13, 40, 0.01);
  SolverConfig cfg;
  cfg.max_steps = 3;
  const SolveReport report = damp_solve(scene, cfg);
  CHECK(report.status == SolveStatus::kMaxStepsReached);
  CHECK(report.iterations == 3);
}

TEST_CASE("scene validation errors") {
  SUBCASE("collinear sources") {
    Scene scene;
    for (int i = 0; i < 4; ++i) {
      scene.source.push_back(Point{Vec3(i, 0, 0)});
      scene.target.push_back(Point{Vec3(i, 1, 0)});
    }
    CHECK_THROWS_AS(damp_solve(scene, SolverConfig{}), SingularInertiaError);
  }
  SUBCASE("unsupported source kind") {
    Scene scene = square_scene();
    scene.source[0] = Line{Vec3::Zero(), Vec3::UnitX()};
    CHECK_THROWS_AS(validate_scene(scene), UnsupportedPairError);
  }
  SUBCASE("ellipsoid sources require line targets") {
    Scene scene = square_scene();
    scene.source[0] = Ellipsoid{anchor(scene.source[0]), Mat3::Identity()};
    CHECK_THROWS_AS(validate_scene(scene), UnsupportedPairError);
  }
  SUBCASE("size mismatch") {
    Scene scene = square_scene();
    scene.target.pop_back();
    CHECK_THROWS_AS(validate_scene(scene), InvalidInputError);
  }
}
