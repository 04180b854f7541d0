#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "primalign/error.hpp"
#include "primalign/scene_io.hpp"

namespace {

using namespace primalign;

void print_transform(const RigidTransform& t) {
  const Quat q = t.quaternion();
  std::printf("quaternion_xyzw: %.12g %.12g %.12g %.12g\n", q.x(), q.y(), q.z(), q.w());
  std::printf("translation: %.12g %.12g %.12g\n", t.translation.x(), t.translation.y(),
              t.translation.z());
}

int run_solve(const std::string& scene_path, SolverConfig cfg, const std::string& trace_path) {
  const Scene scene = load_scene(scene_path);
  cfg.record_trace = !trace_path.empty();
  const SolveReport report = damp_solve(scene, cfg);

  print_transform(report.transform);
  std::printf("status: %s\n",
              report.status == SolveStatus::kConverged ? "converged" : "max_steps_reached");
  std::printf("iterations: %d\n", report.iterations);
  std::printf("final_cost: %.12g\n", report.final_cost);
  if (!report.equilibrium_energies.empty()) {
    std::printf("equilibria:");
    for (const auto& [trial, energy] : report.equilibrium_energies) {
      std::printf(" %d:%.12g", trial, energy);
    }
    std::printf("\n");
  }
  if (scene.groundtruth) {
    std::printf("rotation_error_deg: %.12g\n",
                rotation_error_deg(report.transform.rotation, scene.groundtruth->rotation));
    std::printf("translation_error: %.12g\n",
                translation_error(report.transform.translation,
                                  scene.groundtruth->translation));
  }
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) throw InvalidInputError("cannot write trace file: " + trace_path);
    out << "step,sdot_norm,potential\n";
    char buf[128];
    for (size_t i = 0; i < report.trace.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g\n", i + 1, report.trace[i].sdot_norm,
                    report.trace[i].potential);
      out << buf;
    }
  }
  return report.status == SolveStatus::kConverged ? 0 : 2;
}

int run_distance() {
  std::stringstream buffer;
  buffer << std::cin.rdbuf();
  Json j;
  try {
    j = Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw InvalidInputError(std::string("stdin: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInputError("stdin: expected {\"x\": ..., \"y\": ...}");
  const Primitive x = primitive_from_json(j.at("x"), "x");
  const Primitive y = primitive_from_json(j.at("y"), "y");
  const DistancePair pair = shortest_distance_pair(x, y);
  std::printf("x_point: %.12f %.12f %.12f\n", pair.x_point.x(), pair.x_point.y(),
              pair.x_point.z());
  std::printf("y_point: %.12f %.12f %.12f\n", pair.y_point.x(), pair.y_point.y(),
              pair.y_point.z());
  std::printf("distance: %.12f\n", pair.distance);
  std::printf("degenerate: %s\n", pair.degenerate ? "true" : "false");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"primalign: rigid alignment of corresponded 3D primitives by simulating "
               "damped spring dynamics"};
  app.require_subcommand(1);

  // --- solve -----------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "Align a scene file and print the transform");
  std::string scene_path;
  std::string trace_path;
  SolverConfig cfg;
  solve->add_option("scene", scene_path, "Scene JSON file")->required();
  solve->add_flag("--escape", cfg.escape_minimum, "Perturb at equilibria and keep the best");
  solve->add_option("--tmax", cfg.max_trials, "Perturbation trials (default 5)");
  solve->add_option("--eps", cfg.epsilon, "Equilibrium threshold (default 1e-6)");
  solve->add_option("--dt", cfg.dt, "Step size (default 0.3)");
  solve->add_option("--kmax", cfg.max_steps, "Maximum steps (default 1000)");
  solve->add_option("--mu", cfg.damping, "Damping coefficient (default 2)");
  solve->add_option("--mass", cfg.mass, "Per-primitive mass (default 1)");
  solve->add_option("--spring", cfg.spring, "Spring coefficient (default 2)");
  solve->add_option("--seed", cfg.seed, "Perturbation seed (default 0)");
  solve->add_option("--trace", trace_path, "Write per-step sdot/potential CSV here");

  // --- bench -----------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "Run a seeded Monte Carlo experiment family");
  std::string family_str;
  bench->add_option("family", family_str, "pcr|primitive|category|ape|category-ape|symmetric")
      ->required()
      ->check(CLI::IsMember(
          {"pcr", "primitive", "category", "ape", "category-ape", "symmetric"}));
  int b_trials = 0;
  double b_noise = 0.0;
  int b_n = 0;
  uint64_t b_seed = 0;
  bool b_escape = false;
  bool b_timing = false;
  std::string out_path;
  double b_radius = 0.0, b_eta = 0.0, b_dt = 0.0, b_eps = 0.0;
  int b_kmax = 0;
  double b_rot_thresh = 0.0, b_trans_thresh = 0.0;
  auto* opt_trials = bench->add_option("--trials", b_trials, "Monte Carlo trials");
  auto* opt_noise = bench->add_option("--noise", b_noise, "Noise sigma (3D, or 2D for ape)");
  auto* opt_n = bench->add_option("--n", b_n, "Points per scene (per type for primitive)");
  auto* opt_seed = bench->add_option("--seed", b_seed, "Master seed (default 0)");
  bench->add_flag("--escape", b_escape, "Enable the escape scheme");
  auto* opt_radius = bench->add_option("--radius", b_radius, "Primitive scene radius");
  auto* opt_eta = bench->add_option("--eta", b_eta, "SUE confidence");
  auto* opt_kmax = bench->add_option("--kmax", b_kmax, "Maximum solver steps");
  auto* opt_dt = bench->add_option("--dt", b_dt, "Solver step size");
  auto* opt_eps = bench->add_option("--eps", b_eps, "Equilibrium threshold");
  auto* opt_rott = bench->add_option("--rot-thresh", b_rot_thresh, "Success: rotation error bound (deg)");
  auto* opt_trat = bench->add_option("--trans-thresh", b_trans_thresh, "Success: translation error bound");
  bench->add_option("--out", out_path, "Write the per-trial CSV here (default: stdout)");
  bench->add_flag("--timing", b_timing, "Record wall times in the CSV (not reproducible)");

  // --- distance ----------------------------------------------------------
  auto* distance =
      app.add_subcommand("distance", "Shortest distance pair for a primitive pair read "
                                     "from stdin as {\"x\": ..., \"y\": ...}");

  // --- sue ---------------------------------------------------------------
  auto* sue = app.add_subcommand("sue", "Build uncertainty ellipsoids from a category file");
  std::string category_path;
  std::string sue_out;
  double eta = 0.5;
  double reg = 0.0;
  sue->add_option("category", category_path, "Category JSON file")->required();
  sue->add_option("--eta", eta, "Confidence in (0,1) (default 0.5)");
  auto* opt_reg = sue->add_option("--reg", reg, "Covariance regularization (default: auto)");
  sue->add_option("--out", sue_out, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve) return run_solve(scene_path, cfg, trace_path);

    if (*bench) {
      BenchFamily family = BenchFamily::kPcr;
      if (family_str == "primitive") family = BenchFamily::kPrimitive;
      else if (family_str == "category") family = BenchFamily::kCategory;
      else if (family_str == "ape") family = BenchFamily::kApe;
      else if (family_str == "category-ape") family = BenchFamily::kCategoryApe;
      else if (family_str == "symmetric") family = BenchFamily::kSymmetric;

      BenchOptions opts = default_bench_options(family);
      if (opt_trials->count()) opts.trials = b_trials;
      if (opt_noise->count()) opts.noise = NoiseSpec{b_noise, b_noise};
      if (opt_n->count()) opts.n = b_n;
      if (opt_seed->count()) opts.seed = b_seed;
      if (opt_radius->count()) opts.radius = b_radius;
      if (opt_eta->count()) opts.eta = b_eta;
      if (opt_kmax->count()) opts.solver.max_steps = b_kmax;
      if (opt_dt->count()) opts.solver.dt = b_dt;
      if (opt_eps->count()) opts.solver.epsilon = b_eps;
      if (opt_rott->count()) opts.rot_success_deg = b_rot_thresh;
      if (opt_trat->count()) opts.trans_success = b_trans_thresh;
      opts.solver.escape_minimum = b_escape;

      const BenchRun run = run_monte_carlo(opts);
      if (out_path.empty()) {
        write_trials_csv(std::cout, run.results, b_timing);
      } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw InvalidInputError("cannot write CSV file: " + out_path);
        write_trials_csv(out, run.results, b_timing);
      }
      std::cout << summary_line(run.summary) << "\n";
      return 0;
    }

    if (*distance) return run_distance();

    if (*sue) {
      const CategoryLibrary lib = load_category(category_path);
      const SueModel model =
          opt_reg->count() ? build_sues(lib, eta, reg) : build_sues(lib, eta);
      const std::string text = sue_model_to_json(model).dump(2);
      if (sue_out.empty()) {
        std::cout << text << "\n";
      } else {
        std::ofstream out(sue_out);
        if (!out) throw InvalidInputError("cannot write file: " + sue_out);
        out << text << "\n";
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
