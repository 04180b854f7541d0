#pragma once

#include <string>

#include <json.hpp>

#include "primalign/harness.hpp"
#include "primalign/solver.hpp"
#include "primalign/sue.hpp"

namespace primalign {

using Json = nlohmann::json;

// Primitive objects are keyed by "type" in {point, line, plane, sphere,
// cylinder, cone, ellipsoid}; vectors are 3-arrays, the ellipsoid matrix a
// row-major 9-array. Parse errors throw InvalidInputError with the offending
// field path.
Json primitive_to_json(const Primitive& p);
Primitive primitive_from_json(const Json& j, const std::string& context);

// Scene document: {"version": "1", "correspondences": [{"x": ..., "y": ...}],
// "groundtruth": {"quaternion_xyzw": [...], "translation": [...]}} with the
// groundtruth optional.
Json scene_to_json(const Scene& scene);
Scene scene_from_json(const Json& j);
Scene load_scene(const std::string& path);
void save_scene(const std::string& path, const Scene& scene);

// Category document: {"version": "1", "K": k, "N": n,
// "shapes": [[[x,y,z] * N] * K], "keypoint_names": optional}.
Json category_to_json(const CategoryLibrary& lib);
CategoryLibrary category_from_json(const Json& j);
CategoryLibrary load_category(const std::string& path);

// Uncertainty-ellipsoid model document (means, covariances, ellipsoid
// matrices, plus the chi-square quantile and regularization used).
Json sue_model_to_json(const SueModel& model);
SueModel sue_model_from_json(const Json& j);

// Parses a file with diagnostics carrying the path. Throws InvalidInputError.
Json load_json_file(const std::string& path);

}  // namespace primalign
