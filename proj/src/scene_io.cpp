#include "primalign/scene_io.hpp"

#include <fstream>

#include "primalign/error.hpp"

namespace primalign {

namespace {

[[noreturn]] void fail(const std::string& context, const std::string& what) {
  throw InvalidInputError(context + ": " + what);
}

double number_at(const Json& j, const std::string& context) {
  if (!j.is_number()) fail(context, "expected a number");
  return j.get<double>();
}

Vec3 vec3_from(const Json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 3) fail(context, "expected a 3-array");
  return Vec3(number_at(j[0], context), number_at(j[1], context), number_at(j[2], context));
}

Json vec3_to(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Mat3 mat3_from(const Json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 9) fail(context, "expected a row-major 9-array");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      m(r, c) = number_at(j[3 * r + c], context);
    }
  }
  return m;
}

Json mat3_to(const Mat3& m) {
  Json out = Json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out.push_back(m(r, c));
  }
  return out;
}

const Json& field(const Json& j, const char* key, const std::string& context) {
  const auto it = j.find(key);
  if (it == j.end()) fail(context, std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

Json primitive_to_json(const Primitive& p) {
  Json j;
  j["type"] = std::string(kind_name(kind(p)));
  std::visit(
      [&j](const auto& prim) {
        using P = std::decay_t<decltype(prim)>;
        j["x"] = vec3_to(prim.x);
        if constexpr (std::is_same_v<P, Line> || std::is_same_v<P, Cylinder> ||
                      std::is_same_v<P, Cone>) {
          j["v"] = vec3_to(prim.v);
        }
        if constexpr (std::is_same_v<P, Plane>) j["n"] = vec3_to(prim.n);
        if constexpr (std::is_same_v<P, Sphere> || std::is_same_v<P, Cylinder>) {
          j["r"] = prim.r;
        }
        if constexpr (std::is_same_v<P, Cone>) j["theta"] = prim.theta;
        if constexpr (std::is_same_v<P, Ellipsoid>) j["A"] = mat3_to(prim.A);
      },
      p);
  return j;
}

Primitive primitive_from_json(const Json& j, const std::string& context) {
  if (!j.is_object()) fail(context, "expected a primitive object");
  const Json& type_field = field(j, "type", context);
  if (!type_field.is_string()) fail(context, "'type' must be a string");
  const std::string type = type_field.get<std::string>();
  const Vec3 x = vec3_from(field(j, "x", context), context + ".x");

  Primitive out;
  if (type == "point") {
    out = Point{x};
  } else if (type == "line") {
    out = Line{x, vec3_from(field(j, "v", context), context + ".v")};
  } else if (type == "plane") {
    out = Plane{x, vec3_from(field(j, "n", context), context + ".n")};
  } else if (type == "sphere") {
    out = Sphere{x, number_at(field(j, "r", context), context + ".r")};
  } else if (type == "cylinder") {
    out = Cylinder{x, vec3_from(field(j, "v", context), context + ".v"),
                   number_at(field(j, "r", context), context + ".r")};
  } else if (type == "cone") {
    out = Cone{x, vec3_from(field(j, "v", context), context + ".v"),
               number_at(field(j, "theta", context), context + ".theta")};
  } else if (type == "ellipsoid") {
    out = Ellipsoid{x, mat3_from(field(j, "A", context), context + ".A")};
  } else {
    fail(context, "unknown primitive type '" + type + "'");
  }
  try {
    validate(out);
  } catch (const InvalidInputError& e) {
    fail(context, e.what());
  }
  return out;
}

Json scene_to_json(const Scene& scene) {
  Json j;
  j["version"] = "1";
  Json corr = Json::array();
  for (int i = 0; i < scene.size(); ++i) {
    corr.push_back(Json{{"x", primitive_to_json(scene.source[i])},
                        {"y", primitive_to_json(scene.target[i])}});
  }
  j["correspondences"] = std::move(corr);
  if (scene.groundtruth) {
    const Quat q = scene.groundtruth->quaternion();
    j["groundtruth"] = Json{
        {"quaternion_xyzw", Json::array({q.x(), q.y(), q.z(), q.w()})},
        {"translation", vec3_to(scene.groundtruth->translation)}};
  }
  return j;
}

Scene scene_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInputError("scene: expected a JSON object");
  Scene scene;
  const Json& corr = field(j, "correspondences", "scene");
  if (!corr.is_array()) throw InvalidInputError("scene.correspondences: expected an array");
  int idx = 0;
  for (const Json& item : corr) {
    const std::string context = "scene.correspondences[" + std::to_string(idx) + "]";
    if (!item.is_object()) fail(context, "expected an object");
    scene.source.push_back(primitive_from_json(field(item, "x", context), context + ".x"));
    scene.target.push_back(primitive_from_json(field(item, "y", context), context + ".y"));
    ++idx;
  }
  if (j.contains("groundtruth") && !j["groundtruth"].is_null()) {
    const Json& gt = j["groundtruth"];
    const Json& qj = field(gt, "quaternion_xyzw", "scene.groundtruth");
    if (!qj.is_array() || qj.size() != 4) {
      fail("scene.groundtruth.quaternion_xyzw", "expected a 4-array");
    }
    Quat q;
    q.x() = number_at(qj[0], "scene.groundtruth.quaternion_xyzw");
    q.y() = number_at(qj[1], "scene.groundtruth.quaternion_xyzw");
    q.z() = number_at(qj[2], "scene.groundtruth.quaternion_xyzw");
    q.w() = number_at(qj[3], "scene.groundtruth.quaternion_xyzw");
    if (std::abs(q.norm() - 1.0) > 1e-6) {
      fail("scene.groundtruth.quaternion_xyzw", "quaternion must be unit-norm");
    }
    scene.groundtruth = RigidTransform::from_quat(
        q, vec3_from(field(gt, "translation", "scene.groundtruth"),
                     "scene.groundtruth.translation"));
  }
  validate_scene(scene);
  return scene;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open file: " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidInputError(path + ": " + e.what());
  }
}

Scene load_scene(const std::string& path) { return scene_from_json(load_json_file(path)); }

void save_scene(const std::string& path, const Scene& scene) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write file: " + path);
  out << scene_to_json(scene).dump(2) << "\n";
}

Json category_to_json(const CategoryLibrary& lib) {
  Json j;
  j["version"] = "1";
  j["K"] = lib.num_shapes();
  j["N"] = lib.num_keypoints();
  Json shapes = Json::array();
  for (const auto& shape : lib.shapes) {
    Json pts = Json::array();
    for (int i = 0; i < shape.cols(); ++i) pts.push_back(vec3_to(shape.col(i)));
    shapes.push_back(std::move(pts));
  }
  j["shapes"] = std::move(shapes);
  if (!lib.keypoint_names.empty()) j["keypoint_names"] = lib.keypoint_names;
  return j;
}

CategoryLibrary category_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInputError("category: expected a JSON object");
  const Json& shapes = field(j, "shapes", "category");
  if (!shapes.is_array()) throw InvalidInputError("category.shapes: expected an array");
  CategoryLibrary lib;
  int k = 0;
  for (const Json& shape : shapes) {
    const std::string context = "category.shapes[" + std::to_string(k) + "]";
    if (!shape.is_array()) fail(context, "expected an array of [x,y,z] triples");
    Eigen::Matrix3Xd m(3, shape.size());
    for (size_t i = 0; i < shape.size(); ++i) {
      m.col(i) = vec3_from(shape[i], context + "[" + std::to_string(i) + "]");
    }
    lib.shapes.push_back(std::move(m));
    ++k;
  }
  if (j.contains("keypoint_names")) {
    lib.keypoint_names = j["keypoint_names"].get<std::vector<std::string>>();
  }
  if (j.contains("K") && j["K"].get<int>() != lib.num_shapes()) {
    throw InvalidInputError("category.K disagrees with the number of shapes");
  }
  if (j.contains("N") && j["N"].get<int>() != lib.num_keypoints()) {
    throw InvalidInputError("category.N disagrees with the keypoint count");
  }
  validate_library(lib);
  return lib;
}

CategoryLibrary load_category(const std::string& path) {
  return category_from_json(load_json_file(path));
}

Json sue_model_to_json(const SueModel& model) {
  Json j;
  j["version"] = "1";
  j["eta"] = model.eta;
  j["chi2_quantile"] = model.chi2;
  j["regularization"] = model.regularization;
  Json kps = Json::array();
  for (const SueKeypoint& kp : model.keypoints) {
    kps.push_back(Json{{"mean", vec3_to(kp.mean)},
                       {"covariance", mat3_to(kp.covariance)},
                       {"ellipsoid", mat3_to(kp.ellipsoid)}});
  }
  j["keypoints"] = std::move(kps);
  return j;
}

SueModel sue_model_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInputError("sue model: expected a JSON object");
  SueModel model;
  model.eta = number_at(field(j, "eta", "sue"), "sue.eta");
  model.chi2 = number_at(field(j, "chi2_quantile", "sue"), "sue.chi2_quantile");
  model.regularization = number_at(field(j, "regularization", "sue"), "sue.regularization");
  const Json& kps = field(j, "keypoints", "sue");
  if (!kps.is_array()) throw InvalidInputError("sue.keypoints: expected an array");
  int i = 0;
  for (const Json& kp : kps) {
    const std::string context = "sue.keypoints[" + std::to_string(i) + "]";
    SueKeypoint out;
    out.mean = vec3_from(field(kp, "mean", context), context + ".mean");
    out.covariance = mat3_from(field(kp, "covariance", context), context + ".covariance");
    out.ellipsoid = mat3_from(field(kp, "ellipsoid", context), context + ".ellipsoid");
    model.keypoints.push_back(out);
    ++i;
  }
  return model;
}

}  // namespace primalign
