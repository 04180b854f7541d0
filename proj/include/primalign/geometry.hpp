#pragma once

#include <string_view>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace primalign {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Unit quaternion, scalar-last convention: coefficients are stored and
// serialized as (x, y, z, w), identity is (0, 0, 0, 1).
using Quat = Eigen::Quaterniond;

inline constexpr double kUnitTol = 1e-9;

// Skew-symmetric matrix of v, so that hat(v) * a == v.cross(a).
Mat3 hat(const Vec3& v);

// Rodrigues formula. Throws InvalidInputError if the axis is not unit-norm.
Mat3 axis_angle_to_rotmat(const Vec3& axis, double angle);

// Hamilton product a (*) b; works on non-unit quaternions as well.
Quat quat_multiply(const Quat& a, const Quat& b);

// Rotation matrix of a unit quaternion.
Mat3 quat_to_rotmat(const Quat& q);

// Embeds an angular velocity as the pure quaternion (omega, 0).
Quat homogenize(const Vec3& omega);

Quat identity_quat();

// ---------------------------------------------------------------------------
// Rigid transform

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 rotate(const Vec3& v) const { return rotation * v; }

  // this after other: (this * other)(p) == this(other(p)).
  RigidTransform compose(const RigidTransform& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }

  RigidTransform inverse() const {
    return {rotation.transpose(), -(rotation.transpose() * translation)};
  }

  // R^T R = I and det R = +1 within tol.
  bool is_valid(double tol = kUnitTol) const;

  // Quaternion of the rotation, sign-canonicalized to w >= 0.
  Quat quaternion() const;

  static RigidTransform identity() { return {}; }
  static RigidTransform from_quat(const Quat& q, const Vec3& t);
};

// ---------------------------------------------------------------------------
// Geometric primitives

struct Point {
  Vec3 x;
};

struct Line {
  Vec3 x;  // a point on the line
  Vec3 v;  // unit direction
};

struct Plane {
  Vec3 x;  // a point on the plane
  Vec3 n;  // unit normal
};

struct Sphere {
  Vec3 x;  // center
  double r;
};

struct Cylinder {
  Vec3 x;  // a point on the central axis
  Vec3 v;  // unit axis direction
  double r;
};

struct Cone {
  Vec3 x;       // apex
  Vec3 v;       // unit axis direction, pointing into the cone
  double theta;  // half angle, in (0, pi/2)
};

struct Ellipsoid {
  Vec3 x;  // center
  Mat3 A;  // SPD; the solid set is (p - x)^T A (p - x) <= 1
};

using Primitive = std::variant<Point, Line, Plane, Sphere, Cylinder, Cone, Ellipsoid>;

enum class PrimitiveKind { kPoint, kLine, kPlane, kSphere, kCylinder, kCone, kEllipsoid };

PrimitiveKind kind(const Primitive& p);
std::string_view kind_name(PrimitiveKind k);

// The pointed-mass location: the point itself, line/plane anchor, center, or apex.
Vec3 anchor(const Primitive& p);

// Throws InvalidInputError when a field violates its invariant (non-unit
// direction, r <= 0, theta outside (0, pi/2), A not symmetric positive definite,
// non-finite coordinates).
void validate(const Primitive& p);

// Applies a rigid transform: anchor points map by the full transform,
// directions/normals by the rotation only, the ellipsoid matrix by R A R^T,
// radii and angles are unchanged.
Primitive transform_primitive(const RigidTransform& T, const Primitive& p);

// Approximate Euclidean distance from p to the primitive's point set
// (0 for interior points of solid primitives). Used for membership checks.
double membership_violation(const Primitive& prim, const Vec3& p);

// Length scale of the primitive (radius, largest semi-axis, 1 when unbounded).
double characteristic_size(const Primitive& prim);

}  // namespace primalign
