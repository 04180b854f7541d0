#include "primalign/geometry.hpp"

#include <cmath>

#include "primalign/error.hpp"

namespace primalign {

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return m;
}

Mat3 axis_angle_to_rotmat(const Vec3& axis, double angle) {
  if (std::abs(axis.norm() - 1.0) > kUnitTol) {
    throw InvalidInputError("axis_angle_to_rotmat: axis must be unit-norm");
  }
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return c * Mat3::Identity() + s * hat(axis) + (1.0 - c) * (axis * axis.transpose());
}

Quat quat_multiply(const Quat& a, const Quat& b) {
  return a * b;  // Eigen implements the Hamilton product
}

Mat3 quat_to_rotmat(const Quat& q) { return q.toRotationMatrix(); }

Quat homogenize(const Vec3& omega) {
  Quat q;
  q.x() = omega.x();
  q.y() = omega.y();
  q.z() = omega.z();
  q.w() = 0.0;
  return q;
}

Quat identity_quat() { return Quat::Identity(); }

bool RigidTransform::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const Mat3 rtr = rotation.transpose() * rotation;
  if ((rtr - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

Quat RigidTransform::quaternion() const {
  Quat q(rotation);
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return q;
}

RigidTransform RigidTransform::from_quat(const Quat& q, const Vec3& t) {
  return {q.normalized().toRotationMatrix(), t};
}

PrimitiveKind kind(const Primitive& p) {
  return static_cast<PrimitiveKind>(p.index());
}

std::string_view kind_name(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::kPoint: return "point";
    case PrimitiveKind::kLine: return "line";
    case PrimitiveKind::kPlane: return "plane";
    case PrimitiveKind::kSphere: return "sphere";
    case PrimitiveKind::kCylinder: return "cylinder";
    case PrimitiveKind::kCone: return "cone";
    case PrimitiveKind::kEllipsoid: return "ellipsoid";
  }
  return "unknown";
}

Vec3 anchor(const Primitive& p) {
  return std::visit([](const auto& prim) { return prim.x; }, p);
}

namespace {

void require_finite(const Vec3& v, const char* what) {
  if (!v.allFinite()) throw InvalidInputError(std::string(what) + ": non-finite coordinates");
}

void require_unit(const Vec3& v, const char* what) {
  require_finite(v, what);
  if (std::abs(v.norm() - 1.0) > kUnitTol) {
    throw InvalidInputError(std::string(what) + ": direction must be unit-norm");
  }
}

void require_spd(const Mat3& a, const char* what) {
  if (!a.allFinite()) throw InvalidInputError(std::string(what) + ": non-finite matrix");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > kUnitTol * (1.0 + a.cwiseAbs().maxCoeff())) {
    throw InvalidInputError(std::string(what) + ": matrix must be symmetric");
  }
  // Cholesky succeeds exactly for positive definite matrices; cheap enough to
  // run on every distance query.
  Eigen::LLT<Mat3> llt(a);
  if (llt.info() != Eigen::Success || !Mat3(llt.matrixL()).diagonal().allFinite() ||
      Mat3(llt.matrixL()).diagonal().minCoeff() <= 0.0) {
    throw InvalidInputError(std::string(what) + ": matrix must be positive definite");
  }
}

}  // namespace

void validate(const Primitive& p) {
  std::visit(
      [](const auto& prim) {
        using T = std::decay_t<decltype(prim)>;
        if constexpr (std::is_same_v<T, Point>) {
          require_finite(prim.x, "point");
        } else if constexpr (std::is_same_v<T, Line>) {
          require_finite(prim.x, "line");
          require_unit(prim.v, "line");
        } else if constexpr (std::is_same_v<T, Plane>) {
          require_finite(prim.x, "plane");
          require_unit(prim.n, "plane");
        } else if constexpr (std::is_same_v<T, Sphere>) {
          require_finite(prim.x, "sphere");
          if (!(prim.r > 0.0) || !std::isfinite(prim.r)) {
            throw InvalidInputError("sphere: radius must be positive");
          }
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          require_finite(prim.x, "cylinder");
          require_unit(prim.v, "cylinder");
          if (!(prim.r > 0.0) || !std::isfinite(prim.r)) {
            throw InvalidInputError("cylinder: radius must be positive");
          }
        } else if constexpr (std::is_same_v<T, Cone>) {
          require_finite(prim.x, "cone");
          require_unit(prim.v, "cone");
          if (!(prim.theta > 0.0) || !(prim.theta < M_PI / 2.0)) {
            throw InvalidInputError("cone: half angle must lie in (0, pi/2)");
          }
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          require_finite(prim.x, "ellipsoid");
          require_spd(prim.A, "ellipsoid");
        }
      },
      p);
}

Primitive transform_primitive(const RigidTransform& T, const Primitive& p) {
  return std::visit(
      [&T](const auto& prim) -> Primitive {
        using P = std::decay_t<decltype(prim)>;
        if constexpr (std::is_same_v<P, Point>) {
          return Point{T.apply(prim.x)};
        } else if constexpr (std::is_same_v<P, Line>) {
          return Line{T.apply(prim.x), T.rotate(prim.v)};
        } else if constexpr (std::is_same_v<P, Plane>) {
          return Plane{T.apply(prim.x), T.rotate(prim.n)};
        } else if constexpr (std::is_same_v<P, Sphere>) {
          return Sphere{T.apply(prim.x), prim.r};
        } else if constexpr (std::is_same_v<P, Cylinder>) {
          return Cylinder{T.apply(prim.x), T.rotate(prim.v), prim.r};
        } else if constexpr (std::is_same_v<P, Cone>) {
          return Cone{T.apply(prim.x), T.rotate(prim.v), prim.theta};
        } else {
          return Ellipsoid{T.apply(prim.x),
                           T.rotation * prim.A * T.rotation.transpose()};
        }
      },
      p);
}

double membership_violation(const Primitive& prim, const Vec3& p) {
  return std::visit(
      [&p](const auto& pr) -> double {
        using P = std::decay_t<decltype(pr)>;
        if constexpr (std::is_same_v<P, Point>) {
          return (p - pr.x).norm();
        } else if constexpr (std::is_same_v<P, Line>) {
          const Vec3 d = p - pr.x;
          return (d - pr.v * pr.v.dot(d)).norm();
        } else if constexpr (std::is_same_v<P, Plane>) {
          return std::abs(pr.n.dot(p - pr.x));
        } else if constexpr (std::is_same_v<P, Sphere>) {
          return std::abs((p - pr.x).norm() - pr.r);
        } else if constexpr (std::is_same_v<P, Cylinder>) {
          const Vec3 d = p - pr.x;
          return std::abs((d - pr.v * pr.v.dot(d)).norm() - pr.r);
        } else if constexpr (std::is_same_v<P, Cone>) {
          const Vec3 d = p - pr.x;
          const double n = d.norm();
          if (n == 0.0) return 0.0;  // the apex lies on the cone
          // Residual of the defining equation, rescaled to a length.
          return std::abs(pr.v.dot(d) - std::cos(pr.theta) * n) / std::sin(pr.theta);
        } else {
          const Vec3 d = p - pr.x;
          const double qf = d.dot(pr.A * d);
          if (qf <= 1.0) return 0.0;  // solid set
          Eigen::SelfAdjointEigenSolver<Mat3> es(pr.A);
          const double min_semi_axis = 1.0 / std::sqrt(es.eigenvalues().maxCoeff());
          return (std::sqrt(qf) - 1.0) * min_semi_axis;
        }
      },
      prim);
}

double characteristic_size(const Primitive& prim) {
  return std::visit(
      [](const auto& pr) -> double {
        using P = std::decay_t<decltype(pr)>;
        if constexpr (std::is_same_v<P, Sphere> || std::is_same_v<P, Cylinder>) {
          return pr.r;
        } else if constexpr (std::is_same_v<P, Ellipsoid>) {
          Eigen::SelfAdjointEigenSolver<Mat3> es(pr.A);
          return 1.0 / std::sqrt(es.eigenvalues().minCoeff());
        } else {
          return 1.0;
        }
      },
      prim);
}

}  // namespace primalign
