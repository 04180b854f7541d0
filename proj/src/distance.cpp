#include "primalign/distance.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "primalign/error.hpp"

namespace primalign {

namespace {

constexpr double kRootTol = 1e-13;   // |g| target, tighter than the 1e-12 contract
constexpr double kAxisTol = 1e-12;   // "exactly on the axis/center" detection

// First unit vector orthogonal to v: Gram-Schmidt of e1 against v, seeded
// with e2 instead when v is nearly parallel to e1.
Vec3 unit_orthogonal_to(const Vec3& v) {
  Vec3 seed = Vec3::UnitX();
  if (std::abs(v.x()) > 0.9) seed = Vec3::UnitY();
  const Vec3 u = seed - v * v.dot(seed);
  return u.normalized();
}

DistancePair make_pair(const Vec3& xp, const Vec3& yp, bool degenerate = false) {
  return DistancePair{xp, yp, (xp - yp).norm(), degenerate};
}

// Root of a strictly decreasing g on (0, inf) with g(0) > 0 and g(inf) = -1.
// Newton with a maintained sign bracket; bisection whenever a Newton step
// leaves the bracket or stops making progress.
template <typename Eval>
double solve_monotone_root(const Eval& eval, double lambda0, const char* what) {
  double lo = 0.0;  // g(lo) > 0 guaranteed by the caller's precondition
  double hi = std::numeric_limits<double>::infinity();
  double lambda = lambda0;
  for (int it = 0; it < 100; ++it) {
    const auto [g, gp] = eval(lambda);
    if (std::abs(g) < kRootTol) return lambda;
    if (g > 0.0) {
      lo = lambda;
    } else {
      hi = lambda;
    }
    double next = lambda - g / gp;
    if (!std::isfinite(next) || next <= lo || next >= hi) {
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : std::max(1.0, 2.0 * lambda);
    }
    lambda = next;
  }
  // Newton did not settle; fall back to plain bisection on a hard bracket.
  if (!std::isfinite(hi)) {
    hi = std::max(1.0, 2.0 * lo);
    int doublings = 0;
    while (eval(hi).first > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++doublings > 400) throw NumericError(std::string(what) + ": no sign change found");
    }
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval at floating-point resolution
    const auto [g, gp] = eval(mid);
    (void)gp;
    if (std::abs(g) < kRootTol) return mid;
    (g > 0.0 ? lo : hi) = mid;
  }
  throw NumericError(std::string(what) + ": root refinement failed to reach tolerance");
}

}  // namespace

// --------------------------------------------------------------------------
// Point-ellipsoid
//
// Everything is evaluated in the eigenbasis of A, where
//   g(lambda) = sum_k  a_k c_k^2 / (1 + lambda a_k)^2  -  1
// has only nonnegative terms (a_k eigenvalues, c_k coordinates of x_y). This
// keeps the residual evaluable to machine precision even for the extremely
// anisotropic ellipsoids that regularized rank-deficient covariances produce.

namespace {

struct PeEval {
  Vec3 eig;    // eigenvalues of A
  Vec3 coord;  // x_y in the eigenbasis
  Mat3 basis;  // eigenvectors as columns

  PeEval(const Vec3& x_y, const Mat3& a) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(a);
    eig = es.eigenvalues();
    basis = es.eigenvectors();
    coord = basis.transpose() * x_y;
  }

  double quadratic_form() const {  // x_y^T A x_y
    return eig.dot(coord.cwiseProduct(coord));
  }

  std::pair<double, double> operator()(double lambda) const {
    double g = -1.0;
    double gp = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double denom = 1.0 + lambda * eig[k];
      const double zk = coord[k] / denom;
      g += eig[k] * zk * zk;
      gp -= 2.0 * eig[k] * eig[k] * zk * zk / denom;
    }
    return {g, gp};
  }

  Vec3 point(double lambda) const {
    Vec3 z;
    for (int k = 0; k < 3; ++k) z[k] = coord[k] / (1.0 + lambda * eig[k]);
    return basis * z;
  }
};

}  // namespace

double pe_g(const Vec3& x_y, const Mat3& A, double lambda) {
  return PeEval(x_y, A)(lambda).first;
}

Vec3 pe_surface_point(const Vec3& x_y, const Mat3& A, double lambda) {
  return PeEval(x_y, A).point(lambda);
}

double pe_root_find(const Vec3& x_y, const Mat3& A) {
  const PeEval eval(x_y, A);
  if (eval.quadratic_form() <= 1.0) {
    throw PreconditionError("pe_root_find: point must lie strictly outside the ellipsoid");
  }
  return solve_monotone_root(eval, 0.0, "pe_root_find");
}

// --------------------------------------------------------------------------
// Ellipsoid-line
//
// The solve (lambda A + V) z = V y_x, V = I - vv^T, is done in the eigenbasis
// of A via Sherman-Morrison on the rank-1 projector:
//   z = D^{-1} r - D^{-1} vt * s(lambda) / d(lambda)
// with D = I + lambda diag(a), r the part of y_x orthogonal to v, and
//   s = sum vt_k r_k a_k / D_k,   d = sum vt_k^2 a_k / D_k > 0.
// The usual Sherman-Morrison denominator 1 - vt^T D^{-1} vt equals
// lambda * d and the lambda cancels against the numerator analytically, so
// every quantity stays well scaled for all lambda >= 0; the residual
// g = sum a_k z_k^2 - 1 is a sum of nonnegative terms. This survives the
// extreme axis ratios of regularized rank-deficient covariance ellipsoids.

namespace {

struct ElEval {
  Vec3 eig;    // eigenvalues of A
  Mat3 basis;  // eigenvectors as columns
  Vec3 vt;     // line direction in the eigenbasis (unit)
  Vec3 yt;     // y_x in the eigenbasis
  Vec3 r;      // yt minus its vt component

  ElEval(const Vec3& y_x, const Vec3& v, const Mat3& a) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(a);
    eig = es.eigenvalues();
    basis = es.eigenvectors();
    vt = basis.transpose() * v;
    yt = basis.transpose() * y_x;
    r = yt - vt * vt.dot(yt);
  }

  Vec3 ztilde(double lambda) const {
    Vec3 dinv;
    double s = 0.0;
    double d = 0.0;
    for (int k = 0; k < 3; ++k) {
      dinv[k] = 1.0 / (1.0 + lambda * eig[k]);
      s += vt[k] * r[k] * eig[k] * dinv[k];
      d += vt[k] * vt[k] * eig[k] * dinv[k];
    }
    const double shift = s / d;
    Vec3 z;
    for (int k = 0; k < 3; ++k) z[k] = dinv[k] * (r[k] - vt[k] * shift);
    return z;
  }

  std::pair<double, double> operator()(double lambda) const {
    const Vec3 z = ztilde(lambda);
    double g = -1.0;
    for (int k = 0; k < 3; ++k) g += eig[k] * z[k] * z[k];

    // g' = -2 u^T (lambda A + V)^{-1} u with u = A z; u is orthogonal to vt
    // along the solution path, so the same Sherman-Morrison form applies.
    Vec3 dinv;
    double s2 = 0.0;
    double d = 0.0;
    for (int k = 0; k < 3; ++k) {
      dinv[k] = 1.0 / (1.0 + lambda * eig[k]);
      s2 += vt[k] * (eig[k] * z[k]) * eig[k] * dinv[k];
      d += vt[k] * vt[k] * eig[k] * dinv[k];
    }
    const double shift = s2 / d;
    double gp = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double uk = eig[k] * z[k];
      gp -= 2.0 * uk * dinv[k] * (uk - vt[k] * shift);
    }
    return {g, gp};
  }

  double foot_alpha(const Vec3& z) const { return vt.dot(z - yt); }
};

}  // namespace

namespace {

ElRoot el_solve(const ElEval& eval) {
  ElRoot root;
  root.lambda = solve_monotone_root(eval, 1e-6, "el_root_find");
  const Vec3 z = eval.ztilde(root.lambda);
  root.alpha = eval.foot_alpha(z);
  root.z = eval.basis * z;
  return root;
}

}  // namespace

double el_g(const Vec3& y_x, const Vec3& v, const Mat3& A, double lambda) {
  return ElEval(y_x, v, A)(lambda).first;
}

ElRoot el_root_find(const Vec3& y_x, const Vec3& v, const Mat3& A) {
  const ElEval eval(y_x, v, A);
  // g(0) is the minimum of the line's quadratic form minus one: nonpositive
  // exactly when the line meets the ellipsoid.
  if (eval(0.0).first <= 0.0) {
    throw PreconditionError("el_root_find: line intersects the ellipsoid");
  }
  return el_solve(eval);
}

// --------------------------------------------------------------------------
// Dispatch over the eight supported pairings

namespace {

DistancePair point_point(const Point& x, const Point& y) {
  return make_pair(x.x, y.x);
}

DistancePair point_line(const Point& x, const Line& y) {
  const double alpha = y.v.dot(x.x - y.x);
  return make_pair(x.x, y.x + alpha * y.v);
}

DistancePair point_plane(const Point& x, const Plane& y) {
  const double alpha = y.n.dot(y.x - x.x);
  return make_pair(x.x, x.x + alpha * y.n);
}

DistancePair point_sphere(const Point& x, const Sphere& y) {
  const Vec3 d = x.x - y.x;
  const double n = d.norm();
  if (n <= kAxisTol * std::max(1.0, y.r)) {
    // Center of the sphere: the whole sphere attains the distance.
    return make_pair(x.x, y.x + y.r * Vec3::UnitX(), true);
  }
  return make_pair(x.x, y.x + (y.r / n) * d);
}

DistancePair point_cylinder(const Point& x, const Cylinder& y) {
  const Vec3 d = x.x - y.x;
  const Vec3 foot = y.x + y.v.dot(d) * y.v;  // projection onto the axis
  const Vec3 radial = x.x - foot;
  const double n = radial.norm();
  if (n <= kAxisTol * std::max(1.0, y.r)) {
    // On the axis: any point of the orthogonal circle attains the distance.
    return make_pair(x.x, foot + y.r * unit_orthogonal_to(y.v), true);
  }
  return make_pair(x.x, foot + (y.r / n) * radial);
}

DistancePair point_cone(const Point& x, const Cone& y) {
  const Vec3 xy = x.x - y.x;
  const double n = xy.norm();
  const double s = std::sin(y.theta);
  const double c = std::cos(y.theta);
  if (y.v.dot(xy) <= -n * s) {
    // Inside the polar cone (or at the apex): the apex is closest.
    return make_pair(x.x, y.x);
  }
  if ((y.v.cross(xy)).norm() <= kAxisTol * n) {
    // On the axis inside the cone: a full circle on the surface attains the
    // distance; return the representative in the {v, u} plane.
    const Vec3 w = c * y.v + s * unit_orthogonal_to(y.v);
    return make_pair(x.x, y.x + n * c * w, true);
  }
  // Rotate the axis by theta toward the query point to get the closest
  // generator ray, then project onto it.
  const Vec3 rot_axis = y.v.cross(xy / n).normalized();
  const Vec3 w = axis_angle_to_rotmat(rot_axis, y.theta) * y.v;
  const double alpha = w.dot(xy);
  return make_pair(x.x, y.x + alpha * w);
}

DistancePair point_ellipsoid(const Point& x, const Ellipsoid& y) {
  const PeEval eval(x.x - y.x, y.A);
  if (eval.quadratic_form() <= 1.0) {
    return make_pair(x.x, x.x, true);
  }
  const double lambda = solve_monotone_root(eval, 0.0, "pe_root_find");
  return make_pair(x.x, y.x + eval.point(lambda));
}

DistancePair ellipsoid_line(const Ellipsoid& x, const Line& y) {
  const ElEval eval(y.x - x.x, y.v, x.A);
  if (eval(0.0).first <= 0.0) {
    // The line crosses the ellipsoid; the chord midpoint (the line's minimum
    // of the quadratic form) represents the coincident pair.
    const double alpha = eval.foot_alpha(eval.ztilde(0.0));
    const Vec3 p = y.x + alpha * y.v;
    return make_pair(p, p, true);
  }
  const ElRoot root = el_solve(eval);
  return make_pair(x.x + root.z, y.x + root.alpha * y.v);
}

}  // namespace

DistancePair shortest_distance_pair(const Primitive& X, const Primitive& Y) {
  validate(X);
  validate(Y);
  if (const auto* px = std::get_if<Point>(&X)) {
    switch (kind(Y)) {
      case PrimitiveKind::kPoint: return point_point(*px, std::get<Point>(Y));
      case PrimitiveKind::kLine: return point_line(*px, std::get<Line>(Y));
      case PrimitiveKind::kPlane: return point_plane(*px, std::get<Plane>(Y));
      case PrimitiveKind::kSphere: return point_sphere(*px, std::get<Sphere>(Y));
      case PrimitiveKind::kCylinder: return point_cylinder(*px, std::get<Cylinder>(Y));
      case PrimitiveKind::kCone: return point_cone(*px, std::get<Cone>(Y));
      case PrimitiveKind::kEllipsoid: return point_ellipsoid(*px, std::get<Ellipsoid>(Y));
    }
  }
  if (const auto* ex = std::get_if<Ellipsoid>(&X)) {
    if (const auto* ly = std::get_if<Line>(&Y)) {
      return ellipsoid_line(*ex, *ly);
    }
  }
  throw UnsupportedPairError(std::string("shortest_distance_pair: unsupported pairing ") +
                             std::string(kind_name(kind(X))) + "-" +
                             std::string(kind_name(kind(Y))));
}

}  // namespace primalign
