#pragma once

#include "primalign/geometry.hpp"

namespace primalign {

// A pair of points attaining the shortest distance between two primitives.
// `degenerate` is set when the attaining set is not a single pair (sphere
// center, points on a cylinder/cone axis, points inside an ellipsoid, a line
// crossing an ellipsoid); in those cases a deterministic canonical
// representative is returned.
struct DistancePair {
  Vec3 x_point;  // on/in X
  Vec3 y_point;  // on/in Y
  double distance = 0.0;
  bool degenerate = false;
};

// Shortest distance pair for the supported pairings
//   point-point, point-line, point-plane, point-sphere, point-cylinder,
//   point-cone, point-ellipsoid, ellipsoid-line
// with X listed first. Throws UnsupportedPairError for any other combination
// and InvalidInputError for malformed primitives.
DistancePair shortest_distance_pair(const Primitive& X, const Primitive& Y);

// --- point-ellipsoid projection -------------------------------------------
//
// For a point at offset x_y from the center of the ellipsoid {z : z^T A z <= 1}
// strictly outside it, the surface point closest to x_y is
// z_y(lambda) = (lambda A + I)^{-1} x_y at the unique positive root of
// g(lambda) = z_y(lambda)^T A z_y(lambda) - 1, which is strictly decreasing.

// g evaluated at lambda (center-relative coordinates).
double pe_g(const Vec3& x_y, const Mat3& A, double lambda);

// The unique positive root; |g| < 1e-12 at the result. Newton from 0 with a
// bisection bracket as fallback. Throws PreconditionError unless
// x_y^T A x_y > 1.
double pe_root_find(const Vec3& x_y, const Mat3& A);

// z_y(lambda), relative to the ellipsoid center.
Vec3 pe_surface_point(const Vec3& x_y, const Mat3& A, double lambda);

// --- ellipsoid-line foot points -------------------------------------------
//
// Ellipsoid centered at the origin with matrix A; line {y_x + alpha v}.
// With V = I - vv^T, the ellipsoid point closest to the line is
// z_x(lambda) = (lambda A + V)^{-1} V y_x at the unique positive root of
// g(lambda) = z_x(lambda)^T A z_x(lambda) - 1, and the foot on the line is
// y_x + alpha v with alpha = v^T (z_x - y_x).

struct ElRoot {
  double lambda = 0.0;
  Vec3 z = Vec3::Zero();  // ellipsoid surface point, center-relative
  double alpha = 0.0;     // line parameter of the orthogonal foot
};

double el_g(const Vec3& y_x, const Vec3& v, const Mat3& A, double lambda);

// Throws PreconditionError when the line intersects the ellipsoid (the
// quadratic in alpha has real roots); callers must take the intersecting
// branch themselves.
ElRoot el_root_find(const Vec3& y_x, const Vec3& v, const Mat3& A);

}  // namespace primalign
