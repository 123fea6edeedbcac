#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace emdim::geometry {

template <typename Scalar>
using Point = Eigen::Matrix<Scalar, 3, 1>;

/// Signed volume of the tetrahedron (a, b, c, d); positive when (b-a, c-a,
/// d-a) is a right-handed frame.
template <typename Scalar>
Scalar signed_volume(const Point<Scalar>& a, const Point<Scalar>& b,
                     const Point<Scalar>& c, const Point<Scalar>& d) {
  return (b - a).dot((c - a).cross(d - a)) / Scalar(6);
}

/// Area-weighted normal of triangle (a, b, c): direction follows the
/// right-hand rule, length equals twice the area.
template <typename Scalar>
Point<Scalar> triangle_normal(const Point<Scalar>& a, const Point<Scalar>& b,
                              const Point<Scalar>& c) {
  return (b - a).cross(c - a);
}

template <typename Scalar>
Scalar triangle_area(const Point<Scalar>& a, const Point<Scalar>& b,
                     const Point<Scalar>& c) {
  return triangle_normal(a, b, c).norm() / Scalar(2);
}

/// Barycentric coordinates of x in tet (a, b, c, d).
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> barycentric(const Point<Scalar>& a,
                                        const Point<Scalar>& b,
                                        const Point<Scalar>& c,
                                        const Point<Scalar>& d,
                                        const Point<Scalar>& x) {
  Eigen::Matrix<Scalar, 3, 3> m;
  m.col(0) = b - a;
  m.col(1) = c - a;
  m.col(2) = d - a;
  const Point<Scalar> l = m.partialPivLu().solve(x - a);
  Eigen::Matrix<Scalar, 4, 1> out;
  out << Scalar(1) - l.sum(), l(0), l(1), l(2);
  return out;
}

template <typename Scalar>
Scalar point_segment_distance(const Point<Scalar>& p, const Point<Scalar>& a,
                              const Point<Scalar>& b) {
  const Point<Scalar> ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  Scalar t = len2 > Scalar(0) ? (p - a).dot(ab) / len2 : Scalar(0);
  t = std::clamp(t, Scalar(0), Scalar(1));
  return (p - (a + t * ab)).norm();
}

/// Minimum distance between segments [p0,p1] and [q0,q1] (closest-point
/// parameters clamped to both segments).
template <typename Scalar>
Scalar segment_segment_distance(const Point<Scalar>& p0,
                                const Point<Scalar>& p1,
                                const Point<Scalar>& q0,
                                const Point<Scalar>& q1) {
  const Point<Scalar> d1 = p1 - p0;
  const Point<Scalar> d2 = q1 - q0;
  const Point<Scalar> r = p0 - q0;
  const Scalar a = d1.squaredNorm();
  const Scalar e = d2.squaredNorm();
  const Scalar f = d2.dot(r);
  const Scalar eps = Scalar(1e-300);
  Scalar s = 0, t = 0;
  if (a <= eps && e <= eps) return r.norm();
  if (a <= eps) {
    t = std::clamp(f / e, Scalar(0), Scalar(1));
  } else {
    const Scalar c = d1.dot(r);
    if (e <= eps) {
      s = std::clamp(-c / a, Scalar(0), Scalar(1));
    } else {
      const Scalar b = d1.dot(d2);
      const Scalar denom = a * e - b * b;
      s = denom > eps ? std::clamp((b * f - c * e) / denom, Scalar(0), Scalar(1))
                      : Scalar(0);
      t = (b * s + f) / e;
      if (t < Scalar(0)) {
        t = 0;
        s = std::clamp(-c / a, Scalar(0), Scalar(1));
      } else if (t > Scalar(1)) {
        t = 1;
        s = std::clamp((b - c) / a, Scalar(0), Scalar(1));
      }
    }
  }
  return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

/// Orthonormal pair spanning the plane normal to the unit vector t. The
/// choice is deterministic: the helper axis is the one least aligned with t.
template <typename Scalar>
std::pair<Point<Scalar>, Point<Scalar>> normal_plane_basis(
    const Point<Scalar>& t) {
  Point<Scalar> helper = Point<Scalar>::Zero();
  int axis = 0;
  t.cwiseAbs().minCoeff(&axis);
  helper(axis) = Scalar(1);
  const Point<Scalar> u = t.cross(helper).normalized();
  const Point<Scalar> w = t.cross(u);
  return {u, w};
}

}  // namespace emdim::geometry
