#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <functional>

namespace emdim {

using Vec3 = Eigen::Vector3d;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Location of a point on the 1D network: the embedding point, the edge it
/// belongs to and its arc-length coordinate along that edge.
struct GraphPoint {
  Vec3 x;
  int edge = -1;
  double s = 0.0;
};

using ScalarField = std::function<double(const Vec3&)>;
using VectorField = std::function<Vec3(const Vec3&)>;
using GraphField = std::function<double(const GraphPoint&)>;
/// Boundary datum evaluated at a point with the outward unit normal there.
using BoundaryField = std::function<double(const Vec3& x, const Vec3& n)>;

inline ScalarField constant_field(double c) {
  return [c](const Vec3&) { return c; };
}
inline GraphField constant_graph_field(double c) {
  return [c](const GraphPoint&) { return c; };
}
inline BoundaryField constant_boundary_field(double c) {
  return [c](const Vec3&, const Vec3&) { return c; };
}

}  // namespace emdim
