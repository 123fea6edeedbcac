#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

namespace emdim::quadrature {

/// Point/weight pair on a reference domain.
struct Rule1D {
  std::vector<double> points;   // in [0, 1]
  std::vector<double> weights;  // sum to 1
};

/// Gauss-Legendre rule with n points mapped to [0, 1] (n in 1..5).
Rule1D gauss_legendre(int n);

/// Four-point tetrahedral rule, exact for polynomials of degree 2. Returned
/// as barycentric coordinates; weights sum to 1.
struct TetRule {
  std::array<Eigen::Vector4d, 4> bary;
  std::array<double, 4> weights;
};
const TetRule& tet_degree2();

/// Edge-midpoint rule on triangles (exact for degree 2): the face mean of f
/// is the average of f at the three edge midpoints.
template <typename Point, typename F>
double triangle_mean(const Point& a, const Point& b, const Point& c, F&& f) {
  return (f(Point((a + b) / 2)) + f(Point((b + c) / 2)) +
          f(Point((c + a) / 2))) / 3.0;
}

}  // namespace emdim::quadrature
