#include "emdim/quadrature.hpp"

#include "emdim/error.hpp"

#include <cmath>

namespace emdim::quadrature {

Rule1D gauss_legendre(int n) {
  // Nodes and weights on [-1, 1].
  std::vector<double> x, w;
  switch (n) {
    case 1: x = {0.0}; w = {2.0}; break;
    case 2: {
      const double a = 1.0 / std::sqrt(3.0);
      x = {-a, a};
      w = {1.0, 1.0};
      break;
    }
    case 3: {
      const double a = std::sqrt(3.0 / 5.0);
      x = {-a, 0.0, a};
      w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    }
    case 4: {
      const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
      const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
      x = {-b, -a, a, b};
      w = {wb, wa, wa, wb};
      break;
    }
    case 5: {
      const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
      const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
      x = {-b, -a, 0.0, a, b};
      w = {wb, wa, 128.0 / 225.0, wa, wb};
      break;
    }
    default:
      fail(ErrorKind::InvalidParameter,
           "Gauss-Legendre rule supports 1 to 5 points, got " + std::to_string(n));
  }
  Rule1D rule;
  for (std::size_t i = 0; i < x.size(); ++i) {
    rule.points.push_back(0.5 * (x[i] + 1.0));
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

const TetRule& tet_degree2() {
  static const TetRule rule = [] {
    const double a = 0.5854101966249685;
    const double b = 0.1381966011250105;
    TetRule r;
    r.bary[0] << a, b, b, b;
    r.bary[1] << b, a, b, b;
    r.bary[2] << b, b, a, b;
    r.bary[3] << b, b, b, a;
    r.weights = {0.25, 0.25, 0.25, 0.25};
    return r;
  }();
  return rule;
}

}  // namespace emdim::quadrature
