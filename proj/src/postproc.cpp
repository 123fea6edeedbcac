#include "emdim/postproc.hpp"

#include "emdim/error.hpp"
#include "emdim/geometry.hpp"
#include "emdim/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace emdim {

namespace {

double distance_to_line(const std::vector<Segment>& line, const Vec3& x) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : line) d = std::min(d, geometry::point_segment_distance<double>(x, a, b));
  return d;
}

}  // namespace

double l2_error_cells(const TetMesh& mesh, const Vector& phi_h, const ScalarField& exact,
                      const ExclusionZone& exclude) {
  if (phi_h.size() != mesh.num_tets()) {
    fail(ErrorKind::Dimension, "cell field length does not match the tet count");
  }
  const auto& rule = quadrature::tet_degree2();
  const int nt = mesh.num_tets();
  Vector local(nt);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    const auto p = mesh.tet_points(t);
    double sum = 0;
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& l = rule.bary[q];
      const Vec3 x = l[0] * p[0] + l[1] * p[1] + l[2] * p[2] + l[3] * p[3];
      if (exclude.r_cut > 0 && distance_to_line(exclude.line, x) < exclude.r_cut) continue;
      const double d = phi_h[t] - exact(x);
      sum += rule.weights[q] * d * d;
    }
    local[t] = sum * mesh.volume(t);
  }
  return std::sqrt(local.sum());
}

Vector cell_means(const TetMesh& mesh, const ScalarField& f) {
  const auto& rule = quadrature::tet_degree2();
  Vector out(mesh.num_tets());
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto p = mesh.tet_points(t);
    double sum = 0;
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& l = rule.bary[q];
      sum += rule.weights[q] * f(l[0] * p[0] + l[1] * p[1] + l[2] * p[2] + l[3] * p[3]);
    }
    out[t] = sum;
  }
  return out;
}

double l2_error_graph(const GraphMesh& gmesh, const Vector& values, const GraphField& exact) {
  const auto rule = quadrature::gauss_legendre(3);
  const auto& net = gmesh.network();
  double sum = 0;
  for (const auto& cell : gmesh.cells()) {
    const double k = gmesh.spacing(cell.edge);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double xi = rule.points[q];
      const double s = (cell.index + xi) * k;
      const double uh = (1 - xi) * values[cell.dofs[0]] + xi * values[cell.dofs[1]];
      const double d = uh - exact(GraphPoint{net.point(cell.edge, s), cell.edge, s});
      sum += rule.weights[q] * k * d * d;
    }
  }
  return std::sqrt(sum);
}

GasSample reconstruct_gas(const GasSplitting& split, int e, double s, double r) {
  const double radius = split.gmesh->network().edge(e).radius;
  if (r < 0 || r > radius) {
    fail(ErrorKind::Domain, "radial distance " + std::to_string(r) + " outside [0, " +
                                std::to_string(radius) + "]");
  }
  const double phi_r = split.phi_r(e, s);
  GasSample out;
  out.phi = split.gmesh->evaluate(split.phi_lambda, e, s) + phi_r * GasSplitting::profile(r);
  out.e_radial = -2.0 * r * phi_r;
  out.e_tangential =
      -(split.gmesh->slope(split.phi_lambda, e, s) + split.dphi_r_ds(e, s) * GasSplitting::profile(r));
  return out;
}

ConvergenceFit convergence_table(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) fail(ErrorKind::Domain, "convergence fit needs at least 3 points");
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::ostringstream csv;
  csv << std::setprecision(17) << "R,error\n";
  for (const auto& [r, err] : points) {
    if (!(r > 0) || !(err > 0)) fail(ErrorKind::Domain, "convergence data must be positive");
    const double x = std::log(r), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    csv << r << ',' << err << '\n';
  }
  std::vector<double> radii;
  for (const auto& pt : points) radii.push_back(pt.first);
  std::sort(radii.begin(), radii.end());
  if (std::adjacent_find(radii.begin(), radii.end()) != radii.end()) {
    fail(ErrorKind::Domain, "convergence fit needs distinct radii");
  }
  const double det = n * sxx - sx * sx;
  ConvergenceFit fit;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.csv = csv.str();
  return fit;
}

}  // namespace emdim
