#include "emdim/assembly1d.hpp"

#include "emdim/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace emdim {

namespace {

constexpr double pi = std::numbers::pi;

GraphPoint at(const GraphMesh& gmesh, int e, double s) {
  return GraphPoint{gmesh.network().point(e, s), e, s};
}

}  // namespace

SparseMatrix assemble_graph_stiffness(const GraphMesh& gmesh, const GraphField& eps_g) {
  const auto& rule = quadrature::gauss_legendre(2);
  const auto& net = gmesh.network();
  std::vector<Triplet> trip;
  trip.reserve(4 * size_t(gmesh.num_cells()));
  for (const auto& cell : gmesh.cells()) {
    const double k = gmesh.spacing(cell.edge);
    const double radius = net.edge(cell.edge).radius;
    double eps = 0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      eps += rule.weights[q] * eps_g(at(gmesh, cell.edge, (cell.index + rule.points[q]) * k));
    }
    const double a = pi * radius * radius * eps / k;
    trip.emplace_back(cell.dofs[0], cell.dofs[0], a);
    trip.emplace_back(cell.dofs[0], cell.dofs[1], -a);
    trip.emplace_back(cell.dofs[1], cell.dofs[0], -a);
    trip.emplace_back(cell.dofs[1], cell.dofs[1], a);
  }
  SparseMatrix m(gmesh.num_dofs(), gmesh.num_dofs());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix assemble_graph_reaction(const GraphMesh& gmesh, const GraphField& eps_g, bool lumped) {
  const auto& rule = quadrature::gauss_legendre(2);
  std::vector<Triplet> trip;
  trip.reserve(4 * size_t(gmesh.num_cells()));
  for (const auto& cell : gmesh.cells()) {
    const double k = gmesh.spacing(cell.edge);
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double xi = rule.points[q];
      const Eigen::Vector2d psi(1.0 - xi, xi);
      const double c = 4 * pi * eps_g(at(gmesh, cell.edge, (cell.index + xi) * k));
      m += rule.weights[q] * k * c * psi * psi.transpose();
    }
    if (lumped) {
      trip.emplace_back(cell.dofs[0], cell.dofs[0], m.row(0).sum());
      trip.emplace_back(cell.dofs[1], cell.dofs[1], m.row(1).sum());
      continue;
    }
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) trip.emplace_back(cell.dofs[a], cell.dofs[b], a <= b ? m(a, b) : m(b, a));
  }
  SparseMatrix out(gmesh.num_dofs(), gmesh.num_dofs());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Vector assemble_graph_source(const GraphMesh& gmesh, const GraphField& q_over_eps0) {
  const auto& rule = quadrature::gauss_legendre(2);
  const auto& net = gmesh.network();
  Vector f = Vector::Zero(gmesh.num_dofs());
  for (const auto& cell : gmesh.cells()) {
    const double k = gmesh.spacing(cell.edge);
    const double radius = net.edge(cell.edge).radius;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double xi = rule.points[q];
      const double v = rule.weights[q] * k * pi * radius * radius *
                       q_over_eps0(at(gmesh, cell.edge, (cell.index + xi) * k));
      f[cell.dofs[0]] += v * (1.0 - xi);
      f[cell.dofs[1]] += v * xi;
    }
  }
  return f;
}

Vector assemble_tip_neumann(const GraphMesh& gmesh, const GraphField& g, double factor) {
  const auto& net = gmesh.network();
  Vector f = Vector::Zero(gmesh.num_dofs());
  for (int v : net.nodes_of_class(NodeClass::NeumannTip)) {
    const int e = net.incident_edges(v).front();
    const double s = net.edge(e).a == v ? 0.0 : net.length(e);
    const double radius = net.edge(e).radius;
    f[gmesh.vertex_dof(v)] -= factor * pi * radius * radius * g(GraphPoint{net.node(v), e, s});
  }
  return f;
}

DirichletMultiplier assemble_dirichlet_multiplier(const GraphMesh& gmesh) {
  const auto& net = gmesh.network();
  DirichletMultiplier out;
  out.nodes = net.nodes_of_class(NodeClass::Dirichlet);
  const int nd = static_cast<int>(out.nodes.size());
  out.rhs.resize(nd);
  std::vector<Triplet> trip;
  for (int i = 0; i < nd; ++i) {
    trip.emplace_back(i, gmesh.vertex_dof(out.nodes[i]), 1.0);
    out.rhs[i] = *net.dirichlet_value(out.nodes[i]);
  }
  out.matrix.resize(nd, gmesh.num_dofs());
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  return out;
}

double GasSplitting::phi_r(int e, double s) const {
  const GraphPoint p = at(*gmesh, e, s);
  return -q_over_eps0(p) / (4.0 * eps_g(p));
}

double GasSplitting::dphi_r_ds(int e, double s) const {
  const double k = gmesh->spacing(e);
  const double len = gmesh->network().length(e);
  const double lo = std::max(0.0, s - k);
  const double hi = std::min(len, s + k);
  return (phi_r(e, hi) - phi_r(e, lo)) / (hi - lo);
}

}  // namespace emdim
