#include "emdim/coupling.hpp"

#include "emdim/error.hpp"
#include "emdim/geometry.hpp"
#include "emdim/quadrature.hpp"

#include <algorithm>
#include <numbers>

namespace emdim {

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

std::vector<AverageStencil> build_average_stencils(const TetMesh& mesh, const PointLocator& locator,
                                                   const GraphMesh& gmesh,
                                                   const CouplingOptions& options) {
  (void)mesh;
  if (options.circle_samples < 4) {
    fail(ErrorKind::InvalidParameter, "circle sample count must be at least 4");
  }
  if (options.points_per_segment < 1) {
    fail(ErrorKind::InvalidParameter, "need at least one quadrature point per segment");
  }
  const auto rule = quadrature::gauss_legendre(options.points_per_segment);
  const auto& net = gmesh.network();
  const int nq = options.points_per_segment;
  const int nc = options.circle_samples;
  const int ncells = gmesh.num_cells();

  std::vector<AverageStencil> stencils(static_cast<size_t>(ncells) * nq);
  std::vector<int> missing(stencils.size(), 0);

#pragma omp parallel for schedule(dynamic, 64)
  for (int c = 0; c < ncells; ++c) {
    const auto& cell = gmesh.cells()[c];
    const double k = gmesh.spacing(cell.edge);
    const double radius = net.edge(cell.edge).radius;
    const Vec3 t = net.tangent(cell.edge);
    const auto [u, w] = geometry::normal_plane_basis<double>(t);
    for (int q = 0; q < nq; ++q) {
      const size_t id = static_cast<size_t>(c) * nq + q;
      auto& st = stencils[id];
      st.cell = c;
      st.xi = rule.points[q];
      st.weight = rule.weights[q] * k;
      st.radius = radius;
      st.samples = nc;
      const double s = (cell.index + st.xi) * k;
      st.point = GraphPoint{net.point(cell.edge, s), cell.edge, s};
      const auto axis = locator.locate(st.point.x);
      if (!axis) {
        missing[id] = 1;
        continue;
      }
      std::vector<int> hits;
      hits.reserve(nc);
      for (int m = 0; m < nc; ++m) {
        const double theta = 2 * pi * m / nc;
        const Vec3 x = st.point.x + radius * (std::cos(theta) * u + std::sin(theta) * w);
        if (const auto tet = locator.locate(x)) hits.push_back(*tet);
      }
      st.inside = static_cast<int>(hits.size());
      if (hits.empty()) {
        st.tets = {{*axis, 1.0}};
        continue;
      }
      std::sort(hits.begin(), hits.end());
      const double each = 1.0 / static_cast<double>(hits.size());
      for (size_t i = 0; i < hits.size();) {
        size_t j = i;
        while (j < hits.size() && hits[j] == hits[i]) ++j;
        st.tets.emplace_back(hits[i], static_cast<double>(j - i) * each);
        i = j;
      }
    }
  }
  for (size_t id = 0; id < stencils.size(); ++id) {
    if (missing[id]) {
      fail(ErrorKind::CouplingGeometry, "graph edge " + std::to_string(stencils[id].point.edge) +
                                            " leaves the 3D mesh near s = " +
                                            std::to_string(stencils[id].point.s));
    }
  }
  return stencils;
}

std::vector<AverageStencil> build_average_stencils(const TetMesh& mesh, const GraphMesh& gmesh,
                                                   const CouplingOptions& options) {
  const PointLocator locator(mesh);
  return build_average_stencils(mesh, locator, gmesh, options);
}

double apply_stencil(const AverageStencil& stencil, const Vector& cell_values) {
  double sum = 0;
  for (const auto& [t, w] : stencil.tets) sum += w * cell_values[t];
  return sum;
}

SparseMatrix assemble_coupling_cross(const TetMesh& mesh, const GraphMesh& gmesh,
                                     const std::vector<AverageStencil>& stencils,
                                     const GraphField& eps_g) {
  std::vector<Triplet> trip;
  trip.reserve(stencils.size() * 16);
  for (const auto& st : stencils) {
    const auto& cell = gmesh.cells()[st.cell];
    const double c = 4 * pi * eps_g(st.point) * st.weight;
    const double psi[2] = {1.0 - st.xi, st.xi};
    for (int a = 0; a < 2; ++a)
      for (const auto& [t, w] : st.tets) trip.emplace_back(cell.dofs[a], t, c * (psi[a] * w));
  }
  SparseMatrix m(gmesh.num_dofs(), mesh.num_tets());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix assemble_coupling_self(const TetMesh& mesh, const GraphMesh& gmesh,
                                    const std::vector<AverageStencil>& stencils,
                                    const GraphField& eps_g) {
  (void)gmesh;
  std::vector<Triplet> trip;
  trip.reserve(stencils.size() * 16);
  for (const auto& st : stencils) {
    const double c = -4 * pi * eps_g(st.point) * st.weight;
    for (const auto& [ta, wa] : st.tets)
      for (const auto& [tb, wb] : st.tets) trip.emplace_back(ta, tb, c * (wa * wb));
  }
  SparseMatrix m(mesh.num_tets(), mesh.num_tets());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Vector assemble_line_rhs(const TetMesh& mesh, const GraphMesh& gmesh,
                         const std::vector<AverageStencil>& stencils, const GraphField& g) {
  (void)gmesh;
  Vector out = Vector::Zero(mesh.num_tets());
  for (const auto& st : stencils) {
    const double c = 2 * pi * st.radius * g(st.point) * st.weight;
    for (const auto& [t, w] : st.tets) out[t] += c * w;
  }
  return out;
}

}  // namespace emdim
