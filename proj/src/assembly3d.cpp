#include "emdim/assembly3d.hpp"

#include "emdim/error.hpp"
#include "emdim/quadrature.hpp"

#include <unsupported/Eigen/SparseExtra>

#include <fstream>
#include <sstream>

namespace emdim {

DofLayout3D dof_layout(const TetMesh& mesh) {
  return {mesh.num_faces(), mesh.num_tets(), mesh.num_neumann_faces()};
}

Eigen::Matrix4d rt0_local_mass(const std::array<Vec3, 4>& p, const std::array<int, 4>& signs) {
  const double vol = std::abs((p[1] - p[0]).cross(p[2] - p[0]).dot(p[3] - p[0])) / 6.0;
  Eigen::Matrix4d gram;
  // Translation invariant, so work relative to p[0] to limit cancellation.
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) gram(k, l) = (p[k] - p[0]).dot(p[l] - p[0]);
  // Σ_{k,l} (1 + δ_kl) (p_k - p_i)·(p_l - p_j), expanded through the Gram matrix.
  const Eigen::Vector4d row = gram.rowwise().sum();
  const double total = gram.sum();
  const double trace = gram.trace();
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      const double plain = total - 4 * row[i] - 4 * row[j] + 16 * gram(i, j);
      const double diag = trace - row[i] - row[j] + 4 * gram(i, j);
      const double value = signs[i] * signs[j] * (plain + diag) / (180.0 * vol);
      m(i, j) = value;
      m(j, i) = value;
    }
  }
  return m;
}

SparseMatrix assemble_flux_mass(const TetMesh& mesh, const ScalarField& eps_s) {
  const int nt = mesh.num_tets();
  std::vector<Triplet> trip(16 * static_cast<size_t>(nt));
  std::vector<int> bad(nt, 0);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    const double eps = eps_s(mesh.centroid(t));
    if (!(eps > 0)) {
      bad[t] = 1;
      continue;
    }
    const Eigen::Matrix4d m = rt0_local_mass(mesh.tet_points(t), mesh.tet_face_signs(t)) / eps;
    const auto& faces = mesh.tet_faces(t);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) trip[16 * size_t(t) + 4 * i + j] = Triplet(faces[i], faces[j], m(i, j));
  }
  for (int t = 0; t < nt; ++t) {
    if (bad[t]) {
      fail(ErrorKind::Coefficient,
           "eps_s must be positive; got " + std::to_string(eps_s(mesh.centroid(t))) + " in tet " +
               std::to_string(t));
    }
  }
  SparseMatrix a(mesh.num_faces(), mesh.num_faces());
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

SparseMatrix assemble_divergence(const TetMesh& mesh) {
  std::vector<Triplet> trip;
  trip.reserve(4 * size_t(mesh.num_tets()));
  for (int t = 0; t < mesh.num_tets(); ++t) {
    for (int i = 0; i < 4; ++i) {
      trip.emplace_back(t, mesh.tet_faces(t)[i], -double(mesh.tet_face_signs(t)[i]));
    }
  }
  SparseMatrix b(mesh.num_tets(), mesh.num_faces());
  b.setFromTriplets(trip.begin(), trip.end());
  return b;
}

SparseMatrix assemble_neumann_multiplier(const TetMesh& mesh) {
  const auto& faces = mesh.neumann_faces();
  std::vector<Triplet> trip;
  for (size_t j = 0; j < faces.size(); ++j) trip.emplace_back(int(j), faces[j], 1.0);
  SparseMatrix l(static_cast<int>(faces.size()), mesh.num_faces());
  l.setFromTriplets(trip.begin(), trip.end());
  return l;
}

Vector assemble_rhs_dirichlet(const TetMesh& mesh, const BoundaryField& phi_bar) {
  Vector f = Vector::Zero(mesh.num_faces());
  for (int face : mesh.boundary_faces()) {
    if (mesh.tag(face) != BoundaryTag::Dirichlet) continue;
    const auto p = mesh.face_points(face);
    const Vec3 n = mesh.face_unit_normal(face);
    f[face] = -quadrature::triangle_mean(p[0], p[1], p[2], [&](const Vec3& x) { return phi_bar(x, n); });
  }
  return f;
}

Vector assemble_rhs_neumann(const TetMesh& mesh, const BoundaryField& nu) {
  const auto& faces = mesh.neumann_faces();
  Vector f(static_cast<int>(faces.size()));
  for (size_t j = 0; j < faces.size(); ++j) {
    const auto p = mesh.face_points(faces[j]);
    const Vec3 n = mesh.face_unit_normal(faces[j]);
    f[j] = quadrature::triangle_mean(p[0], p[1], p[2], [&](const Vec3& x) { return nu(x, n); }) *
           mesh.face_area(faces[j]);
  }
  return f;
}

Vector rt0_interpolate(const TetMesh& mesh, const VectorField& v) {
  Vector flux(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto p = mesh.face_points(f);
    const Vec3 n = mesh.face_unit_normal(f);
    flux[f] = quadrature::triangle_mean(p[0], p[1], p[2], [&](const Vec3& x) { return v(x).dot(n); }) *
              mesh.face_area(f);
  }
  return flux;
}

Vec3 rt0_evaluate(const TetMesh& mesh, const Vector& flux, int t, const Vec3& x) {
  const auto p = mesh.tet_points(t);
  const auto& faces = mesh.tet_faces(t);
  const auto& signs = mesh.tet_face_signs(t);
  Vec3 out = Vec3::Zero();
  for (int i = 0; i < 4; ++i) out += signs[i] * flux[faces[i]] * (x - p[i]);
  return out / (3.0 * mesh.volume(t));
}

void save_matrix_market(const SparseMatrix& m, const std::string& path) {
  if (!Eigen::saveMarket(m, path)) fail(ErrorKind::Io, "cannot write matrix to '" + path + "'");
}

}  // namespace emdim
