#pragma once

#include "emdim/mesh.hpp"
#include "emdim/types.hpp"

#include <string>

namespace emdim {

/// Unknown counts of the dual-mixed 3D discretization: one flux per face,
/// one potential per tet, one multiplier per Neumann face.
struct DofLayout3D {
  int num_fluxes = 0;
  int num_potentials = 0;
  int num_multipliers = 0;
};

DofLayout3D dof_layout(const TetMesh& mesh);

/// Unweighted RT0 mass matrix of one tet with vertices p and face signs
/// (face i is opposite p[i]). Basis functions carry unit flux through their
/// face, v_i = sign_i (x - p_i) / (3 |T|).
Eigen::Matrix4d rt0_local_mass(const std::array<Vec3, 4>& p, const std::array<int, 4>& signs);

/// A_s(i, j) = ∫ ε_s⁻¹ v_i · v_j, with ε_s sampled at tet centroids.
SparseMatrix assemble_flux_mass(const TetMesh& mesh, const ScalarField& eps_s);

/// B(T, f) = -∫_T ∇·v_f, i.e. minus the orientation sign of f seen from T.
SparseMatrix assemble_divergence(const TetMesh& mesh);

/// One row per Neumann face with +1 in that face's flux column.
SparseMatrix assemble_neumann_multiplier(const TetMesh& mesh);

/// F_D(f) = -(mean of phi_bar over f) on Dirichlet faces, zero elsewhere.
Vector assemble_rhs_dirichlet(const TetMesh& mesh, const BoundaryField& phi_bar);

/// F_N(j) = (mean of nu over Neumann face j) * area.
Vector assemble_rhs_neumann(const TetMesh& mesh, const BoundaryField& nu);

/// Face fluxes ∫_f v·n of a vector field (edge-midpoint rule), oriented by
/// the global face normals.
Vector rt0_interpolate(const TetMesh& mesh, const VectorField& v);

/// Value of the RT0 field with face fluxes `flux` at x inside tet t.
Vec3 rt0_evaluate(const TetMesh& mesh, const Vector& flux, int t, const Vec3& x);

/// Matrix Market coordinate export.
void save_matrix_market(const SparseMatrix& m, const std::string& path);

}  // namespace emdim
