#pragma once

#include "emdim/graph.hpp"
#include "emdim/types.hpp"

#include <vector>

namespace emdim {

/// πR_e² ∫ ε_g ψ_i' ψ_j' summed over all edges; ε_g is averaged over each
/// interval with 2-point Gauss.
SparseMatrix assemble_graph_stiffness(const GraphMesh& gmesh, const GraphField& eps_g);

/// 4π ∫ ε_g ψ_i ψ_j (consistent P1 mass), or its row-sum diagonal when
/// `lumped` is set.
SparseMatrix assemble_graph_reaction(const GraphMesh& gmesh, const GraphField& eps_g,
                                     bool lumped = false);

/// F_i = ∫ πR² (q/ε₀) ψ_i with 2-point Gauss per interval.
Vector assemble_graph_source(const GraphMesh& gmesh, const GraphField& q_over_eps0);

/// Neumann tip terms: -factor πR² g(S) at the dof of every tip S, where g is
/// taken at the tip and dΦ/ds = -factor g / ε_g along the outward direction.
Vector assemble_tip_neumann(const GraphMesh& gmesh, const GraphField& g, double factor = 1.0);

/// Rows enforcing Φ_Λ = value at the Dirichlet nodes (increasing node order).
struct DirichletMultiplier {
  SparseMatrix matrix;  // n_D x n_Λ
  Vector rhs;           // prescribed values
  std::vector<int> nodes;
};

DirichletMultiplier assemble_dirichlet_multiplier(const GraphMesh& gmesh);

/// Gas potential split Φ_g(s, r) = Φ_Λ(s) + Φ_r(s) r² with the radial
/// coefficient Φ_r = -(q/ε₀) / (4 ε_g) taken from the charge data.
struct GasSplitting {
  const GraphMesh* gmesh = nullptr;
  Vector phi_lambda;
  GraphField q_over_eps0;
  GraphField eps_g;

  double phi_r(int e, double s) const;
  /// Central difference of Φ_r with the local mesh spacing (one-sided at
  /// edge ends).
  double dphi_r_ds(int e, double s) const;
  static double profile(double r) { return r * r; }
};

}  // namespace emdim
