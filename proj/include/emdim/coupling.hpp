#pragma once

#include "emdim/graph.hpp"
#include "emdim/mesh.hpp"
#include "emdim/types.hpp"

#include <utility>
#include <vector>

namespace emdim {

struct CouplingOptions {
  int circle_samples = 8;      // N_c
  int points_per_segment = 2;  // Gauss points per graph interval
};

/// Circle average at one graph quadrature point as a sparse row over tets.
struct AverageStencil {
  GraphPoint point;
  int cell = 0;          // graph mesh cell holding the point
  double xi = 0.0;       // local coordinate in that cell
  double weight = 0.0;   // quadrature weight, in length units
  double radius = 0.0;
  int samples = 0;       // circle points requested
  int inside = 0;        // circle points that landed in the mesh
  std::vector<std::pair<int, double>> tets;  // (tet, weight), increasing tet
};

/// One stencil per Gauss point of every graph cell, in cell order. The circle
/// of radius R around the point, normal to the edge tangent, is sampled at
/// N_c equally spaced angles; samples outside the mesh are dropped and the
/// rest weighted equally. With no sample inside, the stencil falls back to
/// the tet holding the axis point.
std::vector<AverageStencil> build_average_stencils(const TetMesh& mesh, const PointLocator& locator,
                                                   const GraphMesh& gmesh,
                                                   const CouplingOptions& options = {});
std::vector<AverageStencil> build_average_stencils(const TetMesh& mesh, const GraphMesh& gmesh,
                                                   const CouplingOptions& options = {});

/// Circle average of a cellwise-constant field.
double apply_stencil(const AverageStencil& stencil, const Vector& cell_values);

/// C_Λs(i, j) = 4π Σ_q w_q ε_g(s_q) ψ_i(s_q) stencil_q(j), size n_Λ x n_T.
SparseMatrix assemble_coupling_cross(const TetMesh& mesh, const GraphMesh& gmesh,
                                     const std::vector<AverageStencil>& stencils,
                                     const GraphField& eps_g);

/// Stored with its minus sign: C_ss = -4π Σ_q w_q ε_g(s_q) stencil_q stencil_qᵀ.
SparseMatrix assemble_coupling_self(const TetMesh& mesh, const GraphMesh& gmesh,
                                    const std::vector<AverageStencil>& stencils,
                                    const GraphField& eps_g);

/// G(j) = Σ_q w_q 2πR g(s_q) stencil_q(j).
Vector assemble_line_rhs(const TetMesh& mesh, const GraphMesh& gmesh,
                         const std::vector<AverageStencil>& stencils, const GraphField& g);

}  // namespace emdim
