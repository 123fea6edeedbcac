#pragma once

#include "emdim/assembly1d.hpp"
#include "emdim/coupling.hpp"
#include "emdim/gmres.hpp"
#include "emdim/graph.hpp"
#include "emdim/mesh.hpp"
#include "emdim/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace emdim {

/// Block sizes and offsets of the unknown vector (D_s, Φ_s, Φ_Λ, λ_N, λ_D).
struct BlockLayout {
  int n_flux = 0;
  int n_potential = 0;
  int n_graph = 0;
  int n_neumann = 0;
  int n_dirichlet = 0;

  int flux_offset() const { return 0; }
  int potential_offset() const { return n_flux; }
  int graph_offset() const { return n_flux + n_potential; }
  int neumann_offset() const { return graph_offset() + n_graph; }
  int dirichlet_offset() const { return neumann_offset() + n_neumann; }
  int size() const { return dirichlet_offset() + n_dirichlet; }
};

using RowSparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Global saddle-point system
///   [ A_s  Bᵀ    0      Lᵀ  0    ] [D_s ]   [F_D ]
///   [ B    C_ss  C_Λsᵀ  0   0    ] [Φ_s ]   [G   ]
///   [ 0    C_Λs  A_Λ    0   L_Dᵀ ] [Φ_Λ ] = [F   ]
///   [ L    0     0      0   0    ] [λ_N ]   [F_N ]
///   [ 0    0     L_D    0   0    ] [λ_D ]   [F_DΛ]
/// with every block stored exactly as it enters the matrix.
struct BlockSystem {
  BlockLayout layout;
  SparseMatrix a_s, b, c_ss, c_ls, a_l, l, l_d;
  Vector f_d, g, f, f_n, f_dl;
  RowSparseMatrix matrix;
  Vector rhs;

  Vector multiply(const Vector& x) const { return matrix * x; }
};

/// Places the blocks into the global matrix and right-hand side. Throws a
/// dimension error naming the first inconsistent block.
BlockSystem assemble_global(SparseMatrix a_s, SparseMatrix b, SparseMatrix c_ss, SparseMatrix c_ls,
                            SparseMatrix a_l, SparseMatrix l, SparseMatrix l_d, Vector f_d,
                            Vector g, Vector f, Vector f_n, Vector f_dl);

/// max |M - Mᵀ| / max |M|.
double symmetry_defect(const RowSparseMatrix& m);

/// Coefficients and data of one coupled problem.
struct ProblemData {
  ScalarField eps_s = constant_field(1.0);
  GraphField eps_g = constant_graph_field(1.0);
  GraphField q_over_eps0 = constant_graph_field(0.0);
  /// Flux datum of the line source term.
  GraphField g = constant_graph_field(0.0);
  /// Datum of the tip Neumann condition; falls back to g when empty.
  GraphField g_tip;
  BoundaryField phi_bar = constant_boundary_field(0.0);
  BoundaryField nu = constant_boundary_field(0.0);
  CouplingOptions coupling;
  bool lumped_reaction = false;
  double tip_flux_factor = 1.0;
};

struct CoupledSystem {
  BlockSystem system;
  std::vector<AverageStencil> stencils;
  DirichletMultiplier dirichlet;
};

/// Assembles every operator for the mesh/graph pair and the global system.
/// The 1D block and its right-hand side enter with a minus sign (A_Λ stored
/// as -stiffness - reaction), keeping the matrix symmetric.
CoupledSystem assemble_coupled_system(const TetMesh& mesh, const GraphMesh& gmesh,
                                      const ProblemData& data);

enum class PreconditionerKind { None, Block };
enum class FluxInverse { Lumped, Exact };

struct SolverOptions {
  double tol = 1e-10;
  int restart = 200;
  int max_iter = 5000;
  PreconditionerKind preconditioner = PreconditionerKind::Block;
  FluxInverse flux_inverse = FluxInverse::Lumped;
  double shift = 0.0;
  double inner_tol = 1e-12;
  int inner_max_iter = 1000;
};

/// Block-diagonal preconditioner diag(A_s⁻¹, -Σ⁻¹, -(EΣ⁻¹Eᵀ)⁻¹) with
///   Σ = [ C_ss - B D⁻¹ Bᵀ   C_Λsᵀ   -B D⁻¹ Lᵀ ]
///       [ C_Λs              A_Λ     0         ]
///       [ -L D⁻¹ Bᵀ         0       -L D⁻¹ Lᵀ ]
/// where D = diag(A_s) and E selects Φ_Λ through L_D. -Σ (+ shift) is
/// factorized once by sparse LDLᵀ. The first block applies D⁻¹ (lumped) or
/// an inner conjugate-gradient solve with A_s (exact).
class BlockPreconditioner {
 public:
  BlockPreconditioner(const BlockSystem& system, const SolverOptions& options);
  Vector apply(const Vector& r) const;
  const SparseMatrix& schur() const { return neg_sigma_; }

 private:
  const BlockSystem* system_;
  FluxInverse flux_inverse_;
  double inner_tol_;
  int inner_max_iter_;
  Vector inv_diag_;
  SparseMatrix neg_sigma_;
  Eigen::SimplicialLDLT<SparseMatrix> sigma_factor_;
  Eigen::LLT<Eigen::MatrixXd> dirichlet_factor_;
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> flux_cg_;
};

struct SolverReport {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // true relative residual, re-verified after the solve
  int restarts = 0;
  double wall_seconds = 0.0;
  double setup_seconds = 0.0;
  std::string message;
};

struct Solution {
  Vector flux;        // D_s face fluxes
  Vector phi_s;       // cell potentials
  Vector phi_lambda;  // graph dof values
  Vector lambda_n;
  Vector lambda_d;
};

Solution extract_solution(const BlockSystem& system, const Vector& x);

struct SolveResult {
  Solution solution;
  SolverReport report;
  Vector x;
};

SolveResult solve(const BlockSystem& system, const SolverOptions& options);

/// max_j |(L D_s)_j - F_N(j)|: how well the Neumann constraint row holds.
double neumann_constraint_defect(const BlockSystem& system, const Solution& solution);

}  // namespace emdim
