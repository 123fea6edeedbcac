#pragma once

#include "emdim/graph.hpp"
#include "emdim/mesh.hpp"
#include "emdim/solver.hpp"
#include "emdim/types.hpp"

#include <functional>
#include <map>
#include <string>

namespace emdim {

/// Everything needed to build and solve one coupled problem.
struct CaseSetup {
  std::string name;
  Box domain;
  BoundaryRule boundary_rule = all_dirichlet;
  Network1D network;
  ProblemData data;
  /// Mesh grading parameters; refine segments are filled from the network.
  BoxMeshOptions mesh;
  SolverOptions solver;
};

/// Exact potentials of a manufactured problem with the data derived from them.
struct ManufacturedCase {
  CaseSetup setup;
  double radius = 0.0;
  double eps_s = 1.0;
  double eps_g = 1.0;
  ScalarField phi_s;       // exact dielectric potential
  VectorField d_s;         // exact displacement, -ε_s ∇Φ_s
  /// Exact gas potential at distance r from the line at graph point p.
  std::function<double(double r, const GraphPoint& p)> phi_g;
  GraphField phi_lambda;   // axis value of Φ_g
  GraphField phi_r;        // radial coefficient of Φ_g
};

struct MeshResolution {
  double h_far = 0.1;
  double h_near = 0.01;
  double band = 0.05;
};

/// Straight line through the middle of the box along z with the potential
/// Φ_s = R (1 - log(r/R)) and Φ_g = r²/(2R) + R/2. Derived data: q/ε₀ = -2/R,
/// g = -2, ν = D_s·n (zero on the z-faces), exact trace on the lateral
/// faces, Φ_Λ = R/2 at both graph ends. Throws a geometry error unless R is
/// below a tenth of the smallest box half-width.
ManufacturedCase tc1_case(double radius, const Box& domain = {}, int segments = 100,
                          const MeshResolution& resolution = {});

/// TC1 data on a line that starts on the bottom face and ends at an interior
/// tip (z fraction `tip` of the box height) with a null-flux condition there.
CaseSetup tc2_case(double radius, const Box& domain = {}, double tip = 0.6, int segments = 60,
                   const MeshResolution& resolution = {});

struct Tc3Options {
  TreeOptions tree;
  MeshResolution mesh{0.1, 0.025, 0.02};
  double electrode_value = 1.0;
};

/// Default tree and mesh parameters of the synthetic treeing instance.
Tc3Options tc3_defaults();

/// Synthetic tree grown from the middle of the bottom face. The bottom face
/// is a Dirichlet electrode at electrode_value (also the root value), the
/// top face is grounded and the lateral faces are insulating (ν = 0). The
/// tree carries no charge and its leaves are null-flux tips. `scale` in
/// (0, 1] shrinks the number of generations for smaller instances.
CaseSetup tc3_case(std::uint64_t seed, double scale = 1.0, const Tc3Options& options = tc3_defaults());

/// Residuals of the strong equations at sampled points.
struct ResidualReport {
  std::map<std::string, double> residuals;  // max |residual| per equation
  double max_residual = 0.0;
  int samples = 0;
};

/// Evaluates every strong equation, boundary and interface condition of the
/// manufactured case at n_check deterministic sample points, using central
/// differences with step fd_step and circle means sampled at 64 points.
ResidualReport verify_manufactured(const ManufacturedCase& c, int n_check = 200, double fd_step = 1e-6);

}  // namespace emdim
