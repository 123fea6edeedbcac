#pragma once

#include "emdim/assembly1d.hpp"
#include "emdim/graph.hpp"
#include "emdim/mesh.hpp"
#include "emdim/types.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace emdim {

/// Quadrature points closer than r_cut to any of `line` are skipped.
struct ExclusionZone {
  std::vector<Segment> line;
  double r_cut = 0.0;
};

/// ‖φ_h - φ‖_{L²(Ω)} for cellwise-constant φ_h, degree-2 quadrature per tet.
double l2_error_cells(const TetMesh& mesh, const Vector& phi_h, const ScalarField& exact,
                      const ExclusionZone& exclude = {});

/// Cell means of a field (degree-2 quadrature).
Vector cell_means(const TetMesh& mesh, const ScalarField& f);

/// ‖Φ_h - Φ‖_{L²(Λ)} for a P1 graph field, 3-point Gauss per interval.
double l2_error_graph(const GraphMesh& gmesh, const Vector& values, const GraphField& exact);

struct GasSample {
  double phi = 0.0;
  double e_tangential = 0.0;
  double e_radial = 0.0;
};

/// Φ_g = Φ_Λ + Φ_r r², E_radial = -2 r Φ_r and E_tangential =
/// -(dΦ_Λ/ds + dΦ_r/ds r²) at distance r from edge e at arc coordinate s.
/// Throws a domain error for r outside [0, R].
GasSample reconstruct_gas(const GasSplitting& split, int e, double s, double r);

struct ConvergenceFit {
  double slope = 0.0;
  double intercept = 0.0;  // log(error) at log(R) = 0
  std::string csv;         // "R,error" table
};

/// Least-squares fit of log(error) against log(R). Needs at least 3 points
/// with distinct R; non-positive values raise a domain error.
ConvergenceFit convergence_table(const std::vector<std::pair<double, double>>& points);

/// Fields exported with a tet mesh: cell scalars and face-flux vectors (the
/// latter written as RT0 values at cell centroids).
struct FieldSet {
  std::vector<std::pair<std::string, Vector>> cell_fields;
  std::vector<std::pair<std::string, Vector>> flux_fields;
};

/// VTK legacy ASCII unstructured grid with 17 significant digits.
void export_vtk(const TetMesh& mesh, const FieldSet& fields, const std::string& path);
/// Graph mesh as VTK poly-lines with a point scalar per dof.
void export_graph_vtk(const GraphMesh& gmesh, const Vector& values, const std::string& path,
                      const std::string& name = "phi_lambda");

/// Minimal reader for the files written above.
struct VtkData {
  long num_points = 0;
  long num_cells = 0;
  std::map<std::string, std::vector<double>> cell_scalars;
  std::map<std::string, std::vector<Vec3>> cell_vectors;
  std::map<std::string, std::vector<double>> point_scalars;
};
VtkData read_vtk(const std::string& path);

}  // namespace emdim
