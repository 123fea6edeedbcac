#pragma once

#include "emdim/graph.hpp"
#include "emdim/solver.hpp"
#include "emdim/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace emdim {

/// Settings of one CLI invocation, read from a key = value file with
/// [sections]. Every key has a default; unknown keys are rejected.
struct RunConfig {
  // [case]
  std::string case_name = "tc1";  // tc1, tc2, tc3 or custom
  double radius = 1e-2;
  double tip = 0.6;
  std::uint64_t seed = 1;
  double scale = 1.0;
  std::string mesh_file;   // custom case: EMDIM-MESH or .msh
  std::string graph_file;  // custom case: EMDIM-GRAPH

  // [mesh] (tc3 falls back to its own sizes when none of h_far, h_near, band is given)
  Vec3 domain_lo = Vec3::Zero();
  Vec3 domain_hi = Vec3::Ones();
  double h_far = 0.1;
  double h_near = 0.01;
  double band = 0.02;

  // [graph]
  int segments = 100;

  // [physics] (constant data of the custom case; tip factor and lumping apply to all)
  double eps_s = 1.0;
  double eps_g = 1.0;
  double q_over_eps0 = 0.0;
  double g = 0.0;
  double g_tip = 0.0;
  double phi_bar = 0.0;
  double nu = 0.0;
  double tip_flux_factor = 1.0;
  bool lumped_reaction = false;

  // [coupling]
  int circle_samples = 8;
  int points_per_segment = 2;

  // [solver]
  SolverOptions solver;

  // [output]
  bool write_vtk = true;

  // [sweep]
  std::vector<double> radii{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};

  // [tree]
  TreeOptions tree;
  int tree_subdivisions = 1;
};

RunConfig default_config();

/// Parses the key = value text; throws a config error naming the offending
/// section.key on unknown keys, malformed values or out-of-range settings.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Effective configuration (all keys, 17 significant digits) in the same
/// format, so that parse_config(to_ini(c)) reproduces c.
std::string to_ini(const RunConfig& config);
/// section -> key -> value text.
std::map<std::string, std::map<std::string, std::string>> config_entries(const RunConfig& config);

}  // namespace emdim
