#pragma once

#include "emdim/mesh.hpp"
#include "emdim/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace emdim {

enum class NodeClass : std::uint8_t { Dirichlet, NeumannTip, Bifurcation, Internal };

const char* to_string(NodeClass c) noexcept;

struct GraphEdge {
  int a = 0;
  int b = 0;
  double radius = 0.0;
  int subdivisions = 1;
};

/// Embedded 1D network. Each edge is parametrized by arc length from node a
/// to node b. Node classes follow from the degree: degree >= 3 is a
/// bifurcation, degree 2 an internal continuation point, degree 1 a
/// Dirichlet node when a Dirichlet value is given and a Neumann tip otherwise.
class Network1D {
 public:
  Network1D() = default;
  Network1D(std::vector<Vec3> nodes, std::vector<GraphEdge> edges,
            std::map<int, double> dirichlet_values = {});

  /// Straight single edge from a to b with the same radius everywhere.
  static Network1D single_edge(const Vec3& a, const Vec3& b, double radius, int subdivisions,
                               std::map<int, double> dirichlet_values = {});

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  bool empty() const { return edges_.empty(); }
  const std::vector<Vec3>& nodes() const { return nodes_; }
  const Vec3& node(int v) const { return nodes_[v]; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const GraphEdge& edge(int e) const { return edges_[e]; }
  NodeClass node_class(int v) const { return classes_[v]; }
  std::optional<double> dirichlet_value(int v) const;
  const std::map<int, double>& dirichlet_values() const { return dirichlet_; }
  const std::vector<int>& incident_edges(int v) const { return incident_[v]; }
  int degree(int v) const { return static_cast<int>(incident_[v].size()); }

  double length(int e) const;
  Vec3 tangent(int e) const;
  Vec3 point(int e, double s) const;
  double total_length() const;
  std::vector<int> nodes_of_class(NodeClass c) const;

  /// Warnings for edges violating the thin-inclusion assumption (R > L / 10).
  std::vector<std::string> warnings() const;

  /// Same network with edge e parametrized from b to a.
  Network1D with_reversed_edge(int e) const;
  Network1D with_subdivisions(int n) const;
  Network1D with_radius(double radius) const;

 private:
  void validate_and_classify();

  std::vector<Vec3> nodes_;
  std::vector<GraphEdge> edges_;
  std::map<int, double> dirichlet_;
  std::vector<NodeClass> classes_;
  std::vector<std::vector<int>> incident_;
};

/// Incident edges of a bifurcation split by orientation: E+ holds edges whose
/// tangent points toward the node (the node is their end b), E- the others.
struct Incidence {
  std::vector<int> incoming;
  std::vector<int> outgoing;
  /// (edge, sign) pairs in edge order: +1 for E+, -1 for E-.
  std::vector<std::pair<int, int>> signed_edges;
};

Incidence classify_incidence(const Network1D& net, int v);

/// P1 discretization of the network on the extended graph: edge e is split
/// into n_e equal intervals of length k_e. Degrees of freedom are numbered
/// interior points edge by edge, followed by one dof per network node.
class GraphMesh {
 public:
  struct Cell {
    int edge;
    int index;  // interval j spans points j and j + 1
    std::array<int, 2> dofs;
  };

  GraphMesh() = default;
  explicit GraphMesh(Network1D net);

  const Network1D& network() const { return net_; }
  int num_dofs() const { return num_dofs_; }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  const std::vector<Cell>& cells() const { return cells_; }
  int vertex_dof(int v) const { return num_interior_ + v; }
  /// Dof of point j (0..n_e) on edge e.
  int dof(int e, int j) const;
  double spacing(int e) const { return net_.length(e) / net_.edge(e).subdivisions; }
  Vec3 point(int e, int j) const;
  /// Coordinates of each dof.
  const std::vector<Vec3>& dof_points() const { return dof_points_; }
  /// Graph location of each dof (first edge touching it for vertex dofs).
  const std::vector<GraphPoint>& dof_locations() const { return dof_locations_; }

  /// Piecewise-linear interpolation of dof values at arc coordinate s of edge e.
  double evaluate(const Vector& values, int e, double s) const;
  /// Slope dΦ/ds of the P1 field on the interval containing s.
  double slope(const Vector& values, int e, double s) const;

 private:
  Network1D net_;
  int num_interior_ = 0;
  int num_dofs_ = 0;
  std::vector<int> edge_offset_;
  std::vector<Cell> cells_;
  std::vector<Vec3> dof_points_;
  std::vector<GraphPoint> dof_locations_;
};

GraphMesh build_graph_mesh(const Network1D& net);

struct TreeOptions {
  int depth = 6;
  double branch_probability = 0.5;
  /// Segment lengths are drawn uniformly from [segment_min, segment_max].
  double segment_min = 0.05;
  double segment_max = 0.1;
  double radius = 1e-3;
  std::uint64_t seed = 1;
  Box domain;
  Vec3 root{0.5, 0.5, 0.0};
  Vec3 direction{0.0, 0.0, 1.0};
  /// Standard deviation of the direction perturbation per generation.
  double spread = 0.3;
  /// Additional spread applied to the second child at a branching.
  double branch_spread = 0.8;
  /// New points keep this distance from the domain faces that do not hold
  /// the root.
  double margin = 0.02;
  int attempts_per_child = 16;
  long rejection_budget = 2'000'000;
  double root_value = 0.0;
};

/// Seeded random tree: every generation extends each active tip by one
/// segment and branches it with the given probability. Candidate segments
/// leaving the domain or passing within one radius of a non-adjacent segment
/// are rejected; a tip whose candidates all fail stops growing. The root is a
/// Dirichlet node with value root_value, all leaves are Neumann tips.
Network1D generate_random_tree(const TreeOptions& options);

/// Plain-text graph file headed "EMDIM-GRAPH 1".
void write_graph(const Network1D& net, const std::string& path);
Network1D read_graph(const std::string& path);

}  // namespace emdim
