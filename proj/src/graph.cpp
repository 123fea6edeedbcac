#include "emdim/graph.hpp"

#include "emdim/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace emdim {

const char* to_string(NodeClass c) noexcept {
  switch (c) {
    case NodeClass::Dirichlet: return "dirichlet";
    case NodeClass::NeumannTip: return "neumann_tip";
    case NodeClass::Bifurcation: return "bifurcation";
    case NodeClass::Internal: return "internal";
  }
  return "unknown";
}

Network1D::Network1D(std::vector<Vec3> nodes, std::vector<GraphEdge> edges,
                     std::map<int, double> dirichlet_values)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), dirichlet_(std::move(dirichlet_values)) {
  validate_and_classify();
}

Network1D Network1D::single_edge(const Vec3& a, const Vec3& b, double radius, int subdivisions,
                                 std::map<int, double> dirichlet_values) {
  return Network1D({a, b}, {GraphEdge{0, 1, radius, subdivisions}}, std::move(dirichlet_values));
}

void Network1D::validate_and_classify() {
  const int nv = num_nodes();
  incident_.assign(nv, {});
  for (int e = 0; e < num_edges(); ++e) {
    const auto& ed = edges_[e];
    if (ed.a < 0 || ed.a >= nv || ed.b < 0 || ed.b >= nv) {
      fail(ErrorKind::Topology, "edge " + std::to_string(e) + " references a missing node");
    }
    if (!(length(e) > 0)) {
      fail(ErrorKind::InvalidGeometry, "edge " + std::to_string(e) + " has zero length");
    }
    if (!(ed.radius > 0)) {
      fail(ErrorKind::InvalidParameter, "edge " + std::to_string(e) + " has non-positive radius");
    }
    if (ed.subdivisions < 1) {
      fail(ErrorKind::InvalidParameter, "edge " + std::to_string(e) + " needs at least one subdivision");
    }
    incident_[ed.a].push_back(e);
    incident_[ed.b].push_back(e);
  }

  if (nv > 0) {
    // Connectivity by union-find over the edges.
    std::vector<int> parent(nv);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    for (const auto& ed : edges_) parent[find(ed.a)] = find(ed.b);
    const int root = find(0);
    for (int v = 0; v < nv; ++v) {
      if (find(v) != root) {
        fail(ErrorKind::Topology, "network is not connected (node " + std::to_string(v) + ")");
      }
    }
  }

  classes_.assign(nv, NodeClass::Internal);
  for (int v = 0; v < nv; ++v) {
    const int deg = degree(v);
    const bool has_value = dirichlet_.count(v) > 0;
    if (deg >= 3) classes_[v] = NodeClass::Bifurcation;
    else if (deg == 2) classes_[v] = NodeClass::Internal;
    else classes_[v] = has_value ? NodeClass::Dirichlet : NodeClass::NeumannTip;
    if (has_value && deg != 1) {
      fail(ErrorKind::Classification, "Dirichlet value given at node " + std::to_string(v) +
                                          " of degree " + std::to_string(deg));
    }
  }
  for (const auto& [v, value] : dirichlet_) {
    if (v < 0 || v >= nv) fail(ErrorKind::Classification, "Dirichlet node out of range");
    (void)value;
  }
}

std::optional<double> Network1D::dirichlet_value(int v) const {
  const auto it = dirichlet_.find(v);
  if (it == dirichlet_.end()) return std::nullopt;
  return it->second;
}

double Network1D::length(int e) const { return (nodes_[edges_[e].b] - nodes_[edges_[e].a]).norm(); }

Vec3 Network1D::tangent(int e) const {
  return (nodes_[edges_[e].b] - nodes_[edges_[e].a]).normalized();
}

Vec3 Network1D::point(int e, double s) const { return nodes_[edges_[e].a] + s * tangent(e); }

double Network1D::total_length() const {
  double sum = 0;
  for (int e = 0; e < num_edges(); ++e) sum += length(e);
  return sum;
}

std::vector<int> Network1D::nodes_of_class(NodeClass c) const {
  std::vector<int> out;
  for (int v = 0; v < num_nodes(); ++v) {
    if (classes_[v] == c) out.push_back(v);
  }
  return out;
}

std::vector<std::string> Network1D::warnings() const {
  std::vector<std::string> out;
  for (int e = 0; e < num_edges(); ++e) {
    if (edges_[e].radius > 0.1 * length(e)) {
      std::ostringstream msg;
      msg << "edge " << e << ": radius " << edges_[e].radius << " exceeds a tenth of its length "
          << length(e);
      out.push_back(msg.str());
    }
  }
  return out;
}

Network1D Network1D::with_reversed_edge(int e) const {
  auto edges = edges_;
  std::swap(edges.at(e).a, edges.at(e).b);
  return Network1D(nodes_, std::move(edges), dirichlet_);
}

Network1D Network1D::with_subdivisions(int n) const {
  auto edges = edges_;
  for (auto& ed : edges) ed.subdivisions = n;
  return Network1D(nodes_, std::move(edges), dirichlet_);
}

Network1D Network1D::with_radius(double radius) const {
  auto edges = edges_;
  for (auto& ed : edges) ed.radius = radius;
  return Network1D(nodes_, std::move(edges), dirichlet_);
}

Incidence classify_incidence(const Network1D& net, int v) {
  if (v < 0 || v >= net.num_nodes() || net.node_class(v) != NodeClass::Bifurcation) {
    fail(ErrorKind::Domain, "node " + std::to_string(v) + " is not a bifurcation");
  }
  Incidence out;
  std::vector<int> edges = net.incident_edges(v);
  std::sort(edges.begin(), edges.end());
  for (int e : edges) {
    if (net.edge(e).b == v) {
      out.incoming.push_back(e);
      out.signed_edges.emplace_back(e, +1);
    } else {
      out.outgoing.push_back(e);
      out.signed_edges.emplace_back(e, -1);
    }
  }
  return out;
}

GraphMesh::GraphMesh(Network1D net) : net_(std::move(net)) {
  edge_offset_.resize(net_.num_edges());
  int interior = 0;
  for (int e = 0; e < net_.num_edges(); ++e) {
    const int n = net_.edge(e).subdivisions;
    if (n < 1) {
      fail(ErrorKind::InvalidParameter,
           "edge " + std::to_string(e) + " needs at least one subdivision");
    }
    edge_offset_[e] = interior;
    interior += n - 1;
  }
  num_interior_ = interior;
  num_dofs_ = interior + net_.num_nodes();

  dof_points_.assign(num_dofs_, Vec3::Zero());
  dof_locations_.assign(num_dofs_, GraphPoint{});
  std::vector<bool> seen(num_dofs_, false);
  for (int e = 0; e < net_.num_edges(); ++e) {
    const int n = net_.edge(e).subdivisions;
    const double k = spacing(e);
    for (int j = 0; j <= n; ++j) {
      const int d = dof(e, j);
      if (!seen[d]) {
        seen[d] = true;
        dof_points_[d] = point(e, j);
        dof_locations_[d] = GraphPoint{dof_points_[d], e, j * k};
      }
    }
    for (int j = 0; j < n; ++j) cells_.push_back(Cell{e, j, {dof(e, j), dof(e, j + 1)}});
  }
  for (int v = 0; v < net_.num_nodes(); ++v) {
    if (!seen[vertex_dof(v)]) {
      dof_points_[vertex_dof(v)] = net_.node(v);
      dof_locations_[vertex_dof(v)] = GraphPoint{net_.node(v), -1, 0.0};
    }
  }
}

int GraphMesh::dof(int e, int j) const {
  const auto& ed = net_.edge(e);
  if (j == 0) return vertex_dof(ed.a);
  if (j == ed.subdivisions) return vertex_dof(ed.b);
  return edge_offset_[e] + j - 1;
}

Vec3 GraphMesh::point(int e, int j) const {
  const auto& ed = net_.edge(e);
  if (j == ed.subdivisions) return net_.node(ed.b);
  const double t = static_cast<double>(j) / ed.subdivisions;
  return (1.0 - t) * net_.node(ed.a) + t * net_.node(ed.b);
}

double GraphMesh::evaluate(const Vector& values, int e, double s) const {
  const int n = net_.edge(e).subdivisions;
  const double x = s / spacing(e);
  const int j = std::clamp(static_cast<int>(std::floor(x)), 0, n - 1);
  const double xi = x - j;
  return (1.0 - xi) * values[dof(e, j)] + xi * values[dof(e, j + 1)];
}

double GraphMesh::slope(const Vector& values, int e, double s) const {
  const int n = net_.edge(e).subdivisions;
  const int j = std::clamp(static_cast<int>(std::floor(s / spacing(e))), 0, n - 1);
  return (values[dof(e, j + 1)] - values[dof(e, j)]) / spacing(e);
}

GraphMesh build_graph_mesh(const Network1D& net) { return GraphMesh(net); }

void write_graph(const Network1D& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << std::setprecision(17);
  out << "EMDIM-GRAPH 1\n";
  out << "nodes " << net.num_nodes() << '\n';
  for (int v = 0; v < net.num_nodes(); ++v) {
    const Vec3& x = net.node(v);
    out << v << ' ' << x[0] << ' ' << x[1] << ' ' << x[2] << ' ' << to_string(net.node_class(v));
    if (const auto value = net.dirichlet_value(v)) out << ' ' << *value;
    out << '\n';
  }
  out << "edges " << net.num_edges() << '\n';
  for (int e = 0; e < net.num_edges(); ++e) {
    const auto& ed = net.edge(e);
    out << e << ' ' << ed.a << ' ' << ed.b << ' ' << ed.radius << ' ' << ed.subdivisions << '\n';
  }
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

Network1D read_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line) || line.rfind("EMDIM-GRAPH 1", 0) != 0) {
    fail(ErrorKind::Format, path + ": missing 'EMDIM-GRAPH 1' header");
  }
  auto section = [&](const std::string& name) {
    std::string word;
    long count = -1;
    if (!std::getline(in, line)) fail(ErrorKind::Format, path + ": missing section " + name);
    std::istringstream ls(line);
    if (!(ls >> word >> count) || word != name || count < 0) {
      fail(ErrorKind::Format, path + ": expected '" + name + " <count>'");
    }
    return count;
  };

  const long nn = section("nodes");
  std::vector<Vec3> nodes(nn);
  std::vector<std::string> declared(nn);
  std::map<int, double> dirichlet;
  for (long i = 0; i < nn; ++i) {
    if (!std::getline(in, line)) fail(ErrorKind::Format, path + ": truncated node list");
    std::istringstream ls(line);
    long id;
    Vec3 x;
    std::string cls;
    if (!(ls >> id >> x[0] >> x[1] >> x[2] >> cls) || id != i) {
      fail(ErrorKind::Format, path + ": malformed node line " + std::to_string(i));
    }
    nodes[i] = x;
    declared[i] = cls;
    double value;
    if (ls >> value) dirichlet[static_cast<int>(i)] = value;
    else if (cls == "dirichlet") {
      fail(ErrorKind::Format, path + ": dirichlet node " + std::to_string(i) + " lacks a value");
    }
  }
  const long ne = section("edges");
  std::vector<GraphEdge> edges(ne);
  for (long i = 0; i < ne; ++i) {
    if (!std::getline(in, line)) fail(ErrorKind::Format, path + ": truncated edge list");
    std::istringstream ls(line);
    long id;
    auto& ed = edges[i];
    if (!(ls >> id >> ed.a >> ed.b >> ed.radius >> ed.subdivisions) || id != i) {
      fail(ErrorKind::Format, path + ": malformed edge line " + std::to_string(i));
    }
  }
  Network1D net(std::move(nodes), std::move(edges), std::move(dirichlet));
  for (long i = 0; i < nn; ++i) {
    if (declared[i] != to_string(net.node_class(static_cast<int>(i)))) {
      fail(ErrorKind::Format, path + ": node " + std::to_string(i) + " declared '" + declared[i] +
                                  "' but its degree makes it '" +
                                  to_string(net.node_class(static_cast<int>(i))) + "'");
    }
  }
  return net;
}

}  // namespace emdim
