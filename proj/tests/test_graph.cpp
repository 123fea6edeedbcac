#include "emdim/error.hpp"
#include "emdim/geometry.hpp"
#include "emdim/graph.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace emdim;

namespace {

// Three edges meeting at node 0, each parametrized toward it.
Network1D y_graph(int subdivisions = 1) {
  std::vector<Vec3> nodes{Vec3(0.5, 0.5, 0.5), Vec3(0.5, 0.5, 0.1), Vec3(0.2, 0.5, 0.8),
                          Vec3(0.8, 0.5, 0.8)};
  std::vector<GraphEdge> edges{{1, 0, 0.01, subdivisions}, {2, 0, 0.01, subdivisions},
                               {3, 0, 0.01, subdivisions}};
  return Network1D(nodes, edges, {{1, 1.0}});
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Io;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("single edge discretization") {
  const auto net = Network1D::single_edge(Vec3(0, 0, 0), Vec3(0, 0, 1), 0.1, 2, {{0, 1.0}, {1, 1.0}});
  const GraphMesh gm(net);
  CHECK(gm.num_dofs() == 3);
  std::vector<double> s;
  for (int j = 0; j <= 2; ++j) s.push_back(gm.dof_locations()[gm.dof(0, j)].s);
  CHECK(s == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(gm.dof(0, 0) == gm.vertex_dof(0));
  CHECK(gm.dof(0, 2) == gm.vertex_dof(1));

  const GraphMesh fine(net.with_subdivisions(100));
  CHECK(fine.num_dofs() == 101);
  CHECK(fine.spacing(0) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(kind_of([&] { net.with_subdivisions(0); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("node classes follow the degree") {
  const auto net = y_graph();
  CHECK(net.node_class(0) == NodeClass::Bifurcation);
  CHECK(net.node_class(1) == NodeClass::Dirichlet);
  CHECK(net.node_class(2) == NodeClass::NeumannTip);
  CHECK(GraphMesh(net).num_dofs() == 4);

  int handshake = 0;
  for (int v : net.nodes_of_class(NodeClass::Bifurcation)) handshake += net.degree(v);
  int incidences = 0;
  for (const auto& e : net.edges()) incidences += (net.node_class(e.a) == NodeClass::Bifurcation) + (net.node_class(e.b) == NodeClass::Bifurcation);
  CHECK(handshake == incidences);
}

TEST_CASE("dof count and mesh points") {
  const auto net = y_graph(5);
  const GraphMesh gm(net);
  int expected = net.num_nodes();
  for (const auto& e : net.edges()) expected += e.subdivisions - 1;
  CHECK(gm.num_dofs() == expected);
  for (int d = 0; d < gm.num_dofs(); ++d) {
    const auto& loc = gm.dof_locations()[d];
    const auto& e = net.edge(loc.edge);
    CHECK(geometry::point_segment_distance(gm.dof_points()[d], net.node(e.a), net.node(e.b)) < 1e-14);
    CHECK((gm.dof_points()[d] - net.point(loc.edge, loc.s)).norm() < 1e-14);
  }
}

TEST_CASE("bifurcation incidence") {
  const auto net = y_graph();
  const auto inc = classify_incidence(net, 0);
  CHECK(inc.incoming == std::vector<int>{0, 1, 2});
  CHECK(inc.outgoing.empty());
  for (const auto& [e, sign] : inc.signed_edges) CHECK(sign == 1);

  const auto flipped = classify_incidence(net.with_reversed_edge(1), 0);
  CHECK(flipped.incoming == std::vector<int>{0, 2});
  CHECK(flipped.outgoing == std::vector<int>{1});
  CHECK(flipped.signed_edges[1] == std::pair<int, int>{1, -1});
  CHECK(kind_of([&] { classify_incidence(net, 2); }) == ErrorKind::Domain);
}

TEST_CASE("network validation") {
  CHECK(kind_of([] { Network1D({Vec3(0, 0, 0), Vec3(0, 0, 0)}, {{0, 1, 0.1, 1}}); }) ==
        ErrorKind::InvalidGeometry);
  CHECK(kind_of([] { Network1D({Vec3(0, 0, 0), Vec3(0, 0, 1)}, {{0, 1, 0.0, 1}}); }) ==
        ErrorKind::InvalidParameter);
  CHECK(kind_of([] { Network1D({Vec3(0, 0, 0), Vec3(0, 0, 1)}, {{0, 2, 0.1, 1}}); }) ==
        ErrorKind::Topology);
  CHECK(kind_of([] {
          Network1D({Vec3(0, 0, 0), Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(1, 0, 1)},
                    {{0, 1, 0.1, 1}, {2, 3, 0.1, 1}});
        }) == ErrorKind::Topology);
  CHECK(kind_of([] { Network1D(y_graph().nodes(), y_graph().edges(), {{0, 1.0}}); }) ==
        ErrorKind::Classification);

  const auto thick = Network1D::single_edge(Vec3(0, 0, 0), Vec3(0, 0, 1), 0.2, 1);
  CHECK(thick.warnings().size() == 1);
  CHECK(Network1D::single_edge(Vec3(0, 0, 0), Vec3(0, 0, 1), 0.05, 1).warnings().empty());
}

TEST_CASE("graph file round trip") {
  const auto dir = test::scratch_dir("graph");
  const auto net = y_graph(3);
  write_graph(net, (dir / "y.graph").string());
  const auto back = read_graph((dir / "y.graph").string());
  REQUIRE(back.num_nodes() == net.num_nodes());
  REQUIRE(back.num_edges() == net.num_edges());
  for (int v = 0; v < net.num_nodes(); ++v) {
    CHECK(back.node(v) == net.node(v));
    CHECK(back.node_class(v) == net.node_class(v));
    CHECK(back.dirichlet_value(v) == net.dirichlet_value(v));
  }
  for (int e = 0; e < net.num_edges(); ++e) {
    CHECK(back.edge(e).a == net.edge(e).a);
    CHECK(back.edge(e).b == net.edge(e).b);
    CHECK(back.edge(e).radius == net.edge(e).radius);
    CHECK(back.edge(e).subdivisions == net.edge(e).subdivisions);
  }
  test::spit(dir / "bad.graph", "EMDIM-GRAPH 2\n");
  CHECK(kind_of([&] { read_graph((dir / "bad.graph").string()); }) == ErrorKind::Format);
}

TEST_CASE("random tree generator") {
  TreeOptions o;
  o.depth = 1;
  const auto one = generate_random_tree(o);
  CHECK(one.num_edges() == 1);
  CHECK(one.num_nodes() == 2);
  CHECK(one.node_class(0) == NodeClass::Dirichlet);
  CHECK(one.node_class(1) == NodeClass::NeumannTip);

  o.depth = 6;
  o.branch_probability = 0.5;
  o.seed = 42;
  const auto a = generate_random_tree(o);
  const auto b = generate_random_tree(o);
  REQUIRE(a.num_nodes() == b.num_nodes());
  for (int v = 0; v < a.num_nodes(); ++v) CHECK(a.node(v) == b.node(v));
  CHECK(a.num_edges() > 5);
  for (int v = 0; v < a.num_nodes(); ++v) {
    CHECK(o.domain.contains(a.node(v), 1e-12));
    if (v > 0) CHECK(a.node_class(v) != NodeClass::Dirichlet);
  }

  TreeOptions tight;
  tight.depth = 20;
  tight.domain.hi = Vec3(1, 1, 0.3);
  tight.rejection_budget = 3;
  try {
    generate_random_tree(tight);
    FAIL("expected a generation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Generation);
    CHECK(std::string(e.what()).find("smaller depth") != std::string::npos);
  }
}

}  // TEST_SUITE
