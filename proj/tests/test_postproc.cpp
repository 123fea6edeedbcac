#include "emdim/assembly3d.hpp"
#include "emdim/error.hpp"
#include "emdim/postproc.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace emdim;

TEST_SUITE("postproc") {

TEST_CASE("cell L2 error") {
  const TetMesh cube = test::unit_cube(0.3);
  CHECK(l2_error_cells(cube, Vector::Constant(cube.num_tets(), 2.0), constant_field(2.0)) == 0.0);
  const double e = l2_error_cells(cube, Vector::Zero(cube.num_tets()), [](const Vec3& x) { return x[0]; });
  CHECK(e == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-13));
  auto f = [](const Vec3& x) { return x[0] * x[1] - x[2]; };
  CHECK(l2_error_cells(cube, cell_means(cube, f), f) > 0);
  CHECK_THROWS_AS(l2_error_cells(cube, Vector::Zero(3), f), Error);

  ExclusionZone all{{{Vec3(0.5, 0.5, 0), Vec3(0.5, 0.5, 1)}}, 10.0};
  CHECK(l2_error_cells(cube, Vector::Zero(cube.num_tets()), constant_field(1.0), all) == 0.0);
  ExclusionZone part{{{Vec3(0.5, 0.5, 0), Vec3(0.5, 0.5, 1)}}, 0.2};
  const double excluded = l2_error_cells(cube, Vector::Zero(cube.num_tets()), constant_field(1.0), part);
  CHECK(excluded < 1.0);
  CHECK(excluded > 0.5);
}

TEST_CASE("cell L2 error is a norm") {
  const TetMesh cube = test::unit_cube(0.4);
  const PointLocator loc(cube);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n01;
  auto random_field = [&] {
    Vector v(cube.num_tets());
    for (auto& x : v) x = n01(rng);
    return v;
  };
  auto as_field = [&](const Vector& v) -> ScalarField {
    return [&, v](const Vec3& x) { return v[*loc.locate(x)]; };
  };
  for (int trial = 0; trial < 5; ++trial) {
    const Vector a = random_field(), b = random_field(), c = random_field();
    const double ab = l2_error_cells(cube, a, as_field(b));
    const double bc = l2_error_cells(cube, b, as_field(c));
    const double ac = l2_error_cells(cube, a, as_field(c));
    CHECK(ac <= ab + bc + 1e-14);
    CHECK(l2_error_cells(cube, a, as_field(a)) == 0.0);
    // cellwise the norm is exact: Σ |T| (a - b)²
    double oracle = 0;
    for (int t = 0; t < cube.num_tets(); ++t) oracle += cube.volume(t) * (a[t] - b[t]) * (a[t] - b[t]);
    CHECK(ab == doctest::Approx(std::sqrt(oracle)).epsilon(1e-12));
  }
}

TEST_CASE("graph L2 error") {
  const GraphMesh gm(Network1D::single_edge(Vec3(0, 0, 0), Vec3(0, 0, 2), 0.1, 8));
  Vector lin(gm.num_dofs());
  for (int d = 0; d < gm.num_dofs(); ++d) lin[d] = 1 + 3 * gm.dof_locations()[d].s;
  CHECK(l2_error_graph(gm, lin, [](const GraphPoint& p) { return 1 + 3 * p.s; }) < 1e-14);
  // L2 norm of s on [0, 2] is sqrt(8/3)
  CHECK(l2_error_graph(gm, Vector::Zero(gm.num_dofs()), [](const GraphPoint& p) { return p.s; }) ==
        doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-13));
}

TEST_CASE("gas reconstruction") {
  const double r0 = 0.01;
  const GraphMesh gm(Network1D::single_edge(Vec3(0, 0, 0), Vec3(0, 0, 1), r0, 10));
  GasSplitting split{&gm, Vector::Constant(gm.num_dofs(), r0 / 2), constant_graph_field(-2.0 / r0),
                     constant_graph_field(1.0)};
  const GasSample axis = reconstruct_gas(split, 0, 0.3, 0.0);
  CHECK(axis.phi == doctest::Approx(r0 / 2));
  CHECK(axis.e_radial == 0.0);
  const GasSample wall = reconstruct_gas(split, 0, 0.3, r0);
  CHECK(wall.phi == doctest::Approx(r0).epsilon(1e-14));
  CHECK(wall.e_radial == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(std::abs(wall.e_tangential) < 1e-12);
  try {
    reconstruct_gas(split, 0, 0.3, 2 * r0);
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("convergence fit") {
  std::vector<std::pair<double, double>> lin, quad;
  for (double r : {1e-2, 1e-3, 1e-4, 1e-5}) {
    lin.emplace_back(r, r);
    quad.emplace_back(r, r * r);
  }
  CHECK(std::abs(convergence_table(lin).slope - 1.0) <= 1e-12);
  CHECK(convergence_table(quad).slope == doctest::Approx(2.0).epsilon(1e-12));
  const std::vector<std::pair<double, double>> paper{
      {1e-6, 3.7848e-7}, {1e-5, 1.50974e-6}, {1e-4, 7.92641e-6}, {1e-3, 3.05378e-4}, {1e-2, 5.43034e-3}};
  const auto fit = convergence_table(paper);
  CHECK(std::abs(fit.slope - 1.0) <= 0.15);
  CHECK(fit.csv.rfind("R,error\n", 0) == 0);
  CHECK(std::count(fit.csv.begin(), fit.csv.end(), '\n') == 6);

  CHECK_THROWS_AS(convergence_table({{1e-2, 1e-2}, {1e-3, 1e-3}}), Error);
  CHECK_THROWS_AS(convergence_table({{1e-2, 1e-2}, {1e-3, 0.0}, {1e-4, 1e-4}}), Error);
  CHECK_THROWS_AS(convergence_table({{1e-2, 1e-2}, {1e-2, 2e-2}, {1e-2, 3e-2}}), Error);
}

TEST_CASE("vtk export") {
  const auto dir = test::scratch_dir("vtk");
  const TetMesh ref = test::reference_tet();
  FieldSet one;
  one.cell_fields.emplace_back("phi_s", Vector::Ones(1));
  export_vtk(ref, one, (dir / "one.vtk").string());
  const std::string text = test::slurp(dir / "one.vtk");
  CHECK(text.rfind("# vtk DataFile Version 3.0", 0) == 0);
  CHECK(text.find("CELL_DATA 1") != std::string::npos);
  CHECK(read_vtk((dir / "one.vtk").string()).cell_scalars.at("phi_s") == std::vector<double>{1.0});

  export_vtk(ref, FieldSet{}, (dir / "empty.vtk").string());
  const VtkData empty = read_vtk((dir / "empty.vtk").string());
  CHECK(empty.num_points == 4);
  CHECK(empty.num_cells == 1);
  CHECK(empty.cell_scalars.empty());

  const TetMesh cube = test::unit_cube(0.3);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1, 1);
  Vector phi(cube.num_tets());
  for (auto& x : phi) x = u(rng) / 3;
  auto v = [](const Vec3& x) -> Vec3 { return Vec3(1, -2, 0.5) + 0.7 * x; };
  FieldSet fs;
  fs.cell_fields.emplace_back("phi_s", phi);
  fs.flux_fields.emplace_back("D_s", rt0_interpolate(cube, v));
  export_vtk(cube, fs, (dir / "cube.vtk").string());
  const VtkData back = read_vtk((dir / "cube.vtk").string());
  CHECK(back.num_cells == cube.num_tets());
  CHECK(back.num_points == cube.num_vertices());
  const auto& vals = back.cell_scalars.at("phi_s");
  REQUIRE(static_cast<int>(vals.size()) == cube.num_tets());
  for (int t = 0; t < cube.num_tets(); ++t) CHECK(vals[t] == phi[t]);
  const auto& vecs = back.cell_vectors.at("D_s");
  for (int t = 0; t < cube.num_tets(); ++t) CHECK((vecs[t] - v(cube.centroid(t))).norm() < 1e-12);

  const GraphMesh gm(Network1D::single_edge(Vec3(0, 0, 0), Vec3(0, 0, 1), 0.01, 4));
  const Vector lam = Vector::LinSpaced(gm.num_dofs(), 0.1, 0.5);
  export_graph_vtk(gm, lam, (dir / "graph.vtk").string());
  const VtkData g = read_vtk((dir / "graph.vtk").string());
  const auto& pts = g.point_scalars.at("phi_lambda");
  REQUIRE(static_cast<int>(pts.size()) == gm.num_dofs());
  for (int d = 0; d < gm.num_dofs(); ++d) CHECK(pts[d] == lam[d]);

  try {
    export_vtk(ref, one, (dir / "no" / "such" / "dir.vtk").string());
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

}  // TEST_SUITE
