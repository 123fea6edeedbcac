#include "emdim/cases.hpp"

#include "emdim/error.hpp"
#include "emdim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace emdim {

namespace {

constexpr double pi = std::numbers::pi;

double min_half_width(const Box& box) { return 0.5 * (box.hi - box.lo).minCoeff(); }

/// Distance to the vertical axis through the middle of the box.
double axis_distance(const Box& box, const Vec3& x) {
  const Vec3 c = 0.5 * (box.lo + box.hi);
  return std::hypot(x[0] - c[0], x[1] - c[1]);
}

Vec3 axis_direction(const Box& box, const Vec3& x) {
  const Vec3 c = 0.5 * (box.lo + box.hi);
  const Vec3 d(x[0] - c[0], x[1] - c[1], 0.0);
  return d / d.norm();
}

void apply_resolution(BoxMeshOptions& mesh, const MeshResolution& res) {
  mesh.h_far = res.h_far;
  mesh.h_near = res.h_near;
  mesh.band = res.band;
}

std::vector<Segment> network_segments(const Network1D& net) {
  std::vector<Segment> out;
  out.reserve(net.num_edges());
  for (const auto& e : net.edges()) out.emplace_back(net.node(e.a), net.node(e.b));
  return out;
}

/// Shared TC1/TC2 data on a vertical line in the middle of `domain`.
ManufacturedCase axial_case(double radius, const Box& domain) {
  if (!(radius > 0)) fail(ErrorKind::InvalidParameter, "radius must be positive");
  if (radius > 0.1 * min_half_width(domain)) {
    fail(ErrorKind::InvalidGeometry, "radius " + std::to_string(radius) +
                                         " is too large for the domain (limit: a tenth of the "
                                         "smallest half-width)");
  }
  const double R = radius;
  ManufacturedCase c;
  c.radius = R;
  c.phi_s = [domain, R](const Vec3& x) { return R * (1.0 - std::log(axis_distance(domain, x) / R)); };
  c.d_s = [domain, R](const Vec3& x) {
    return Vec3(R / axis_distance(domain, x) * axis_direction(domain, x));
  };
  c.phi_g = [R](double r, const GraphPoint&) { return 0.5 * r * r / R + 0.5 * R; };
  c.phi_lambda = constant_graph_field(0.5 * R);
  c.phi_r = constant_graph_field(0.5 / R);

  auto& s = c.setup;
  s.domain = domain;
  s.boundary_rule = z_faces_neumann;
  s.data.eps_s = constant_field(1.0);
  s.data.eps_g = constant_graph_field(1.0);
  s.data.q_over_eps0 = constant_graph_field(-2.0 / R);
  s.data.g = constant_graph_field(-2.0);
  const auto phi_s = c.phi_s;
  const auto d_s = c.d_s;
  s.data.phi_bar = [phi_s](const Vec3& x, const Vec3&) { return phi_s(x); };
  s.data.nu = [d_s](const Vec3& x, const Vec3& n) { return d_s(x).dot(n); };
  s.mesh.bounds = domain;
  s.mesh.boundary_rule = z_faces_neumann;
  return c;
}

}  // namespace

ManufacturedCase tc1_case(double radius, const Box& domain, int segments,
                          const MeshResolution& resolution) {
  ManufacturedCase c = axial_case(radius, domain);
  const Vec3 mid = 0.5 * (domain.lo + domain.hi);
  const Vec3 a(mid[0], mid[1], domain.lo[2]);
  const Vec3 b(mid[0], mid[1], domain.hi[2]);
  c.setup.name = "tc1";
  c.setup.network = Network1D::single_edge(a, b, radius, segments, {{0, 0.5 * radius}, {1, 0.5 * radius}});
  apply_resolution(c.setup.mesh, resolution);
  c.setup.mesh.refine_segments = {{a, b}};
  return c;
}

CaseSetup tc2_case(double radius, const Box& domain, double tip, int segments,
                   const MeshResolution& resolution) {
  if (!(tip > 0 && tip < 1)) fail(ErrorKind::InvalidGeometry, "tip must lie strictly inside the box");
  CaseSetup s = axial_case(radius, domain).setup;
  const Vec3 mid = 0.5 * (domain.lo + domain.hi);
  const Vec3 a(mid[0], mid[1], domain.lo[2]);
  const Vec3 b(mid[0], mid[1], domain.lo[2] + tip * (domain.hi[2] - domain.lo[2]));
  s.name = "tc2";
  s.network = Network1D::single_edge(a, b, radius, segments, {{0, 0.5 * radius}});
  s.data.g_tip = constant_graph_field(0.0);
  apply_resolution(s.mesh, resolution);
  s.mesh.refine_segments = {{a, b}};
  return s;
}

Tc3Options tc3_defaults() {
  Tc3Options o;
  auto& t = o.tree;
  t.depth = 80;
  t.branch_probability = 0.08;
  t.segment_min = 0.004;
  t.segment_max = 0.012;
  t.radius = 5e-4;
  t.spread = 0.35;
  t.branch_spread = 0.6;
  t.margin = 0.03;
  t.root = Vec3(0.5, 0.5, 0.0);
  t.direction = Vec3(0, 0, 1);
  return o;
}

CaseSetup tc3_case(std::uint64_t seed, double scale, const Tc3Options& options) {
  if (!(scale > 0 && scale <= 1)) fail(ErrorKind::InvalidParameter, "scale must lie in (0, 1]");
  TreeOptions tree = options.tree;
  tree.seed = seed;
  tree.depth = std::max(1, static_cast<int>(std::lround(tree.depth * scale)));
  tree.root_value = options.electrode_value;

  CaseSetup s;
  s.name = "tc3";
  s.domain = tree.domain;
  s.network = generate_random_tree(tree);
  const double lo = s.domain.lo[2], hi = s.domain.hi[2];
  s.boundary_rule = [](const Vec3&, const Vec3& n) {
    return std::abs(n[2]) > 0.5 ? BoundaryTag::Dirichlet : BoundaryTag::Neumann;
  };
  const double value = options.electrode_value;
  const double z_mid = 0.5 * (lo + hi);
  s.data.phi_bar = [value, z_mid](const Vec3& x, const Vec3&) { return x[2] < z_mid ? value : 0.0; };
  s.data.nu = constant_boundary_field(0.0);
  s.data.g_tip = constant_graph_field(0.0);
  s.mesh.bounds = s.domain;
  s.mesh.boundary_rule = s.boundary_rule;
  apply_resolution(s.mesh, options.mesh);
  s.mesh.refine_segments = network_segments(s.network);
  s.solver.tol = 1e-10;
  s.solver.max_iter = 2000;
  s.solver.restart = 200;
  return s;
}

ResidualReport verify_manufactured(const ManufacturedCase& c, int n_check, double h) {
  ResidualReport rep;
  const auto& s = c.setup;
  const auto& net = s.network;
  const auto& data = s.data;
  const double R = c.radius;
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto record = [&](const std::string& name, double value) {
    auto& slot = rep.residuals[name];
    slot = std::max(slot, std::abs(value));
    rep.max_residual = std::max(rep.max_residual, std::abs(value));
  };
  for (const char* name : {"constitutive", "divergence", "dirichlet_3d", "neumann_3d", "line_flux",
                           "graph_equation", "dirichlet_1d", "tip_neumann", "splitting",
                           "radial_coefficient", "continuity_phi", "interface_potential",
                           "interface_jump", "robin"}) {
    rep.residuals[name] = 0.0;
  }
  if (net.empty()) return rep;

  const auto segments = network_segments(net);
  auto line_distance = [&](const Vec3& x) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : segments) d = std::min(d, geometry::point_segment_distance<double>(x, a, b));
    return d;
  };
  const Box& box = s.domain;
  const double r_min = std::max(2 * R, 0.1 * min_half_width(box));

  // Bulk equations away from the line.
  int bulk = 0;
  for (int attempt = 0; bulk < n_check && attempt < 1000 * n_check; ++attempt) {
    Vec3 x;
    for (int i = 0; i < 3; ++i) x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
    if (line_distance(x) < r_min) continue;
    ++bulk;
    Vec3 grad;
    double div = 0;
    for (int i = 0; i < 3; ++i) {
      Vec3 e = Vec3::Zero();
      e[i] = h;
      grad[i] = (c.phi_s(x + e) - c.phi_s(x - e)) / (2 * h);
      div += (c.d_s(x + e)[i] - c.d_s(x - e)[i]) / (2 * h);
    }
    record("constitutive", (c.d_s(x) + data.eps_s(x) * grad).cwiseAbs().maxCoeff());
    record("divergence", div);
  }

  // Boundary conditions on the six box faces.
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      Vec3 n = Vec3::Zero();
      n[axis] = side ? 1.0 : -1.0;
      for (int k = 0; k < n_check / 6 + 1; ++k) {
        Vec3 x;
        for (int i = 0; i < 3; ++i) x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
        x[axis] = side ? box.hi[axis] : box.lo[axis];
        if (line_distance(x) < r_min) continue;
        const BoundaryTag tag = s.boundary_rule(x, n);
        if (tag == BoundaryTag::Dirichlet) record("dirichlet_3d", data.phi_bar(x, n) - c.phi_s(x));
        else if (tag == BoundaryTag::Neumann) record("neumann_3d", c.d_s(x).dot(n) - data.nu(x, n));
      }
    }
  }

  // Line equations, splitting and interface conditions.
  constexpr int circle = 64;
  for (int k = 0; k < n_check; ++k) {
    const int e = std::min(net.num_edges() - 1, static_cast<int>(unit(rng) * net.num_edges()));
    const double len = net.length(e);
    const double sv = (0.05 + 0.9 * unit(rng)) * len;
    const Vec3 x0 = net.point(e, sv);
    const GraphPoint p{x0, e, sv};
    const double eps_g = data.eps_g(p);
    const auto [u, w] = geometry::normal_plane_basis<double>(net.tangent(e));
    double mean = 0, flux = 0, worst_gap = 0;
    for (int m = 0; m < circle; ++m) {
      const double th = 2 * pi * m / circle;
      const Vec3 rhat = std::cos(th) * u + std::sin(th) * w;
      const Vec3 x = x0 + R * rhat;
      mean += c.phi_s(x) / circle;
      flux += c.d_s(x).dot(rhat) * (2 * pi * R / circle);
      worst_gap = std::max(worst_gap, std::abs(c.phi_g(R, p) - c.phi_s(x)));
      // Jump condition: D_s·n_s + D_g·n_g = g with n_s = -r̂, n_g = r̂.
      const double dphig_dr = (c.phi_g(R + h, p) - c.phi_g(R - h, p)) / (2 * h);
      const double ds_ns = -c.d_s(x).dot(rhat);
      record("interface_jump", ds_ns + (-eps_g * dphig_dr) - data.g(p));
    }
    record("interface_potential", worst_gap);

    const double phi_l = c.phi_lambda(p);
    const double g = data.g(p);
    const double q = data.q_over_eps0(p);
    record("line_flux", flux - (4 * pi * eps_g * (phi_l - mean) - 2 * pi * R * g));

    const double hs = std::min(h, 0.5 * std::min(sv, len - sv));
    auto phil_at = [&](double t) { return c.phi_lambda(GraphPoint{net.point(e, t), e, t}); };
    const double second = (phil_at(sv + hs) - 2 * phi_l + phil_at(sv - hs)) / (hs * hs);
    record("graph_equation",
           -pi * R * R * eps_g * second + 4 * pi * eps_g * (phi_l - mean) - pi * R * R * q);

    const double phir = c.phi_r(p);
    record("radial_coefficient", phir - (-q / (4 * eps_g)));
    record("continuity_phi", phi_l + phir * GasSplitting::profile(R) - mean);
    const double r = R * unit(rng);
    record("splitting", c.phi_g(r, p) - (phi_l + phir * GasSplitting::profile(r)));
    // Robin form: D_s·n_s = g + ε_g (Φ̂_s - Φ_Λ) φ'(R) / φ(R).
    double ds_ns_mean = 0;
    for (int m = 0; m < circle; ++m) {
      const double th = 2 * pi * m / circle;
      const Vec3 rhat = std::cos(th) * u + std::sin(th) * w;
      ds_ns_mean -= c.d_s(x0 + R * rhat).dot(rhat) / circle;
    }
    record("robin", ds_ns_mean - (g + eps_g * (mean - phi_l) * 2 * R / GasSplitting::profile(R)));
  }

  // Graph boundary conditions.
  const GraphField& g_tip = data.g_tip ? data.g_tip : data.g;
  for (int v = 0; v < net.num_nodes(); ++v) {
    const int e = net.incident_edges(v).front();
    const bool at_start = net.edge(e).a == v;
    const double sv = at_start ? 0.0 : net.length(e);
    const GraphPoint p{net.node(v), e, sv};
    if (net.node_class(v) == NodeClass::Dirichlet) {
      record("dirichlet_1d", c.phi_lambda(p) - *net.dirichlet_value(v));
    } else if (net.node_class(v) == NodeClass::NeumannTip) {
      const double inner = at_start ? h : net.length(e) - h;
      const double outward =
          (c.phi_lambda(p) - c.phi_lambda(GraphPoint{net.point(e, inner), e, inner})) / h;
      record("tip_neumann", outward + data.tip_flux_factor * g_tip(p) / data.eps_g(p));
    }
  }
  rep.samples = n_check;
  return rep;
}

}  // namespace emdim
