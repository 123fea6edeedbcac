#include "emdim/solver.hpp"

#include "emdim/assembly3d.hpp"
#include "emdim/error.hpp"

#include <chrono>
#include <cmath>

namespace emdim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_shape(const SparseMatrix& m, int rows, int cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    fail(ErrorKind::Dimension, std::string("block ") + name + " is " + std::to_string(m.rows()) +
                                   "x" + std::to_string(m.cols()) + ", expected " +
                                   std::to_string(rows) + "x" + std::to_string(cols));
  }
}

void check_length(const Vector& v, int n, const char* name) {
  if (v.size() != n) {
    fail(ErrorKind::Dimension, std::string("right-hand side ") + name + " has length " +
                                   std::to_string(v.size()) + ", expected " + std::to_string(n));
  }
}

void add_block(std::vector<Triplet>& trip, const SparseMatrix& m, int row0, int col0,
               bool transpose) {
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      const int i = static_cast<int>(it.row());
      const int j = static_cast<int>(it.col());
      if (transpose) trip.emplace_back(row0 + j, col0 + i, it.value());
      else trip.emplace_back(row0 + i, col0 + j, it.value());
    }
  }
}

}  // namespace

BlockSystem assemble_global(SparseMatrix a_s, SparseMatrix b, SparseMatrix c_ss, SparseMatrix c_ls,
                            SparseMatrix a_l, SparseMatrix l, SparseMatrix l_d, Vector f_d,
                            Vector g, Vector f, Vector f_n, Vector f_dl) {
  BlockSystem sys;
  auto& lay = sys.layout;
  lay.n_flux = static_cast<int>(a_s.rows());
  lay.n_potential = static_cast<int>(b.rows());
  lay.n_graph = static_cast<int>(a_l.rows());
  lay.n_neumann = static_cast<int>(l.rows());
  lay.n_dirichlet = static_cast<int>(l_d.rows());

  check_shape(a_s, lay.n_flux, lay.n_flux, "A_s");
  check_shape(b, lay.n_potential, lay.n_flux, "B");
  check_shape(c_ss, lay.n_potential, lay.n_potential, "C_ss");
  check_shape(c_ls, lay.n_graph, lay.n_potential, "C_Ls");
  check_shape(a_l, lay.n_graph, lay.n_graph, "A_L");
  check_shape(l, lay.n_neumann, lay.n_flux, "L");
  check_shape(l_d, lay.n_dirichlet, lay.n_graph, "L_D");
  check_length(f_d, lay.n_flux, "F_D");
  check_length(g, lay.n_potential, "G");
  check_length(f, lay.n_graph, "F");
  check_length(f_n, lay.n_neumann, "F_N");
  check_length(f_dl, lay.n_dirichlet, "F_D,L");

  const int o1 = lay.flux_offset(), o2 = lay.potential_offset(), o3 = lay.graph_offset(),
            o4 = lay.neumann_offset(), o5 = lay.dirichlet_offset();
  std::vector<Triplet> trip;
  trip.reserve(a_s.nonZeros() + 2 * b.nonZeros() + c_ss.nonZeros() + 2 * c_ls.nonZeros() +
               a_l.nonZeros() + 2 * l.nonZeros() + 2 * l_d.nonZeros());
  add_block(trip, a_s, o1, o1, false);
  add_block(trip, b, o1, o2, true);
  add_block(trip, l, o1, o4, true);
  add_block(trip, b, o2, o1, false);
  add_block(trip, c_ss, o2, o2, false);
  add_block(trip, c_ls, o2, o3, true);
  add_block(trip, c_ls, o3, o2, false);
  add_block(trip, a_l, o3, o3, false);
  add_block(trip, l_d, o3, o5, true);
  add_block(trip, l, o4, o1, false);
  add_block(trip, l_d, o5, o3, false);

  sys.matrix.resize(lay.size(), lay.size());
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  sys.rhs.resize(lay.size());
  sys.rhs << f_d, g, f, f_n, f_dl;

  sys.a_s = std::move(a_s);
  sys.b = std::move(b);
  sys.c_ss = std::move(c_ss);
  sys.c_ls = std::move(c_ls);
  sys.a_l = std::move(a_l);
  sys.l = std::move(l);
  sys.l_d = std::move(l_d);
  sys.f_d = std::move(f_d);
  sys.g = std::move(g);
  sys.f = std::move(f);
  sys.f_n = std::move(f_n);
  sys.f_dl = std::move(f_dl);
  return sys;
}

double symmetry_defect(const RowSparseMatrix& m) {
  const RowSparseMatrix mt = m.transpose();
  const RowSparseMatrix diff = m - mt;
  double scale = 0, defect = 0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (RowSparseMatrix::InnerIterator it(m, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
  for (int k = 0; k < diff.outerSize(); ++k)
    for (RowSparseMatrix::InnerIterator it(diff, k); it; ++it) defect = std::max(defect, std::abs(it.value()));
  return scale > 0 ? defect / scale : defect;
}

CoupledSystem assemble_coupled_system(const TetMesh& mesh, const GraphMesh& gmesh,
                                      const ProblemData& data) {
  CoupledSystem out;
  SparseMatrix a_s = assemble_flux_mass(mesh, data.eps_s);
  SparseMatrix b = assemble_divergence(mesh);
  SparseMatrix l = assemble_neumann_multiplier(mesh);
  Vector f_d = assemble_rhs_dirichlet(mesh, data.phi_bar);
  Vector f_n = assemble_rhs_neumann(mesh, data.nu);

  out.stencils = build_average_stencils(mesh, gmesh, data.coupling);
  SparseMatrix c_ls = assemble_coupling_cross(mesh, gmesh, out.stencils, data.eps_g);
  SparseMatrix c_ss = assemble_coupling_self(mesh, gmesh, out.stencils, data.eps_g);
  Vector g = assemble_line_rhs(mesh, gmesh, out.stencils, data.g);

  SparseMatrix a_l = -(assemble_graph_stiffness(gmesh, data.eps_g) +
                       assemble_graph_reaction(gmesh, data.eps_g, data.lumped_reaction));
  const GraphField& g_tip = data.g_tip ? data.g_tip : data.g;
  Vector f = -(assemble_graph_source(gmesh, data.q_over_eps0) +
               assemble_tip_neumann(gmesh, g_tip, data.tip_flux_factor));
  out.dirichlet = assemble_dirichlet_multiplier(gmesh);

  out.system = assemble_global(std::move(a_s), std::move(b), std::move(c_ss), std::move(c_ls),
                               std::move(a_l), std::move(l), out.dirichlet.matrix, std::move(f_d),
                               std::move(g), std::move(f), std::move(f_n), out.dirichlet.rhs);
  return out;
}

BlockPreconditioner::BlockPreconditioner(const BlockSystem& system, const SolverOptions& options)
    : system_(&system),
      flux_inverse_(options.flux_inverse),
      inner_tol_(options.inner_tol),
      inner_max_iter_(options.inner_max_iter) {
  const auto& lay = system.layout;
  const Vector diag = system.a_s.diagonal();
  if ((diag.array() <= 0).any()) {
    fail(ErrorKind::Preconditioner, "flux mass matrix has a non-positive diagonal entry");
  }
  inv_diag_ = diag.cwiseInverse();

  // -Σ assembled block by block; only its lower triangle is factorized.
  const SparseMatrix bd = system.b * inv_diag_.asDiagonal();
  const SparseMatrix ld = system.l * inv_diag_.asDiagonal();
  const SparseMatrix s11 = SparseMatrix(bd * system.b.transpose()) - system.c_ss;
  const SparseMatrix s31 = ld * system.b.transpose();
  const SparseMatrix s33 = ld * system.l.transpose();
  const int o2 = lay.n_potential, o3 = o2 + lay.n_graph;
  const int n = o3 + lay.n_neumann;

  std::vector<Triplet> trip;
  add_block(trip, s11, 0, 0, false);
  add_block(trip, system.c_ls, 0, o2, true);
  add_block(trip, system.c_ls, o2, 0, false);
  add_block(trip, system.a_l, o2, o2, false);
  add_block(trip, s31, 0, o3, true);
  add_block(trip, s31, o3, 0, false);
  add_block(trip, s33, o3, o3, false);
  // Blocks that enter Σ with a plus sign (C_Λs, A_Λ) flip here.
  for (auto& t : trip) {
    const bool graph_row = t.row() >= o2 && t.row() < o3;
    const bool graph_col = t.col() >= o2 && t.col() < o3;
    if (graph_row || graph_col) t = Triplet(t.row(), t.col(), -t.value());
  }
  if (options.shift != 0.0) {
    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, options.shift);
  }
  neg_sigma_.resize(n, n);
  neg_sigma_.setFromTriplets(trip.begin(), trip.end());

  if (n > 0) {
    sigma_factor_.compute(neg_sigma_);
    const Vector d = sigma_factor_.info() == Eigen::Success ? Vector(sigma_factor_.vectorD()) : Vector();
    const double dmax = d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
    if (sigma_factor_.info() != Eigen::Success || !d.allFinite() ||
        (d.array() <= 1e-14 * dmax).any()) {
      fail(ErrorKind::Preconditioner,
           "Schur complement factorization is singular; try a positive solver.shift "
           "or solver.a_s_inverse = exact");
    }
  }

  if (lay.n_dirichlet > 0) {
    Eigen::MatrixXd et = Eigen::MatrixXd::Zero(n, lay.n_dirichlet);
    for (int c = 0; c < system.l_d.outerSize(); ++c)
      for (SparseMatrix::InnerIterator it(system.l_d, c); it; ++it) et(o2 + it.col(), it.row()) = it.value();
    const Eigen::MatrixXd x = sigma_factor_.solve(et);
    const Eigen::MatrixXd reduced = et.transpose() * x;
    dirichlet_factor_.compute(reduced);
    if (dirichlet_factor_.info() != Eigen::Success) {
      fail(ErrorKind::Preconditioner, "1D Dirichlet Schur complement is singular; check that "
                                      "Dirichlet nodes are distinct");
    }
  }

  if (flux_inverse_ == FluxInverse::Exact) {
    flux_cg_.setTolerance(inner_tol_);
    flux_cg_.setMaxIterations(inner_max_iter_);
    flux_cg_.compute(system.a_s);
  }
}

Vector BlockPreconditioner::apply(const Vector& r) const {
  const auto& lay = system_->layout;
  const int n1 = lay.n_flux;
  const int n2 = lay.n_potential + lay.n_graph + lay.n_neumann;
  const int n3 = lay.n_dirichlet;
  Vector z(r.size());
  if (flux_inverse_ == FluxInverse::Exact) z.head(n1) = flux_cg_.solve(r.head(n1));
  else z.head(n1) = inv_diag_.cwiseProduct(r.head(n1));
  if (n2 > 0) z.segment(n1, n2) = sigma_factor_.solve(r.segment(n1, n2));
  if (n3 > 0) z.tail(n3) = dirichlet_factor_.solve(r.tail(n3));
  return z;
}

Solution extract_solution(const BlockSystem& system, const Vector& x) {
  const auto& lay = system.layout;
  if (x.size() != lay.size()) {
    fail(ErrorKind::Dimension, "solution vector has length " + std::to_string(x.size()) +
                                   ", expected " + std::to_string(lay.size()));
  }
  Solution s;
  s.flux = x.segment(lay.flux_offset(), lay.n_flux);
  s.phi_s = x.segment(lay.potential_offset(), lay.n_potential);
  s.phi_lambda = x.segment(lay.graph_offset(), lay.n_graph);
  s.lambda_n = x.segment(lay.neumann_offset(), lay.n_neumann);
  s.lambda_d = x.segment(lay.dirichlet_offset(), lay.n_dirichlet);
  return s;
}

SolveResult solve(const BlockSystem& system, const SolverOptions& options) {
  if (!(options.tol > 0)) fail(ErrorKind::InvalidParameter, "solver tolerance must be positive");
  if (options.restart < 1) fail(ErrorKind::InvalidParameter, "GMRES restart must be at least 1");

  SolveResult out;
  const auto start = Clock::now();
  std::unique_ptr<BlockPreconditioner> precond;
  if (options.preconditioner == PreconditionerKind::Block) {
    precond = std::make_unique<BlockPreconditioner>(system, options);
  }
  out.report.setup_seconds = seconds_since(start);

  const auto apply_a = [&](const Vector& v) -> Vector { return system.matrix * v; };
  const auto apply_m = [&](const Vector& v) -> Vector { return precond ? precond->apply(v) : v; };
  GmresOptions gopt;
  gopt.tol = options.tol;
  gopt.restart = options.restart;
  gopt.max_iter = options.max_iter;
  const auto result = gmres<double>(apply_a, apply_m, system.rhs, gopt);

  out.x = result.x;
  out.solution = extract_solution(system, out.x);
  const double bnorm = system.rhs.norm();
  const double rnorm = (system.rhs - system.matrix * out.x).norm();
  out.report.residual = bnorm > 0 ? rnorm / bnorm : rnorm;
  out.report.converged = result.converged && out.report.residual <= options.tol;
  out.report.iterations = result.iterations;
  out.report.restarts = result.restarts;
  out.report.message = result.message;
  out.report.wall_seconds = seconds_since(start);
  return out;
}

double neumann_constraint_defect(const BlockSystem& system, const Solution& solution) {
  if (system.layout.n_neumann == 0) return 0.0;
  return (system.l * solution.flux - system.f_n).cwiseAbs().maxCoeff();
}

}  // namespace emdim
