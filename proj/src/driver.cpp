#include "emdim/driver.hpp"

#include "emdim/postproc.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace emdim {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

fs::path prepare_out_dir(const CommandOptions& options) {
  const fs::path dir(options.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory '" + options.out_dir + "': " + ec.message());
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out || !(out << text)) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
}

std::string num(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

Json config_json(const RunConfig& config) {
  Json out = Json::object();
  for (const auto& [section, entries] : config_entries(config)) {
    for (const auto& [key, value] : entries) out[section][key] = value;
  }
  return out;
}

Json report_json(const SolverReport& r) {
  return Json{{"converged", r.converged},       {"iterations", r.iterations},
              {"residual", r.residual},         {"restarts", r.restarts},
              {"wall_seconds", r.wall_seconds}, {"setup_seconds", r.setup_seconds},
              {"message", r.message}};
}

TetMesh build_mesh(const RunConfig& config, const CaseSetup& setup) {
  if (config.case_name != "custom") return generate_box_mesh(setup.mesh);
  const std::string& path = config.mesh_file;
  const bool gmsh = path.size() >= 4 && path.substr(path.size() - 4) == ".msh";
  return gmsh ? load_gmsh(path) : read_mesh(path);
}

void apply_common(const RunConfig& c, CaseSetup& s) {
  s.data.coupling.circle_samples = c.circle_samples;
  s.data.coupling.points_per_segment = c.points_per_segment;
  s.data.lumped_reaction = c.lumped_reaction;
  s.data.tip_flux_factor = c.tip_flux_factor;
  s.solver = c.solver;
}

RunConfig with_seed(RunConfig config, const CommandOptions& options) {
  if (options.seed) config.seed = *options.seed;
  return config;
}

void set_threads(const CommandOptions& options) {
#ifdef _OPENMP
  if (options.threads > 0) omp_set_num_threads(options.threads);
#else
  (void)options;
#endif
}

struct RunRow {
  double radius = 0.0;
  std::optional<double> error;
  SolverReport report;
};

std::string errors_csv(const std::vector<RunRow>& rows) {
  std::string out = "R,error,iterations,residual\n";
  for (const auto& r : rows) {
    out += num(r.radius) + "," + (r.error ? num(*r.error) : "") + "," +
           std::to_string(r.report.iterations) + "," + num(r.report.residual) + "\n";
  }
  return out;
}

struct Solved {
  CoupledSystem system;
  SolveResult result;
};

Solved solve_instance(const Instance& inst) {
  Solved out{assemble_coupled_system(inst.mesh, inst.gmesh, inst.setup.data), {}};
  out.result = solve(out.system.system, inst.setup.solver);
  return out;
}

}  // namespace

Instance build_instance(const RunConfig& c, double radius) {
  Instance inst;
  const Box box{c.domain_lo, c.domain_hi};
  const MeshResolution res{c.h_far, c.h_near, c.band};
  if (c.case_name == "tc1") {
    inst.exact = tc1_case(radius, box, c.segments, res);
    inst.setup = inst.exact->setup;
  } else if (c.case_name == "tc2") {
    inst.setup = tc2_case(radius, box, c.tip, c.segments, res);
  } else if (c.case_name == "tc3") {
    Tc3Options o = tc3_defaults();
    o.tree = c.tree;
    o.tree.domain = box;
    o.tree.root = Vec3(0.5 * (box.lo[0] + box.hi[0]), 0.5 * (box.lo[1] + box.hi[1]), box.lo[2]);
    o.mesh = res;
    inst.setup = tc3_case(c.seed, c.scale, o);
    if (c.tree_subdivisions != 1) inst.setup.network = inst.setup.network.with_subdivisions(c.tree_subdivisions);
  } else {
    CaseSetup& s = inst.setup;
    s.name = "custom";
    if (!c.graph_file.empty()) s.network = read_graph(c.graph_file);
    s.data.eps_s = constant_field(c.eps_s);
    s.data.eps_g = constant_graph_field(c.eps_g);
    s.data.q_over_eps0 = constant_graph_field(c.q_over_eps0);
    s.data.g = constant_graph_field(c.g);
    s.data.g_tip = constant_graph_field(c.g_tip);
    s.data.phi_bar = constant_boundary_field(c.phi_bar);
    s.data.nu = constant_boundary_field(c.nu);
  }
  apply_common(c, inst.setup);
  inst.mesh = build_mesh(c, inst.setup);
  inst.gmesh = GraphMesh(inst.setup.network);
  return inst;
}

int exit_code_for(const Error& error) {
  return error.kind() == ErrorKind::Preconditioner ? kExitSolver : kExitConfig;
}

int cmd_run(const RunConfig& config_in, const CommandOptions& options, std::ostream& log) {
  const RunConfig config = with_seed(config_in, options);
  set_threads(options);
  const fs::path dir = prepare_out_dir(options);
  const Instance inst = build_instance(config, config.radius);
  for (const auto& w : inst.setup.network.warnings()) log << "warning: " << w << '\n';
  log << "mesh: " << inst.mesh.num_tets() << " tets, " << inst.mesh.num_faces() << " faces; graph: "
      << inst.setup.network.num_edges() << " edges, " << inst.gmesh.num_dofs() << " dofs\n";

  const Solved solved = solve_instance(inst);
  const auto& res = solved.result;
  RunRow row{config.radius, std::nullopt, res.report};
  if (inst.exact) row.error = l2_error_cells(inst.mesh, res.solution.phi_s, inst.exact->phi_s);

  Json summary;
  summary["case"] = config.case_name;
  summary["l2_error"] = row.error ? Json(*row.error) : Json(nullptr);
  summary["iterations"] = res.report.iterations;
  summary["residual"] = res.report.residual;
  summary["slope"] = nullptr;
  summary["converged"] = res.report.converged;
  summary["solver"] = report_json(res.report);
  summary["neumann_constraint_defect"] = neumann_constraint_defect(solved.system.system, res.solution);
  summary["mesh"] = {{"tets", inst.mesh.num_tets()}, {"faces", inst.mesh.num_faces()},
                     {"neumann_faces", inst.mesh.num_neumann_faces()}};
  summary["graph"] = {{"nodes", inst.setup.network.num_nodes()},
                      {"edges", inst.setup.network.num_edges()},
                      {"dofs", inst.gmesh.num_dofs()}};
  summary["config"] = config_json(config);

  write_text(dir / "summary.json", summary.dump(2) + "\n");
  write_text(dir / "errors.csv", errors_csv({row}));
  write_text(dir / "effective.ini", to_ini(config));
  if (config.write_vtk) {
    FieldSet fields;
    fields.cell_fields.emplace_back("phi_s", res.solution.phi_s);
    fields.flux_fields.emplace_back("D_s", res.solution.flux);
    export_vtk(inst.mesh, fields, (dir / "fields.vtk").string());
    export_graph_vtk(inst.gmesh, res.solution.phi_lambda, (dir / "graph.vtk").string());
  }

  log << "iterations: " << res.report.iterations << ", residual: " << res.report.residual;
  if (row.error) log << ", l2 error: " << num(*row.error);
  log << '\n';
  if (!res.report.converged) {
    log << "solver did not converge: " << res.report.message << '\n';
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& config_in, const CommandOptions& options, std::ostream& log) {
  const RunConfig config = with_seed(config_in, options);
  if (config.case_name != "tc1") {
    fail(ErrorKind::Config, "config key 'case.name': sweep needs the manufactured case tc1");
  }
  if (config.radii.size() < 3) fail(ErrorKind::Config, "config key 'sweep.radii': need at least 3 radii");
  if (std::set<double>(config.radii.begin(), config.radii.end()).size() != config.radii.size()) {
    fail(ErrorKind::Config, "config key 'sweep.radii': radii must be distinct");
  }
  set_threads(options);
  const fs::path dir = prepare_out_dir(options);

  // One mesh for all radii: the grading does not depend on R.
  Instance inst = build_instance(config, config.radii.front());
  log << "mesh: " << inst.mesh.num_tets() << " tets\n";
  std::vector<RunRow> rows;
  bool partial = false;
  for (double radius : config.radii) {
    ManufacturedCase mc = tc1_case(radius, Box{config.domain_lo, config.domain_hi}, config.segments,
                                   MeshResolution{config.h_far, config.h_near, config.band});
    apply_common(config, mc.setup);
    inst.setup = mc.setup;
    inst.gmesh = GraphMesh(mc.setup.network);
    const Solved solved = solve_instance(inst);
    RunRow row{radius, l2_error_cells(inst.mesh, solved.result.solution.phi_s, mc.phi_s),
               solved.result.report};
    rows.push_back(row);
    log << "R = " << num(radius) << ": error " << num(*row.error) << ", iterations "
        << row.report.iterations << '\n';
    if (!row.report.converged) {
      partial = true;
      log << "solver did not converge at R = " << num(radius) << "; sweep aborted\n";
      break;
    }
  }

  Json summary;
  summary["case"] = config.case_name;
  summary["partial"] = partial;
  summary["l2_error"] = rows.empty() ? Json(nullptr) : Json(*rows.front().error);
  summary["iterations"] = rows.empty() ? 0 : rows.front().report.iterations;
  Json table = Json::array();
  for (const auto& r : rows) {
    table.push_back({{"R", r.radius}, {"error", *r.error}, {"solver", report_json(r.report)}});
  }
  summary["runs"] = table;
  if (!partial) {
    std::vector<std::pair<double, double>> points;
    for (const auto& r : rows) points.emplace_back(r.radius, *r.error);
    const auto fit = convergence_table(points);
    summary["slope"] = fit.slope;
    log << "slope: " << num(fit.slope) << '\n';
  } else {
    summary["slope"] = nullptr;
  }
  summary["config"] = config_json(config);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  write_text(dir / "errors.csv", errors_csv(rows));
  write_text(dir / "effective.ini", to_ini(config));
  return partial ? kExitSolver : kExitOk;
}

int cmd_gen(const RunConfig& config_in, const CommandOptions& options, std::ostream& log) {
  const RunConfig config = with_seed(config_in, options);
  set_threads(options);
  const fs::path dir = prepare_out_dir(options);
  const Instance inst = build_instance(config, config.radius);
  double volume = 0;
  for (int t = 0; t < inst.mesh.num_tets(); ++t) volume += inst.mesh.volume(t);
  write_mesh(inst.mesh, (dir / "mesh.emdim").string());
  if (!inst.setup.network.empty()) write_graph(inst.setup.network, (dir / "graph.emdim").string());
  const auto counts = boundary_counts(inst.mesh);
  log << std::setprecision(12) << "tets: " << inst.mesh.num_tets() << "\nfaces: " << inst.mesh.num_faces()
      << "\nvolume: " << volume << "\ndirichlet faces: " << counts.dirichlet
      << "\nneumann faces: " << counts.neumann << "\nnodes: " << inst.setup.network.num_nodes()
      << "\nsegments: " << inst.setup.network.num_edges() << '\n';
  return kExitOk;
}

int cmd_verify(const RunConfig& config_in, const CommandOptions& options, std::ostream& log) {
  const RunConfig config = with_seed(config_in, options);
  if (config.case_name != "tc1") {
    fail(ErrorKind::Config, "config key 'case.name': verify needs the manufactured case tc1");
  }
  const fs::path dir = prepare_out_dir(options);
  ManufacturedCase mc = tc1_case(config.radius, Box{config.domain_lo, config.domain_hi}, config.segments,
                                 MeshResolution{config.h_far, config.h_near, config.band});
  apply_common(config, mc.setup);
  const auto rep = verify_manufactured(mc, 200, 1e-6);
  constexpr double threshold = 1e-8;
  Json residuals = Json::object();
  for (const auto& [name, value] : rep.residuals) {
    residuals[name] = value;
    log << std::left << std::setw(22) << name << num(value) << '\n';
  }
  const bool passed = rep.max_residual <= threshold;
  log << "max residual: " << num(rep.max_residual) << (passed ? " (pass)" : " (FAIL)") << '\n';
  Json summary{{"case", config.case_name},
               {"max_residual", rep.max_residual},
               {"threshold", threshold},
               {"passed", passed},
               {"residuals", residuals},
               {"config", config_json(config)}};
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return passed ? kExitOk : kExitSolver;
}

int run_cli(int argc, const char* const* argv, std::ostream& log, std::ostream& err) {
  CLI::App app{"Coupled 3D-1D electrostatics solver"};
  app.require_subcommand(1);
  std::string config_path;
  CommandOptions options;
  std::uint64_t seed = 0;

  std::vector<std::pair<CLI::App*, int (*)(const RunConfig&, const CommandOptions&, std::ostream&)>> commands{
      {app.add_subcommand("run", "assemble, solve and post-process one case"), &cmd_run},
      {app.add_subcommand("sweep", "solve tc1 for every radius in sweep.radii and fit the slope"), &cmd_sweep},
      {app.add_subcommand("gen", "write the mesh and graph files of the configured case"), &cmd_gen},
      {app.add_subcommand("verify", "check the manufactured data against the strong equations"), &cmd_verify},
  };
  CLI::Option* seed_opt = nullptr;
  for (auto& [sub, fn] : commands) {
    (void)fn;
    sub->add_option("--config", config_path, "key = value config file");
    sub->add_option("--out", options.out_dir, "output directory");
    sub->add_option("--threads", options.threads, "OpenMP thread cap")->check(CLI::NonNegativeNumber);
    auto* opt = sub->add_option("--seed", seed, "random seed (overrides case.seed)");
    if (!seed_opt) seed_opt = opt;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, error;
    const int code = app.exit(e, out, error);
    log << out.str();
    err << error.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  for (auto& [sub, fn] : commands) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed")) options.seed = seed;
    try {
      const RunConfig config = config_path.empty() ? default_config() : load_config(config_path);
      return fn(config, options, log);
    } catch (const Error& e) {
      err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
      return exit_code_for(e);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitConfig;
    }
  }
  return kExitConfig;
}

}  // namespace emdim
