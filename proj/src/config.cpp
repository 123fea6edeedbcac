#include "emdim/config.hpp"

#include "emdim/cases.hpp"
#include "emdim/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace emdim {

namespace {

struct Key {
  std::string section;
  std::string name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  fail(ErrorKind::Config, "config key '" + key + "': " + why + " (got '" + value + "')");
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

double parse_double(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  double v;
  std::string rest;
  if (!(in >> v) || (in >> rest)) bad_value(key, text, "expected a number");
  return v;
}

long parse_int(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  long v;
  std::string rest;
  if (!(in >> v) || (in >> rest)) bad_value(key, text, "expected an integer");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  bad_value(key, text, "expected true or false");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  std::vector<double> out;
  std::string item;
  while (in >> item) out.push_back(parse_double(key, item));
  return out;
}

Vec3 parse_vec3(const std::string& key, const std::string& text) {
  const auto v = parse_list(key, text);
  if (v.size() != 3) bad_value(key, text, "expected three numbers");
  return Vec3(v[0], v[1], v[2]);
}

std::string fmt(const Vec3& v) { return fmt(v[0]) + " " + fmt(v[1]) + " " + fmt(v[2]); }

#define EMDIM_DOUBLE(sec, key, field) \
  Key{sec, key, [](const RunConfig& c) { return fmt(c.field); }, \
      [](RunConfig& c, const std::string& t) { c.field = parse_double(sec "." key, t); }}
#define EMDIM_INT(sec, key, field) \
  Key{sec, key, [](const RunConfig& c) { return std::to_string(c.field); }, \
      [](RunConfig& c, const std::string& t) { c.field = static_cast<decltype(c.field)>(parse_int(sec "." key, t)); }}
#define EMDIM_BOOL(sec, key, field) \
  Key{sec, key, [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); }, \
      [](RunConfig& c, const std::string& t) { c.field = parse_bool(sec "." key, t); }}
#define EMDIM_STRING(sec, key, field) \
  Key{sec, key, [](const RunConfig& c) { return c.field; }, \
      [](RunConfig& c, const std::string& t) { c.field = t; }}
#define EMDIM_VEC3(sec, key, field) \
  Key{sec, key, [](const RunConfig& c) { return fmt(c.field); }, \
      [](RunConfig& c, const std::string& t) { c.field = parse_vec3(sec "." key, t); }}

const std::vector<Key>& keys() {
  static const std::vector<Key> table{
      EMDIM_STRING("case", "name", case_name),
      EMDIM_DOUBLE("case", "radius", radius),
      EMDIM_DOUBLE("case", "tip", tip),
      Key{"case", "seed", [](const RunConfig& c) { return std::to_string(c.seed); },
          [](RunConfig& c, const std::string& t) {
            const long v = parse_int("case.seed", t);
            if (v < 0) bad_value("case.seed", t, "must be non-negative");
            c.seed = static_cast<std::uint64_t>(v);
          }},
      EMDIM_DOUBLE("case", "scale", scale),
      EMDIM_STRING("case", "mesh_file", mesh_file),
      EMDIM_STRING("case", "graph_file", graph_file),
      EMDIM_VEC3("mesh", "domain_lo", domain_lo),
      EMDIM_VEC3("mesh", "domain_hi", domain_hi),
      EMDIM_DOUBLE("mesh", "h_far", h_far),
      EMDIM_DOUBLE("mesh", "h_near", h_near),
      EMDIM_DOUBLE("mesh", "band", band),
      EMDIM_INT("graph", "segments", segments),
      EMDIM_DOUBLE("physics", "eps_s", eps_s),
      EMDIM_DOUBLE("physics", "eps_g", eps_g),
      EMDIM_DOUBLE("physics", "q_over_eps0", q_over_eps0),
      EMDIM_DOUBLE("physics", "g", g),
      EMDIM_DOUBLE("physics", "g_tip", g_tip),
      EMDIM_DOUBLE("physics", "phi_bar", phi_bar),
      EMDIM_DOUBLE("physics", "nu", nu),
      EMDIM_DOUBLE("physics", "tip_flux_factor", tip_flux_factor),
      EMDIM_BOOL("physics", "lumped_reaction", lumped_reaction),
      EMDIM_INT("coupling", "circle_samples", circle_samples),
      EMDIM_INT("coupling", "points_per_segment", points_per_segment),
      EMDIM_DOUBLE("solver", "tol", solver.tol),
      EMDIM_INT("solver", "restart", solver.restart),
      EMDIM_INT("solver", "max_iter", solver.max_iter),
      Key{"solver", "precond",
          [](const RunConfig& c) {
            return std::string(c.solver.preconditioner == PreconditionerKind::Block ? "block" : "none");
          },
          [](RunConfig& c, const std::string& t) {
            if (t == "block") c.solver.preconditioner = PreconditionerKind::Block;
            else if (t == "none") c.solver.preconditioner = PreconditionerKind::None;
            else bad_value("solver.precond", t, "expected none or block");
          }},
      Key{"solver", "a_s_inverse",
          [](const RunConfig& c) {
            return std::string(c.solver.flux_inverse == FluxInverse::Exact ? "exact" : "lumped");
          },
          [](RunConfig& c, const std::string& t) {
            if (t == "lumped") c.solver.flux_inverse = FluxInverse::Lumped;
            else if (t == "exact") c.solver.flux_inverse = FluxInverse::Exact;
            else bad_value("solver.a_s_inverse", t, "expected lumped or exact");
          }},
      EMDIM_DOUBLE("solver", "shift", solver.shift),
      EMDIM_BOOL("output", "vtk", write_vtk),
      Key{"sweep", "radii",
          [](const RunConfig& c) {
            std::string out;
            for (double r : c.radii) out += (out.empty() ? "" : " ") + fmt(r);
            return out;
          },
          [](RunConfig& c, const std::string& t) { c.radii = parse_list("sweep.radii", t); }},
      EMDIM_INT("tree", "depth", tree.depth),
      EMDIM_DOUBLE("tree", "branch_probability", tree.branch_probability),
      EMDIM_DOUBLE("tree", "segment_min", tree.segment_min),
      EMDIM_DOUBLE("tree", "segment_max", tree.segment_max),
      EMDIM_DOUBLE("tree", "radius", tree.radius),
      EMDIM_DOUBLE("tree", "spread", tree.spread),
      EMDIM_DOUBLE("tree", "branch_spread", tree.branch_spread),
      EMDIM_DOUBLE("tree", "margin", tree.margin),
      EMDIM_INT("tree", "subdivisions", tree_subdivisions),
  };
  return table;
}

#undef EMDIM_DOUBLE
#undef EMDIM_INT
#undef EMDIM_BOOL
#undef EMDIM_STRING
#undef EMDIM_VEC3

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) fail(ErrorKind::Config, "config key '" + key + "': " + what);
}

void validate(const RunConfig& c) {
  require(c.case_name == "tc1" || c.case_name == "tc2" || c.case_name == "tc3" ||
              c.case_name == "custom",
          "case.name", "expected tc1, tc2, tc3 or custom, got '" + c.case_name + "'");
  require(c.radius > 0, "case.radius", "must be positive");
  require(c.tip > 0 && c.tip < 1, "case.tip", "must lie in (0, 1)");
  require(c.scale > 0 && c.scale <= 1, "case.scale", "must lie in (0, 1]");
  require(c.case_name != "custom" || !c.mesh_file.empty(), "case.mesh_file",
          "required for the custom case");
  require(((c.domain_hi - c.domain_lo).array() > 0).all(), "mesh.domain_hi",
          "must exceed mesh.domain_lo in every coordinate");
  require(c.h_far > 0, "mesh.h_far", "must be positive");
  require(c.h_near > 0, "mesh.h_near", "must be positive");
  require(c.h_near <= c.h_far, "mesh.h_near", "must not exceed mesh.h_far");
  require(c.band > 0, "mesh.band", "must be positive");
  require(c.segments >= 1, "graph.segments", "must be at least 1");
  require(c.eps_s >= 1, "physics.eps_s", "must be at least 1");
  require(c.eps_g >= 1, "physics.eps_g", "must be at least 1");
  require(c.circle_samples >= 4, "coupling.circle_samples", "must be at least 4");
  require(c.points_per_segment >= 1 && c.points_per_segment <= 5, "coupling.points_per_segment",
          "must lie in 1..5");
  require(c.solver.tol > 0 && c.solver.tol < 1, "solver.tol", "must lie in (0, 1)");
  require(c.solver.restart >= 1, "solver.restart", "must be at least 1");
  require(c.solver.max_iter >= 1, "solver.max_iter", "must be at least 1");
  require(c.solver.shift >= 0, "solver.shift", "must be non-negative");
  for (double r : c.radii) require(r > 0, "sweep.radii", "radii must be positive");
  require(c.tree.depth >= 1, "tree.depth", "must be at least 1");
  require(c.tree.branch_probability >= 0 && c.tree.branch_probability <= 1,
          "tree.branch_probability", "must lie in [0, 1]");
  require(c.tree.segment_min > 0, "tree.segment_min", "must be positive");
  require(c.tree.segment_max >= c.tree.segment_min, "tree.segment_max",
          "must not be below tree.segment_min");
  require(c.tree.radius > 0, "tree.radius", "must be positive");
  require(c.tree.margin >= 0, "tree.margin", "must be non-negative");
  require(c.tree_subdivisions >= 1, "tree.subdivisions", "must be at least 1");
}

}  // namespace

RunConfig default_config() {
  RunConfig c;
  c.tree = tc3_defaults().tree;
  return c;
}

RunConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::Config, std::string("malformed config: ") + e.what());
  }
  RunConfig c = default_config();
  bool mesh_keys_set = false;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) {
      fail(ErrorKind::Config, "config key '" + section + "' must belong to a [section]");
    }
    for (const auto& [name, value] : body) {
      if (section == "mesh" && (name == "h_far" || name == "h_near" || name == "band")) {
        mesh_keys_set = true;
      }
      const auto& table = keys();
      const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) {
        return k.section == section && k.name == name;
      });
      if (it == table.end()) fail(ErrorKind::Config, "unknown config key '" + section + "." + name + "'");
      it->set(c, value.get_value<std::string>());
    }
  }
  if (c.case_name == "tc3" && !mesh_keys_set) {
    const auto res = tc3_defaults().mesh;
    c.h_far = res.h_far;
    c.h_near = res.h_near;
    c.band = res.band;
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot read config file '" + path + "'");
  return parse_config(in);
}

std::map<std::string, std::map<std::string, std::string>> config_entries(const RunConfig& config) {
  std::map<std::string, std::map<std::string, std::string>> out;
  for (const auto& k : keys()) out[k.section][k.name] = k.get(config);
  return out;
}

std::string to_ini(const RunConfig& config) {
  std::ostringstream out;
  std::string current;
  for (const auto& k : keys()) {
    if (k.section != current) {
      out << (current.empty() ? "" : "\n") << '[' << k.section << "]\n";
      current = k.section;
    }
    out << k.name << " = " << k.get(config) << '\n';
  }
  return out.str();
}

}  // namespace emdim
