#include "emdim/assembly3d.hpp"
#include "emdim/error.hpp"
#include "emdim/postproc.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace emdim {

namespace {

std::ofstream open_for_writing(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << std::setprecision(17);
  return out;
}

void write_points(std::ostream& out, const std::vector<Vec3>& points) {
  out << "POINTS " << points.size() << " double\n";
  for (const auto& p : points) out << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
}

}  // namespace

void export_vtk(const TetMesh& mesh, const FieldSet& fields, const std::string& path) {
  auto out = open_for_writing(path);
  out << "# vtk DataFile Version 3.0\nemdim tet mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  write_points(out, mesh.vertices());
  const int nt = mesh.num_tets();
  out << "CELLS " << nt << ' ' << 5L * nt << '\n';
  for (const auto& t : mesh.tets()) out << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (int t = 0; t < nt; ++t) out << "10\n";

  if (!fields.cell_fields.empty() || !fields.flux_fields.empty()) out << "CELL_DATA " << nt << '\n';
  for (const auto& [name, values] : fields.cell_fields) {
    if (values.size() != nt) fail(ErrorKind::Dimension, "cell field '" + name + "' has wrong length");
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int t = 0; t < nt; ++t) out << values[t] << '\n';
  }
  for (const auto& [name, flux] : fields.flux_fields) {
    if (flux.size() != mesh.num_faces()) {
      fail(ErrorKind::Dimension, "flux field '" + name + "' has wrong length");
    }
    out << "VECTORS " << name << " double\n";
    for (int t = 0; t < nt; ++t) {
      const Vec3 v = rt0_evaluate(mesh, flux, t, mesh.centroid(t));
      out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    }
  }
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

void export_graph_vtk(const GraphMesh& gmesh, const Vector& values, const std::string& path,
                      const std::string& name) {
  auto out = open_for_writing(path);
  out << "# vtk DataFile Version 3.0\nemdim graph\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  write_points(out, gmesh.dof_points());
  const int nc = gmesh.num_cells();
  out << "CELLS " << nc << ' ' << 3L * nc << '\n';
  for (const auto& c : gmesh.cells()) out << "2 " << c.dofs[0] << ' ' << c.dofs[1] << '\n';
  out << "CELL_TYPES " << nc << '\n';
  for (int c = 0; c < nc; ++c) out << "3\n";
  if (values.size() > 0) {
    if (values.size() != gmesh.num_dofs()) fail(ErrorKind::Dimension, "graph field has wrong length");
    out << "POINT_DATA " << gmesh.num_dofs() << "\nSCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < gmesh.num_dofs(); ++i) out << values[i] << '\n';
  }
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

VtkData read_vtk(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::string line;
  std::getline(in, line);
  if (line.rfind("# vtk DataFile", 0) != 0) fail(ErrorKind::Format, path + ": not a VTK legacy file");

  VtkData data;
  enum class Section { None, Cell, Point } section = Section::None;
  std::string word;
  auto read_doubles = [&](std::vector<double>& dst, long count) {
    dst.resize(count);
    for (long i = 0; i < count; ++i) {
      if (!(in >> dst[i])) fail(ErrorKind::Format, path + ": truncated data block");
    }
  };
  while (in >> word) {
    if (word == "POINTS") {
      std::string type;
      in >> data.num_points >> type;
      std::vector<double> skip;
      read_doubles(skip, 3 * data.num_points);
    } else if (word == "CELLS") {
      long size = 0;
      in >> data.num_cells >> size;
      std::vector<double> skip;
      read_doubles(skip, size);
    } else if (word == "CELL_TYPES") {
      long n = 0;
      in >> n;
      std::vector<double> skip;
      read_doubles(skip, n);
    } else if (word == "CELL_DATA") {
      long n;
      in >> n;
      section = Section::Cell;
    } else if (word == "POINT_DATA") {
      long n;
      in >> n;
      section = Section::Point;
    } else if (word == "SCALARS") {
      std::string name, type, lookup, table;
      in >> name >> type;
      std::getline(in, line);  // optional component count
      in >> lookup >> table;
      const long n = section == Section::Cell ? data.num_cells : data.num_points;
      auto& dst = section == Section::Cell ? data.cell_scalars[name] : data.point_scalars[name];
      read_doubles(dst, n);
    } else if (word == "VECTORS") {
      std::string name, type;
      in >> name >> type;
      std::vector<double> raw;
      read_doubles(raw, 3 * data.num_cells);
      auto& dst = data.cell_vectors[name];
      for (long i = 0; i < data.num_cells; ++i) dst.emplace_back(raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]);
    }
  }
  return data;
}

}  // namespace emdim
