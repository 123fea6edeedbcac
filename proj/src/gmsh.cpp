#include "emdim/error.hpp"
#include "emdim/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace emdim {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << std::setprecision(17);
  return out;
}

void expect(std::istream& in, const std::string& token, const std::string& path) {
  std::string got;
  if (!(in >> got) || got != token) {
    fail(ErrorKind::Format, path + ": expected '" + token + "', found '" + got + "'");
  }
}

std::array<int, 3> sorted(std::array<int, 3> a) {
  std::sort(a.begin(), a.end());
  return a;
}

struct TriKeyHash {
  std::size_t operator()(const std::array<int, 3>& a) const noexcept {
    return (static_cast<std::size_t>(a[0]) * 73856093u) ^
           (static_cast<std::size_t>(a[1]) * 19349663u) ^
           (static_cast<std::size_t>(a[2]) * 83492791u);
  }
};

using FaceLookup = std::unordered_map<std::array<int, 3>, int, TriKeyHash>;

FaceLookup face_lookup(const TetMesh& mesh) {
  FaceLookup lookup;
  lookup.reserve(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) lookup.emplace(sorted(mesh.face(f)), f);
  return lookup;
}

}  // namespace

TetMesh load_gmsh(const std::string& path, const GmshTagMap& tag_map) {
  auto in = open_input(path);
  expect(in, "$MeshFormat", path);
  std::string version;
  int file_type = 0, data_size = 0;
  in >> version >> file_type >> data_size;
  if (version.rfind("2.2", 0) != 0 || file_type != 0) {
    fail(ErrorKind::Format, path + ": only MSH 2.2 ASCII is supported (got version " +
                                version + ", type " + std::to_string(file_type) + ")");
  }
  expect(in, "$EndMeshFormat", path);

  std::vector<Vec3> vertices;
  std::unordered_map<long, int> node_index;
  std::vector<std::array<int, 4>> tets;
  struct Tri {
    std::array<int, 3> nodes;
    int physical;
    long id;
  };
  std::vector<Tri> tris;

  std::string section;
  while (in >> section) {
    if (section == "$Nodes") {
      long n = 0;
      in >> n;
      vertices.reserve(n);
      for (long i = 0; i < n; ++i) {
        long id;
        Vec3 x;
        if (!(in >> id >> x[0] >> x[1] >> x[2])) fail(ErrorKind::Format, path + ": truncated $Nodes");
        node_index[id] = static_cast<int>(vertices.size());
        vertices.push_back(x);
      }
      expect(in, "$EndNodes", path);
    } else if (section == "$Elements") {
      long n = 0;
      in >> n;
      for (long e = 0; e < n; ++e) {
        long id;
        int type, ntags;
        if (!(in >> id >> type >> ntags)) fail(ErrorKind::Format, path + ": truncated $Elements");
        std::vector<long> tags(ntags);
        for (auto& t : tags) in >> t;
        int nnodes = 0;
        switch (type) {
          case 15: nnodes = 1; break;
          case 1: nnodes = 2; break;
          case 2: nnodes = 3; break;
          case 4: nnodes = 4; break;
          default:
            fail(ErrorKind::Format, path + ": element " + std::to_string(id) +
                                        " has unsupported type " + std::to_string(type));
        }
        std::vector<int> nodes(nnodes);
        for (auto& v : nodes) {
          long raw;
          in >> raw;
          const auto it = node_index.find(raw);
          if (it == node_index.end()) {
            fail(ErrorKind::Format, path + ": element " + std::to_string(id) +
                                        " references unknown node " + std::to_string(raw));
          }
          v = it->second;
        }
        if (type == 4) tets.push_back({nodes[0], nodes[1], nodes[2], nodes[3]});
        if (type == 2) {
          tris.push_back({{nodes[0], nodes[1], nodes[2]},
                          ntags > 0 ? static_cast<int>(tags[0]) : 0, id});
        }
      }
      expect(in, "$EndElements", path);
    } else if (!section.empty() && section[0] == '$' && section.rfind("$End", 0) != 0) {
      // Skip sections we do not interpret.
      const std::string end = "$End" + section.substr(1);
      std::string tok;
      while (in >> tok && tok != end) {
      }
    }
  }
  if (tets.empty()) fail(ErrorKind::Format, path + ": no tetrahedra");

  TetMesh mesh(std::move(vertices), std::move(tets));
  std::vector<BoundaryTag> tags = mesh.tags();
  const FaceLookup lookup = face_lookup(mesh);
  for (const auto& tri : tris) {
    const auto it = lookup.find(sorted(tri.nodes));
    if (it == lookup.end() || !mesh.is_boundary_face(it->second)) {
      fail(ErrorKind::Topology, path + ": triangle " + std::to_string(tri.id) +
                                    " is not a boundary face of the tet mesh");
    }
    const auto tag = tag_map.find(tri.physical);
    if (tag != tag_map.end()) tags[it->second] = tag->second;
  }
  return mesh.with_tags(std::move(tags));
}

void save_gmsh(const TetMesh& mesh, const std::string& path) {
  auto out = open_output(path);
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n" << mesh.num_vertices() << "\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec3& x = mesh.vertex(v);
    out << v + 1 << ' ' << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
  }
  out << "$EndNodes\n$Elements\n";
  std::vector<int> tagged;
  for (int f : mesh.boundary_faces()) {
    if (mesh.tag(f) == BoundaryTag::Dirichlet || mesh.tag(f) == BoundaryTag::Neumann) {
      tagged.push_back(f);
    }
  }
  out << tagged.size() + mesh.num_tets() << '\n';
  long id = 1;
  for (int f : tagged) {
    const int phys = mesh.tag(f) == BoundaryTag::Dirichlet ? 1 : 2;
    const auto& tri = mesh.face(f);
    out << id++ << " 2 2 " << phys << ' ' << phys << ' ' << tri[0] + 1 << ' ' << tri[1] + 1
        << ' ' << tri[2] + 1 << '\n';
  }
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto& tet = mesh.tet(t);
    out << id++ << " 4 2 0 0 " << tet[0] + 1 << ' ' << tet[1] + 1 << ' ' << tet[2] + 1 << ' '
        << tet[3] + 1 << '\n';
  }
  out << "$EndElements\n";
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

void write_mesh(const TetMesh& mesh, const std::string& path) {
  auto out = open_output(path);
  out << "EMDIM-MESH 1\n";
  out << "vertices " << mesh.num_vertices() << '\n';
  for (const Vec3& x : mesh.vertices()) out << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
  out << "tets " << mesh.num_tets() << '\n';
  for (const auto& t : mesh.tets()) out << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  out << "boundary " << mesh.num_boundary_faces() << '\n';
  for (int f : mesh.boundary_faces()) {
    const auto& tri = mesh.face(f);
    out << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << to_string(mesh.tag(f)) << '\n';
  }
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

TetMesh read_mesh(const std::string& path) {
  auto in = open_input(path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "EMDIM-MESH" || version != 1) {
    fail(ErrorKind::Format, path + ": missing 'EMDIM-MESH 1' header");
  }
  long nv = 0, nt = 0, nb = 0;
  expect(in, "vertices", path);
  in >> nv;
  std::vector<Vec3> vertices(nv);
  for (auto& x : vertices) in >> x[0] >> x[1] >> x[2];
  expect(in, "tets", path);
  in >> nt;
  std::vector<std::array<int, 4>> tets(nt);
  for (auto& t : tets) in >> t[0] >> t[1] >> t[2] >> t[3];
  expect(in, "boundary", path);
  in >> nb;
  if (!in) fail(ErrorKind::Format, path + ": truncated mesh dump");
  TetMesh mesh(std::move(vertices), std::move(tets));
  std::vector<BoundaryTag> tags = mesh.tags();
  const FaceLookup lookup = face_lookup(mesh);
  for (long i = 0; i < nb; ++i) {
    std::array<int, 3> tri{};
    std::string label;
    if (!(in >> tri[0] >> tri[1] >> tri[2] >> label)) {
      fail(ErrorKind::Format, path + ": truncated boundary section");
    }
    const auto it = lookup.find(sorted(tri));
    if (it == lookup.end() || !mesh.is_boundary_face(it->second)) {
      fail(ErrorKind::Topology, path + ": boundary record " + std::to_string(i) +
                                    " is not a boundary face");
    }
    BoundaryTag tag = BoundaryTag::Untagged;
    if (label == "dirichlet") tag = BoundaryTag::Dirichlet;
    else if (label == "neumann") tag = BoundaryTag::Neumann;
    else if (label != "untagged") fail(ErrorKind::Format, path + ": unknown tag '" + label + "'");
    tags[it->second] = tag;
  }
  return mesh.with_tags(std::move(tags));
}

}  // namespace emdim
