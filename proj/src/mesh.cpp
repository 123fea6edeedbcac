#include "emdim/mesh.hpp"

#include "emdim/error.hpp"
#include "emdim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace emdim {

const char* to_string(BoundaryTag tag) noexcept {
  switch (tag) {
    case BoundaryTag::Interior: return "interior";
    case BoundaryTag::Untagged: return "untagged";
    case BoundaryTag::Dirichlet: return "dirichlet";
    case BoundaryTag::Neumann: return "neumann";
  }
  return "unknown";
}

namespace {

struct ArrayHash {
  std::size_t operator()(const std::array<int, 3>& a) const noexcept {
    std::size_t h = static_cast<std::size_t>(a[0]);
    h = h * 1000003u ^ static_cast<std::size_t>(a[1]);
    h = h * 1000003u ^ static_cast<std::size_t>(a[2]);
    return h;
  }
};

}  // namespace

TetMesh::TetMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets)
    : vertices_(std::move(vertices)), tets_(std::move(tets)) {
  build_topology();
}

void TetMesh::build_topology() {
  const int nv = num_vertices();
  for (std::size_t t = 0; t < tets_.size(); ++t) {
    auto& tet = tets_[t];
    for (int v : tet) {
      if (v < 0 || v >= nv) {
        fail(ErrorKind::Topology, "tet " + std::to_string(t) + " references vertex " +
                                      std::to_string(v) + " out of range");
      }
    }
    const double vol = geometry::signed_volume<double>(vertices_[tet[0]], vertices_[tet[1]],
                                                       vertices_[tet[2]], vertices_[tet[3]]);
    if (vol < 0) std::swap(tet[2], tet[3]);
    if (vol == 0.0) {
      fail(ErrorKind::InvalidGeometry, "tet " + std::to_string(t) + " is degenerate");
    }
  }

  std::unordered_map<std::array<int, 3>, int, ArrayHash> lookup;
  lookup.reserve(tets_.size() * 3);
  faces_.clear();
  face_tets_.clear();
  tet_faces_.assign(tets_.size(), {});
  tet_face_signs_.assign(tets_.size(), {});

  for (int t = 0; t < num_tets(); ++t) {
    const auto& tet = tets_[t];
    for (int i = 0; i < 4; ++i) {
      std::array<int, 3> tri{};
      for (int k = 0, j = 0; k < 4; ++k) {
        if (k != i) tri[j++] = tet[k];
      }
      std::array<int, 3> key = tri;
      std::sort(key.begin(), key.end());
      auto [it, inserted] = lookup.try_emplace(key, num_faces());
      if (inserted) {
        const Vec3& a = vertices_[tri[0]];
        const Vec3& b = vertices_[tri[1]];
        const Vec3& c = vertices_[tri[2]];
        const Vec3 n = geometry::triangle_normal<double>(a, b, c);
        if (n.dot((a + b + c) / 3.0 - vertices_[tet[i]]) < 0) std::swap(tri[1], tri[2]);
        faces_.push_back(tri);
        face_tets_.push_back({t, -1});
        tet_faces_[t][i] = it->second;
        tet_face_signs_[t][i] = 1;
      } else {
        const int f = it->second;
        if (face_tets_[f][1] >= 0) {
          fail(ErrorKind::Topology, "face shared by more than two tets (tets " +
                                        std::to_string(face_tets_[f][0]) + ", " +
                                        std::to_string(face_tets_[f][1]) + ", " +
                                        std::to_string(t) + ")");
        }
        face_tets_[f][1] = t;
        tet_faces_[t][i] = f;
        tet_face_signs_[t][i] = -1;
      }
    }
  }

  tags_.assign(faces_.size(), BoundaryTag::Interior);
  for (int f = 0; f < num_faces(); ++f) {
    if (is_boundary_face(f)) tags_[f] = BoundaryTag::Untagged;
  }
  rebuild_tag_lists();
}

void TetMesh::rebuild_tag_lists() {
  boundary_faces_.clear();
  neumann_faces_.clear();
  for (int f = 0; f < num_faces(); ++f) {
    if (!is_boundary_face(f)) continue;
    boundary_faces_.push_back(f);
    if (tags_[f] == BoundaryTag::Neumann) neumann_faces_.push_back(f);
  }
}

TetMesh TetMesh::with_tags(std::vector<BoundaryTag> tags) const {
  if (tags.size() != faces_.size()) {
    fail(ErrorKind::Dimension, "tag vector has " + std::to_string(tags.size()) +
                                   " entries, mesh has " + std::to_string(faces_.size()) +
                                   " faces");
  }
  for (int f = 0; f < num_faces(); ++f) {
    const bool boundary = is_boundary_face(f);
    const bool ok = boundary ? (tags[f] == BoundaryTag::Dirichlet ||
                                tags[f] == BoundaryTag::Neumann ||
                                tags[f] == BoundaryTag::Untagged)
                             : tags[f] == BoundaryTag::Interior;
    if (!ok) {
      fail(ErrorKind::Classification, "face " + std::to_string(f) + " cannot carry tag " +
                                          to_string(tags[f]));
    }
  }
  TetMesh out = *this;
  out.tags_ = std::move(tags);
  out.rebuild_tag_lists();
  return out;
}

std::array<Vec3, 4> TetMesh::tet_points(int t) const {
  const auto& tet = tets_[t];
  return {vertices_[tet[0]], vertices_[tet[1]], vertices_[tet[2]], vertices_[tet[3]]};
}

std::array<Vec3, 3> TetMesh::face_points(int f) const {
  const auto& tri = faces_[f];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

double TetMesh::volume(int t) const {
  const auto p = tet_points(t);
  return geometry::signed_volume<double>(p[0], p[1], p[2], p[3]);
}

Vec3 TetMesh::centroid(int t) const {
  const auto p = tet_points(t);
  return (p[0] + p[1] + p[2] + p[3]) / 4.0;
}

double TetMesh::longest_edge(int t) const {
  const auto p = tet_points(t);
  double best = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) best = std::max(best, (p[i] - p[j]).norm());
  }
  return best;
}

double TetMesh::face_area(int f) const {
  const auto p = face_points(f);
  return geometry::triangle_area<double>(p[0], p[1], p[2]);
}

Vec3 TetMesh::face_centroid(int f) const {
  const auto p = face_points(f);
  return (p[0] + p[1] + p[2]) / 3.0;
}

Vec3 TetMesh::face_unit_normal(int f) const {
  const auto p = face_points(f);
  return geometry::triangle_normal<double>(p[0], p[1], p[2]).normalized();
}

BoundaryTag z_faces_neumann(const Vec3&, const Vec3& normal) {
  return std::abs(std::abs(normal.z()) - 1.0) < 1e-12 ? BoundaryTag::Neumann
                                                     : BoundaryTag::Dirichlet;
}

BoundaryTag all_dirichlet(const Vec3&, const Vec3&) { return BoundaryTag::Dirichlet; }

std::vector<Segment> polyline_segments(const std::vector<Vec3>& polyline) {
  std::vector<Segment> out;
  for (std::size_t i = 1; i < polyline.size(); ++i) out.emplace_back(polyline[i - 1], polyline[i]);
  return out;
}

TetMesh boundary_classify(const TetMesh& mesh, const BoundaryRule& rule) {
  std::vector<BoundaryTag> tags = mesh.tags();
  for (int f : mesh.boundary_faces()) {
    const BoundaryTag tag = rule(mesh.face_centroid(f), mesh.face_unit_normal(f));
    if (tag != BoundaryTag::Dirichlet && tag != BoundaryTag::Neumann) {
      fail(ErrorKind::Classification,
           "boundary rule returned '" + std::string(to_string(tag)) + "' for face " +
               std::to_string(f));
    }
    tags[f] = tag;
  }
  return mesh.with_tags(std::move(tags));
}

BoundaryCounts boundary_counts(const TetMesh& mesh) {
  BoundaryCounts c;
  for (int f : mesh.boundary_faces()) {
    if (mesh.tag(f) == BoundaryTag::Dirichlet) ++c.dirichlet;
    if (mesh.tag(f) == BoundaryTag::Neumann) ++c.neumann;
  }
  return c;
}

namespace {

/// Mutable tet soup supporting conforming longest-edge bisection. Splitting
/// an edge splits every tet that contains it, so conformity is preserved.
class Bisector {
 public:
  Bisector(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets)
      : vertices_(std::move(vertices)), tets_(std::move(tets)) {
    for (int t = 0; t < static_cast<int>(tets_.size()); ++t) link(t);
  }

  /// Bisects the longest edge of tet t, first bisecting longer edges of
  /// neighbours sharing it (longest-edge propagation path).
  void refine(int t) { split_conforming(longest(t)); }

  std::vector<Vec3>& vertices() { return vertices_; }
  std::vector<std::array<int, 4>>& tets() { return tets_; }

 private:
  using Edge = std::pair<int, int>;

  static long long key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<long long>(a) << 32) | static_cast<unsigned int>(b);
  }

  /// Total order on edges: longer first, ties broken by vertex ids.
  bool longer(const Edge& e, const Edge& f) const {
    const double le = (vertices_[e.first] - vertices_[e.second]).squaredNorm();
    const double lf = (vertices_[f.first] - vertices_[f.second]).squaredNorm();
    if (le != lf) return le > lf;
    const auto ne = std::minmax(e.first, e.second);
    const auto nf = std::minmax(f.first, f.second);
    return ne < nf;
  }

  Edge longest(int t) const {
    const auto& tet = tets_[t];
    Edge best{tet[0], tet[1]};
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        const Edge e{tet[i], tet[j]};
        if (longer(e, best)) best = e;
      }
    }
    return best;
  }

  void link(int t) {
    const auto& tet = tets_[t];
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) edges_[key(tet[i], tet[j])].push_back(t);
    }
  }

  void unlink(int t) {
    const auto& tet = tets_[t];
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        auto it = edges_.find(key(tet[i], tet[j]));
        auto& star = it->second;
        star.erase(std::find(star.begin(), star.end(), t));
        if (star.empty()) edges_.erase(it);
      }
    }
  }

  void split_conforming(const Edge& e) {
    for (;;) {
      const auto it = edges_.find(key(e.first, e.second));
      if (it == edges_.end()) return;
      const std::vector<int> star = it->second;
      bool deferred = false;
      for (int u : star) {
        const Edge lu = longest(u);
        if (key(lu.first, lu.second) != key(e.first, e.second)) {
          split_conforming(lu);
          deferred = true;
          break;
        }
      }
      if (!deferred) {
        split_star(e, star);
        return;
      }
    }
  }

  void split_star(const Edge& e, const std::vector<int>& star) {
    const int m = static_cast<int>(vertices_.size());
    vertices_.push_back(0.5 * (vertices_[e.first] + vertices_[e.second]));
    for (int t : star) {
      unlink(t);
      std::array<int, 4> first = tets_[t];
      std::array<int, 4> second = tets_[t];
      for (int i = 0; i < 4; ++i) {
        if (first[i] == e.second) first[i] = m;
        if (second[i] == e.first) second[i] = m;
      }
      tets_[t] = first;
      tets_.push_back(second);
      link(t);
      link(static_cast<int>(tets_.size()) - 1);
    }
  }

  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 4>> tets_;
  std::unordered_map<long long, std::vector<int>> edges_;
};

double longest_edge_of(const std::vector<Vec3>& v, const std::array<int, 4>& tet) {
  double best = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) best = std::max(best, (v[tet[i]] - v[tet[j]]).squaredNorm());
  }
  return std::sqrt(best);
}

}  // namespace

TetMesh generate_box_mesh(const BoxMeshOptions& opt) {
  const Vec3 extent = opt.bounds.hi - opt.bounds.lo;
  if (!(extent.array() > 0).all()) {
    fail(ErrorKind::InvalidGeometry, "box has zero or negative extent");
  }
  if (!(opt.h_far > 0)) fail(ErrorKind::InvalidParameter, "h_far must be positive");
  if (!(opt.h_near > 0)) fail(ErrorKind::InvalidParameter, "h_near must be positive");
  if (opt.h_near > opt.h_far) fail(ErrorKind::InvalidParameter, "h_near must not exceed h_far");
  if (!opt.refine_segments.empty() && !(opt.band > 0)) {
    fail(ErrorKind::InvalidParameter, "band must be positive");
  }
  for (const auto& [a, b] : opt.refine_segments) {
    if (!opt.bounds.contains(a, 1e-12) || !opt.bounds.contains(b, 1e-12)) {
      fail(ErrorKind::InvalidGeometry, "refinement polyline leaves the box");
    }
  }

  std::array<int, 3> n{};
  for (int d = 0; d < 3; ++d) {
    n[d] = std::max(1, static_cast<int>(std::ceil(extent[d] * std::sqrt(3.0) / (2.0 * opt.h_far) - 1e-9)));
  }
  auto vid = [&](int i, int j, int k) { return (k * (n[1] + 1) + j) * (n[0] + 1) + i; };

  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>((n[0] + 1) * (n[1] + 1) * (n[2] + 1)));
  for (int k = 0; k <= n[2]; ++k) {
    for (int j = 0; j <= n[1]; ++j) {
      for (int i = 0; i <= n[0]; ++i) {
        // Exact endpoints so that boundary coordinates are reproduced bitwise.
        Vec3 x;
        const std::array<int, 3> idx{i, j, k};
        for (int d = 0; d < 3; ++d) {
          x[d] = idx[d] == n[d] ? opt.bounds.hi[d]
                                : opt.bounds.lo[d] + extent[d] * idx[d] / n[d];
        }
        vertices.push_back(x);
      }
    }
  }

  // Six tets around the main diagonal of each cube (Kuhn subdivision).
  static constexpr std::array<std::array<int, 3>, 6> perms{{
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<std::array<int, 4>> tets;
  tets.reserve(static_cast<std::size_t>(6 * n[0] * n[1] * n[2]));
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        for (const auto& p : perms) {
          std::array<int, 3> c{i, j, k};
          std::array<int, 4> tet{};
          tet[0] = vid(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[p[s]];
            tet[s + 1] = vid(c[0], c[1], c[2]);
          }
          const double vol = geometry::signed_volume<double>(
              vertices[tet[0]], vertices[tet[1]], vertices[tet[2]], vertices[tet[3]]);
          if (vol < 0) std::swap(tet[2], tet[3]);
          tets.push_back(tet);
        }
      }
    }
  }

  if (!opt.refine_segments.empty()) {
    const double cell = std::max(opt.band, 2.0 * opt.h_far);
    SegmentIndex index(opt.refine_segments, cell);
    const double target = 2.0 * opt.h_near * (1.0 + 1e-12);
    Bisector bisector(std::move(vertices), std::move(tets));
    auto marked = [&](const std::array<int, 4>& tet) {
      const auto& v = bisector.vertices();
      if (longest_edge_of(v, tet) <= target) return false;
      const Vec3 c = (v[tet[0]] + v[tet[1]] + v[tet[2]] + v[tet[3]]) / 4.0;
      double radius = 0;
      for (int q : tet) radius = std::max(radius, (v[q] - c).norm());
      return index.distance(c, opt.band + radius) <= opt.band + radius;
    };
    for (;;) {
      std::vector<int> todo;
      for (int t = 0; t < static_cast<int>(bisector.tets().size()); ++t) {
        if (marked(bisector.tets()[t])) todo.push_back(t);
      }
      if (todo.empty()) break;
      for (int t : todo) {
        if (marked(bisector.tets()[t])) bisector.refine(t);
      }
    }
    vertices = std::move(bisector.vertices());
    tets = std::move(bisector.tets());
  }

  TetMesh mesh(std::move(vertices), std::move(tets));
  return boundary_classify(mesh, opt.boundary_rule);
}

}  // namespace emdim
