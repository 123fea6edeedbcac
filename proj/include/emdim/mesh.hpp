#pragma once

#include "emdim/types.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <string>
#include <utility>
#include <vector>

namespace emdim {

enum class BoundaryTag : std::uint8_t { Interior, Untagged, Dirichlet, Neumann };

const char* to_string(BoundaryTag tag) noexcept;

/// Conforming tetrahedral mesh with globally oriented faces.
///
/// Every tet is stored with positive signed volume. Face f is stored as a
/// vertex triple whose right-hand normal points out of its lower-index tet
/// (outward for boundary faces). The face opposite local vertex i of tet t is
/// `tet_faces(t)[i]`, and `tet_face_signs(t)[i]` is +1 when the global normal
/// of that face points out of t.
class TetMesh {
 public:
  TetMesh() = default;
  TetMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_tets() const { return static_cast<int>(tets_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_boundary_faces() const { return static_cast<int>(boundary_faces_.size()); }
  int num_neumann_faces() const { return static_cast<int>(neumann_faces_.size()); }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const Vec3& vertex(int v) const { return vertices_[v]; }
  const std::vector<std::array<int, 4>>& tets() const { return tets_; }
  const std::array<int, 4>& tet(int t) const { return tets_[t]; }
  const std::array<int, 3>& face(int f) const { return faces_[f]; }
  const std::array<int, 2>& face_tets(int f) const { return face_tets_[f]; }
  const std::array<int, 4>& tet_faces(int t) const { return tet_faces_[t]; }
  const std::array<int, 4>& tet_face_signs(int t) const { return tet_face_signs_[t]; }

  bool is_boundary_face(int f) const { return face_tets_[f][1] < 0; }
  BoundaryTag tag(int f) const { return tags_[f]; }
  const std::vector<BoundaryTag>& tags() const { return tags_; }
  /// Boundary faces in increasing face order.
  const std::vector<int>& boundary_faces() const { return boundary_faces_; }
  /// Neumann faces in increasing face order; position = multiplier index.
  const std::vector<int>& neumann_faces() const { return neumann_faces_; }

  double volume(int t) const;
  Vec3 centroid(int t) const;
  double longest_edge(int t) const;
  double face_area(int f) const;
  Vec3 face_centroid(int f) const;
  Vec3 face_unit_normal(int f) const;
  std::array<Vec3, 4> tet_points(int t) const;
  std::array<Vec3, 3> face_points(int f) const;

  /// Copy of this mesh with the given tag per face. Interior faces must be
  /// tagged Interior, boundary faces Dirichlet or Neumann.
  TetMesh with_tags(std::vector<BoundaryTag> tags) const;

 private:
  void build_topology();
  void rebuild_tag_lists();

  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 4>> tets_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<std::array<int, 2>> face_tets_;
  std::vector<std::array<int, 4>> tet_faces_;
  std::vector<std::array<int, 4>> tet_face_signs_;
  std::vector<BoundaryTag> tags_;
  std::vector<int> boundary_faces_;
  std::vector<int> neumann_faces_;
};

struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();
  double volume() const { return (hi - lo).prod(); }
  bool contains(const Vec3& x, double tol = 0.0) const {
    return (x.array() >= lo.array() - tol).all() &&
           (x.array() <= hi.array() + tol).all();
  }
};

using Segment = std::pair<Vec3, Vec3>;

/// Rule mapping a boundary face (centroid, outward unit normal) to a tag.
using BoundaryRule = std::function<BoundaryTag(const Vec3& centroid, const Vec3& normal)>;

/// Tags faces whose normal is parallel to z as Neumann, all others Dirichlet.
BoundaryTag z_faces_neumann(const Vec3& centroid, const Vec3& normal);
BoundaryTag all_dirichlet(const Vec3& centroid, const Vec3& normal);

struct BoxMeshOptions {
  Box bounds;
  double h_far = 0.1;
  /// Segments (a polyline is a chain of them) near which the mesh is graded.
  std::vector<Segment> refine_segments;
  double h_near = 0.1;
  double band = 0.1;
  BoundaryRule boundary_rule = all_dirichlet;
};

std::vector<Segment> polyline_segments(const std::vector<Vec3>& polyline);

/// Structured cube-to-six-tets subdivision of the box followed by
/// longest-edge bisection until every tet within `band` of the refinement
/// segments has longest edge at most 2 * h_near. Cube cells have side at most
/// h_far, so the unrefined longest edge is below 2 * h_far.
TetMesh generate_box_mesh(const BoxMeshOptions& options);

struct BoundaryCounts {
  int dirichlet = 0;
  int neumann = 0;
};

/// Applies `rule` to every boundary face. Throws a classification error
/// listing the first face for which the rule returns neither Dirichlet nor
/// Neumann.
TetMesh boundary_classify(const TetMesh& mesh, const BoundaryRule& rule);
BoundaryCounts boundary_counts(const TetMesh& mesh);

/// Uniform background grid over the mesh bounding box; every cell lists the
/// tets whose bounding box overlaps it.
class PointLocator {
 public:
  explicit PointLocator(const TetMesh& mesh, double tolerance = 1e-10);

  /// Lowest-index tet whose barycentric coordinates at x are all >= -tol.
  std::optional<int> locate(const Vec3& x) const;
  Eigen::Vector4d barycentric(int tet, const Vec3& x) const;
  const TetMesh& mesh() const { return *mesh_; }

 private:
  const TetMesh* mesh_;
  double tol_;
  Vec3 lo_, hi_, cell_;
  std::array<int, 3> dims_{};
  std::vector<int> cell_start_;
  std::vector<int> cell_tets_;
  std::vector<Eigen::Matrix3d> inverse_;
};

/// Spatial hash over a set of segments answering distance queries.
class SegmentIndex {
 public:
  SegmentIndex(std::vector<Segment> segments, double cell_size);
  SegmentIndex() = default;

  void insert(const Segment& segment);
  /// Distance from x to the nearest segment, or +inf if none lies within
  /// `cutoff`.
  double distance(const Vec3& x, double cutoff) const;
  /// Indices of segments whose distance to [a,b] is below `clearance`.
  std::vector<int> near_segment(const Segment& s, double clearance) const;
  const std::vector<Segment>& segments() const { return segments_; }

 private:
  std::array<long long, 3> cell_of(const Vec3& x) const;
  long long key(long long i, long long j, long long k) const;

  std::vector<Segment> segments_;
  double cell_ = 1.0;
  std::unordered_map<long long, std::vector<int>> cells_;
};

/// Tags used for the Gmsh physical groups of boundary triangles.
using GmshTagMap = std::map<int, BoundaryTag>;

/// Reads an MSH 2.2 ASCII file (tets: type 4, triangles: type 2; points and
/// lines are skipped). Triangles are tagged through their first (physical)
/// tag; untagged boundary faces are left Untagged.
TetMesh load_gmsh(const std::string& path, const GmshTagMap& tags = {{1, BoundaryTag::Dirichlet},
                                                                     {2, BoundaryTag::Neumann}});
/// Writes MSH 2.2 ASCII; Dirichlet triangles get physical tag 1, Neumann 2.
void save_gmsh(const TetMesh& mesh, const std::string& path);

/// Plain-text dump headed "EMDIM-MESH 1".
void write_mesh(const TetMesh& mesh, const std::string& path);
TetMesh read_mesh(const std::string& path);

}  // namespace emdim
