#pragma once

#include "emdim/mesh.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace emdim::test {

inline TetMesh unit_cube(double h_far, BoundaryRule rule = all_dirichlet) {
  BoxMeshOptions o;
  o.h_far = h_far;
  o.h_near = h_far;
  o.boundary_rule = std::move(rule);
  return generate_box_mesh(o);
}

inline TetMesh reference_tet() {
  TetMesh m({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}, {{0, 1, 2, 3}});
  return boundary_classify(m, all_dirichlet);
}

inline TetMesh two_tets() {
  TetMesh m({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(1, 1, 1)},
            {{0, 1, 2, 3}, {1, 2, 3, 4}});
  return boundary_classify(m, all_dirichlet);
}

/// Fresh directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("emdim_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline Vec3 random_point(std::mt19937_64& rng, const Vec3& lo, const Vec3& hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return Vec3(lo[0] + (hi[0] - lo[0]) * u(rng), lo[1] + (hi[1] - lo[1]) * u(rng),
              lo[2] + (hi[2] - lo[2]) * u(rng));
}

}  // namespace emdim::test
