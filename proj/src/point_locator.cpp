#include "emdim/error.hpp"
#include "emdim/mesh.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace emdim {

PointLocator::PointLocator(const TetMesh& mesh, double tolerance)
    : mesh_(&mesh), tol_(tolerance) {
  const int nt = mesh.num_tets();
  if (nt == 0) fail(ErrorKind::InvalidGeometry, "cannot locate points in an empty mesh");

  lo_ = mesh.vertex(0);
  hi_ = mesh.vertex(0);
  for (const Vec3& v : mesh.vertices()) {
    lo_ = lo_.cwiseMin(v);
    hi_ = hi_.cwiseMax(v);
  }
  const Vec3 extent = (hi_ - lo_).cwiseMax(1e-300);
  const double per_axis = std::max(1.0, std::cbrt(static_cast<double>(nt)));
  for (int d = 0; d < 3; ++d) {
    dims_[d] = std::max(1, static_cast<int>(per_axis));
    cell_[d] = extent[d] / dims_[d];
  }

  inverse_.resize(nt);
  std::vector<std::array<int, 6>> ranges(nt);
  std::vector<int> counts(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2] + 1, 0);
  auto clampi = [&](double v, int d) {
    return std::clamp(static_cast<int>(std::floor(v)), 0, dims_[d] - 1);
  };
  for (int t = 0; t < nt; ++t) {
    const auto p = mesh.tet_points(t);
    Eigen::Matrix3d m;
    m.col(0) = p[1] - p[0];
    m.col(1) = p[2] - p[0];
    m.col(2) = p[3] - p[0];
    inverse_[t] = m.inverse();
    Vec3 blo = p[0], bhi = p[0];
    for (const auto& q : p) {
      blo = blo.cwiseMin(q);
      bhi = bhi.cwiseMax(q);
    }
    const Vec3 pad = Vec3::Constant(1e-9) + 1e-9 * (bhi - blo);
    for (int d = 0; d < 3; ++d) {
      ranges[t][2 * d] = clampi((blo[d] - pad[d] - lo_[d]) / cell_[d], d);
      ranges[t][2 * d + 1] = clampi((bhi[d] + pad[d] - lo_[d]) / cell_[d], d);
    }
    for (int k = ranges[t][4]; k <= ranges[t][5]; ++k)
      for (int j = ranges[t][2]; j <= ranges[t][3]; ++j)
        for (int i = ranges[t][0]; i <= ranges[t][1]; ++i)
          ++counts[(k * dims_[1] + j) * dims_[0] + i + 1];
  }
  for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
  cell_start_ = counts;
  cell_tets_.resize(counts.back());
  std::vector<int> fill(counts.begin(), counts.end() - 1);
  for (int t = 0; t < nt; ++t) {
    for (int k = ranges[t][4]; k <= ranges[t][5]; ++k)
      for (int j = ranges[t][2]; j <= ranges[t][3]; ++j)
        for (int i = ranges[t][0]; i <= ranges[t][1]; ++i)
          cell_tets_[fill[(k * dims_[1] + j) * dims_[0] + i]++] = t;
  }
}

Eigen::Vector4d PointLocator::barycentric(int tet, const Vec3& x) const {
  const Vec3 l = inverse_[tet] * (x - mesh_->vertex(mesh_->tet(tet)[0]));
  Eigen::Vector4d out;
  out << 1.0 - l.sum(), l(0), l(1), l(2);
  return out;
}

std::optional<int> PointLocator::locate(const Vec3& x) const {
  const double slack = 1e-9 * (hi_ - lo_).maxCoeff();
  if ((x.array() < lo_.array() - slack).any() || (x.array() > hi_.array() + slack).any()) {
    return std::nullopt;
  }
  std::array<int, 3> c{};
  for (int d = 0; d < 3; ++d) {
    c[d] = std::clamp(static_cast<int>(std::floor((x[d] - lo_[d]) / cell_[d])), 0, dims_[d] - 1);
  }
  const int cell = (c[2] * dims_[1] + c[1]) * dims_[0] + c[0];
  // Candidates are stored in increasing tet order, so the first hit wins.
  for (int k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
    const int t = cell_tets_[k];
    if (barycentric(t, x).minCoeff() >= -tol_) return t;
  }
  return std::nullopt;
}

}  // namespace emdim
