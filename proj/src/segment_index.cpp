#include "emdim/error.hpp"
#include "emdim/geometry.hpp"
#include "emdim/mesh.hpp"

#include <cmath>
#include <limits>

namespace emdim {

SegmentIndex::SegmentIndex(std::vector<Segment> segments, double cell_size)
    : cell_(cell_size) {
  if (!(cell_size > 0)) fail(ErrorKind::InvalidParameter, "segment index cell size must be positive");
  for (const auto& s : segments) insert(s);
}

std::array<long long, 3> SegmentIndex::cell_of(const Vec3& x) const {
  return {static_cast<long long>(std::floor(x[0] / cell_)),
          static_cast<long long>(std::floor(x[1] / cell_)),
          static_cast<long long>(std::floor(x[2] / cell_))};
}

long long SegmentIndex::key(long long i, long long j, long long k) const {
  constexpr long long off = 1 << 20;
  return ((i + off) << 42) ^ ((j + off) << 21) ^ (k + off);
}

void SegmentIndex::insert(const Segment& segment) {
  const int id = static_cast<int>(segments_.size());
  segments_.push_back(segment);
  const auto lo = cell_of(segment.first.cwiseMin(segment.second));
  const auto hi = cell_of(segment.first.cwiseMax(segment.second));
  for (long long i = lo[0]; i <= hi[0]; ++i)
    for (long long j = lo[1]; j <= hi[1]; ++j)
      for (long long k = lo[2]; k <= hi[2]; ++k) cells_[key(i, j, k)].push_back(id);
}

double SegmentIndex::distance(const Vec3& x, double cutoff) const {
  double best = std::numeric_limits<double>::infinity();
  const auto lo = cell_of(x - Vec3::Constant(cutoff));
  const auto hi = cell_of(x + Vec3::Constant(cutoff));
  for (long long i = lo[0]; i <= hi[0]; ++i)
    for (long long j = lo[1]; j <= hi[1]; ++j)
      for (long long k = lo[2]; k <= hi[2]; ++k) {
        const auto it = cells_.find(key(i, j, k));
        if (it == cells_.end()) continue;
        for (int id : it->second) {
          const auto& [a, b] = segments_[id];
          best = std::min(best, geometry::point_segment_distance<double>(x, a, b));
        }
      }
  return best <= cutoff ? best : std::numeric_limits<double>::infinity();
}

std::vector<int> SegmentIndex::near_segment(const Segment& s, double clearance) const {
  std::vector<int> out;
  const auto lo = cell_of(s.first.cwiseMin(s.second) - Vec3::Constant(clearance));
  const auto hi = cell_of(s.first.cwiseMax(s.second) + Vec3::Constant(clearance));
  for (long long i = lo[0]; i <= hi[0]; ++i)
    for (long long j = lo[1]; j <= hi[1]; ++j)
      for (long long k = lo[2]; k <= hi[2]; ++k) {
        const auto it = cells_.find(key(i, j, k));
        if (it == cells_.end()) continue;
        for (int id : it->second) {
          const auto& [a, b] = segments_[id];
          if (geometry::segment_segment_distance<double>(s.first, s.second, a, b) < clearance) {
            out.push_back(id);
          }
        }
      }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace emdim
