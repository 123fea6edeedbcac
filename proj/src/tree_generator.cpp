#include "emdim/error.hpp"
#include "emdim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace emdim {

namespace {

struct Tip {
  int node;
  Vec3 direction;
};

Vec3 perturb(const Vec3& direction, double spread, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, spread);
  for (;;) {
    const Vec3 d = direction + Vec3(normal(rng), normal(rng), normal(rng));
    if (d.norm() > 1e-12) return d.normalized();
  }
}

}  // namespace

Network1D generate_random_tree(const TreeOptions& opt) {
  if (opt.depth < 1) fail(ErrorKind::InvalidParameter, "tree depth must be at least 1");
  if (!(opt.segment_min > 0) || opt.segment_max < opt.segment_min) {
    fail(ErrorKind::InvalidParameter, "tree segment lengths need 0 < segment_min <= segment_max");
  }
  if (!(opt.radius > 0)) fail(ErrorKind::InvalidParameter, "tree radius must be positive");
  if (opt.branch_probability < 0 || opt.branch_probability > 1) {
    fail(ErrorKind::InvalidParameter, "branch probability must lie in [0, 1]");
  }
  if (!opt.domain.contains(opt.root, 1e-12)) {
    fail(ErrorKind::InvalidGeometry, "tree root lies outside the domain");
  }

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // New points keep the margin from every face except the ones holding the root.
  Box inner = opt.domain;
  for (int d = 0; d < 3; ++d) {
    if (std::abs(opt.root[d] - opt.domain.lo[d]) > 1e-12) inner.lo[d] += opt.margin;
    if (std::abs(opt.root[d] - opt.domain.hi[d]) > 1e-12) inner.hi[d] -= opt.margin;
  }

  std::vector<Vec3> nodes{opt.root};
  std::vector<GraphEdge> edges;
  SegmentIndex index({}, std::max(opt.segment_max, 4 * opt.radius));
  long rejections = 0;

  // Tries to grow one segment from `tip`; returns the new tip on success.
  auto grow = [&](const Tip& tip, double spread) -> std::optional<Tip> {
    const Vec3 from = nodes[tip.node];
    for (int attempt = 0; attempt < opt.attempts_per_child; ++attempt) {
      const Vec3 dir = perturb(tip.direction, spread, rng);
      const double len = opt.segment_min + (opt.segment_max - opt.segment_min) * unit(rng);
      const Vec3 to = from + len * dir;
      bool ok = inner.contains(to);
      if (ok) {
        for (int s : index.near_segment({from, to}, opt.radius)) {
          if (edges[s].a != tip.node && edges[s].b != tip.node) {
            ok = false;
            break;
          }
        }
      }
      if (ok) {
        nodes.push_back(to);
        const int node = static_cast<int>(nodes.size()) - 1;
        edges.push_back(GraphEdge{tip.node, node, opt.radius, 1});
        index.insert({from, to});
        return Tip{node, dir};
      }
      if (++rejections > opt.rejection_budget) {
        fail(ErrorKind::Generation, "tree rejection budget exhausted after " +
                                        std::to_string(edges.size()) +
                                        " segments; try a smaller depth");
      }
    }
    return std::nullopt;
  };

  std::vector<Tip> active;
  if (auto first = grow(Tip{0, opt.direction.normalized()}, 0.0)) {
    active.push_back(*first);
  } else {
    fail(ErrorKind::Generation, "tree root segment leaves the domain; check root and direction");
  }

  for (int generation = 2; generation <= opt.depth && !active.empty(); ++generation) {
    std::vector<Tip> next;
    next.reserve(active.size() * 2);
    for (const Tip& tip : active) {
      const bool branch = unit(rng) < opt.branch_probability;
      if (auto child = grow(tip, opt.spread)) next.push_back(*child);
      if (branch) {
        if (auto child = grow(tip, opt.spread + opt.branch_spread)) next.push_back(*child);
      }
    }
    active = std::move(next);
  }

  return Network1D(std::move(nodes), std::move(edges), {{0, opt.root_value}});
}

}  // namespace emdim
