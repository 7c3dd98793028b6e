#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rbg/connection.hpp"
#include "rbg/point_process.hpp"
#include "rbg/rng.hpp"
#include "rbg/spatial_grid.hpp"
#include "rbg/union_find.hpp"

namespace rbg {

/// Relative neglected moment mass when truncating infinite-support f.
inline constexpr double kEdgeEpsilon = 1e-9;

/// Compressed adjacency lists.
struct Adjacency {
  std::vector<std::uint32_t> offsets{0};
  std::vector<std::uint32_t> targets;

  std::size_t vertex_count() const { return offsets.size() - 1; }
  std::span<const std::uint32_t> operator[](std::size_t v) const {
    return {targets.data() + offsets[v], targets.data() + offsets[v + 1]};
  }
  std::size_t degree(std::size_t v) const { return offsets[v + 1] - offsets[v]; }
};

struct Edge {
  std::uint32_t first = 0;   // agent (bipartite) or smaller index (unipartite)
  std::uint32_t second = 0;  // hub (bipartite) or larger index
  double distance = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

namespace detail {
inline Adjacency build_adjacency(std::size_t n, const std::vector<Edge>& edges, bool from_first,
                                 bool symmetric) {
  Adjacency adj;
  adj.offsets.assign(n + 1, 0);
  for (const auto& e : edges) {
    if (symmetric || from_first) ++adj.offsets[e.first + 1];
    if (symmetric || !from_first) ++adj.offsets[e.second + 1];
  }
  for (std::size_t v = 0; v < n; ++v) adj.offsets[v + 1] += adj.offsets[v];
  adj.targets.resize(adj.offsets[n]);
  std::vector<std::uint32_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
  for (const auto& e : edges) {
    if (symmetric || from_first) adj.targets[cursor[e.first]++] = e.second;
    if (symmetric || !from_first) adj.targets[cursor[e.second]++] = e.first;
  }
  for (std::size_t v = 0; v < n; ++v)
    std::sort(adj.targets.begin() + adj.offsets[v], adj.targets.begin() + adj.offsets[v + 1]);
  return adj;
}

inline double truncation_radius(const ConnectionSpec& spec, const Window& w, double epsilon) {
  spec.validate();
  const double radius = effective_support(spec, w.dim, epsilon).radius;
  if (w.boundary == Boundary::torus && radius >= w.half())
    throw std::invalid_argument("connection support radius must be below L/2 on the torus");
  return radius;
}
}  // namespace detail

/// Bipartite agent-hub graph. Vertex ids in a joint labelling are agents
/// 0..na-1 followed by hubs na..na+nh-1.
struct RbgGraph {
  PointSet agents;
  PointSet hubs;
  std::vector<Edge> edges;  // sorted by (agent, hub)
  Adjacency agent_adjacency;
  Adjacency hub_adjacency;

  std::size_t vertex_count() const { return agents.size() + hubs.size(); }
};

struct UniGraph {
  PointSet points;
  std::vector<Edge> edges;  // first < second, sorted
  Adjacency adjacency;
};

/// Edge draw for an agent-hub pair: present iff u(seed, agent, hub) < f(distance).
inline bool bipartite_edge(std::uint64_t seed, std::uint32_t agent, std::uint32_t hub,
                           double probability) {
  return pair_uniform(seed, StreamTag::bipartite_edge, agent, hub) < probability;
}

inline bool unipartite_edge(std::uint64_t seed, std::uint32_t i, std::uint32_t j,
                            double probability) {
  if (i > j) std::swap(i, j);
  return pair_uniform(seed, StreamTag::unipartite_edge, i, j) < probability;
}

inline RbgGraph build_rbg(PointSet agents, PointSet hubs, const ConnectionSpec& spec,
                          std::uint64_t seed, double epsilon = kEdgeEpsilon) {
  if (!(agents.window() == hubs.window()))
    throw std::invalid_argument("agent and hub windows differ");
  const Window& w = agents.window();
  const double radius = detail::truncation_radius(spec, w, epsilon);
  const double r2 = radius * radius;

  std::vector<Edge> edges;
  if (!agents.empty() && !hubs.empty()) {
    const CellGrid grid(w, radius, hubs.coords());
    std::vector<Edge> local;
    for (std::size_t a = 0; a < agents.size(); ++a) {
      const auto x = agents.point(a);
      local.clear();
      grid.for_each_candidate(x, [&](std::uint32_t h) {
        const double d2 = squared_distance(w, x, hubs.point(h));
        if (d2 > r2) return;
        const double d = std::sqrt(d2);
        if (bipartite_edge(seed, static_cast<std::uint32_t>(a), h, evaluate(spec, d, w.dim)))
          local.push_back({static_cast<std::uint32_t>(a), h, d});
      });
      std::sort(local.begin(), local.end(),
                [](const Edge& l, const Edge& r) { return l.second < r.second; });
      edges.insert(edges.end(), local.begin(), local.end());
    }
  }
  RbgGraph g{std::move(agents), std::move(hubs), std::move(edges), {}, {}};
  g.agent_adjacency = detail::build_adjacency(g.agents.size(), g.edges, true, false);
  // Hub lists are indexed by hub id; reuse the builder on swapped edges.
  std::vector<Edge> swapped(g.edges.size());
  std::transform(g.edges.begin(), g.edges.end(), swapped.begin(),
                 [](const Edge& e) { return Edge{e.second, e.first, e.distance}; });
  g.hub_adjacency = detail::build_adjacency(g.hubs.size(), swapped, true, false);
  return g;
}

inline UniGraph build_unipartite(PointSet points, const ConnectionSpec& spec, std::uint64_t seed,
                                 double epsilon = kEdgeEpsilon) {
  const Window& w = points.window();
  const double radius = detail::truncation_radius(spec, w, epsilon);
  const double r2 = radius * radius;
  std::vector<Edge> edges;
  if (points.size() > 1) {
    const CellGrid grid(w, radius, points.coords());
    std::vector<Edge> local;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto x = points.point(i);
      local.clear();
      grid.for_each_candidate(x, [&](std::uint32_t j) {
        if (j <= i) return;
        const double d2 = squared_distance(w, x, points.point(j));
        if (d2 > r2) return;
        const double d = std::sqrt(d2);
        if (unipartite_edge(seed, static_cast<std::uint32_t>(i), j, evaluate(spec, d, w.dim)))
          local.push_back({static_cast<std::uint32_t>(i), j, d});
      });
      std::sort(local.begin(), local.end(),
                [](const Edge& l, const Edge& r) { return l.second < r.second; });
      edges.insert(edges.end(), local.begin(), local.end());
    }
  }
  UniGraph g{std::move(points), std::move(edges), {}};
  g.adjacency = detail::build_adjacency(g.points.size(), g.edges, true, true);
  return g;
}

struct ComponentLabeling {
  std::vector<std::uint32_t> label;  // per vertex, components numbered by first appearance
  std::vector<std::uint32_t> agent_size;  // agents per component
  std::vector<std::uint32_t> total_size;  // vertices per component

  std::size_t component_count() const { return total_size.size(); }
  std::uint32_t largest_agent_size() const {
    return agent_size.empty() ? 0 : *std::max_element(agent_size.begin(), agent_size.end());
  }
};

namespace detail {
inline ComponentLabeling label_from(UnionFind& uf, std::size_t agent_count) {
  ComponentLabeling out;
  const std::size_t n = uf.size();
  out.label.resize(n);
  std::vector<std::uint32_t> root_label(n, UINT32_MAX);
  for (std::size_t v = 0; v < n; ++v) {
    const auto root = uf.find(static_cast<std::uint32_t>(v));
    if (root_label[root] == UINT32_MAX) {
      root_label[root] = static_cast<std::uint32_t>(out.total_size.size());
      out.total_size.push_back(0);
      out.agent_size.push_back(0);
    }
    const auto c = root_label[root];
    out.label[v] = c;
    ++out.total_size[c];
    if (v < agent_count) ++out.agent_size[c];
  }
  return out;
}
}  // namespace detail

inline ComponentLabeling connected_components(const RbgGraph& g) {
  const auto na = g.agents.size();
  UnionFind uf(g.vertex_count());
  for (const auto& e : g.edges) uf.unite(e.first, static_cast<std::uint32_t>(na + e.second));
  return detail::label_from(uf, na);
}

/// For a unipartite graph every vertex counts as an agent.
inline ComponentLabeling connected_components(const UniGraph& g) {
  UnionFind uf(g.points.size());
  for (const auto& e : g.edges) uf.unite(e.first, e.second);
  return detail::label_from(uf, g.points.size());
}

struct TwoHopCounts {
  std::uint64_t distinct_agents = 0;  // M
  std::uint64_t paths = 0;            // N

  friend bool operator==(const TwoHopCounts&, const TwoHopCounts&) = default;
};

/// M and N for one agent: N counts agent-hub-agent paths, M the distinct
/// agents at the far end.
inline TwoHopCounts agent_neighbors_via_hubs(const RbgGraph& g, std::size_t agent) {
  if (agent >= g.agents.size()) throw std::out_of_range("agent index out of range");
  TwoHopCounts out;
  std::vector<std::uint32_t> reached;
  for (const auto h : g.agent_adjacency[agent]) {
    const auto members = g.hub_adjacency[h];
    out.paths += members.size() - 1;
    for (const auto a : members)
      if (a != agent) reached.push_back(a);
  }
  std::sort(reached.begin(), reached.end());
  out.distinct_agents = static_cast<std::uint64_t>(
      std::unique(reached.begin(), reached.end()) - reached.begin());
  return out;
}

}  // namespace rbg
