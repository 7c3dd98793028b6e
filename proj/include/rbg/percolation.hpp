#pragma once

// Finite-size percolation estimates on the torus.
//
// Sweeps use a thinning coupling: the swept process is sampled once at the
// largest grid density with i.i.d. U[0,1) marks, and the process at density v
// is the sub-configuration with mark <= v / v_max. Edge draws are keyed by
// vertex pair, so configurations are nested along the grid and percolation is
// pathwise monotone. Each replication is processed incrementally in mark order
// (as in Newman-Ziff), which yields the exact density at which a wrapping
// cluster first appears.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rbg/connection.hpp"
#include "rbg/graph.hpp"
#include "rbg/parallel.hpp"
#include "rbg/point_process.hpp"
#include "rbg/spatial_grid.hpp"
#include "rbg/stats.hpp"
#include "rbg/theory.hpp"
#include "rbg/union_find.hpp"

namespace rbg {

enum class Criterion { wrap, fraction };

inline const char* to_string(Criterion c) { return c == Criterion::wrap ? "wrap" : "fraction"; }

inline constexpr double kDefaultFractionThreshold = 0.3;

struct PercOutcome {
  bool percolates = false;
  /// No agents in the window; `percolates` is false.
  bool indeterminate = false;
  double largest_component_agent_fraction = 0.0;
  bool wraps = false;
  Criterion criterion = Criterion::wrap;
  Window window;
  std::uint64_t seed = 0;
};

namespace detail {

inline double percolation_radius(const ConnectionSpec& spec, const Window& w) {
  if (w.boundary != Boundary::torus)
    throw std::invalid_argument("percolation experiments require the torus metric");
  const double radius = truncation_radius(spec, w, kEdgeEpsilon);
  if (!(radius < 0.25 * w.side))
    throw std::invalid_argument("connection support radius must be below L/4 for percolation");
  return radius;
}

inline void delta(const Window& w, std::span<const double> from, std::span<const double> to,
                  double* out) {
  for (int k = 0; k < w.dim; ++k) out[k] = axis_delta(w, from[k], to[k]);
}

struct TrialSeeds {
  std::uint64_t hubs, agents, edges;
};

inline TrialSeeds trial_seeds(std::uint64_t seed) {
  return {derive_seed(seed, 1), derive_seed(seed, 2), derive_seed(seed, 3)};
}

inline PercOutcome finish_outcome(WrappingUnionFind& uf, std::size_t vertex_count,
                                  std::size_t agent_count, Criterion criterion,
                                  double fraction_threshold, const Window& w, std::uint64_t seed) {
  PercOutcome out;
  out.criterion = criterion;
  out.window = w;
  out.seed = seed;
  out.wraps = uf.any_wrapped();
  if (agent_count == 0) {
    out.indeterminate = true;
    return out;
  }
  std::uint32_t largest = 0;
  for (std::size_t v = 0; v < vertex_count; ++v)
    largest = std::max(largest, uf.component_weight(static_cast<std::uint32_t>(v)));
  out.largest_component_agent_fraction = static_cast<double>(largest) / static_cast<double>(agent_count);
  out.percolates = criterion == Criterion::wrap
                       ? out.wraps
                       : out.largest_component_agent_fraction >= fraction_threshold;
  return out;
}

}  // namespace detail

/// One RBG realization at (lambda, mu) on the torus.
inline PercOutcome percolation_trial(double lambda, double mu, const ConnectionSpec& spec,
                                     const Window& window, std::uint64_t seed,
                                     Criterion criterion = Criterion::wrap,
                                     double fraction_threshold = kDefaultFractionThreshold) {
  detail::percolation_radius(spec, window);
  const auto seeds = detail::trial_seeds(seed);
  const auto g = build_rbg(sample_ppp(lambda, window, seeds.agents, PointKind::agent),
                           sample_ppp(mu, window, seeds.hubs, PointKind::hub), spec, seeds.edges);
  const auto na = g.agents.size();
  WrappingUnionFind uf(g.vertex_count(), window.dim, window.side);
  for (std::size_t a = 0; a < na; ++a) uf.set_weight(static_cast<std::uint32_t>(a), 1);
  double d[8];
  for (const auto& e : g.edges) {
    detail::delta(window, g.agents.point(e.first), g.hubs.point(e.second), d);
    uf.unite(e.first, static_cast<std::uint32_t>(na + e.second), {d, static_cast<std::size_t>(window.dim)});
  }
  return detail::finish_outcome(uf, g.vertex_count(), na, criterion, fraction_threshold, window, seed);
}

/// One unipartite realization G(Phi, f) at intensity lambda.
inline PercOutcome unipartite_trial(double lambda, const ConnectionSpec& spec, const Window& window,
                                    std::uint64_t seed, Criterion criterion = Criterion::wrap,
                                    double fraction_threshold = kDefaultFractionThreshold) {
  detail::percolation_radius(spec, window);
  const auto seeds = detail::trial_seeds(seed);
  const auto g = build_unipartite(sample_ppp(lambda, window, seeds.agents, PointKind::agent), spec,
                                  seeds.edges);
  const auto n = g.points.size();
  WrappingUnionFind uf(n, window.dim, window.side);
  for (std::size_t v = 0; v < n; ++v) uf.set_weight(static_cast<std::uint32_t>(v), 1);
  double d[8];
  for (const auto& e : g.edges) {
    detail::delta(window, g.points.point(e.first), g.points.point(e.second), d);
    uf.unite(e.first, e.second, {d, static_cast<std::size_t>(window.dim)});
  }
  return detail::finish_outcome(uf, n, n, criterion, fraction_threshold, window, seed);
}

enum class SweepParam { lambda, mu };

inline const char* to_string(SweepParam p) { return p == SweepParam::lambda ? "lambda" : "mu"; }

enum class GraphKind { bipartite, unipartite };

struct SweepConfig {
  GraphKind graph = GraphKind::bipartite;
  SweepParam swept = SweepParam::lambda;  // unipartite sweeps are always over lambda
  double fixed_value = 0.0;               // the other intensity (bipartite only)
  ConnectionSpec spec;
  int dim = 2;
  std::vector<double> grid;   // increasing swept values
  std::vector<double> sides;  // increasing window sides, at least two
  std::size_t reps = 200;
  std::uint64_t seed = 0;
  Criterion criterion = Criterion::wrap;
  double fraction_threshold = kDefaultFractionThreshold;
  std::size_t bootstrap = 500;
  std::size_t refine = 32;  // evaluation points per grid interval (wrap criterion)
  unsigned workers = 1;

  void validate() const {
    spec.validate();
    if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
    if (!std::is_sorted(grid.begin(), grid.end()) ||
        std::adjacent_find(grid.begin(), grid.end()) != grid.end())
      throw std::invalid_argument("sweep grid must be strictly increasing");
    if (!(grid.front() >= 0.0)) throw std::invalid_argument("sweep grid must be non-negative");
    if (sides.size() < 2) throw std::invalid_argument("need at least two window sizes");
    if (!std::is_sorted(sides.begin(), sides.end()) ||
        std::adjacent_find(sides.begin(), sides.end()) != sides.end())
      throw std::invalid_argument("window sizes must be strictly increasing");
    if (reps < 2) throw std::invalid_argument("need at least two replications");
    if (graph == GraphKind::bipartite && !(fixed_value >= 0.0))
      throw std::invalid_argument("fixed intensity must be non-negative");
  }
};

/// Outcome of one coupled replication at one window size.
struct RepOutcome {
  /// Smallest swept density with a wrapping cluster; +inf if none up to v_max.
  double critical_value = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> percolates;  // per grid point
  std::vector<double> largest_fraction;  // per grid point
};

namespace detail {

/// Nodes and edges of one coupled realization at the largest grid density.
struct CoupledGraph {
  Window window;
  std::vector<double> positions;          // node-major
  std::vector<std::uint32_t> weight;      // 1 for agents
  std::vector<double> mark;               // growing nodes; fixed nodes get -1
  Adjacency adjacency;                    // symmetric
  std::vector<std::uint64_t> present_agents;  // agents present at each grid point
};

inline std::vector<std::uint32_t> checkpoint_of(const std::vector<double>& marks,
                                                const std::vector<double>& grid) {
  // Index of the first grid point at which a node with this mark is present.
  std::vector<std::uint32_t> out(marks.size());
  const double vmax = grid.back();
  for (std::size_t i = 0; i < marks.size(); ++i) {
    const double v = marks[i] * vmax;
    out[i] = static_cast<std::uint32_t>(std::lower_bound(grid.begin(), grid.end(), v) - grid.begin());
  }
  return out;
}

inline CoupledGraph build_coupled(const SweepConfig& cfg, double side, std::uint64_t rep_seed,
                                  std::optional<std::size_t> only_grid_index = std::nullopt) {
  const Window w{cfg.dim, side, Boundary::torus};
  const double radius = percolation_radius(cfg.spec, w);
  const double r2 = radius * radius;
  const auto seeds = trial_seeds(rep_seed);
  const double vmax = cfg.grid.back();
  const std::size_t ngrid = cfg.grid.size();
  // Direct rebuilds keep only nodes present at one grid value.
  auto keep_growing = [&](double mark) {
    return !only_grid_index || mark * vmax <= cfg.grid[*only_grid_index];
  };
  const auto dim = static_cast<std::size_t>(cfg.dim);

  CoupledGraph out;
  out.window = w;
  out.present_agents.assign(ngrid, 0);
  std::vector<Edge> edges;

  if (cfg.graph == GraphKind::unipartite) {
    const PoissonSampler points(vmax, w, seeds.agents, PointKind::agent);
    std::vector<double> pos(points.count() * dim);
    std::vector<double> marks(points.count());
    std::vector<std::uint32_t> kept;  // sampler index of each node
    for (std::size_t i = 0; i < points.count(); ++i) {
      const double m = points.mark(i);
      if (!keep_growing(m)) continue;
      points.point(i, {pos.data() + kept.size() * dim, dim});
      marks[kept.size()] = m;
      kept.push_back(static_cast<std::uint32_t>(i));
    }
    pos.resize(kept.size() * dim);
    marks.resize(kept.size());
    const CellGrid grid(w, radius, pos);
    for (std::uint32_t u = 0; u < kept.size(); ++u) {
      const std::span<const double> x(pos.data() + u * dim, dim);
      grid.for_each_candidate(x, [&](std::uint32_t v) {
        if (v <= u) return;
        const double d2 = squared_distance(w, x, {pos.data() + v * dim, dim});
        if (d2 > r2) return;
        if (unipartite_edge(seeds.edges, kept[u], kept[v], evaluate(cfg.spec, std::sqrt(d2), cfg.dim)))
          edges.push_back({u, v, 0.0});
      });
    }
    for (const auto c : checkpoint_of(marks, cfg.grid))
      if (c < ngrid) ++out.present_agents[c];
    out.positions = std::move(pos);
    out.mark = std::move(marks);
    out.weight.assign(kept.size(), 1);
    out.adjacency = build_adjacency(kept.size(), edges, true, true);
    std::partial_sum(out.present_agents.begin(), out.present_agents.end(), out.present_agents.begin());
    return out;
  }

  const bool hubs_grow = cfg.swept == SweepParam::mu;
  const double lambda = hubs_grow ? cfg.fixed_value : vmax;
  const double mu = hubs_grow ? vmax : cfg.fixed_value;
  const PoissonSampler hub_sampler(mu, w, seeds.hubs, PointKind::hub);
  const PoissonSampler agent_sampler(lambda, w, seeds.agents, PointKind::agent);

  // Hubs are nodes 0..nh-1, stored with their sampler index.
  std::vector<double> hub_pos;
  std::vector<std::uint32_t> hub_index;
  std::vector<double> hub_marks;
  {
    std::vector<double> y(dim);
    for (std::size_t j = 0; j < hub_sampler.count(); ++j) {
      const double m = hubs_grow ? hub_sampler.mark(j) : -1.0;
      if (hubs_grow && !keep_growing(m)) continue;
      hub_sampler.point(j, y);
      hub_pos.insert(hub_pos.end(), y.begin(), y.end());
      hub_index.push_back(static_cast<std::uint32_t>(j));
      hub_marks.push_back(m);
    }
  }
  const std::size_t nh = hub_index.size();
  out.positions = hub_pos;
  out.mark = hub_marks;
  out.weight.assign(nh, 0);

  // Isolated agents are dropped (they only enter the agent count). When agents
  // are always present, a pendant agent cannot affect wrapping either, so it is
  // folded into its hub's weight instead of becoming a node.
  const std::size_t min_degree = (cfg.criterion == Criterion::wrap && hubs_grow) ? 2 : 1;
  const CellGrid grid(w, radius, hub_pos);
  const NeighbourhoodTable table(grid);
  std::vector<double> x(dim);
  std::vector<std::uint32_t> linked;
  for (std::size_t i = 0; i < agent_sampler.count(); ++i) {
    double m = -1.0;
    if (!hubs_grow) {
      m = agent_sampler.mark(i);
      if (!keep_growing(m)) continue;
      const auto c = static_cast<std::size_t>(
          std::lower_bound(cfg.grid.begin(), cfg.grid.end(), m * vmax) - cfg.grid.begin());
      if (c < ngrid) ++out.present_agents[c];
    } else {
      ++out.present_agents[0];
    }
    if (nh == 0) continue;
    agent_sampler.point(i, x);
    linked.clear();
    for (const auto h : table.candidates(x)) {
      const double d2 = squared_distance(w, x, {hub_pos.data() + h * dim, dim});
      if (d2 > r2) continue;
      if (bipartite_edge(seeds.edges, static_cast<std::uint32_t>(i), hub_index[h],
                         evaluate(cfg.spec, std::sqrt(d2), cfg.dim)))
        linked.push_back(h);
    }
    if (linked.size() < min_degree) {
      if (linked.size() == 1) ++out.weight[linked[0]];
      continue;
    }
    const auto node = static_cast<std::uint32_t>(out.weight.size());
    out.positions.insert(out.positions.end(), x.begin(), x.end());
    out.mark.push_back(m);
    out.weight.push_back(1);
    for (const auto h : linked) edges.push_back({h, node, 0.0});
  }
  std::partial_sum(out.present_agents.begin(), out.present_agents.end(), out.present_agents.begin());
  out.adjacency = build_adjacency(out.weight.size(), edges, true, true);
  return out;
}

inline double node_value(const CoupledGraph& g, std::uint32_t v, double vmax) {
  return g.mark[v] < 0.0 ? -1.0 : g.mark[v] * vmax;
}

}  // namespace detail

/// Processes one coupled replication incrementally in mark order.
inline RepOutcome coupled_replication(const SweepConfig& cfg, double side, std::uint64_t rep_seed) {
  const auto g = detail::build_coupled(cfg, side, rep_seed);
  const std::size_t n = g.weight.size();
  const std::size_t ngrid = cfg.grid.size();
  const double vmax = cfg.grid.back();
  const auto dim = static_cast<std::size_t>(cfg.dim);

  std::vector<std::uint32_t> growing;
  for (std::uint32_t v = 0; v < n; ++v)
    if (g.mark[v] >= 0.0) growing.push_back(v);
  std::sort(growing.begin(), growing.end(), [&](std::uint32_t a, std::uint32_t b) {
    return g.mark[a] < g.mark[b] || (g.mark[a] == g.mark[b] && a < b);
  });

  WrappingUnionFind uf(n, cfg.dim, side);
  std::vector<std::uint8_t> present(n, 0);
  std::uint32_t largest = 0;
  for (std::uint32_t v = 0; v < n; ++v) {
    uf.set_weight(v, g.weight[v]);
    if (g.mark[v] < 0.0) {
      present[v] = 1;
      largest = std::max(largest, g.weight[v]);
    }
  }

  RepOutcome out;
  out.percolates.assign(ngrid, 0);
  out.largest_fraction.assign(ngrid, 0.0);
  double d[8];
  auto add = [&](std::uint32_t v) {
    present[v] = 1;
    largest = std::max(largest, uf.component_weight(v));
    const std::span<const double> pv(g.positions.data() + v * dim, dim);
    for (const auto nb : g.adjacency[v]) {
      if (!present[nb]) continue;
      detail::delta(g.window, pv, {g.positions.data() + nb * dim, dim}, d);
      if (uf.unite(v, nb, {d, dim}) && std::isinf(out.critical_value))
        out.critical_value = detail::node_value(g, v, vmax);
      largest = std::max(largest, uf.component_weight(v));
    }
  };

  std::size_t next = 0;
  for (std::size_t k = 0; k < ngrid; ++k) {
    while (next < growing.size() && g.mark[growing[next]] * vmax <= cfg.grid[k]) add(growing[next++]);
    const auto agents = g.present_agents[k];
    // Isolated agents were not stored; any present agent is a component of size >= 1.
    const std::uint32_t top = std::max<std::uint32_t>(largest, agents > 0 ? 1 : 0);
    out.largest_fraction[k] = agents > 0 ? static_cast<double>(top) / static_cast<double>(agents) : 0.0;
    out.percolates[k] = cfg.criterion == Criterion::wrap
                            ? static_cast<std::uint8_t>(uf.any_wrapped())
                            : static_cast<std::uint8_t>(agents > 0 && out.largest_fraction[k] >= cfg.fraction_threshold);
  }
  return out;
}

/// Rebuilds the coupled configuration at one grid value from scratch; used to
/// check the incremental pass.
inline PercOutcome coupled_direct(const SweepConfig& cfg, double side, std::uint64_t rep_seed,
                                  std::size_t grid_index) {
  const auto g = detail::build_coupled(cfg, side, rep_seed, grid_index);
  const std::size_t n = g.weight.size();
  const auto dim = static_cast<std::size_t>(cfg.dim);
  WrappingUnionFind uf(n, cfg.dim, side);
  for (std::uint32_t v = 0; v < n; ++v) uf.set_weight(v, g.weight[v]);
  double d[8];
  for (std::uint32_t v = 0; v < n; ++v)
    for (const auto nb : g.adjacency[v]) {
      if (nb <= v) continue;
      detail::delta(g.window, {g.positions.data() + v * dim, dim}, {g.positions.data() + nb * dim, dim}, d);
      uf.unite(v, nb, {d, dim});
    }
  // present_agents counts every agent, including dropped isolated ones.
  std::size_t agents = 0;
  for (std::size_t k = 0; k <= grid_index; ++k) agents = g.present_agents[k];
  PercOutcome out;
  out.criterion = cfg.criterion;
  out.window = g.window;
  out.seed = rep_seed;
  out.wraps = uf.any_wrapped();
  if (agents == 0) {
    out.indeterminate = true;
    return out;
  }
  std::uint32_t largest = 1;
  for (std::uint32_t v = 0; v < n; ++v) largest = std::max(largest, uf.component_weight(v));
  out.largest_component_agent_fraction = static_cast<double>(largest) / static_cast<double>(agents);
  out.percolates = cfg.criterion == Criterion::wrap
                       ? out.wraps
                       : out.largest_component_agent_fraction >= cfg.fraction_threshold;
  return out;
}

struct SweepCurve {
  double side = 0.0;
  std::vector<std::size_t> successes;  // per grid point
  std::vector<double> probability;
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  std::vector<double> critical_values;  // per replication (wrap criterion)
  std::vector<std::vector<std::uint8_t>> outcomes;  // per replication, per grid point
};

struct Crossing {
  double small_side = 0.0;
  double large_side = 0.0;
  double estimate = std::numeric_limits<double>::quiet_NaN();
  bool censored = true;
};

struct SweepResult {
  SweepConfig config;
  std::string parameter;  // "lambda" or "mu"
  std::vector<SweepCurve> curves;  // one per window side
  double threshold_estimate = std::numeric_limits<double>::quiet_NaN();
  std::pair<double, double> threshold_ci{std::numeric_limits<double>::quiet_NaN(),
                                         std::numeric_limits<double>::quiet_NaN()};
  bool censored = true;
  std::size_t bootstrap_censored = 0;
  std::vector<Crossing> pair_crossings;  // consecutive window sizes
};

namespace detail {

/// Evaluation points: the grid, refined for the wrap criterion where per-rep
/// critical values give P_L(v) at any v.
inline std::vector<double> evaluation_points(const SweepConfig& cfg) {
  if (cfg.criterion != Criterion::wrap || cfg.refine <= 1) return cfg.grid;
  std::vector<double> pts;
  for (std::size_t i = 0; i + 1 < cfg.grid.size(); ++i)
    for (std::size_t j = 0; j < cfg.refine; ++j)
      pts.push_back(cfg.grid[i] + (cfg.grid[i + 1] - cfg.grid[i]) * static_cast<double>(j) /
                                      static_cast<double>(cfg.refine));
  pts.push_back(cfg.grid.back());
  return pts;
}

/// P_L at the evaluation points for the replications listed in `sample`.
inline std::vector<double> curve_at(const SweepConfig& cfg, const SweepCurve& c,
                                    const std::vector<double>& pts,
                                    const std::vector<std::uint32_t>& sample) {
  std::vector<double> p(pts.size(), 0.0);
  const double n = static_cast<double>(sample.size());
  if (cfg.criterion == Criterion::wrap) {
    std::vector<double> crit(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) crit[i] = c.critical_values[sample[i]];
    std::sort(crit.begin(), crit.end());
    for (std::size_t k = 0; k < pts.size(); ++k)
      p[k] = static_cast<double>(std::upper_bound(crit.begin(), crit.end(), pts[k]) - crit.begin()) / n;
  } else {
    for (const auto r : sample)
      for (std::size_t k = 0; k < pts.size(); ++k) p[k] += c.outcomes[r][k];
    for (auto& v : p) v /= n;
  }
  return p;
}

/// Median of the sign changes of P_large - P_small where both curves are
/// away from 0 and 1. NaN when the curves do not cross.
inline double find_crossing(const std::vector<double>& pts, const std::vector<double>& small,
                            const std::vector<double>& large) {
  std::vector<double> roots;
  double prev_v = 0.0, prev_d = 0.0;
  bool have_prev = false;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double mean = 0.5 * (small[k] + large[k]);
    if (mean <= 0.02 || mean >= 0.98) continue;
    const double d = large[k] - small[k];
    if (d == 0.0) continue;
    if (have_prev && (prev_d < 0.0) != (d < 0.0))
      roots.push_back(prev_v + (pts[k] - prev_v) * prev_d / (prev_d - d));
    prev_v = pts[k];
    prev_d = d;
    have_prev = true;
  }
  if (roots.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(roots.begin(), roots.end());
  const std::size_t m = roots.size();
  return m % 2 ? roots[m / 2] : 0.5 * (roots[m / 2 - 1] + roots[m / 2]);
}

inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

}  // namespace detail

/// Crossing between the curves at window indices i < j.
inline Crossing crossing_between(const SweepResult& r, std::size_t i, std::size_t j) {
  const auto pts = detail::evaluation_points(r.config);
  std::vector<std::uint32_t> all(r.config.reps);
  std::iota(all.begin(), all.end(), 0u);
  const auto ps = detail::curve_at(r.config, r.curves[i], pts, all);
  const auto pl = detail::curve_at(r.config, r.curves[j], pts, all);
  Crossing c;
  c.small_side = r.curves[i].side;
  c.large_side = r.curves[j].side;
  c.estimate = detail::find_crossing(pts, ps, pl);
  c.censored = std::isnan(c.estimate);
  return c;
}

inline SweepResult sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::size_t nl = cfg.sides.size();
  const std::size_t ngrid = cfg.grid.size();
  std::vector<RepOutcome> outcomes(nl * cfg.reps);
  parallel_for(nl * cfg.reps, cfg.workers, [&](std::size_t job) {
    const std::size_t li = job / cfg.reps;
    const std::size_t rep = job % cfg.reps;
    // Grid points share a seed: that is the coupling.
    const auto rep_seed = derive_seed(derive_seed(cfg.seed, li + 1), rep);
    outcomes[job] = coupled_replication(cfg, cfg.sides[li], rep_seed);
  });

  SweepResult result;
  result.config = cfg;
  result.parameter = cfg.graph == GraphKind::unipartite ? "lambda" : to_string(cfg.swept);
  const auto pts = detail::evaluation_points(cfg);
  for (std::size_t li = 0; li < nl; ++li) {
    SweepCurve c;
    c.side = cfg.sides[li];
    c.successes.assign(ngrid, 0);
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      const auto& o = outcomes[li * cfg.reps + rep];
      for (std::size_t k = 0; k < ngrid; ++k) c.successes[k] += o.percolates[k];
      c.critical_values.push_back(o.critical_value);
      if (cfg.criterion == Criterion::fraction) c.outcomes.push_back(o.percolates);
    }
    for (std::size_t k = 0; k < ngrid; ++k) {
      c.probability.push_back(static_cast<double>(c.successes[k]) / static_cast<double>(cfg.reps));
      const auto [lo, hi] = wilson_interval(c.successes[k], cfg.reps);
      c.ci_lo.push_back(lo);
      c.ci_hi.push_back(hi);
    }
    result.curves.push_back(std::move(c));
  }
  for (std::size_t li = 0; li + 1 < nl; ++li) result.pair_crossings.push_back(crossing_between(result, li, li + 1));

  const auto& last = result.pair_crossings.back();
  result.threshold_estimate = last.estimate;
  result.censored = last.censored;

  // Bootstrap over replications, independently per window size.
  const auto& small = result.curves[nl - 2];
  const auto& large = result.curves[nl - 1];
  CounterEngine engine(cfg.seed, StreamTag::bootstrap);
  std::vector<double> boot;
  std::vector<std::uint32_t> sa(cfg.reps), sb(cfg.reps);
  for (std::size_t b = 0; b < cfg.bootstrap; ++b) {
    for (auto& v : sa) v = static_cast<std::uint32_t>(engine() % cfg.reps);
    for (auto& v : sb) v = static_cast<std::uint32_t>(engine() % cfg.reps);
    const double x = detail::find_crossing(pts, detail::curve_at(cfg, small, pts, sa),
                                           detail::curve_at(cfg, large, pts, sb));
    if (std::isnan(x))
      ++result.bootstrap_censored;
    else
      boot.push_back(x);
  }
  if (!boot.empty()) result.threshold_ci = {detail::quantile(boot, 0.025), detail::quantile(boot, 0.975)};
  return result;
}

/// Critical density of the unipartite graph G(Phi, f).
inline SweepResult estimate_zeta(const ConnectionSpec& spec, int dim, std::vector<double> grid,
                                 std::vector<double> sides, std::size_t reps, std::uint64_t seed,
                                 unsigned workers = 1, Criterion criterion = Criterion::wrap) {
  SweepConfig cfg;
  cfg.graph = GraphKind::unipartite;
  cfg.swept = SweepParam::lambda;
  cfg.spec = spec;
  cfg.dim = dim;
  cfg.grid = std::move(grid);
  cfg.sides = std::move(sides);
  cfg.reps = reps;
  cfg.seed = seed;
  cfg.criterion = criterion;
  cfg.workers = workers;
  return sweep(cfg);
}

/// Two estimates agree when their CIs overlap.
inline bool intervals_overlap(std::pair<double, double> a, std::pair<double, double> b) {
  return a.first <= b.second && b.first <= a.second;
}

struct BoundsReport {
  std::vector<std::string> violations;
  std::size_t points_checked = 0;
  bool ok() const { return violations.empty(); }
};

struct DispersedThreshold {
  double dispersion = 1.0;
  const SweepResult* sweep = nullptr;
};

/// Checks sweep results against the non-percolation bounds:
///  (a) lambda*mu >= (int f)^{-2} at every significantly percolating point;
///  (b) lambda + mu >= zeta_f at those points, with zeta_f's CI as slack
///      (skipped when `zeta` is null);
///  (c) thresholds do not increase as dispersion p decreases (CI overlap
///      counts as agreement).
/// A point "significantly percolates" when its Wilson lower bound at the
/// largest window exceeds 1/2.
inline BoundsReport check_bounds(const std::vector<const SweepResult*>& sweeps,
                                 const ConnectionSpec& spec, int dim,
                                 const SweepResult* zeta = nullptr,
                                 std::vector<DispersedThreshold> dispersed = {}) {
  BoundsReport report;
  const double gw = theory::gw_lower_bound(spec, dim).value;
  for (const auto* s : sweeps) {
    if (s->config.graph != GraphKind::bipartite) continue;
    const auto& curve = s->curves.back();
    for (std::size_t k = 0; k < s->config.grid.size(); ++k) {
      if (!(curve.ci_lo[k] > 0.5)) continue;
      ++report.points_checked;
      const double lambda = s->config.swept == SweepParam::lambda ? s->config.grid[k] : s->config.fixed_value;
      const double mu = s->config.swept == SweepParam::mu ? s->config.grid[k] : s->config.fixed_value;
      std::ostringstream where;
      where << "(lambda=" << lambda << ", mu=" << mu << ", L=" << curve.side << ", P in ["
            << curve.ci_lo[k] << ", " << curve.ci_hi[k] << "])";
      if (lambda * mu < gw)
        report.violations.push_back("percolating point below branching bound " + std::to_string(gw) +
                                    " " + where.str());
      if (zeta && !zeta->censored && lambda + mu < zeta->threshold_ci.first)
        report.violations.push_back("percolating point with lambda+mu below zeta_f CI " + where.str());
    }
  }
  std::sort(dispersed.begin(), dispersed.end(),
            [](const auto& a, const auto& b) { return a.dispersion < b.dispersion; });
  for (std::size_t i = 0; i + 1 < dispersed.size(); ++i) {
    const auto* lo_p = dispersed[i].sweep;
    const auto* hi_p = dispersed[i + 1].sweep;
    if (lo_p->censored || hi_p->censored) {
      report.violations.push_back("censored threshold in dispersion comparison");
      continue;
    }
    if (lo_p->threshold_ci.first > hi_p->threshold_ci.second) {
      std::ostringstream os;
      os << "threshold at p=" << dispersed[i].dispersion << " (" << lo_p->threshold_estimate
         << ") exceeds threshold at p=" << dispersed[i + 1].dispersion << " ("
         << hi_p->threshold_estimate << ") beyond CIs";
      report.violations.push_back(os.str());
    }
  }
  return report;
}

}  // namespace rbg
