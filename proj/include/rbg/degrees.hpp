#pragma once

// Monte Carlo statistics of the typical agent: its hub degree, the number N
// of agent-hub-agent paths leaving it and the number M of distinct agents
// those paths reach. The typical agent is a Palm point at the origin.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "rbg/connection.hpp"
#include "rbg/graph.hpp"
#include "rbg/parallel.hpp"
#include "rbg/point_process.hpp"
#include "rbg/spatial_grid.hpp"
#include "rbg/stats.hpp"

namespace rbg {

enum class Observable { hub_degree, M, N, connection_distance };

inline const char* to_string(Observable o) {
  switch (o) {
    case Observable::hub_degree: return "hub_degree";
    case Observable::M: return "M";
    case Observable::N: return "N";
    case Observable::connection_distance: return "connection_distance";
  }
  return "?";
}

struct DegreeParams {
  double lambda = 0.0;
  double mu = 0.0;
  ConnectionSpec spec;
  Window window;
};

struct DegreeStats {
  Observable observable = Observable::hub_degree;
  DegreeParams params;
  std::size_t replications = 0;
  double mean = 0.0;
  double variance = 0.0;
  double ci_half_width_95 = 0.0;
  /// 95% half-width for the variance estimate itself.
  double variance_ci_half_width_95 = 0.0;
  /// Frequency of each integer value (integer observables only).
  std::vector<std::uint64_t> histogram;
  /// Effective support does not fit the window as required; results are biased.
  bool window_too_small = false;
};

/// Replication window for degree experiments: max(1, factor * support radius).
inline Window default_degree_window(const ConnectionSpec& spec, int dim, double factor = 10.0,
                                    Boundary boundary = Boundary::torus) {
  const double radius = effective_support(spec, dim, kEdgeEpsilon).radius;
  return Window{dim, std::max(1.0, factor * radius), boundary};
}

namespace detail {

struct Histogram {
  std::vector<std::uint64_t> counts;
  void add(std::uint64_t v) {
    if (v >= counts.size()) counts.resize(v + 1, 0);
    ++counts[v];
  }
  void merge(const Histogram& o) {
    if (o.counts.size() > counts.size()) counts.resize(o.counts.size(), 0);
    for (std::size_t i = 0; i < o.counts.size(); ++i) counts[i] += o.counts[i];
  }
};

struct TypicalAccumulator {
  RunningStats hub_degree, m, n, distance;
  Histogram hub_hist, m_hist, n_hist;
  std::uint64_t dominance_violations = 0;  // replications with N < M

  void merge(const TypicalAccumulator& o) {
    hub_degree.merge(o.hub_degree);
    m.merge(o.m);
    n.merge(o.n);
    distance.merge(o.distance);
    hub_hist.merge(o.hub_hist);
    m_hist.merge(o.m_hist);
    n_hist.merge(o.n_hist);
    dominance_violations += o.dominance_violations;
  }
};

inline DegreeStats make_stats(Observable obs, const DegreeParams& params, const RunningStats& s,
                              const Histogram* hist, bool too_small) {
  DegreeStats out;
  out.observable = obs;
  out.params = params;
  out.replications = s.count();
  out.mean = s.mean();
  out.variance = s.variance();
  out.ci_half_width_95 = s.ci_half_width_95();
  out.variance_ci_half_width_95 = s.variance_ci_half_width_95();
  if (hist) out.histogram = hist->counts;
  out.window_too_small = too_small;
  return out;
}

struct ReplicationSeeds {
  std::uint64_t hubs, agents, edges;
};

inline ReplicationSeeds replication_seeds(std::uint64_t seed, std::size_t rep) {
  const auto s = derive_seed(seed, rep);
  return {derive_seed(s, 1), derive_seed(s, 2), derive_seed(s, 3)};
}

inline void check_reps(std::size_t reps) {
  if (reps < 2) throw std::invalid_argument("at least two replications are required");
}

}  // namespace detail

/// Degree of a Palm agent at the origin against hubs of intensity mu. Only
/// the hub process is sampled; lambda is recorded but does not enter.
inline DegreeStats estimate_typical_degree(double lambda, double mu, const ConnectionSpec& spec,
                                           const Window& window, std::size_t reps,
                                           std::uint64_t seed, unsigned workers = 1) {
  detail::check_reps(reps);
  const double radius = detail::truncation_radius(spec, window, kEdgeEpsilon);
  const double r2 = radius * radius;
  const std::vector<double> origin(static_cast<std::size_t>(window.dim), 0.0);
  const auto acc = parallel_accumulate<detail::TypicalAccumulator>(
      reps, workers, [&](std::size_t rep, detail::TypicalAccumulator& a) {
        const auto seeds = detail::replication_seeds(seed, rep);
        const PoissonSampler hubs(mu, window, seeds.hubs, PointKind::hub);
        std::vector<double> y(static_cast<std::size_t>(window.dim));
        std::uint64_t degree = 0;
        for (std::size_t j = 0; j < hubs.count(); ++j) {
          hubs.point(j, y);
          const double d2 = squared_distance(window, origin, y);
          if (d2 > r2) continue;
          if (bipartite_edge(seeds.edges, 0, static_cast<std::uint32_t>(j),
                             evaluate(spec, std::sqrt(d2), window.dim)))
            ++degree;
        }
        a.hub_degree.push(static_cast<double>(degree));
        a.hub_hist.add(degree);
      });
  return detail::make_stats(Observable::hub_degree, {lambda, mu, spec, window}, acc.hub_degree,
                            &acc.hub_hist, radius > window.half());
}

/// Per-replication values for the typical agent.
struct TypicalSample {
  std::uint64_t hub_degree = 0;
  double connection_distance = 0.0;  // sum of distances to its hubs
  TwoHopCounts two_hop;
};

/// Evaluates one replication locally: only hubs adjacent to the origin and
/// agents adjacent to those hubs are examined. Edge draws use the same pair
/// keys as build_rbg on (palm_condition(agents), hubs), so the result equals
/// agent_neighbors_via_hubs(build_rbg(...), 0).
inline TypicalSample typical_agent_sample(const PointSet& palm_agents, const PointSet& hubs,
                                          const ConnectionSpec& spec, std::uint64_t edge_seed) {
  const Window& w = palm_agents.window();
  const double radius = detail::truncation_radius(spec, w, kEdgeEpsilon);
  const double r2 = radius * radius;
  const auto origin = palm_agents.point(0);

  TypicalSample out;
  std::vector<std::uint32_t> linked_hubs;
  for (std::size_t j = 0; j < hubs.size(); ++j) {
    const double d2 = squared_distance(w, origin, hubs.point(j));
    if (d2 > r2) continue;
    const double d = std::sqrt(d2);
    if (bipartite_edge(edge_seed, 0, static_cast<std::uint32_t>(j), evaluate(spec, d, w.dim))) {
      linked_hubs.push_back(static_cast<std::uint32_t>(j));
      out.connection_distance += d;
    }
  }
  out.hub_degree = linked_hubs.size();
  if (linked_hubs.empty() || palm_agents.size() < 2) return out;

  const CellGrid grid(w, radius, palm_agents.coords());
  std::vector<std::uint32_t> reached;
  for (const auto h : linked_hubs) {
    const auto y = hubs.point(h);
    grid.for_each_candidate(y, [&](std::uint32_t a) {
      if (a == 0) return;
      const double d2 = squared_distance(w, palm_agents.point(a), y);
      if (d2 > r2) return;
      if (bipartite_edge(edge_seed, a, h, evaluate(spec, std::sqrt(d2), w.dim)))
        reached.push_back(a);
    });
  }
  out.two_hop.paths = reached.size();
  std::sort(reached.begin(), reached.end());
  out.two_hop.distinct_agents =
      static_cast<std::uint64_t>(std::unique(reached.begin(), reached.end()) - reached.begin());
  return out;
}

/// Same result as typical_agent_sample(palm_condition(agents.materialize()),
/// hubs.materialize(), ...) without storing either process. Sampler agent i
/// is Palm agent i + 1.
inline TypicalSample typical_agent_sample(const PoissonSampler& agents, const PoissonSampler& hubs,
                                          const ConnectionSpec& spec, std::uint64_t edge_seed) {
  const Window& w = agents.window();
  const auto dim = static_cast<std::size_t>(w.dim);
  const double radius = detail::truncation_radius(spec, w, kEdgeEpsilon);
  const double r2 = radius * radius;
  const std::vector<double> origin(dim, 0.0);

  TypicalSample out;
  std::vector<std::uint32_t> linked;
  std::vector<double> linked_pos;
  std::vector<double> y(dim);
  for (std::size_t j = 0; j < hubs.count(); ++j) {
    hubs.point(j, y);
    const double d2 = squared_distance(w, origin, y);
    if (d2 > r2) continue;
    const double d = std::sqrt(d2);
    if (bipartite_edge(edge_seed, 0, static_cast<std::uint32_t>(j), evaluate(spec, d, w.dim))) {
      linked.push_back(static_cast<std::uint32_t>(j));
      linked_pos.insert(linked_pos.end(), y.begin(), y.end());
      out.connection_distance += d;
    }
  }
  out.hub_degree = linked.size();
  if (linked.empty()) return out;

  // Agents farther than 2R from the origin cannot reach a linked hub.
  const double reach2 = 4.0 * r2;
  std::vector<double> x(dim);
  std::vector<std::uint32_t> reached;
  for (std::size_t i = 0; i < agents.count(); ++i) {
    agents.point(i, x);
    if (squared_distance(w, origin, x) > reach2) continue;
    const auto palm_index = static_cast<std::uint32_t>(i + 1);
    for (std::size_t k = 0; k < linked.size(); ++k) {
      const double d2 = squared_distance(w, x, {linked_pos.data() + k * dim, dim});
      if (d2 > r2) continue;
      if (bipartite_edge(edge_seed, palm_index, linked[k], evaluate(spec, std::sqrt(d2), w.dim)))
        reached.push_back(palm_index);
    }
  }
  out.two_hop.paths = reached.size();
  std::sort(reached.begin(), reached.end());
  out.two_hop.distinct_agents =
      static_cast<std::uint64_t>(std::unique(reached.begin(), reached.end()) - reached.begin());
  return out;
}

struct TypicalAgentStats {
  DegreeStats hub_degree;
  DegreeStats m;
  DegreeStats n;
  DegreeStats connection_distance;
  /// Replications where N < M; structurally zero.
  std::uint64_t dominance_violations = 0;
};

/// Paired estimates of M and N (plus hub degree and summed connection
/// distance) from the same realizations.
inline TypicalAgentStats estimate_MN(double lambda, double mu, const ConnectionSpec& spec,
                                     const Window& window, std::size_t reps, std::uint64_t seed,
                                     unsigned workers = 1) {
  detail::check_reps(reps);
  const double radius = detail::truncation_radius(spec, window, kEdgeEpsilon);
  const auto acc = parallel_accumulate<detail::TypicalAccumulator>(
      reps, workers, [&](std::size_t rep, detail::TypicalAccumulator& a) {
        const auto seeds = detail::replication_seeds(seed, rep);
        const PoissonSampler hubs(mu, window, seeds.hubs, PointKind::hub);
        const PoissonSampler agents(lambda, window, seeds.agents, PointKind::agent);
        const auto s = typical_agent_sample(agents, hubs, spec, seeds.edges);
        a.hub_degree.push(static_cast<double>(s.hub_degree));
        a.hub_hist.add(s.hub_degree);
        a.distance.push(s.connection_distance);
        a.m.push(static_cast<double>(s.two_hop.distinct_agents));
        a.n.push(static_cast<double>(s.two_hop.paths));
        a.m_hist.add(s.two_hop.distinct_agents);
        a.n_hist.add(s.two_hop.paths);
        if (s.two_hop.paths < s.two_hop.distinct_agents) ++a.dominance_violations;
      });
  // Two-hop reach is 2R; the window must hold it on both sides of the origin.
  const bool too_small = 4.0 * radius > window.side;
  const DegreeParams params{lambda, mu, spec, window};
  return {detail::make_stats(Observable::hub_degree, params, acc.hub_degree, &acc.hub_hist, too_small),
          detail::make_stats(Observable::M, params, acc.m, &acc.m_hist, too_small),
          detail::make_stats(Observable::N, params, acc.n, &acc.n_hist, too_small),
          detail::make_stats(Observable::connection_distance, params, acc.distance, nullptr, too_small),
          acc.dominance_violations};
}

/// Mean degree of the typical hub as the ratio (total edges)/(total hubs)
/// over whole-window realizations; the CI uses the delta method.
struct HubDegreeEstimate {
  double mean = 0.0;
  double ci_half_width_95 = 0.0;
  std::size_t replications = 0;
  std::uint64_t hubs_observed = 0;
};

inline HubDegreeEstimate estimate_hub_degree(double lambda, double mu, const ConnectionSpec& spec,
                                             const Window& window, std::size_t reps,
                                             std::uint64_t seed, unsigned workers = 1) {
  detail::check_reps(reps);
  struct Acc {
    double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    void merge(const Acc& o) {
      n += o.n; sx += o.sx; sy += o.sy; sxx += o.sxx; syy += o.syy; sxy += o.sxy;
    }
  };
  const auto acc = parallel_accumulate<Acc>(reps, workers, [&](std::size_t rep, Acc& a) {
    const auto seeds = detail::replication_seeds(seed, rep);
    auto g = build_rbg(sample_ppp(lambda, window, seeds.agents, PointKind::agent),
                       sample_ppp(mu, window, seeds.hubs, PointKind::hub), spec, seeds.edges);
    const double x = static_cast<double>(g.hubs.size());
    const double y = static_cast<double>(g.edges.size());
    a.n += 1; a.sx += x; a.sy += y; a.sxx += x * x; a.syy += y * y; a.sxy += x * y;
  });
  HubDegreeEstimate out;
  out.replications = reps;
  out.hubs_observed = static_cast<std::uint64_t>(acc.sx);
  if (acc.sx == 0) return out;
  const double ratio = acc.sy / acc.sx;
  const double xbar = acc.sx / acc.n;
  // Sample variance of y - ratio * x.
  const double resid_ss = acc.syy - 2 * ratio * acc.sxy + ratio * ratio * acc.sxx;
  const double var = resid_ss / (acc.n - 1);
  out.mean = ratio;
  out.ci_half_width_95 = kZ95 * std::sqrt(std::max(var, 0.0) / acc.n) / xbar;
  return out;
}

inline std::string degree_csv_header() {
  return "observable,lambda,mu,family,theta,p,d,L,reps,mean,variance,ci95";
}

inline std::string family_label(const ConnectionSpec& spec) {
  if (spec.family != Family::p_boolean) return to_string(spec.family);
  std::ostringstream os;
  os.precision(17);
  os << "pboolean:" << spec.amplitude;
  return os.str();
}

inline std::string to_csv_row(const DegreeStats& s) {
  std::ostringstream os;
  os.precision(17);
  os << to_string(s.observable) << ',' << s.params.lambda << ',' << s.params.mu << ','
     << family_label(s.params.spec) << ',' << s.params.spec.theta << ','
     << s.params.spec.dispersion << ',' << s.params.window.dim << ',' << s.params.window.side
     << ',' << s.replications << ',' << s.mean << ',' << s.variance << ','
     << s.ci_half_width_95;
  return os.str();
}

}  // namespace rbg
