#pragma once

// Result files and graph dumps. Writes go to a temporary sibling file that is
// renamed into place, so readers never observe a partial file.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "rbg/connection.hpp"
#include "rbg/graph.hpp"
#include "rbg/percolation.hpp"
#include "rbg/point_process.hpp"

namespace rbg {

inline constexpr const char* kVersion = "0.1.0";

inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::filesystem::create_directories(dir);
  auto tmp = dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

inline nlohmann::json to_json(const Window& w) {
  return {{"dim", w.dim}, {"side", w.side}, {"boundary", to_string(w.boundary)}};
}

inline nlohmann::json to_json(const ConnectionSpec& s) {
  return {{"family", to_string(s.family)}, {"theta", s.theta}, {"amplitude", s.amplitude},
          {"dispersion", s.dispersion}, {"text", to_string(s)}};
}

/// Doubles printed with round-trip precision.
inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct GraphDump {
  std::string edges_csv;
  nlohmann::json header;
};

/// Edge list plus a header with window, spec, seed and counts. Point
/// coordinates are included in the header for plotting.
inline GraphDump dump_graph(const RbgGraph& g, const ConnectionSpec& spec, std::uint64_t seed) {
  GraphDump d;
  std::ostringstream os;
  os << "agent_idx,hub_idx,distance\n";
  for (const auto& e : g.edges) os << e.first << ',' << e.second << ',' << fmt(e.distance) << '\n';
  d.edges_csv = os.str();
  d.header = {{"window", to_json(g.agents.window())},
              {"spec", to_json(spec)},
              {"seed", seed},
              {"counts", {{"agents", g.agents.size()}, {"hubs", g.hubs.size()}, {"edges", g.edges.size()}}},
              {"agents", g.agents.coords()},
              {"hubs", g.hubs.coords()},
              {"version", kVersion}};
  return d;
}

inline std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "param,value,L,reps,perc_prob,ci_lo,ci_hi\n";
  for (const auto& c : r.curves)
    for (std::size_t k = 0; k < r.config.grid.size(); ++k)
      os << r.parameter << ',' << fmt(r.config.grid[k]) << ',' << fmt(c.side) << ',' << r.config.reps
         << ',' << fmt(c.probability[k]) << ',' << fmt(c.ci_lo[k]) << ',' << fmt(c.ci_hi[k]) << '\n';
  return os.str();
}

inline nlohmann::json nan_to_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json sweep_json(const SweepResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : r.curves)
    for (std::size_t k = 0; k < r.config.grid.size(); ++k)
      rows.push_back({{"param", r.parameter}, {"value", r.config.grid[k]}, {"L", c.side},
                      {"reps", r.config.reps}, {"perc_prob", c.probability[k]},
                      {"ci_lo", c.ci_lo[k]}, {"ci_hi", c.ci_hi[k]}});
  nlohmann::json crossings = nlohmann::json::array();
  for (const auto& x : r.pair_crossings)
    crossings.push_back({{"L_small", x.small_side}, {"L_large", x.large_side},
                         {"estimate", nan_to_null(x.estimate)}, {"censored", x.censored}});
  return {{"threshold_estimate", nan_to_null(r.threshold_estimate)},
          {"threshold_ci", {nan_to_null(r.threshold_ci.first), nan_to_null(r.threshold_ci.second)}},
          {"censored", r.censored},
          {"bootstrap_censored", r.bootstrap_censored},
          {"criterion", to_string(r.config.criterion)},
          {"graph", r.config.graph == GraphKind::bipartite ? "bipartite" : "unipartite"},
          {"param", r.parameter},
          {"pair_crossings", crossings},
          {"rows", rows}};
}

}  // namespace rbg
