// Command-line front end: degrees, theory, percolate, zeta and figs.
//
// Exit status 0 on success, 1 when an experiment fails (overflow caps, censored
// thresholds under --strict), 2 for configuration errors. Errors are reported
// on stderr as a JSON object.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rbg/rbg.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ExperimentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::optional<double> lambda, mu;
  std::string conn;
  int d = 2;
  std::string sides;  // one value or a comma list
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  unsigned workers = rbg::default_workers();
  std::string out;
  std::string format;  // empty: json for theory, csv otherwise
  std::string criterion = "wrap";
  double fraction_threshold = rbg::kDefaultFractionThreshold;
  std::string fix;
  std::string grid;
  std::string boundary = "torus";
  std::size_t bootstrap = 500;
  bool strict = false;
  std::string figure;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string("invalid ") + what + " '" + text + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string("empty ") + what);
  return out;
}

/// lo:hi:n, n evenly spaced values including both ends.
std::vector<double> parse_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = text.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) throw ConfigError("grid must be lo:hi:n");
  double lo = 0, hi = 0;
  long n = 0;
  try {
    std::size_t u1 = 0, u2 = 0, u3 = 0;
    const auto s1 = text.substr(0, a), s2 = text.substr(a + 1, b - a - 1), s3 = text.substr(b + 1);
    lo = std::stod(s1, &u1);
    hi = std::stod(s2, &u2);
    n = std::stol(s3, &u3);
    if (u1 != s1.size() || u2 != s2.size() || u3 != s3.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw ConfigError("grid must be lo:hi:n, got '" + text + "'");
  }
  if (n < 2 || !(hi > lo) || lo < 0) throw ConfigError("grid needs 0 <= lo < hi and n >= 2");
  std::vector<double> out;
  for (long i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

template <class T>
T require(const std::optional<T>& v, const char* flag) {
  if (!v) throw ConfigError(std::string("missing required option ") + flag);
  return *v;
}

rbg::ConnectionSpec require_spec(const Options& o) {
  if (o.conn.empty()) throw ConfigError("missing required option --conn");
  try {
    return rbg::parse_connection(o.conn);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void check_dim(int d) {
  if (d < 1 || d > 8) throw ConfigError("--d must be between 1 and 8");
}

rbg::Criterion parse_criterion(const std::string& s) {
  if (s == "wrap") return rbg::Criterion::wrap;
  if (s == "fraction") return rbg::Criterion::fraction;
  throw ConfigError("criterion must be wrap or fraction");
}

json config_echo(const Options& o, const std::string& subcommand) {
  json j = {{"subcommand", subcommand}, {"d", o.d}, {"workers", o.workers}, {"format", o.format}};
  if (o.lambda) j["lambda"] = *o.lambda;
  if (o.mu) j["mu"] = *o.mu;
  if (!o.conn.empty()) j["conn"] = o.conn;
  if (!o.sides.empty()) j["L"] = o.sides;
  if (o.reps) j["reps"] = *o.reps;
  if (o.seed) j["seed"] = *o.seed;
  if (!o.grid.empty()) j["grid"] = o.grid;
  if (!o.fix.empty()) j["fix"] = o.fix;
  if (!o.figure.empty()) j["figure"] = o.figure;
  j["criterion"] = o.criterion;
  return j;
}

void emit(const Options& o, const std::string& text, const fs::path& path) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    std::cout.flush();
    return;
  }
  rbg::write_file_atomic(path, text);
  (void)o;
}

// --- degrees -----------------------------------------------------------------

int run_degrees(const Options& o) {
  const double lambda = require(o.lambda, "--lambda");
  const double mu = require(o.mu, "--mu");
  const auto spec = require_spec(o);
  const auto reps = require(o.reps, "--reps");
  const auto seed = require(o.seed, "--seed");
  check_dim(o.d);
  if (lambda < 0 || mu < 0) throw ConfigError("intensities must be non-negative");
  if (reps < 2) throw ConfigError("--reps must be at least 2");
  if (o.boundary != "torus" && o.boundary != "open") throw ConfigError("--boundary must be torus or open");
  const auto boundary = o.boundary == "torus" ? rbg::Boundary::torus : rbg::Boundary::open;
  rbg::Window window = rbg::default_degree_window(spec, o.d, 10.0, boundary);
  if (!o.sides.empty()) {
    const auto s = parse_list(o.sides, "--L");
    if (s.size() != 1) throw ConfigError("degrees takes a single --L");
    window.side = s[0];
  }
  try {
    window.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const auto st = rbg::estimate_MN(lambda, mu, spec, window, reps, seed, o.workers);
  const std::vector<const rbg::DegreeStats*> rows = {&st.hub_degree, &st.m, &st.n, &st.connection_distance};
  if (o.format == "csv") {
    std::ostringstream os;
    os << rbg::degree_csv_header() << '\n';
    for (const auto* r : rows) os << rbg::to_csv_row(*r) << '\n';
    emit(o, os.str(), o.out);
  } else {
    json arr = json::array();
    for (const auto* r : rows)
      arr.push_back({{"observable", rbg::to_string(r->observable)}, {"lambda", lambda}, {"mu", mu},
                     {"family", rbg::family_label(spec)}, {"theta", spec.theta}, {"p", spec.dispersion},
                     {"d", o.d}, {"L", window.side}, {"reps", r->replications}, {"mean", r->mean},
                     {"variance", r->variance}, {"ci95", r->ci_half_width_95},
                     {"variance_ci95", r->variance_ci_half_width_95}});
    json j = {{"rows", arr},
              {"window_too_small", st.m.window_too_small},
              {"dominance_violations", st.dominance_violations},
              {"config", config_echo(o, "degrees")},
              {"version", rbg::kVersion}};
    emit(o, j.dump(2), o.out);
  }
  if (st.m.window_too_small)
    std::cerr << "warning: window side " << window.side << " is below four support radii; estimates are biased\n";
  return 0;
}

// --- theory ------------------------------------------------------------------

int run_theory(const Options& o) {
  const double lambda = require(o.lambda, "--lambda");
  const double mu = require(o.mu, "--mu");
  const auto spec = require_spec(o);
  check_dim(o.d);
  if (lambda < 0 || mu < 0) throw ConfigError("intensities must be non-negative");

  using rbg::theory::TheoryValue;
  std::vector<TheoryValue> values = {rbg::theory::mean_typical_degree(mu, spec, o.d),
                                     rbg::theory::expected_N(lambda, mu, spec, o.d),
                                     rbg::theory::gw_lower_bound(spec, o.d)};
  if (o.d == 2) {
    values.push_back(rbg::theory::mean_connection_distance(mu, spec, o.d));
    values.push_back(rbg::theory::expected_M(lambda, mu, spec, o.d));
    // Specialised routes for the undispersed disk and exponential functions.
    if (spec.dispersion == 1.0 && spec.family == rbg::Family::boolean)
      values.push_back(rbg::theory::expected_M_disk(lambda, mu, spec.theta));
    if (spec.dispersion == 1.0 && spec.family == rbg::Family::exponential)
      values.push_back(rbg::theory::expected_M_exp(lambda, mu, spec.theta));
    values.push_back(rbg::theory::variance_N(lambda, mu, spec, o.d));
  } else {
    std::cerr << "warning: E M and V N are implemented for d = 2 only\n";
  }

  if (o.format == "csv") {
    std::ostringstream os;
    os << "quantity,value,method,error\n";
    for (const auto& v : values)
      os << v.quantity << ',' << rbg::fmt(v.value) << ',' << rbg::theory::to_string(v.method) << ','
         << rbg::fmt(v.estimated_abs_error) << '\n';
    emit(o, os.str(), o.out);
  } else {
    json arr = json::array();
    json by_name = json::object();
    for (const auto& v : values) {
      json row = {{"quantity", v.quantity}, {"value", v.value},
                  {"method", rbg::theory::to_string(v.method)}, {"error", v.estimated_abs_error}};
      arr.push_back(row);
      by_name[v.quantity] = row;
    }
    json j = {{"rows", arr}, {"values", by_name}, {"config", config_echo(o, "theory")},
              {"version", rbg::kVersion}};
    emit(o, j.dump(2), o.out);
  }
  return 0;
}

// --- percolate / zeta --------------------------------------------------------

int emit_sweep(const Options& o, const rbg::SweepResult& r, const std::string& subcommand) {
  json summary = rbg::sweep_json(r);
  summary["config"] = config_echo(o, subcommand);
  summary["version"] = rbg::kVersion;
  if (o.format == "csv") {
    emit(o, rbg::sweep_csv(r), o.out);
    if (!o.out.empty()) {
      json brief = summary;
      brief.erase("rows");
      rbg::write_file_atomic(fs::path(o.out).string() + ".summary.json", brief.dump(2));
    }
  } else {
    emit(o, summary.dump(2), o.out);
  }
  if (r.censored) {
    if (o.strict) throw ExperimentError("threshold censored: probability curves do not cross within the grid");
    std::cerr << "warning: threshold censored (curves do not cross within the grid)\n";
  }
  return 0;
}

rbg::SweepConfig common_sweep(const Options& o) {
  rbg::SweepConfig cfg;
  cfg.spec = require_spec(o);
  check_dim(o.d);
  cfg.dim = o.d;
  if (o.grid.empty()) throw ConfigError("missing required option --grid");
  cfg.grid = parse_grid(o.grid);
  if (o.sides.empty()) throw ConfigError("missing required option --L");
  cfg.sides = parse_list(o.sides, "--L");
  cfg.reps = require(o.reps, "--reps");
  cfg.seed = require(o.seed, "--seed");
  cfg.criterion = parse_criterion(o.criterion);
  cfg.fraction_threshold = o.fraction_threshold;
  cfg.bootstrap = o.bootstrap;
  cfg.workers = o.workers;
  try {
    cfg.validate();
    for (double side : cfg.sides) rbg::detail::percolation_radius(cfg.spec, rbg::Window{cfg.dim, side, rbg::Boundary::torus});
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

int run_percolate(const Options& o) {
  if (o.fix.empty()) throw ConfigError("missing required option --fix (mu=<v> or lambda=<v>)");
  const auto eq = o.fix.find('=');
  if (eq == std::string::npos) throw ConfigError("--fix must be mu=<v> or lambda=<v>");
  const auto name = o.fix.substr(0, eq);
  const auto value = parse_list(o.fix.substr(eq + 1), "--fix value");
  if (value.size() != 1 || value[0] < 0) throw ConfigError("--fix needs one non-negative value");
  auto cfg = common_sweep(o);
  cfg.graph = rbg::GraphKind::bipartite;
  if (name == "mu") cfg.swept = rbg::SweepParam::lambda;
  else if (name == "lambda") cfg.swept = rbg::SweepParam::mu;
  else throw ConfigError("--fix must name mu or lambda");
  cfg.fixed_value = value[0];
  return emit_sweep(o, rbg::sweep(cfg), "percolate");
}

int run_zeta(const Options& o) {
  auto cfg = common_sweep(o);
  cfg.graph = rbg::GraphKind::unipartite;
  cfg.swept = rbg::SweepParam::lambda;
  return emit_sweep(o, rbg::sweep(cfg), "zeta");
}

// --- figs --------------------------------------------------------------------

fs::path output_dir(const Options& o) {
  fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);
  return dir;
}

int run_fig1(const Options& o) {
  const auto seed = require(o.seed, "--seed");
  const auto dir = output_dir(o);
  const double theta = 0.1262;
  const std::pair<const char*, rbg::ConnectionSpec> scenarios[] = {
      {"f1", rbg::ConnectionSpec::boolean(theta)}, {"f2", rbg::ConnectionSpec::exponential(theta)}};
  std::uint64_t k = 0;
  for (const auto& [name, spec] : scenarios) {
    // The exponential support does not fit a unit torus; simulate a larger
    // torus and record the unit view for plotting.
    const double radius = rbg::effective_support(spec, 2, rbg::kEdgeEpsilon).radius;
    const rbg::Window w{2, std::max(1.0, std::ceil(2.5 * radius)), rbg::Boundary::torus};
    const auto s = rbg::derive_seed(seed, ++k);
    auto g = rbg::build_rbg(rbg::sample_ppp(100, w, rbg::derive_seed(s, 2), rbg::PointKind::agent),
                            rbg::sample_ppp(10, w, rbg::derive_seed(s, 1), rbg::PointKind::hub), spec,
                            rbg::derive_seed(s, 3));
    auto dump = rbg::dump_graph(g, spec, s);
    dump.header["lambda"] = 100;
    dump.header["mu"] = 10;
    dump.header["view"] = {{"lo", -0.5}, {"hi", 0.5}};
    dump.header["mean_hub_degree_in_realization"] =
        g.hubs.size() ? static_cast<double>(g.edges.size()) / static_cast<double>(g.hubs.size()) : 0.0;
    dump.header["config"] = config_echo(o, "figs");
    rbg::write_file_atomic(dir / (std::string("fig1_") + name + "_edges.csv"), dump.edges_csv);
    rbg::write_file_atomic(dir / (std::string("fig1_") + name + "_header.json"), dump.header.dump(2));
  }
  std::cout << "wrote fig1 dumps to " << dir.string() << "\n";
  return 0;
}

int run_fig2(const Options& o) {
  const auto seed = require(o.seed, "--seed");
  const auto reps = o.reps.value_or(10000);
  if (reps < 2) throw ConfigError("--reps must be at least 2");
  const auto dir = output_dir(o);
  const auto base = rbg::ConnectionSpec::boolean(0.2122);
  std::ostringstream csv;
  csv << "series,lambda,mu,p,quantity,value,ci95,source\n";
  json rows = json::array();
  auto row = [&](double l, double m, double p, const char* q, double v, double ci, const char* src) {
    csv << "lambda=" << l << ";mu=" << m << ',' << l << ',' << m << ',' << rbg::fmt(p) << ',' << q << ','
        << rbg::fmt(v) << ',' << rbg::fmt(ci) << ',' << src << '\n';
    rows.push_back({{"lambda", l}, {"mu", m}, {"p", p}, {"quantity", q}, {"value", v}, {"ci95", ci}, {"source", src}});
  };
  const std::pair<double, double> cases[] = {{5, 50}, {50, 5}};
  // Theory curves on a log grid of p in [0.01, 1].
  for (const auto& [l, m] : cases)
    for (int i = 0; i <= 40; ++i) {
      const double p = std::pow(10.0, -2.0 + 2.0 * i / 40.0);
      const auto spec = rbg::disperse(base, std::min(p, 1.0));
      row(l, m, spec.dispersion, "EN", rbg::theory::expected_N(l, m, spec, 2).value, 0.0, "theory");
      row(l, m, spec.dispersion, "sqrtVN", std::sqrt(rbg::theory::variance_N(l, m, spec, 2).value), 0.0, "theory");
      row(l, m, spec.dispersion, "EM", rbg::theory::expected_M(l, m, spec, 2).value, 0.0, "theory");
    }
  // Simulation points.
  std::uint64_t k = 0;
  for (const auto& [l, m] : cases)
    for (double p : {1.0, 0.5, 0.25, 0.1, 0.05}) {
      const auto spec = rbg::disperse(base, p);
      const auto st = rbg::estimate_MN(l, m, spec, rbg::default_degree_window(spec, 2), reps,
                                       rbg::derive_seed(seed, ++k), o.workers);
      row(l, m, p, "EN", st.n.mean, st.n.ci_half_width_95, "simulation");
      row(l, m, p, "sqrtVN", std::sqrt(st.n.variance), st.n.variance_ci_half_width_95 / (2 * std::sqrt(st.n.variance)), "simulation");
      row(l, m, p, "EM", st.m.mean, st.m.ci_half_width_95, "simulation");
      row(l, m, p, "sqrtVM", std::sqrt(st.m.variance), st.m.variance_ci_half_width_95 / (2 * std::sqrt(st.m.variance)), "simulation");
    }
  rbg::write_file_atomic(dir / "fig2.csv", csv.str());
  if (o.format == "json")
    rbg::write_file_atomic(dir / "fig2.json",
                           json{{"rows", rows}, {"config", config_echo(o, "figs")}, {"version", rbg::kVersion}}.dump(2));
  std::cout << "wrote fig2 data to " << dir.string() << "\n";
  return 0;
}

int run_figs(const Options& o) {
  if (o.figure == "fig1") return run_fig1(o);
  if (o.figure == "fig2") return run_fig2(o);
  throw ConfigError("figs needs fig1 or fig2");
}

/// Expands "--config FILE" into "--key value" tokens placed right after the
/// subcommand, so explicit flags (which come later) take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (file.empty()) return args;
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file);
  std::vector<std::string> extra;
  std::string line;
  auto trim = [](std::string t) {
    const auto a = t.find_first_not_of(" \t\r");
    const auto b = t.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line without '=': " + line);
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line without a key: " + line);
    if (value == "true") {
      extra.push_back("--" + key);
    } else {
      extra.push_back("--" + key);
      extra.push_back(value);
    }
  }
  const auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.rfind("-", 0) != 0; });
  const auto at = sub == args.end() ? args.end() : sub + 1;
  args.insert(at, extra.begin(), extra.end());
  return args;
}

void report_error(const char* kind, const std::string& message) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random bipartite geometric graphs: degrees, theory and percolation"};
  app.set_version_flag("--version", std::string("rbg ") + rbg::kVersion);
  app.add_option("--config", "flat key=value file of long option names; command-line flags take precedence");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--lambda", o.lambda, "agent intensity");
    sub->add_option("--mu", o.mu, "hub intensity");
    sub->add_option("--conn", o.conn, "boolean:<theta> | pboolean:<p>:<theta> | exp:<theta>, optional @p=<dispersion>");
    sub->add_option("--d", o.d, "dimension")->capture_default_str();
    sub->add_option("--L", o.sides, "window side (or comma list for sweeps)");
    sub->add_option("--reps", o.reps, "replications");
    sub->add_option("--seed", o.seed, "top-level seed (required for simulations)");
    sub->add_option("--workers", o.workers, "worker threads (default: RBG_WORKERS or hardware)");
    sub->add_option("--out", o.out, "output path (directory for figs); stdout when omitted");
    sub->add_option("--format", o.format, "csv or json (default json for theory, csv otherwise)")
        ->check(CLI::IsMember({"csv", "json"}));
  };
  auto* degrees = app.add_subcommand("degrees", "Monte Carlo statistics of the typical agent");
  add_common(degrees);
  degrees->add_option("--boundary", o.boundary, "torus or open")->capture_default_str();
  auto* theory = app.add_subcommand("theory", "closed-form and quadrature values");
  add_common(theory);
  auto* percolate = app.add_subcommand("percolate", "percolation sweep of the bipartite graph");
  auto* zeta = app.add_subcommand("zeta", "percolation sweep of the unipartite graph");
  for (auto* sub : {percolate, zeta}) {
    add_common(sub);
    sub->add_option("--grid", o.grid, "lo:hi:n swept values");
    sub->add_option("--criterion", o.criterion, "wrap or fraction")->capture_default_str();
    sub->add_option("--fraction-threshold", o.fraction_threshold, "agent fraction for the fraction criterion")
        ->capture_default_str();
    sub->add_option("--bootstrap", o.bootstrap, "bootstrap resamples for the threshold CI")->capture_default_str();
    sub->add_flag("--strict", o.strict, "fail when the threshold is censored");
  }
  percolate->add_option("--fix", o.fix, "fixed intensity, mu=<v> or lambda=<v>");
  auto* figs = app.add_subcommand("figs", "data for the figures");
  add_common(figs);
  figs->add_option("figure", o.figure, "fig1 or fig2")->required();

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("config", e.what());
    return 2;
  } catch (const ConfigError& e) {
    report_error("config", e.what());
    return 2;
  }

  try {
    if (o.workers == 0) throw ConfigError("--workers must be positive");
    if (o.format.empty()) o.format = *theory ? "json" : "csv";
    if (*degrees) return run_degrees(o);
    if (*theory) return run_theory(o);
    if (*percolate) return run_percolate(o);
    if (*zeta) return run_zeta(o);
    if (*figs) return run_figs(o);
  } catch (const ConfigError& e) {
    report_error("config", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    report_error("config", e.what());
    return 2;
  } catch (const std::exception& e) {
    report_error("experiment", e.what());
    return 1;
  }
  return 2;
}
