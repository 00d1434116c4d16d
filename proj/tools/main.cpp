// Command-line experiment harness around the potsim library.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "potsim/experiment.hpp"
#include "potsim/presets.hpp"
#include "potsim/version.hpp"

using namespace potsim;

namespace {

struct TopologyFlags {
  std::string name = "ring";
  int n = 1000;
  int alpha = 2;
  int beta = 3;
  double gamma = 0.0;   // 0 -> 2 ln(n)/n
  double radius = 0.0;  // 0 -> connectivity threshold (rgg) or 1.0 (sring)
  double lmax = 0.0;    // 0 -> n

  void add_options(CLI::App* cmd) {
    cmd->add_option("--topology", name,
                    "topology: line|ring|ba|rr|er|rgg|sline|sring");
    cmd->add_option("--n", n, "server count");
    cmd->add_option("--alpha", alpha, "ba: edges attached per new vertex");
    cmd->add_option("--beta", beta, "rr: vertex degree");
    cmd->add_option("--gamma", gamma, "er: edge probability (default 2ln(n)/n)");
    cmd->add_option("--radius", radius, "rgg: connect radius; sring: circle radius");
    cmd->add_option("--lmax", lmax, "sline: line length (default n)");
  }

  TopologySpec resolve() const {
    if (name == "line") return TopologySpec::line(n);
    if (name == "ring") return TopologySpec::ring(n);
    if (name == "ba") return TopologySpec::barabasi_albert(n, alpha);
    if (name == "rr") return TopologySpec::random_regular(n, beta);
    if (name == "er")
      return TopologySpec::erdos_renyi(
          n, gamma > 0.0 ? gamma : 2.0 * std::log(static_cast<double>(n)) / n);
    if (name == "rgg")
      return TopologySpec::random_geometric(
          n, radius > 0.0
                 ? radius
                 : std::sqrt(std::log(static_cast<double>(n)) / (TopologySpec::kPi * n)));
    if (name == "sline")
      return TopologySpec::spatial_line(n, lmax > 0.0 ? lmax : static_cast<double>(n));
    if (name == "sring") return TopologySpec::spatial_ring(n, radius > 0.0 ? radius : 1.0);
    throw ParseError("unknown topology '" + name + "'");
  }
};

std::vector<PolicyFamily> parse_policies(const std::vector<std::string>& names) {
  std::vector<PolicyFamily> out;
  for (const auto& p : names) out.push_back(parse_policy_family(p));
  return out;
}

std::vector<KSpec> parse_ks(const std::vector<std::string>& texts) {
  std::vector<KSpec> out;
  for (const auto& t : texts) out.push_back(KSpec::parse(t));
  return out;
}

std::vector<std::pair<int, int>> parse_joint_pairs(const std::vector<std::string>& texts) {
  std::vector<std::pair<int, int>> out;
  for (const auto& t : texts) {
    const auto colon = t.find(':');
    if (colon == std::string::npos)
      throw ParseError("joint pair must look like a:b, got '" + t + "'");
    out.emplace_back(std::stoi(t.substr(0, colon)), std::stoi(t.substr(colon + 1)));
  }
  return out;
}

ArrivalKind parse_arrivals(const std::string& text) {
  if (text == "uniform") return ArrivalKind::UniformOrigin;
  if (text == "spatial") return ArrivalKind::SpatialNearest;
  throw ParseError("arrivals must be uniform or spatial, got '" + text + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Expands `--config <file>` into command-line arguments. The file is a flat
// key=value document whose keys mirror the long flags; explicit flags win
// over file values, so file entries already present on the line are dropped.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected key=value, got '" + text + "'");
    const std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (key.empty())
      throw ParseError(path + ":" + std::to_string(lineno) + ": empty key");
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    const std::string flag = "--" + key;
    bool already = false;
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) already = true;
    if (already) continue;
    if (value == "true") {
      args.push_back(flag);  // bare flag
    } else {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proximity-aware power-of-two-choices load balancing simulator"};
  app.set_version_flag("--version", POTSIM_VERSION);
  app.require_subcommand(1);

  // shared flag storage
  TopologyFlags topo_static, topo_dynamic, topo_stats, topo_sweep;
  std::vector<std::string> policy_names{"pot"};
  std::vector<std::string> k_texts{"logn"};
  std::vector<std::string> joint_pair_texts;
  std::string arrivals_text = "uniform";
  std::string out_dir = "potsim_out";
  std::string sweep_engine = "static";
  std::string import_path, export_path;
  long jobs = 0;
  std::uint64_t horizon = 0;
  double lambda = 0.0, mu = 0.0;
  int seeds_static = 10, seeds_dynamic = 1, seeds_sweep = 10, seeds_preset = 0;
  std::uint64_t seed = 1;
  int workers = 1;
  bool tv_evolution = false;
  std::string preset_name, scale_text = "desk";

  std::string config_path;  // handled by expand_config_args before parsing
  auto add_common = [&](CLI::App* cmd, int& seeds_var) {
    cmd->add_option("--seeds", seeds_var, "number of independent runs (seed fan-out)");
    cmd->add_option("--seed", seed, "base seed; run r uses seed base+r");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--workers", workers, "worker pool size for independent runs");
    cmd->add_option("--config", config_path, "flat key=value config file; flags override it");
  };

  CLI::App* cmd_static = app.add_subcommand("static", "sequential balls-into-bins allocation");
  topo_static.add_options(cmd_static);
  cmd_static->add_option("--m", jobs, "jobs to place (default n)");
  cmd_static->add_option("--policy", policy_names, "policy families: pot|unif|invsq")
      ->delimiter(',');
  cmd_static->add_option("--k", k_texts, "neighborhood radii: <int>|logn|n")->delimiter(',');
  cmd_static->add_option("--arrivals", arrivals_text, "arrival model: uniform|spatial");
  cmd_static->add_flag("--tv-evolution", tv_evolution,
                       "emit per-arrival TV against a paired pot run");
  add_common(cmd_static, seeds_static);

  CLI::App* cmd_dynamic = app.add_subcommand("dynamic", "Poisson arrivals, exponential service");
  topo_dynamic.add_options(cmd_dynamic);
  cmd_dynamic->add_option("--lambda", lambda, "arrival rate per server")->required();
  cmd_dynamic->add_option("--mu", mu, "service rate")->required();
  cmd_dynamic->add_option("--m,--horizon", horizon, "total arrivals (default n*1e5)");
  cmd_dynamic->add_option("--policy", policy_names, "policy families: pot|unif|invsq")
      ->delimiter(',');
  cmd_dynamic->add_option("--k", k_texts, "neighborhood radii: <int>|logn|n")->delimiter(',');
  cmd_dynamic->add_option("--joint-pair", joint_pair_texts,
                          "tracked server pair a:b (repeatable; default 0:1 0:2 0:8)");
  add_common(cmd_dynamic, seeds_dynamic);

  CLI::App* cmd_stats = app.add_subcommand("graph-stats", "topology attributes");
  topo_stats.add_options(cmd_stats);
  cmd_stats->add_option("--seed", seed, "generator seed");
  cmd_stats->add_option("--import", import_path, "read an edge-list file instead of generating");
  cmd_stats->add_option("--export", export_path, "write the edge list to this path");
  cmd_stats->add_option("--config", config_path, "flat key=value config file; flags override it");

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "policy x k x seed grid");
  topo_sweep.add_options(cmd_sweep);
  cmd_sweep->add_option("--engine", sweep_engine, "static|dynamic");
  cmd_sweep->add_option("--m", jobs, "static: jobs to place (default n)");
  cmd_sweep->add_option("--horizon", horizon, "dynamic: total arrivals (default n*1e5)");
  cmd_sweep->add_option("--lambda", lambda, "dynamic: arrival rate per server");
  cmd_sweep->add_option("--mu", mu, "dynamic: service rate");
  cmd_sweep->add_option("--policy", policy_names, "policy families: pot|unif|invsq")
      ->delimiter(',');
  cmd_sweep->add_option("--k", k_texts, "neighborhood radii: <int>|logn|n")->delimiter(',');
  cmd_sweep->add_option("--arrivals", arrivals_text, "static arrival model: uniform|spatial");
  add_common(cmd_sweep, seeds_sweep);

  CLI::App* cmd_preset = app.add_subcommand("preset", "run a named study");
  cmd_preset->add_option("name", preset_name, "preset name (see --list)")->required();
  cmd_preset->add_option("--scale", scale_text, "desk|paper");
  add_common(cmd_preset, seeds_preset);

  try {
    std::vector<std::string> args = expand_config_args(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*cmd_static || *cmd_sweep) {
      const bool sweep = static_cast<bool>(*cmd_sweep);
      ExperimentConfig cfg;
      cfg.mode = sweep ? ExperimentConfig::Mode::Sweep : ExperimentConfig::Mode::Static;
      cfg.sweep_engine = sweep_engine;
      cfg.topology = (sweep ? topo_sweep : topo_static).resolve();
      cfg.policy_families = parse_policies(policy_names);
      cfg.k_list = parse_ks(k_texts);
      cfg.jobs = jobs;
      cfg.horizon = horizon;
      cfg.arrivals = parse_arrivals(arrivals_text);
      cfg.lambda = lambda;
      cfg.mu = mu;
      cfg.seed_count = sweep ? seeds_sweep : seeds_static;
      cfg.base_seed = seed;
      cfg.out_dir = out_dir;
      cfg.workers = workers;
      cfg.tv_evolution = tv_evolution;
      return run_experiment(cfg);
    }
    if (*cmd_dynamic) {
      ExperimentConfig cfg;
      cfg.mode = ExperimentConfig::Mode::Dynamic;
      cfg.topology = topo_dynamic.resolve();
      cfg.policy_families = parse_policies(policy_names);
      cfg.k_list = parse_ks(k_texts);
      cfg.horizon = horizon;
      cfg.lambda = lambda;
      cfg.mu = mu;
      cfg.seed_count = seeds_dynamic;
      cfg.base_seed = seed;
      cfg.out_dir = out_dir;
      cfg.workers = workers;
      cfg.joint_pairs = parse_joint_pairs(joint_pair_texts);
      return run_experiment(cfg);
    }
    if (*cmd_stats) {
      ExperimentConfig cfg;
      cfg.mode = ExperimentConfig::Mode::GraphStats;
      cfg.topology = topo_stats.resolve();
      cfg.base_seed = seed;
      cfg.import_path = import_path;
      cfg.export_path = export_path;
      return run_experiment(cfg);
    }
    if (*cmd_preset) {
      PresetOptions opts;
      opts.scale = parse_scale(scale_text);
      opts.seed = seed;
      opts.seed_count = seeds_preset;
      opts.out_dir = out_dir;
      opts.workers = workers;
      return run_preset(preset_name, opts);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
