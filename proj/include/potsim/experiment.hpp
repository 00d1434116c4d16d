#pragma once
// Experiment harness: declarative run descriptions, seed fan-out, CSV and
// manifest emission. The CLI front end is a thin wrapper over this header.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "potsim/dynamic_sim.hpp"
#include "potsim/errors.hpp"
#include "potsim/graph.hpp"
#include "potsim/static_sim.hpp"
#include "potsim/version.hpp"

namespace potsim {

enum class Scale { Desk, Paper };

inline Scale parse_scale(const std::string& text) {
  if (text == "desk") return Scale::Desk;
  if (text == "paper") return Scale::Paper;
  throw ParseError("scale must be 'desk' or 'paper', got '" + text + "'");
}

inline std::string scale_name(Scale s) { return s == Scale::Desk ? "desk" : "paper"; }

// ---------------------------------------------------------------------------
// neighborhood radius: literal, log n, or the full graph

struct KSpec {
  enum class Kind { Literal, LogN, FullN };
  Kind kind = Kind::Literal;
  int value = 1;

  static KSpec literal(int v) { return {Kind::Literal, v}; }
  static KSpec logn() { return {Kind::LogN, 0}; }
  static KSpec full_n() { return {Kind::FullN, 0}; }

  static KSpec parse(const std::string& text) {
    if (text == "logn") return logn();
    if (text == "n") return full_n();
    try {
      std::size_t used = 0;
      const int v = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return literal(v);
    } catch (const std::exception&) {
      throw ParseError("k must be an integer, 'logn', or 'n'; got '" + text + "'");
    }
  }

  int resolve(int n) const {
    if (n < 2) throw InvalidConfig("k resolution needs n >= 2");
    switch (kind) {
      case Kind::Literal:
        if (value < 1) throw ParseError("literal k must be >= 1");
        return value;
      case Kind::LogN: {
        const int k = static_cast<int>(std::llround(std::log(static_cast<double>(n))));
        return k < 1 ? 1 : k;
      }
      case Kind::FullN:
        return n;
    }
    return 1;
  }

  std::string str() const {
    switch (kind) {
      case Kind::Literal: return std::to_string(value);
      case Kind::LogN: return "logn";
      case Kind::FullN: return "n";
    }
    return "1";
  }
};

inline int resolve_k(const KSpec& spec, int n) { return spec.resolve(n); }

// One (family, radius) choice; Pot ignores the radius.
struct PolicyChoice {
  PolicyFamily family = PolicyFamily::Pot;
  KSpec k = KSpec::literal(1);

  PolicyKind resolve(int n) const {
    switch (family) {
      case PolicyFamily::Pot: return PolicyKind::pot();
      case PolicyFamily::Unif: return PolicyKind::unif(k.resolve(n));
      case PolicyFamily::InvSq: return PolicyKind::invsq(k.resolve(n));
    }
    return PolicyKind::pot();
  }

  std::string str() const {
    if (family == PolicyFamily::Pot) return "pot";
    return (family == PolicyFamily::Unif ? std::string("unif") : std::string("invsq")) + "_k" +
           k.str();
  }
};

inline PolicyFamily parse_policy_family(const std::string& text) {
  if (text == "pot") return PolicyFamily::Pot;
  if (text == "unif") return PolicyFamily::Unif;
  if (text == "invsq") return PolicyFamily::InvSq;
  throw ParseError("policy must be pot, unif, or invsq; got '" + text + "'");
}

// policy families x k list, with Pot collapsing to a single entry
inline std::vector<PolicyChoice> expand_policies(const std::vector<PolicyFamily>& families,
                                                 const std::vector<KSpec>& ks) {
  std::vector<PolicyChoice> out;
  for (PolicyFamily family : families) {
    if (family == PolicyFamily::Pot) {
      out.push_back({family, KSpec::literal(1)});
      continue;
    }
    for (const KSpec& k : ks) out.push_back({family, k});
  }
  return out;
}

// ---------------------------------------------------------------------------
// small utilities shared by the runners

inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace detail {
inline void csv_field(std::ostringstream& os, double v) { os << fmt_g(v); }
inline void csv_field(std::ostringstream& os, float v) { os << fmt_g(v); }
template <class T>
inline void csv_field(std::ostringstream& os, const T& v) {
  os << v;
}
}  // namespace detail

template <class... Ts>
std::string csv_row(const Ts&... vals) {
  std::ostringstream os;
  bool first = true;
  auto add = [&](const auto& v) {
    if (!first) os << ',';
    first = false;
    detail::csv_field(os, v);
  };
  (add(vals), ...);
  return os.str();
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& comment,
          const std::string& header) {
    out_.open(path);
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
    if (!comment.empty()) out_ << "# " << comment << "\n";
    out_ << header << "\n";
  }

  void line(const std::string& row) { out_ << row << "\n"; }

 private:
  std::ofstream out_;
};

// Runs fn(0..count-1) on a small worker pool; rethrows the first failure.
inline void run_parallel(std::size_t count, int workers,
                         const std::function<void(std::size_t)>& fn) {
  if (workers < 1) workers = 1;
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::scoped_lock lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(std::min<std::size_t>(count, workers));
  pool.reserve(spawn);
  for (int w = 0; w < spawn; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Records config, seeds, library version, and per-run wall time.
class Manifest {
 public:
  explicit Manifest(std::string mode) {
    doc_["version"] = kVersion;
    doc_["mode"] = std::move(mode);
  }

  void set_config(nlohmann::json config) {
    hash_ = hex64(fnv1a64(config.dump()));
    doc_["config"] = std::move(config);
    doc_["config_hash"] = hash_;
  }

  void set_seeds(std::uint64_t base, int count) {
    doc_["base_seed"] = base;
    doc_["seed_count"] = count;
  }

  const std::string& config_hash() const { return hash_; }

  void add_run(const std::string& name, double seconds) {
    std::scoped_lock lock(mutex_);
    runs_.push_back({{"name", name}, {"seconds", seconds}});
  }

  void write(const std::filesystem::path& path) {
    doc_["runs"] = runs_;
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << doc_.dump(2) << "\n";
  }

 private:
  nlohmann::json doc_;
  nlohmann::json runs_ = nlohmann::json::array();
  std::string hash_;
  std::mutex mutex_;
};

class StopWatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------------------
// declarative experiment description (mirrors the CLI flags)

struct ExperimentConfig {
  enum class Mode { Static, Dynamic, GraphStats, Sweep };

  Mode mode = Mode::Static;
  std::string sweep_engine = "static";  // sweep mode: static or dynamic
  TopologySpec topology = TopologySpec::ring(1000);
  std::vector<PolicyFamily> policy_families{PolicyFamily::Pot};
  std::vector<KSpec> k_list{KSpec::logn()};
  long jobs = 0;                  // static: 0 means m = n
  std::uint64_t horizon = 0;      // dynamic: 0 means n * 1e5 arrivals
  ArrivalKind arrivals = ArrivalKind::UniformOrigin;
  double lambda = 0.0;
  double mu = 0.0;
  int seed_count = 10;
  std::uint64_t base_seed = 1;
  std::string out_dir = "potsim_out";
  int workers = 1;
  bool tv_evolution = false;  // static: per-arrival TV against a paired Pot run
  std::vector<std::pair<int, int>> joint_pairs;  // dynamic; empty means defaults
  std::string import_path;  // graph-stats: read an edge list instead of generating
  std::string export_path;  // graph-stats: write the edge list

  void validate() const {
    if (seed_count < 1) throw InvalidConfig("need at least one seed");
    if (mode == Mode::GraphStats) return;
    if (policy_families.empty()) throw InvalidConfig("need at least one policy");
    if (k_list.empty()) throw InvalidConfig("need at least one k");
    topology.validate();
    if (mode == Mode::Dynamic || (mode == Mode::Sweep && sweep_engine == "dynamic")) {
      if (!(lambda > 0.0)) throw InvalidConfig("dynamic runs need lambda > 0");
      if (!(mu > 0.0)) throw InvalidConfig("dynamic runs need mu > 0");
    }
    if (mode == Mode::Sweep && sweep_engine != "static" && sweep_engine != "dynamic")
      throw InvalidConfig("sweep engine must be static or dynamic");
  }

  nlohmann::json describe() const {
    nlohmann::json j;
    j["topology"] = topology.name();
    j["params"] = topology.params();
    j["n"] = topology.n;
    std::vector<std::string> pol;
    for (auto f : policy_families)
      pol.push_back(f == PolicyFamily::Pot ? "pot"
                    : f == PolicyFamily::Unif ? "unif"
                                              : "invsq");
    j["policies"] = pol;
    std::vector<std::string> ks;
    for (const auto& k : k_list) ks.push_back(k.str());
    j["k"] = ks;
    j["jobs"] = jobs;
    j["horizon"] = horizon;
    j["arrivals"] = arrivals == ArrivalKind::UniformOrigin ? "uniform" : "spatial";
    j["lambda"] = lambda;
    j["mu"] = mu;
    j["seeds"] = seed_count;
    j["base_seed"] = base_seed;
    return j;
  }
};

// ---------------------------------------------------------------------------
// static mode

namespace detail {

struct StaticRunOutput {
  std::uint64_t seed = 0;
  PolicyChoice policy;
  int resolved_k = 0;
  long max_load = 0;
  double request_distance = 0.0;
  LoadDistribution dist;
};

inline StaticRunOutput one_static_run(const TopologySpec& topology, PolicyChoice choice,
                                      long jobs, ArrivalKind arrivals, std::uint64_t seed) {
  const Graph g = build_graph(topology, seed);
  const PolicyKind policy = choice.resolve(g.n);
  const StaticResult r = run_static(g, policy, jobs, arrivals, seed);
  StaticRunOutput out;
  out.seed = seed;
  out.policy = choice;
  out.resolved_k = policy.uses_neighborhood() ? policy.k : 0;
  out.max_load = max_load(r.state);
  out.request_distance = average_request_distance(r.trace);
  out.dist = load_distribution(r.state);
  return out;
}

inline LoadDistribution average_distributions(const std::vector<LoadDistribution>& dists) {
  LoadDistribution avg;
  for (const auto& d : dists)
    if (d.p.size() > avg.p.size()) avg.p.resize(d.p.size(), 0.0);
  for (const auto& d : dists)
    for (std::size_t i = 0; i < d.p.size(); ++i) avg.p[i] += d.p[i] / dists.size();
  return avg;
}

}  // namespace detail

inline int run_static_mode(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  Manifest manifest("static");
  manifest.set_config(cfg.describe());
  manifest.set_seeds(cfg.base_seed, cfg.seed_count);
  const std::string note = "base_seed=" + std::to_string(cfg.base_seed) +
                           " config_hash=" + manifest.config_hash();

  const long jobs = cfg.jobs > 0 ? cfg.jobs : cfg.topology.n;
  const auto choices = expand_policies(cfg.policy_families, cfg.k_list);

  struct Slot {
    detail::StaticRunOutput out;
    std::vector<double> tv_curve;
  };
  std::vector<Slot> slots(choices.size() * static_cast<std::size_t>(cfg.seed_count));

  run_parallel(slots.size(), cfg.workers, [&](std::size_t i) {
    const std::size_t ci = i / cfg.seed_count;
    const std::uint64_t seed = cfg.base_seed + (i % cfg.seed_count);
    StopWatch watch;
    if (!cfg.tv_evolution || choices[ci].family == PolicyFamily::Pot) {
      slots[i].out = detail::one_static_run(cfg.topology, choices[ci], jobs, cfg.arrivals, seed);
    } else {
      // paired run against Pot on the same graph, independent seed streams
      const Graph g = build_graph(cfg.topology, seed);
      const PolicyKind policy = choices[ci].resolve(g.n);
      std::vector<long> every(static_cast<std::size_t>(jobs));
      for (long t = 1; t <= jobs; ++t) every[static_cast<std::size_t>(t - 1)] = t;
      const StaticResult mine =
          run_static(g, policy, jobs, cfg.arrivals, seed, std::span<const long>(every));
      const StaticResult pot = run_static(g, PolicyKind::pot(), jobs, cfg.arrivals,
                                          derive_seed(seed, stream::baseline),
                                          std::span<const long>(every));
      slots[i].out.seed = seed;
      slots[i].out.policy = choices[ci];
      slots[i].out.resolved_k = policy.uses_neighborhood() ? policy.k : 0;
      slots[i].out.max_load = max_load(mine.state);
      slots[i].out.request_distance = average_request_distance(mine.trace);
      slots[i].out.dist = load_distribution(mine.state);
      slots[i].tv_curve.resize(static_cast<std::size_t>(jobs));
      for (long t = 0; t < jobs; ++t)
        slots[i].tv_curve[static_cast<std::size_t>(t)] =
            total_variation(mine.snapshots[static_cast<std::size_t>(t)],
                            pot.snapshots[static_cast<std::size_t>(t)]);
    }
    manifest.add_run(choices[ci].str() + "_s" + std::to_string(seed), watch.seconds());
  });

  CsvFile runs(fs::path(cfg.out_dir) / "runs.csv", note,
               "seed,topology,params,policy,k,m,n,max_load,avg_request_distance");
  for (const auto& slot : slots) {
    const auto& o = slot.out;
    runs.line(csv_row(o.seed, cfg.topology.name(), cfg.topology.params(), o.policy.str(),
                      o.resolved_k, jobs, cfg.topology.n, o.max_load, o.request_distance));
  }

  for (std::size_t ci = 0; ci < choices.size(); ++ci) {
    std::vector<LoadDistribution> dists;
    for (int s = 0; s < cfg.seed_count; ++s)
      dists.push_back(slots[ci * cfg.seed_count + s].out.dist);
    const LoadDistribution avg = detail::average_distributions(dists);
    CsvFile dist_csv(fs::path(cfg.out_dir) / ("dist_" + choices[ci].str() + ".csv"), note,
                     "load,fraction");
    for (std::size_t i = 0; i < avg.p.size(); ++i) dist_csv.line(csv_row(i, avg.p[i]));

    if (cfg.tv_evolution && choices[ci].family != PolicyFamily::Pot) {
      std::vector<double> avg_tv(static_cast<std::size_t>(jobs), 0.0);
      for (int s = 0; s < cfg.seed_count; ++s) {
        const auto& curve = slots[ci * cfg.seed_count + s].tv_curve;
        for (std::size_t t = 0; t < curve.size(); ++t) avg_tv[t] += curve[t] / cfg.seed_count;
      }
      CsvFile evo(fs::path(cfg.out_dir) / ("evolution_" + choices[ci].str() + ".csv"), note,
                  "t,tv_distance");
      for (std::size_t t = 0; t < avg_tv.size(); ++t) evo.line(csv_row(t + 1, avg_tv[t]));
    }
  }

  manifest.write(fs::path(cfg.out_dir) / "manifest.json");
  return 0;
}

// ---------------------------------------------------------------------------
// dynamic mode

inline int run_dynamic_mode(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  Manifest manifest("dynamic");
  manifest.set_config(cfg.describe());
  manifest.set_seeds(cfg.base_seed, cfg.seed_count);
  const std::string note = "base_seed=" + std::to_string(cfg.base_seed) +
                           " config_hash=" + manifest.config_hash();

  const std::uint64_t horizon =
      cfg.horizon > 0 ? cfg.horizon : static_cast<std::uint64_t>(cfg.topology.n) * 100'000ull;
  const auto choices = expand_policies(cfg.policy_families, cfg.k_list);

  struct Slot {
    PolicyChoice choice;
    int resolved_k = 0;
    std::uint64_t seed = 0;
    LoadDistribution occupancy;
    std::vector<std::pair<std::pair<int, int>, JointDistribution>> joints;
    double sojourn = 0.0;
    double request_distance = 0.0;
    std::uint64_t arrivals = 0;
    std::uint64_t departures = 0;
  };
  std::vector<Slot> slots(choices.size() * static_cast<std::size_t>(cfg.seed_count));

  run_parallel(slots.size(), cfg.workers, [&](std::size_t i) {
    const std::size_t ci = i / cfg.seed_count;
    const std::uint64_t seed = cfg.base_seed + (i % cfg.seed_count);
    StopWatch watch;
    const PolicyKind policy = choices[ci].resolve(cfg.topology.n);
    DynamicConfig dyn =
        DynamicConfig::make(cfg.topology.n, cfg.lambda, cfg.mu, policy, horizon, seed);
    if (!cfg.joint_pairs.empty()) dyn.joint_pairs = cfg.joint_pairs;
    const Graph g = build_graph(cfg.topology, seed);
    const DynamicResult r = run_dynamic(g, dyn);
    Slot& slot = slots[i];
    slot.choice = choices[ci];
    slot.resolved_k = policy.uses_neighborhood() ? policy.k : 0;
    slot.seed = seed;
    slot.occupancy = occupancy_pdf(r.occupancy);
    for (const auto& pair : r.joints.tracked_pairs())
      slot.joints.emplace_back(pair, joint_pdf(r.joints, pair));
    slot.sojourn = mean_sojourn_time(r.jobs);
    slot.request_distance = mean_request_distance(r.jobs);
    slot.arrivals = r.arrivals;
    slot.departures = r.departures;
    manifest.add_run(choices[ci].str() + "_s" + std::to_string(seed), watch.seconds());
  });

  CsvFile summary(fs::path(cfg.out_dir) / "summary.csv", note,
                  "policy,k,n,lambda,mean_sojourn,mean_request_distance,arrivals,departures");
  for (const auto& slot : slots) {
    summary.line(csv_row(slot.choice.family == PolicyFamily::Pot ? "pot"
                         : slot.choice.family == PolicyFamily::Unif ? "unif"
                                                                    : "invsq",
                         slot.resolved_k, cfg.topology.n, cfg.lambda, slot.sojourn,
                         slot.request_distance, slot.arrivals, slot.departures));
    const std::string tag = slot.choice.str() + "_s" + std::to_string(slot.seed);
    CsvFile occ(fs::path(cfg.out_dir) / ("occupancy_" + tag + ".csv"),
                "seed=" + std::to_string(slot.seed) + " " + note, "count,probability");
    for (std::size_t c = 0; c < slot.occupancy.p.size(); ++c)
      occ.line(csv_row(c, slot.occupancy.p[c]));
    for (const auto& [pair, joint] : slot.joints) {
      CsvFile jf(fs::path(cfg.out_dir) / ("joint_q" + std::to_string(pair.first) + "_q" +
                                          std::to_string(pair.second) + "_" + tag + ".csv"),
                 "seed=" + std::to_string(slot.seed) + " " + note, "qi,qj,probability");
      for (int a = 0; a < joint.side; ++a)
        for (int b = 0; b < joint.side; ++b)
          if (joint.at(a, b) > 0.0) jf.line(csv_row(a, b, joint.at(a, b)));
    }
  }

  manifest.write(fs::path(cfg.out_dir) / "manifest.json");
  return 0;
}

// ---------------------------------------------------------------------------
// graph-stats mode

inline int run_graph_stats(const ExperimentConfig& cfg, std::ostream& out = std::cout) {
  Graph g;
  if (!cfg.import_path.empty()) {
    g = load_edge_list(cfg.import_path);
  } else {
    cfg.topology.validate();
    g = build_graph(cfg.topology, cfg.base_seed);
  }
  out << "n " << g.n << "\n";
  out << "edges " << g.edge_count() << "\n";
  out << "density " << fmt_g(graph_density(g)) << "\n";
  const bool connected = is_connected(g);
  out << "connected " << (connected ? 1 : 0) << "\n";
  if (connected && g.n > 1) {
    const PathSummary paths = path_summary(g);
    out << "average_path_length " << fmt_g(paths.average_length) << "\n";
    out << "diameter " << paths.diameter << "\n";
  }
  if (!cfg.export_path.empty()) save_edge_list(g, cfg.export_path);
  return 0;
}

// ---------------------------------------------------------------------------
// sweep mode: policy x k x seed grid through either engine

inline int run_sweep_mode(const ExperimentConfig& cfg) {
  if (cfg.sweep_engine == "dynamic") return run_dynamic_mode(cfg);
  return run_static_mode(cfg);
}

inline int run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.mode) {
    case ExperimentConfig::Mode::Static: return run_static_mode(cfg);
    case ExperimentConfig::Mode::Dynamic: return run_dynamic_mode(cfg);
    case ExperimentConfig::Mode::GraphStats: return run_graph_stats(cfg);
    case ExperimentConfig::Mode::Sweep: return run_sweep_mode(cfg);
  }
  return 1;
}

}  // namespace potsim
