#pragma once
// Dynamic regime: per-server Poisson arrivals, exponential FCFS service,
// two-choice routing, and time-averaged stationary estimators.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "potsim/errors.hpp"
#include "potsim/graph.hpp"
#include "potsim/load_distribution.hpp"
#include "potsim/policy.hpp"
#include "potsim/rng.hpp"

namespace potsim {

struct DynamicConfig {
  int n = 0;
  double lambda = 0.0;  // arrival rate per server
  double mu = 1.0;      // service rate
  PolicyKind policy = PolicyKind::pot();
  std::uint64_t horizon_arrivals = 0;
  double warmup_fraction = 0.1;  // leading fraction of simulated time discarded
  std::vector<std::pair<int, int>> joint_pairs;
  std::uint64_t seed = 1;
  bool per_server_occupancy = false;
  bool record_jobs = false;

  // Defaults with the usual tracked pairs when the ring is big enough.
  static DynamicConfig make(int n, double lambda, double mu, PolicyKind policy,
                            std::uint64_t horizon_arrivals, std::uint64_t seed) {
    DynamicConfig cfg;
    cfg.n = n;
    cfg.lambda = lambda;
    cfg.mu = mu;
    cfg.policy = policy;
    cfg.horizon_arrivals = horizon_arrivals;
    cfg.seed = seed;
    if (n > 8) cfg.joint_pairs = {{0, 1}, {0, 2}, {0, 8}};
    return cfg;
  }

  void validate() const {
    if (n < 1) throw InvalidConfig("need n >= 1");
    if (!(lambda > 0.0)) throw InvalidConfig("need lambda > 0");
    if (!(mu > 0.0)) throw InvalidConfig("need mu > 0");
    if (lambda >= mu) {
      std::fprintf(stderr, "warning: unstable configuration (lambda=%g >= mu=%g); run refused\n",
                   lambda, mu);
      throw Unstable("lambda >= mu gives an unstable system");
    }
    if (horizon_arrivals < 1) throw InvalidConfig("need at least one arrival");
    if (!(warmup_fraction >= 0.0) || warmup_fraction >= 1.0)
      throw InvalidConfig("warmup_fraction must lie in [0,1)");
    for (const auto& [a, b] : joint_pairs) {
      if (a < 0 || b < 0 || a >= n || b >= n || a == b)
        throw InvalidConfig("joint pair ids must be distinct servers in [0,n)");
    }
    if (n >= 2) policy.validate();
  }
};

// ---------------------------------------------------------------------------
// estimators: time-weighted histograms, settled lazily on state change

// Fraction of server-time spent at each occupancy value, aggregated over all
// servers. Accumulation starts at measure_start.
class OccupancyEstimator {
 public:
  OccupancyEstimator(int n, double measure_start) : n_(n), start_(measure_start) {
    servers_at_.assign(1, n);
    mass_.assign(1, 0.0);
    last_.assign(1, start_);
  }

  // One server moves between occupancy values at time `now`.
  void move(int from, int to, double now) {
    grow(from > to ? from : to);
    settle(from, now);
    settle(to, now);
    --servers_at_[static_cast<std::size_t>(from)];
    ++servers_at_[static_cast<std::size_t>(to)];
  }

  void finalize(double end) {
    for (std::size_t v = 0; v < mass_.size(); ++v) settle(static_cast<int>(v), end);
    end_ = end;
  }

  double measured_time() const { return end_ - start_; }
  double measure_start() const { return start_; }

  LoadDistribution pdf() const {
    const double span = measured_time();
    if (!(span > 0.0)) throw NoMeasurement("no time accumulated past warm-up");
    LoadDistribution dist;
    dist.p.resize(mass_.size());
    const double denom = static_cast<double>(n_) * span;
    for (std::size_t i = 0; i < mass_.size(); ++i) dist.p[i] = mass_[i] / denom;
    dist.trim();
    return dist;
  }

 private:
  void grow(int v) {
    while (static_cast<std::size_t>(v) >= mass_.size()) {
      servers_at_.push_back(0);
      mass_.push_back(0.0);
      last_.push_back(start_);
    }
  }

  void settle(int v, double now) {
    const std::size_t i = static_cast<std::size_t>(v);
    if (now > start_) {
      const double from = last_[i] > start_ ? last_[i] : start_;
      if (now > from) mass_[i] += static_cast<double>(servers_at_[i]) * (now - from);
    }
    last_[i] = now;
  }

  int n_;
  double start_;
  double end_ = 0.0;
  std::vector<long> servers_at_;
  std::vector<double> mass_;
  std::vector<double> last_;
};

// Same accumulation kept separately per server (used for symmetry checks).
class PerServerOccupancy {
 public:
  PerServerOccupancy(int n, double measure_start)
      : start_(measure_start), last_(static_cast<std::size_t>(n), measure_start),
        mass_(static_cast<std::size_t>(n)) {}

  // Called before server s leaves occupancy q at time `now`.
  void move(int s, int q, double now) { settle(s, q, now); }

  void finalize(const std::vector<int>& q, double end) {
    for (std::size_t s = 0; s < mass_.size(); ++s) settle(static_cast<int>(s), q[s], end);
    end_ = end;
  }

  LoadDistribution pdf(int s) const {
    const double span = end_ - start_;
    if (!(span > 0.0)) throw NoMeasurement("no time accumulated past warm-up");
    LoadDistribution dist;
    dist.p.assign(mass_[static_cast<std::size_t>(s)].size(), 0.0);
    for (std::size_t i = 0; i < dist.p.size(); ++i)
      dist.p[i] = mass_[static_cast<std::size_t>(s)][i] / span;
    dist.trim();
    return dist;
  }

 private:
  void settle(int s, int q, double now) {
    auto& m = mass_[static_cast<std::size_t>(s)];
    if (static_cast<std::size_t>(q) >= m.size()) m.resize(static_cast<std::size_t>(q) + 1, 0.0);
    if (now > start_) {
      const double from = last_[static_cast<std::size_t>(s)] > start_
                              ? last_[static_cast<std::size_t>(s)]
                              : start_;
      if (now > from) m[static_cast<std::size_t>(q)] += now - from;
    }
    last_[static_cast<std::size_t>(s)] = now;
  }

  double start_;
  double end_ = 0.0;
  std::vector<double> last_;
  std::vector<std::vector<double>> mass_;
};

// Normalized time-averaged joint histogram of one server pair.
struct JointDistribution {
  int side = 0;           // occupancy values 0..side-1 per axis
  std::vector<double> p;  // row-major side*side

  double at(int a, int b) const {
    if (a < 0 || b < 0 || a >= side || b >= side) return 0.0;
    return p[static_cast<std::size_t>(a) * side + b];
  }

  LoadDistribution marginal_first() const {
    LoadDistribution dist;
    dist.p.assign(static_cast<std::size_t>(side), 0.0);
    for (int a = 0; a < side; ++a)
      for (int b = 0; b < side; ++b) dist.p[static_cast<std::size_t>(a)] += at(a, b);
    dist.trim();
    return dist;
  }

  LoadDistribution marginal_second() const {
    LoadDistribution dist;
    dist.p.assign(static_cast<std::size_t>(side), 0.0);
    for (int b = 0; b < side; ++b)
      for (int a = 0; a < side; ++a) dist.p[static_cast<std::size_t>(b)] += at(a, b);
    dist.trim();
    return dist;
  }
};

inline double joint_distance(const JointDistribution& x, const JointDistribution& y) {
  const int side = x.side > y.side ? x.side : y.side;
  double s = 0.0;
  for (int a = 0; a < side; ++a)
    for (int b = 0; b < side; ++b) {
      const double d = x.at(a, b) - y.at(a, b);
      s += d < 0 ? -d : d;
    }
  return 0.5 * s;
}

class JointEstimator {
 public:
  JointEstimator(const std::vector<std::pair<int, int>>& pairs, int n, double measure_start)
      : start_(measure_start), by_server_(static_cast<std::size_t>(n)) {
    for (const auto& [a, b] : pairs) {
      accs_.push_back(PairAcc{a, b, measure_start, 16,
                              std::vector<double>(16 * 16, 0.0)});
      const int idx = static_cast<int>(accs_.size()) - 1;
      by_server_[static_cast<std::size_t>(a)].push_back(idx);
      by_server_[static_cast<std::size_t>(b)].push_back(idx);
    }
  }

  bool tracks(int server) const { return !by_server_[static_cast<std::size_t>(server)].empty(); }

  // Settle every pair that involves `server`; call before its count changes.
  void touch(int server, const std::vector<int>& q, double now) {
    for (int idx : by_server_[static_cast<std::size_t>(server)]) {
      auto& acc = accs_[static_cast<std::size_t>(idx)];
      acc.settle(q[static_cast<std::size_t>(acc.a)], q[static_cast<std::size_t>(acc.b)], now,
                 start_);
    }
  }

  void finalize(const std::vector<int>& q, double end) {
    for (auto& acc : accs_)
      acc.settle(q[static_cast<std::size_t>(acc.a)], q[static_cast<std::size_t>(acc.b)], end,
                 start_);
    end_ = end;
  }

  JointDistribution pdf(std::pair<int, int> pair) const {
    const double span = end_ - start_;
    for (const auto& acc : accs_) {
      if (acc.a != pair.first || acc.b != pair.second) continue;
      if (!(span > 0.0)) throw NoMeasurement("no time accumulated past warm-up");
      JointDistribution dist;
      dist.side = acc.side;
      dist.p.resize(acc.mass.size());
      for (std::size_t i = 0; i < acc.mass.size(); ++i) dist.p[i] = acc.mass[i] / span;
      return dist;
    }
    throw UntrackedPair("pair (" + std::to_string(pair.first) + "," +
                        std::to_string(pair.second) + ") is not tracked");
  }

  const std::vector<std::pair<int, int>> tracked_pairs() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(accs_.size());
    for (const auto& acc : accs_) out.emplace_back(acc.a, acc.b);
    return out;
  }

 private:
  struct PairAcc {
    int a, b;
    double last;
    int side;
    std::vector<double> mass;

    void settle(int qa, int qb, double now, double start) {
      if (now > start) {
        const double from = last > start ? last : start;
        if (now > from) {
          ensure(qa > qb ? qa : qb);
          mass[static_cast<std::size_t>(qa) * side + qb] += now - from;
        }
      }
      last = now;
    }

    void ensure(int q) {
      while (q >= side) {
        const int next = side * 2;
        std::vector<double> grown(static_cast<std::size_t>(next) * next, 0.0);
        for (int i = 0; i < side; ++i)
          for (int j = 0; j < side; ++j)
            grown[static_cast<std::size_t>(i) * next + j] =
                mass[static_cast<std::size_t>(i) * side + j];
        mass = std::move(grown);
        side = next;
      }
    }
  };

  double start_;
  double end_ = 0.0;
  std::vector<PairAcc> accs_;
  std::vector<std::vector<int>> by_server_;
};

// ---------------------------------------------------------------------------
// per-job bookkeeping

struct JobRecord {
  double arrival = 0.0;
  int origin = 0;
  int destination = 0;
  int hop = 0;
  double departure = std::numeric_limits<double>::quiet_NaN();  // NaN: still in system

  bool departed() const { return departure == departure; }
};

// Aggregates over post-warm-up jobs; raw records kept only when requested.
// Jobs still in system at the horizon never enter the sojourn sum.
struct JobRecords {
  long long arrived = 0;
  long long departed = 0;
  double sojourn_sum = 0.0;
  double hop_sum = 0.0;
  std::vector<JobRecord> records;
};

inline double mean_sojourn_time(const JobRecords& jobs) {
  if (jobs.departed == 0) throw NoDepartures("no completed post-warm-up jobs");
  return jobs.sojourn_sum / static_cast<double>(jobs.departed);
}

inline double mean_request_distance(const JobRecords& jobs) {
  if (jobs.arrived == 0) throw EmptyRecords("no post-warm-up jobs");
  return jobs.hop_sum / static_cast<double>(jobs.arrived);
}

// ---------------------------------------------------------------------------
// mean-field reference

// Stationary occupancy law of the power-of-d system as n grows without bound:
// tail T_i = (lambda/mu)^((d^i - 1)/(d - 1)), geometric when d = 1. The mass
// beyond support_cap folds into the last bin.
inline LoadDistribution mean_field_pot_pdf(double lambda, double mu, int d, int support_cap) {
  if (!(mu > 0.0) || lambda < 0.0 || lambda >= mu)
    throw InvalidRate("need 0 <= lambda < mu");
  if (d < 1) throw InvalidRate("need d >= 1");
  if (support_cap < 1) throw InvalidRate("need support_cap >= 1");
  const double rho = lambda / mu;
  auto tail = [&](int i) -> double {
    if (i == 0) return 1.0;
    if (rho == 0.0) return 0.0;
    const double exponent =
        d == 1 ? static_cast<double>(i)
               : (std::pow(static_cast<double>(d), i) - 1.0) / static_cast<double>(d - 1);
    return std::pow(rho, exponent);
  };
  LoadDistribution dist;
  dist.p.resize(static_cast<std::size_t>(support_cap) + 1);
  for (int i = 0; i < support_cap; ++i) dist.p[static_cast<std::size_t>(i)] = tail(i) - tail(i + 1);
  dist.p[static_cast<std::size_t>(support_cap)] = tail(support_cap);
  return dist;
}

// ---------------------------------------------------------------------------
// event-driven run

struct DynamicResult {
  OccupancyEstimator occupancy;
  JointEstimator joints;
  JobRecords jobs;
  std::optional<PerServerOccupancy> per_server;
  std::uint64_t arrivals = 0;
  std::uint64_t departures = 0;
  long long in_system = 0;
  double end_time = 0.0;
  double measure_start = 0.0;
};

inline DynamicResult run_dynamic(const Graph& g, const DynamicConfig& cfg) {
  cfg.validate();
  if (g.n != cfg.n) throw InvalidConfig("config n does not match the graph");

  const int n = cfg.n;
  const double total_rate = cfg.lambda * n;  // superposed arrival stream
  const double expected_end = static_cast<double>(cfg.horizon_arrivals) / total_rate;
  const double t_warm = cfg.warmup_fraction * expected_end;

  RngStream arrival_rng(derive_seed(cfg.seed, stream::arrival));
  RngStream origin_rng(derive_seed(cfg.seed, stream::origin));
  RngStream peer_rng(derive_seed(cfg.seed, stream::peer));
  RngStream tie_rng(derive_seed(cfg.seed, stream::tie));
  RngStream service_rng(derive_seed(cfg.seed, stream::service));

  std::unique_ptr<SamplingTable> table;
  std::unique_ptr<DistanceOracle> oracle;
  if (n >= 2) {
    table = std::make_unique<SamplingTable>(g, cfg.policy);
    table->precompute();
    if (!cfg.policy.uses_neighborhood()) oracle = std::make_unique<DistanceOracle>(g);
  }

  DynamicResult res{OccupancyEstimator(n, t_warm),
                    JointEstimator(cfg.joint_pairs, n, t_warm),
                    JobRecords{},
                    std::nullopt,
                    0,
                    0,
                    0,
                    0.0,
                    t_warm};
  if (cfg.per_server_occupancy) res.per_server.emplace(n, t_warm);

  struct Pending {
    double arrival;
    int hop;
    long long rec;
  };
  std::vector<int> q(static_cast<std::size_t>(n), 0);
  std::vector<std::deque<Pending>> queued(static_cast<std::size_t>(n));
  std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                      std::greater<>>
      ready;  // pending departure per busy server

  const bool track_joints = !cfg.joint_pairs.empty();
  double t = 0.0;
  double prev_t = 0.0;
  double next_arrival = arrival_rng.exponential(total_rate);

  while (res.arrivals < cfg.horizon_arrivals) {
    const bool arrival_turn = ready.empty() || next_arrival <= ready.top().first;
    if (arrival_turn) {
      t = next_arrival;
      if (t < prev_t) throw Error("event time went backwards");
      prev_t = t;
      ++res.arrivals;

      const int u = static_cast<int>(origin_rng.index(static_cast<std::uint64_t>(n)));
      int dest = u;
      int hop = 0;
      if (n >= 2) {
        const PeerSample s = table->sample(u, peer_rng);
        if (allocate(q[static_cast<std::size_t>(u)], q[static_cast<std::size_t>(s.vertex)],
                     tie_rng) == AllocationChoice::Peer) {
          dest = s.vertex;
          hop = s.hop >= 0 ? s.hop : oracle->hop(u, s.vertex);
        }
      }

      const auto di = static_cast<std::size_t>(dest);
      if (track_joints && res.joints.tracks(dest)) res.joints.touch(dest, q, t);
      if (res.per_server) res.per_server->move(dest, q[di], t);
      res.occupancy.move(q[di], q[di] + 1, t);
      ++q[di];

      long long rec = -1;
      if (t >= t_warm) {
        ++res.jobs.arrived;
        res.jobs.hop_sum += hop;
        if (cfg.record_jobs) {
          rec = static_cast<long long>(res.jobs.records.size());
          res.jobs.records.push_back(JobRecord{t, u, dest, hop,
                                               std::numeric_limits<double>::quiet_NaN()});
        }
      }
      queued[di].push_back(Pending{t, hop, rec});
      if (q[di] == 1) ready.emplace(t + service_rng.exponential(cfg.mu), dest);

      next_arrival = t + arrival_rng.exponential(total_rate);
    } else {
      const auto [td, s] = ready.top();
      ready.pop();
      t = td;
      if (t < prev_t) throw Error("event time went backwards");
      prev_t = t;
      ++res.departures;

      const auto si = static_cast<std::size_t>(s);
      if (track_joints && res.joints.tracks(s)) res.joints.touch(s, q, t);
      if (res.per_server) res.per_server->move(s, q[si], t);
      res.occupancy.move(q[si], q[si] - 1, t);
      --q[si];

      const Pending job = queued[si].front();
      queued[si].pop_front();
      if (job.arrival >= t_warm) {
        ++res.jobs.departed;
        res.jobs.sojourn_sum += t - job.arrival;
        if (job.rec >= 0) res.jobs.records[static_cast<std::size_t>(job.rec)].departure = t;
      }
      if (q[si] > 0) ready.emplace(t + service_rng.exponential(cfg.mu), s);
    }
  }

  res.end_time = t;
  res.occupancy.finalize(t);
  res.joints.finalize(q, t);
  if (res.per_server) res.per_server->finalize(q, t);

  // internal consistency: jobs in the system match the counters, and every
  // busy server holds exactly one scheduled departure
  long long held = 0;
  for (int c : q) held += c;
  res.in_system = static_cast<long long>(res.arrivals) - static_cast<long long>(res.departures);
  if (held != res.in_system) throw Error("job conservation violated");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::size_t busy = 0;
  for (int c : q)
    if (c > 0) ++busy;
  if (ready.size() != busy) throw Error("departure schedule out of sync");
  while (!ready.empty()) {
    const int s = ready.top().second;
    ready.pop();
    if (q[static_cast<std::size_t>(s)] == 0 || seen[static_cast<std::size_t>(s)])
      throw Error("departure schedule out of sync");
    seen[static_cast<std::size_t>(s)] = 1;
  }
  return res;
}

// Ring topology per the dynamic study; n = 1 degenerates to a single queue.
inline DynamicResult run_dynamic(const DynamicConfig& cfg) {
  cfg.validate();
  if (cfg.n == 1) {
    Graph g;
    g.n = 1;
    g.adj.assign(1, {});
    g.spec.kind = Topology::Custom;
    g.spec.n = 1;
    return run_dynamic(g, cfg);
  }
  return run_dynamic(build_graph(TopologySpec::ring(cfg.n), cfg.seed), cfg);
}

inline LoadDistribution occupancy_pdf(const OccupancyEstimator& est) { return est.pdf(); }

inline JointDistribution joint_pdf(const JointEstimator& est, std::pair<int, int> pair) {
  return est.pdf(pair);
}

}  // namespace potsim
