#pragma once
// Static regime: m jobs arrive sequentially, pick a peer per policy, and stay
// at the less-loaded of origin and peer forever.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "potsim/errors.hpp"
#include "potsim/graph.hpp"
#include "potsim/load_distribution.hpp"
#include "potsim/policy.hpp"
#include "potsim/rng.hpp"

namespace potsim {

// Origin selection: a uniformly random server, or a user dropped uniformly on
// the spatial support who walks to the nearest server.
enum class ArrivalKind { UniformOrigin, SpatialNearest };

struct StaticState {
  std::vector<int> loads;
  long placed = 0;
};

struct AllocationRecord {
  int origin = 0;
  int peer = 0;
  int destination = 0;
  int hop = 0;  // 0 when the job stays at its origin
};

struct AllocationTrace {
  std::vector<AllocationRecord> records;
};

struct StaticResult {
  StaticState state;
  AllocationTrace trace;
  std::vector<LoadDistribution> snapshots;  // aligned with the snapshot schedule
};

inline LoadDistribution load_distribution(const StaticState& state) {
  LoadDistribution dist;
  int max_load = 0;
  for (int l : state.loads) max_load = std::max(max_load, l);
  dist.p.assign(static_cast<std::size_t>(max_load) + 1, 0.0);
  const double unit = 1.0 / static_cast<double>(state.loads.size());
  for (int l : state.loads) dist.p[static_cast<std::size_t>(l)] += unit;
  return dist;
}

inline int max_load(const StaticState& state) {
  int m = 0;
  for (int l : state.loads) m = std::max(m, l);
  return m;
}

inline double average_request_distance(const AllocationTrace& trace) {
  if (trace.records.empty()) throw EmptyTrace("no allocations recorded");
  double total = 0.0;
  for (const auto& r : trace.records) total += r.hop;
  return total / static_cast<double>(trace.records.size());
}

namespace detail {

// Maps a user position to the nearest server for each embedding kind.
class NearestServer {
 public:
  explicit NearestServer(const Graph& g) : g_(&g) {
    const auto& emb = g.embedding;
    if (emb.kind == EmbeddingKind::Line || emb.kind == EmbeddingKind::Circle) {
      order_.resize(g.n);
      for (int i = 0; i < g.n; ++i) order_[i] = {emb.x[i], i};
      std::sort(order_.begin(), order_.end());
    }
  }

  int origin(RngStream& rng) const {
    const auto& emb = g_->embedding;
    switch (emb.kind) {
      case EmbeddingKind::Line:
        return nearest_on_line(rng.uniform() * emb.span);
      case EmbeddingKind::Circle:
        return nearest_on_circle(rng.uniform() * 2.0 * TopologySpec::kPi);
      case EmbeddingKind::Plane: {
        const double px = rng.uniform();
        const double py = rng.uniform();
        int best = 0;
        double best_d2 = 1e300;
        for (int v = 0; v < g_->n; ++v) {
          const double dx = emb.x[v] - px;
          const double dy = emb.y[v] - py;
          const double d2 = dx * dx + dy * dy;
          if (d2 < best_d2) {
            best_d2 = d2;
            best = v;
          }
        }
        return best;
      }
      case EmbeddingKind::None:
      default:
        throw InvalidArrival("spatial arrivals need an embedded graph");
    }
  }

 private:
  int nearest_on_line(double pos) const {
    auto it = std::lower_bound(order_.begin(), order_.end(), std::pair<double, int>{pos, -1});
    if (it == order_.begin()) return it->second;
    if (it == order_.end()) return std::prev(it)->second;
    const auto lo = std::prev(it);
    return (pos - lo->first) <= (it->first - pos) ? lo->second : it->second;
  }

  int nearest_on_circle(double angle) const {
    auto it = std::lower_bound(order_.begin(), order_.end(), std::pair<double, int>{angle, -1});
    const double two_pi = 2.0 * TopologySpec::kPi;
    const auto& lo = it == order_.begin() ? order_.back() : *std::prev(it);
    const auto& hi = it == order_.end() ? order_.front() : *it;
    auto arc = [&](double a, double b) {
      double d = a - b;
      if (d < 0) d = -d;
      return d <= two_pi - d ? d : two_pi - d;
    };
    return arc(angle, lo.first) <= arc(angle, hi.first) ? lo.second : hi.second;
  }

  const Graph* g_;
  std::vector<std::pair<double, int>> order_;
};

}  // namespace detail

// Places `jobs` sequential arrivals. Deterministic in (g, policy, seed);
// snapshot_times (sorted, 1-based arrival counts) select load distributions
// to capture along the way.
inline StaticResult run_static(const Graph& g, PolicyKind policy, long jobs,
                               ArrivalKind arrivals, std::uint64_t seed,
                               std::span<const long> snapshot_times = {}) {
  if (jobs < 1) throw InvalidConfig("need at least one job");
  if (g.n < 1) throw InvalidConfig("need at least one server");
  if (arrivals == ArrivalKind::SpatialNearest && !g.has_embedding())
    throw InvalidArrival("spatial arrivals need an embedded graph");

  StaticResult out;
  out.state.loads.assign(static_cast<std::size_t>(g.n), 0);
  out.trace.records.reserve(static_cast<std::size_t>(jobs));

  RngStream origin_rng(derive_seed(seed, stream::origin));
  RngStream peer_rng(derive_seed(seed, stream::peer));
  RngStream tie_rng(derive_seed(seed, stream::tie));

  std::unique_ptr<SamplingTable> table;
  std::unique_ptr<DistanceOracle> oracle;  // for policies that do not track hops
  if (g.n >= 2) {
    table = std::make_unique<SamplingTable>(g, policy);
    table->precompute();
  }
  std::unique_ptr<detail::NearestServer> nearest;
  if (arrivals == ArrivalKind::SpatialNearest)
    nearest = std::make_unique<detail::NearestServer>(g);

  auto& loads = out.state.loads;
  std::size_t snap_idx = 0;
  for (long t = 1; t <= jobs; ++t) {
    const int u = arrivals == ArrivalKind::UniformOrigin
                      ? static_cast<int>(origin_rng.index(static_cast<std::uint64_t>(g.n)))
                      : nearest->origin(origin_rng);
    AllocationRecord rec;
    rec.origin = u;
    if (g.n == 1) {
      rec.peer = u;
      rec.destination = u;
    } else {
      const PeerSample s = table->sample(u, peer_rng);
      const AllocationChoice choice = allocate(loads[u], loads[s.vertex], tie_rng);
      rec.peer = s.vertex;
      if (choice == AllocationChoice::Origin) {
        rec.destination = u;
      } else {
        rec.destination = s.vertex;
        if (s.hop >= 0) {
          rec.hop = s.hop;
        } else {
          if (!oracle) oracle = std::make_unique<DistanceOracle>(g);
          rec.hop = oracle->hop(u, s.vertex);
        }
      }
    }
    ++loads[static_cast<std::size_t>(rec.destination)];
    ++out.state.placed;
    out.trace.records.push_back(rec);
    while (snap_idx < snapshot_times.size() && snapshot_times[snap_idx] == t) {
      out.snapshots.push_back(load_distribution(out.state));
      ++snap_idx;
    }
  }
  return out;
}

}  // namespace potsim
