#pragma once
// Job-placement policies: per-origin peer sampling distributions and the
// two-choice allocation rule.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "potsim/errors.hpp"
#include "potsim/graph.hpp"
#include "potsim/rng.hpp"

namespace potsim {

enum class PolicyFamily { Pot, Unif, InvSq };

// Pot probes one peer uniformly over all other servers. Unif probes uniformly
// over the k-hop neighborhood. InvSq probes the k-hop neighborhood with
// probability proportional to 1/hop^2. One origin plus one probe, always.
struct PolicyKind {
  PolicyFamily family = PolicyFamily::Pot;
  int k = 0;  // hop radius; ignored for Pot

  static PolicyKind pot() { return {PolicyFamily::Pot, 0}; }
  static PolicyKind unif(int k) { return {PolicyFamily::Unif, k}; }
  static PolicyKind invsq(int k) { return {PolicyFamily::InvSq, k}; }

  bool uses_neighborhood() const { return family != PolicyFamily::Pot; }

  void validate() const {
    if (uses_neighborhood() && k < 1)
      throw InvalidSpec("proximity policies need k >= 1, got k=" + std::to_string(k));
  }

  std::string name() const {
    switch (family) {
      case PolicyFamily::Pot: return "pot";
      case PolicyFamily::Unif: return "unif";
      case PolicyFamily::InvSq: return "invsq";
    }
    return "pot";
  }

  bool operator==(const PolicyKind& o) const {
    return family == o.family && (family == PolicyFamily::Pot || k == o.k);
  }
};

enum class AllocationChoice { Origin, Peer };

// Least-loaded wins; ties go to a fair coin.
inline AllocationChoice allocate(long load_origin, long load_peer, RngStream& tie) {
  if (load_origin < load_peer) return AllocationChoice::Origin;
  if (load_peer < load_origin) return AllocationChoice::Peer;
  return tie.coin() ? AllocationChoice::Peer : AllocationChoice::Origin;
}

struct PeerSample {
  int vertex = 0;
  int hop = -1;  // hop distance to the origin; -1 when the policy does not track it
};

// Per-origin sampling distribution p_{uv}. Proximity rows hold the candidate
// list in BFS layer order together with exact and cumulative probabilities;
// one uniform variate and a binary search produce each draw. Pot needs no
// stored rows. Rows build lazily under a lock and are cached up to an entry
// budget; precompute() fills the cache up front, after which sampling is
// lock-free and the table can be shared read-only across threads.
class SamplingTable {
 public:
  static constexpr std::size_t kDefaultCacheEntries = 4'000'000;

  SamplingTable(const Graph& g, PolicyKind policy,
                std::size_t cache_entry_budget = kDefaultCacheEntries)
      : g_(&g), policy_(policy), n_(g.n), budget_(cache_entry_budget) {
    policy_.validate();
    if (n_ < 2) throw InvalidSpec("peer sampling needs at least two servers");
    if (policy_.uses_neighborhood()) rows_.resize(static_cast<std::size_t>(n_));
  }

  const PolicyKind& policy() const { return policy_; }
  int size() const { return n_; }

  PeerSample sample(int origin, RngStream& rng) const {
    if (!policy_.uses_neighborhood()) {
      auto j = static_cast<int>(rng.index(static_cast<std::uint64_t>(n_ - 1)));
      return {j + (j >= origin ? 1 : 0), -1};
    }
    const double u01 = rng.uniform();
    const Row& row = row_for(origin);
    const std::size_t idx = static_cast<std::size_t>(
        std::upper_bound(row.cum.begin(), row.cum.end(), u01) - row.cum.begin());
    return {row.cand[idx], row.hop[idx]};
  }

  double probability(int origin, int peer) const {
    if (origin == peer) return 0.0;
    if (!policy_.uses_neighborhood()) return 1.0 / static_cast<double>(n_ - 1);
    const Row& row = row_for(origin);
    for (std::size_t i = 0; i < row.cand.size(); ++i)
      if (row.cand[i] == peer) return row.prob[i];
    return 0.0;
  }

  // |N_k(origin)| for proximity policies, n-1 for Pot.
  int support_size(int origin) const {
    if (!policy_.uses_neighborhood()) return n_ - 1;
    return static_cast<int>(row_for(origin).cand.size());
  }

  // Builds every row now, up to the cache budget. Returns true when all rows
  // are resident afterwards.
  bool precompute() const {
    if (!policy_.uses_neighborhood()) return true;
    std::scoped_lock lock(mutex_);
    for (int u = 0; u < n_; ++u) {
      if (rows_[u]) continue;
      auto row = std::make_unique<Row>();
      fill_row(u, *row);
      const std::size_t entries = row->cand.size();
      if (cached_entries_ + entries > budget_) return false;
      cached_entries_ += entries;
      rows_[u] = std::move(row);
    }
    all_cached_.store(true, std::memory_order_release);
    return true;
  }

 private:
  struct Row {
    std::vector<int> cand;  // BFS layer order, nearest first
    std::vector<int> hop;
    std::vector<double> prob;
    std::vector<double> cum;  // inclusive prefix sums; back() pinned to 1
  };

  void fill_row(int origin, Row& row) const {
    row.cand.clear();
    row.hop.clear();
    const DistanceField field = distances_up_to_k(*g_, origin, policy_.k);
    const std::size_t m = field.size();
    row.cand.reserve(m);
    row.hop.reserve(m);
    for (const auto& [v, h] : field.entries) {
      row.cand.push_back(v);
      row.hop.push_back(h);
    }
    row.prob.assign(m, 0.0);
    row.cum.assign(m, 0.0);
    // Candidates sit in ascending-hop order, so weights descend; summing the
    // reversed sequence adds terms in increasing magnitude.
    double total = 0.0;
    if (policy_.family == PolicyFamily::InvSq) {
      for (std::size_t i = m; i-- > 0;) {
        const double d = static_cast<double>(row.hop[i]);
        total += 1.0 / (d * d);
      }
      for (std::size_t i = 0; i < m; ++i) {
        const double d = static_cast<double>(row.hop[i]);
        row.prob[i] = (1.0 / (d * d)) / total;
      }
    } else {
      for (std::size_t i = m; i-- > 0;) total += 1.0;
      for (std::size_t i = 0; i < m; ++i) row.prob[i] = 1.0 / total;
    }
    double running = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      running += row.prob[i];
      row.cum[i] = running;
    }
    if (m > 0) row.cum[m - 1] = 1.0;
  }

  const Row& row_for(int origin) const {
    if (all_cached_.load(std::memory_order_acquire)) return *rows_[origin];
    std::scoped_lock lock(mutex_);
    if (rows_[origin]) return *rows_[origin];
    thread_local Row transient;
    fill_row(origin, transient);
    if (cached_entries_ + transient.cand.size() <= budget_) {
      cached_entries_ += transient.cand.size();
      rows_[origin] = std::make_unique<Row>(transient);
      return *rows_[origin];
    }
    return transient;
  }

  const Graph* g_;
  PolicyKind policy_;
  int n_;
  std::size_t budget_;
  mutable std::vector<std::unique_ptr<Row>> rows_;
  mutable std::size_t cached_entries_ = 0;
  mutable std::atomic<bool> all_cached_{false};
  mutable std::mutex mutex_;
};

// Spec-level convenience wrappers.
inline SamplingTable build_sampling_table(const Graph& g, PolicyKind policy) {
  return SamplingTable(g, policy);
}

inline int sample_peer(const SamplingTable& table, int origin, RngStream& rng) {
  return table.sample(origin, rng).vertex;
}

inline double probability(const SamplingTable& table, int origin, int peer) {
  return table.probability(origin, peer);
}

}  // namespace potsim
