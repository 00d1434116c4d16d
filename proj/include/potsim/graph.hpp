#pragma once
// Server topologies: generators for the eight supported graph models,
// truncated BFS neighborhoods, and whole-graph attributes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "potsim/errors.hpp"
#include "potsim/rng.hpp"

namespace potsim {

enum class Topology {
  Line,
  Ring,
  BarabasiAlbert,
  RandomRegular,
  ErdosRenyi,
  RandomGeometric,
  SpatialLine,
  SpatialRing,
  Custom,  // hand-built or imported graphs
};

struct TopologySpec {
  Topology kind = Topology::Custom;
  int n = 0;
  int alpha = 0;        // BarabasiAlbert: edges attached per new vertex
  int beta = 0;         // RandomRegular: vertex degree
  double gamma = 0.0;   // ErdosRenyi: per-pair edge probability
  double radius = 0.0;  // RandomGeometric: connect below this distance; SpatialRing: circle radius
  double length = 0.0;  // SpatialLine: servers placed on [0, length)

  static TopologySpec line(int n) { return {Topology::Line, n}; }
  static TopologySpec ring(int n) { return {Topology::Ring, n}; }
  static TopologySpec barabasi_albert(int n, int alpha) {
    TopologySpec s{Topology::BarabasiAlbert, n};
    s.alpha = alpha;
    return s;
  }
  static TopologySpec random_regular(int n, int beta) {
    TopologySpec s{Topology::RandomRegular, n};
    s.beta = beta;
    return s;
  }
  static TopologySpec erdos_renyi(int n, double gamma) {
    TopologySpec s{Topology::ErdosRenyi, n};
    s.gamma = gamma;
    return s;
  }
  static TopologySpec random_geometric(int n, double radius) {
    TopologySpec s{Topology::RandomGeometric, n};
    s.radius = radius;
    return s;
  }
  static TopologySpec spatial_line(int n, double length) {
    TopologySpec s{Topology::SpatialLine, n};
    s.length = length;
    return s;
  }
  static TopologySpec spatial_ring(int n, double radius) {
    TopologySpec s{Topology::SpatialRing, n};
    s.radius = radius;
    return s;
  }

  void validate() const {
    if (kind == Topology::Custom) return;
    if (n < 2) throw InvalidSpec("topology needs n >= 2, got n=" + std::to_string(n));
    switch (kind) {
      case Topology::BarabasiAlbert:
        if (alpha < 1) throw InvalidSpec("barabasi-albert needs alpha >= 1");
        if (alpha > n - 1) throw InvalidSpec("barabasi-albert needs alpha <= n-1");
        break;
      case Topology::RandomRegular:
        if (beta < 3) throw InvalidSpec("random-regular needs beta >= 3");
        if (beta > n - 1) throw InvalidSpec("random-regular needs beta <= n-1");
        if ((static_cast<long long>(n) * beta) % 2 != 0)
          throw InvalidSpec("random-regular needs n*beta even");
        break;
      case Topology::ErdosRenyi:
        if (gamma < std::log(static_cast<double>(n)) / n)
          throw InvalidSpec("erdos-renyi needs gamma >= ln(n)/n");
        if (gamma > 1.0) throw InvalidSpec("erdos-renyi needs gamma <= 1");
        break;
      case Topology::RandomGeometric: {
        const double threshold = std::sqrt(std::log(static_cast<double>(n)) / (kPi * n));
        if (radius < threshold)
          throw InvalidSpec("random-geometric needs radius >= sqrt(ln(n)/(pi*n))");
        break;
      }
      case Topology::SpatialLine:
        if (!(length > 0.0)) throw InvalidSpec("spatial-line needs length > 0");
        break;
      case Topology::SpatialRing:
        if (!(radius > 0.0)) throw InvalidSpec("spatial-ring needs radius > 0");
        break;
      default:
        break;
    }
  }

  std::string name() const {
    switch (kind) {
      case Topology::Line: return "line";
      case Topology::Ring: return "ring";
      case Topology::BarabasiAlbert: return "ba";
      case Topology::RandomRegular: return "rr";
      case Topology::ErdosRenyi: return "er";
      case Topology::RandomGeometric: return "rgg";
      case Topology::SpatialLine: return "sline";
      case Topology::SpatialRing: return "sring";
      case Topology::Custom: return "custom";
    }
    return "custom";
  }

  std::string params() const {
    std::ostringstream os;
    switch (kind) {
      case Topology::BarabasiAlbert: os << "alpha=" << alpha; break;
      case Topology::RandomRegular: os << "beta=" << beta; break;
      case Topology::ErdosRenyi: os << "gamma=" << gamma; break;
      case Topology::RandomGeometric: os << "radius=" << radius; break;
      case Topology::SpatialLine: os << "length=" << length; break;
      case Topology::SpatialRing: os << "radius=" << radius; break;
      default: break;
    }
    return os.str();
  }

  static constexpr double kPi = 3.14159265358979323846;
};

enum class EmbeddingKind { None, Line, Circle, Plane };

struct Embedding {
  EmbeddingKind kind = EmbeddingKind::None;
  std::vector<double> x;  // position on the line, angle in radians, or x coordinate
  std::vector<double> y;  // Plane only
  double span = 0.0;      // Line: positions live in [0, span); Circle: radius
};

struct Graph {
  int n = 0;
  std::vector<std::vector<int>> adj;  // per-vertex sorted neighbor lists
  Embedding embedding;
  TopologySpec spec;  // which generator produced the graph

  bool has_embedding() const { return embedding.kind != EmbeddingKind::None; }

  std::size_t edge_count() const {
    std::size_t deg_sum = 0;
    for (const auto& nb : adj) deg_sum += nb.size();
    return deg_sum / 2;
  }

  // Checks the structural invariants: ids in range, sorted lists, no
  // self-loops, no duplicates, symmetric adjacency.
  void validate() const {
    if (static_cast<int>(adj.size()) != n) throw InvalidSpec("adjacency size != n");
    for (int u = 0; u < n; ++u) {
      const auto& nb = adj[u];
      for (std::size_t i = 0; i < nb.size(); ++i) {
        const int v = nb[i];
        if (v < 0 || v >= n) throw InvalidSpec("neighbor id out of range");
        if (v == u) throw InvalidSpec("self-loop at vertex " + std::to_string(u));
        if (i > 0 && nb[i - 1] >= v) throw InvalidSpec("adjacency not sorted/deduplicated");
        if (!std::binary_search(adj[v].begin(), adj[v].end(), u))
          throw InvalidSpec("adjacency not symmetric");
      }
    }
  }
};

namespace detail {

// BFS distances from src into dist (-1 = unreachable). Returns reached count.
inline int bfs_fill(const std::vector<std::vector<int>>& adj, int src, std::vector<int>& dist,
                    std::vector<int>& queue) {
  dist.assign(adj.size(), -1);
  queue.clear();
  queue.push_back(src);
  dist[src] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int u = queue[head];
    const int du = dist[u];
    for (int v : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = du + 1;
        queue.push_back(v);
      }
    }
  }
  return static_cast<int>(queue.size());
}

inline bool connected(const std::vector<std::vector<int>>& adj) {
  if (adj.empty()) return true;
  std::vector<int> dist, queue;
  return bfs_fill(adj, 0, dist, queue) == static_cast<int>(adj.size());
}

inline void sort_adjacency(std::vector<std::vector<int>>& adj) {
  for (auto& nb : adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}

inline std::uint64_t edge_key(int u, int v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
}

}  // namespace detail

inline bool is_connected(const Graph& g) { return detail::connected(g.adj); }

// -------------------------------------------------------------------------
// generators

namespace detail {

inline std::vector<std::vector<int>> path_edges(int n) {
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i + 1 < n; ++i) {
    adj[i].push_back(i + 1);
    adj[i + 1].push_back(i);
  }
  return adj;
}

inline std::vector<std::vector<int>> cycle_edges(int n) {
  if (n == 2) return path_edges(2);  // simple graph: the 2-cycle collapses to one edge
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  return adj;
}

// Preferential attachment growth, seeded with a star on alpha+1 vertices.
// Each new vertex attaches alpha edges to distinct existing vertices chosen
// with probability proportional to degree.
inline std::vector<std::vector<int>> barabasi_albert_edges(int n, int alpha, RngStream& rng) {
  std::vector<std::vector<int>> adj(n);
  std::vector<int> endpoint_pool;  // one entry per edge endpoint
  endpoint_pool.reserve(static_cast<std::size_t>(2) * alpha * n);
  for (int leaf = 1; leaf <= alpha; ++leaf) {
    adj[0].push_back(leaf);
    adj[leaf].push_back(0);
    endpoint_pool.push_back(0);
    endpoint_pool.push_back(leaf);
  }
  std::vector<int> targets;
  targets.reserve(alpha);
  for (int v = alpha + 1; v < n; ++v) {
    targets.clear();
    while (static_cast<int>(targets.size()) < alpha) {
      const int t = endpoint_pool[rng.index(endpoint_pool.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end())
        targets.push_back(t);
    }
    for (int t : targets) {
      adj[v].push_back(t);
      adj[t].push_back(v);
      endpoint_pool.push_back(v);
      endpoint_pool.push_back(t);
    }
  }
  return adj;
}

// One pairing attempt over the degree stubs; pairs are drawn uniformly and
// redrawn when they would create a loop or a repeated edge. Returns false
// when the leftover stubs admit no valid pair, in which case the caller
// restarts with a fresh stream.
inline bool random_regular_attempt(int n, int beta, RngStream& rng,
                                   std::vector<std::vector<int>>& adj) {
  adj.assign(n, {});
  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(n) * beta);
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < beta; ++i) stubs.push_back(v);
  std::unordered_set<std::uint64_t> used;
  used.reserve(stubs.size());
  std::size_t fail_streak = 0;
  while (!stubs.empty()) {
    const std::size_t i = rng.index(stubs.size());
    std::size_t j = rng.index(stubs.size() - 1);
    if (j >= i) ++j;
    const int u = stubs[i];
    const int v = stubs[j];
    if (u == v || used.count(edge_key(u, v))) {
      if (++fail_streak > 200 + 20 * stubs.size()) return false;
      continue;
    }
    fail_streak = 0;
    used.insert(edge_key(u, v));
    adj[u].push_back(v);
    adj[v].push_back(u);
    const std::size_t a = i > j ? i : j;
    const std::size_t b = i > j ? j : i;
    stubs[a] = stubs.back();
    stubs.pop_back();
    stubs[b] = stubs.back();
    stubs.pop_back();
  }
  return true;
}

// G(n, gamma) via geometric skipping over the ordered pair sequence.
inline std::vector<std::vector<int>> erdos_renyi_edges(int n, double gamma, RngStream& rng) {
  std::vector<std::vector<int>> adj(n);
  if (gamma >= 1.0) {
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) {
        adj[u].push_back(v);
        adj[v].push_back(u);
      }
    return adj;
  }
  const double log_skip = std::log1p(-gamma);
  long long idx = -1;
  const long long total = static_cast<long long>(n) * (n - 1) / 2;
  while (true) {
    const double u01 = rng.uniform();
    idx += 1 + static_cast<long long>(std::floor(std::log1p(-u01) / log_skip));
    if (idx >= total) break;
    // map linear index to pair (u, v), u < v
    long long rem = idx;
    int u = 0;
    long long row = n - 1;
    while (rem >= row) {
      rem -= row;
      --row;
      ++u;
    }
    const int v = u + 1 + static_cast<int>(rem);
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

// n points uniform in [0,1)^2, edge when euclidean distance < radius.
// Cell grid keeps the candidate scan local.
inline std::vector<std::vector<int>> random_geometric_edges(int n, double radius, RngStream& rng,
                                                            std::vector<double>& xs,
                                                            std::vector<double>& ys) {
  xs.resize(n);
  ys.resize(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = rng.uniform();
    ys[i] = rng.uniform();
  }
  const int cells = std::max(1, static_cast<int>(std::floor(1.0 / radius)));
  std::vector<std::vector<int>> grid(static_cast<std::size_t>(cells) * cells);
  auto cell_of = [&](double a) {
    int c = static_cast<int>(a * cells);
    return c >= cells ? cells - 1 : c;
  };
  for (int i = 0; i < n; ++i)
    grid[static_cast<std::size_t>(cell_of(xs[i])) * cells + cell_of(ys[i])].push_back(i);
  std::vector<std::vector<int>> adj(n);
  const double r2 = radius * radius;
  for (int i = 0; i < n; ++i) {
    const int cx = cell_of(xs[i]);
    const int cy = cell_of(ys[i]);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        const int gx = cx + dx;
        const int gy = cy + dy;
        if (gx < 0 || gy < 0 || gx >= cells || gy >= cells) continue;
        for (int j : grid[static_cast<std::size_t>(gx) * cells + gy]) {
          if (j <= i) continue;
          const double ddx = xs[i] - xs[j];
          const double ddy = ys[i] - ys[j];
          if (ddx * ddx + ddy * ddy < r2) {
            adj[i].push_back(j);
            adj[j].push_back(i);
          }
        }
      }
    }
  }
  return adj;
}

// Servers sorted by position; consecutive servers share an edge (plus the
// wrap-around edge for the ring). Positional ties break by vertex id.
inline std::vector<std::vector<int>> position_chain_edges(const std::vector<double>& pos,
                                                          bool close_cycle) {
  const int n = static_cast<int>(pos.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return pos[a] != pos[b] ? pos[a] < pos[b] : a < b;
  });
  std::vector<std::vector<int>> adj(n);
  auto link = [&](int a, int b) {
    if (a == b) return;
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (int i = 0; i + 1 < n; ++i) link(order[i], order[i + 1]);
  if (close_cycle && n > 2) link(order[n - 1], order[0]);
  return adj;
}

}  // namespace detail

// Builds a connected graph from the given model. Deterministic in
// (spec, seed); random models that come out disconnected are regenerated
// from a fresh derived seed, up to max_attempts.
inline Graph build_graph(const TopologySpec& spec, std::uint64_t seed, int max_attempts = 100) {
  spec.validate();
  Graph g;
  g.n = spec.n;
  g.spec = spec;

  switch (spec.kind) {
    case Topology::Line:
      g.adj = detail::path_edges(spec.n);
      break;
    case Topology::Ring:
      g.adj = detail::cycle_edges(spec.n);
      break;
    case Topology::SpatialLine: {
      RngStream rng(derive_seed(seed, stream::graph));
      g.embedding.kind = EmbeddingKind::Line;
      g.embedding.span = spec.length;
      g.embedding.x.resize(spec.n);
      for (auto& x : g.embedding.x) x = rng.uniform() * spec.length;
      g.adj = detail::position_chain_edges(g.embedding.x, false);
      break;
    }
    case Topology::SpatialRing: {
      RngStream rng(derive_seed(seed, stream::graph));
      g.embedding.kind = EmbeddingKind::Circle;
      g.embedding.span = spec.radius;
      g.embedding.x.resize(spec.n);
      for (auto& a : g.embedding.x) a = rng.uniform() * 2.0 * TopologySpec::kPi;
      g.adj = detail::position_chain_edges(g.embedding.x, true);
      break;
    }
    case Topology::BarabasiAlbert: {
      RngStream rng(derive_seed(seed, stream::graph));
      g.adj = detail::barabasi_albert_edges(spec.n, spec.alpha, rng);
      break;
    }
    case Topology::RandomRegular: {
      for (int attempt = 0; attempt < max_attempts; ++attempt) {
        RngStream rng(derive_seed(seed, stream::graph + static_cast<std::uint64_t>(attempt) * 1000));
        if (!detail::random_regular_attempt(spec.n, spec.beta, rng, g.adj)) continue;
        if (detail::connected(g.adj)) {
          detail::sort_adjacency(g.adj);
          return g;
        }
      }
      throw ConnectivityFailure("random-regular: no connected graph after " +
                                std::to_string(max_attempts) + " attempts");
    }
    case Topology::ErdosRenyi: {
      for (int attempt = 0; attempt < max_attempts; ++attempt) {
        RngStream rng(derive_seed(seed, stream::graph + static_cast<std::uint64_t>(attempt) * 1000));
        g.adj = detail::erdos_renyi_edges(spec.n, spec.gamma, rng);
        if (detail::connected(g.adj)) {
          detail::sort_adjacency(g.adj);
          return g;
        }
      }
      throw ConnectivityFailure("erdos-renyi: no connected graph after " +
                                std::to_string(max_attempts) + " attempts");
    }
    case Topology::RandomGeometric: {
      for (int attempt = 0; attempt < max_attempts; ++attempt) {
        RngStream rng(derive_seed(seed, stream::graph + static_cast<std::uint64_t>(attempt) * 1000));
        g.adj = detail::random_geometric_edges(spec.n, spec.radius, rng, g.embedding.x,
                                               g.embedding.y);
        if (detail::connected(g.adj)) {
          g.embedding.kind = EmbeddingKind::Plane;
          g.embedding.span = 1.0;
          detail::sort_adjacency(g.adj);
          return g;
        }
      }
      throw ConnectivityFailure("random-geometric: no connected graph after " +
                                std::to_string(max_attempts) + " attempts");
    }
    case Topology::Custom:
      throw InvalidSpec("cannot generate a custom topology");
  }
  detail::sort_adjacency(g.adj);
  return g;
}

// -------------------------------------------------------------------------
// shortest-path structure

// Truncated BFS layers around one vertex. `entries` lists every other vertex
// within hop radius k, in BFS layer order; the origin itself sits at hop 0.
struct DistanceField {
  int origin = 0;
  int radius = 0;
  std::vector<std::pair<int, int>> entries;  // (vertex, hop), hop in 1..radius

  std::size_t size() const { return entries.size(); }

  std::optional<int> hop(int v) const {
    if (v == origin) return 0;
    for (const auto& [w, h] : entries)
      if (w == v) return h;
    return std::nullopt;
  }
};

inline DistanceField distances_up_to_k(const Graph& g, int origin, int k) {
  DistanceField field;
  field.origin = origin;
  field.radius = k;
  thread_local std::vector<int> dist;
  thread_local std::vector<int> queue;
  dist.assign(g.n, -1);
  queue.clear();
  queue.push_back(origin);
  dist[origin] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int u = queue[head];
    const int du = dist[u];
    if (du >= k) break;  // deeper layers are outside the field
    for (int v : g.adj[u]) {
      if (dist[v] < 0) {
        dist[v] = du + 1;
        queue.push_back(v);
        field.entries.emplace_back(v, du + 1);
      }
    }
  }
  return field;
}

// -------------------------------------------------------------------------
// attributes

inline double graph_density(const Graph& g) {
  return 2.0 * static_cast<double>(g.edge_count()) /
         (static_cast<double>(g.n) * (g.n - 1));
}

struct PathSummary {
  double average_length = 0.0;
  int diameter = 0;
};

// All-sources BFS; throws Disconnected when some pair is unreachable.
inline PathSummary path_summary(const Graph& g) {
  PathSummary out;
  long long total = 0;
  std::vector<int> dist, queue;
  for (int u = 0; u < g.n; ++u) {
    if (detail::bfs_fill(g.adj, u, dist, queue) != g.n)
      throw Disconnected("graph is not connected");
    for (int v = 0; v < g.n; ++v) {
      total += dist[v];
      if (dist[v] > out.diameter) out.diameter = dist[v];
    }
  }
  out.average_length =
      static_cast<double>(total) / (static_cast<double>(g.n) * (g.n - 1));
  return out;
}

inline double average_path_length(const Graph& g) { return path_summary(g).average_length; }

inline int diameter(const Graph& g) { return path_summary(g).diameter; }

// -------------------------------------------------------------------------
// hop-distance oracle

// Answers hop(u, v) queries. Paths and cycles are detected structurally and
// answered in O(1); other graphs use BFS rows, cached in full when the graph
// is small enough. One oracle serves one single-threaded simulation run.
class DistanceOracle {
 public:
  explicit DistanceOracle(const Graph& g, int full_cache_limit = 2048) : g_(&g) {
    if (detect_chain()) return;
    mode_ = g.n <= full_cache_limit ? Mode::CachedBfs : Mode::FreshBfs;
    if (mode_ == Mode::CachedBfs) rows_.resize(g.n);
  }

  int hop(int u, int v) const {
    if (u == v) return 0;
    switch (mode_) {
      case Mode::PathRank:
        return std::abs(rank_[u] - rank_[v]);
      case Mode::CycleRank: {
        int d = std::abs(rank_[u] - rank_[v]);
        return std::min(d, g_->n - d);
      }
      case Mode::CachedBfs: {
        auto& row = rows_[u];
        if (row.empty()) detail::bfs_fill(g_->adj, u, row, queue_);
        if (row[v] < 0) throw Disconnected("no path between queried vertices");
        return row[v];
      }
      case Mode::FreshBfs:
      default:
        detail::bfs_fill(g_->adj, u, scratch_, queue_);
        if (scratch_[v] < 0) throw Disconnected("no path between queried vertices");
        return scratch_[v];
    }
  }

 private:
  enum class Mode { PathRank, CycleRank, CachedBfs, FreshBfs };

  // Recognize path/cycle graphs by degree pattern and assign traversal ranks.
  bool detect_chain() {
    const int n = g_->n;
    int deg1 = 0, deg2 = 0;
    int start = 0;
    for (int v = 0; v < n; ++v) {
      const auto d = g_->adj[v].size();
      if (d == 1) {
        ++deg1;
        start = v;
      } else if (d == 2) {
        ++deg2;
      } else {
        return false;
      }
    }
    const bool path = deg1 == 2 && deg1 + deg2 == n;
    const bool cycle = deg1 == 0 && deg2 == n && n >= 3;
    if (!path && !cycle) return false;
    if (cycle) start = 0;
    rank_.assign(n, -1);
    int prev = -1, cur = start;
    for (int r = 0; r < n; ++r) {
      if (cur < 0 || rank_[cur] >= 0) return false;  // premature loop: not a single chain
      rank_[cur] = r;
      int next = -1;
      for (int w : g_->adj[cur])
        if (w != prev) {
          next = w;
          break;
        }
      prev = cur;
      cur = next;
    }
    mode_ = path ? Mode::PathRank : Mode::CycleRank;
    return true;
  }

  const Graph* g_;
  Mode mode_ = Mode::FreshBfs;
  std::vector<int> rank_;
  mutable std::vector<std::vector<int>> rows_;
  mutable std::vector<int> scratch_;
  mutable std::vector<int> queue_;
};

// -------------------------------------------------------------------------
// edge-list text format: `n <count>`, one `u v` line per edge, then optional
// `pos <vertex> <coords...>` lines for embedded graphs.

inline void save_edge_list(const Graph& g, std::ostream& out) {
  out << "n " << g.n << "\n";
  for (int u = 0; u < g.n; ++u)
    for (int v : g.adj[u])
      if (u < v) out << u << " " << v << "\n";
  if (g.has_embedding()) {
    out.precision(17);
    for (int v = 0; v < g.n; ++v) {
      out << "pos " << v << " " << g.embedding.x[v];
      if (g.embedding.kind == EmbeddingKind::Plane) out << " " << g.embedding.y[v];
      out << "\n";
    }
  }
}

inline void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  save_edge_list(g, out);
}

inline Graph load_edge_list(std::istream& in) {
  Graph g;
  std::string tok;
  if (!(in >> tok) || tok != "n" || !(in >> g.n) || g.n < 1)
    throw ParseError("edge list must start with 'n <count>'");
  g.adj.assign(g.n, {});
  g.spec.kind = Topology::Custom;
  g.spec.n = g.n;
  auto check_vertex = [&](long long v) {
    if (v < 0 || v >= g.n) throw ParseError("vertex id out of range in edge list");
    return static_cast<int>(v);
  };
  while (in >> tok) {
    if (tok == "pos") {
      long long raw_v;
      if (!(in >> raw_v)) throw ParseError("malformed pos line");
      const int v = check_vertex(raw_v);
      if (g.embedding.x.empty()) g.embedding.x.assign(g.n, 0.0);
      double a;
      if (!(in >> a)) throw ParseError("malformed pos line");
      g.embedding.x[v] = a;
      // a second coordinate on the same line means a planar embedding
      while (in.peek() == ' ' || in.peek() == '\t') in.get();
      if (in.peek() != '\n' && in.peek() != '\r' && in.peek() != EOF) {
        if (g.embedding.y.empty()) g.embedding.y.assign(g.n, 0.0);
        if (!(in >> g.embedding.y[v])) throw ParseError("malformed pos line");
      }
    } else {
      long long raw_u, raw_v;
      try {
        raw_u = std::stoll(tok);
      } catch (const std::exception&) {
        throw ParseError("unexpected token '" + tok + "' in edge list");
      }
      if (!(in >> raw_v)) throw ParseError("dangling edge endpoint");
      const int u = check_vertex(raw_u);
      const int v = check_vertex(raw_v);
      if (u == v) throw ParseError("self-loop in edge list");
      g.adj[u].push_back(v);
      g.adj[v].push_back(u);
    }
  }
  detail::sort_adjacency(g.adj);
  if (!g.embedding.x.empty()) {
    g.embedding.kind = g.embedding.y.empty() ? EmbeddingKind::Line : EmbeddingKind::Plane;
    g.embedding.span = 0.0;
    for (double a : g.embedding.x)
      if (a > g.embedding.span) g.embedding.span = a;
  }
  return g;
}

inline Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return load_edge_list(in);
}

}  // namespace potsim
