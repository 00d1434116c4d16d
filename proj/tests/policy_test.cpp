#include "potsim/policy.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "potsim/graph.hpp"

using namespace potsim;

namespace {

// every (origin, peer) probability of two tables is bitwise identical
void expect_tables_identical(const Graph& g, const SamplingTable& a, const SamplingTable& b) {
  for (int u = 0; u < g.n; ++u) {
    ASSERT_EQ(a.support_size(u), b.support_size(u));
    for (int v = 0; v < g.n; ++v) ASSERT_EQ(a.probability(u, v), b.probability(u, v));
  }
}

}  // namespace

TEST(PolicyKind, Validation) {
  EXPECT_THROW(PolicyKind::unif(0).validate(), InvalidSpec);
  EXPECT_THROW(PolicyKind::invsq(-1).validate(), InvalidSpec);
  EXPECT_NO_THROW(PolicyKind::pot().validate());
  EXPECT_NO_THROW(PolicyKind::unif(1).validate());
}

TEST(SamplingTable, RingInvSqExample) {
  const Graph g = build_graph(TopologySpec::ring(10), 1);
  const SamplingTable table(g, PolicyKind::invsq(2));
  EXPECT_DOUBLE_EQ(table.probability(0, 1), 0.4);
  EXPECT_DOUBLE_EQ(table.probability(0, 9), 0.4);
  EXPECT_DOUBLE_EQ(table.probability(0, 2), 0.1);
  EXPECT_DOUBLE_EQ(table.probability(0, 8), 0.1);
  EXPECT_DOUBLE_EQ(table.probability(0, 5), 0.0);
}

TEST(SamplingTable, RingUnifExample) {
  const Graph g = build_graph(TopologySpec::ring(10), 1);
  const SamplingTable table(g, PolicyKind::unif(2));
  for (int v : {1, 2, 8, 9}) EXPECT_DOUBLE_EQ(table.probability(0, v), 0.25);
  EXPECT_DOUBLE_EQ(table.probability(0, 5), 0.0);
  EXPECT_EQ(table.support_size(0), 4);
}

TEST(SamplingTable, OriginNeverSampled) {
  const Graph g = build_graph(TopologySpec::erdos_renyi(40, 0.12), 3);
  for (auto policy : {PolicyKind::pot(), PolicyKind::unif(2), PolicyKind::invsq(3)}) {
    const SamplingTable table(g, policy);
    for (int u = 0; u < g.n; ++u) EXPECT_EQ(table.probability(u, u), 0.0);
  }
}

TEST(SamplingTable, PotProbabilityClosedForm) {
  const Graph g = build_graph(TopologySpec::ring(101), 1);
  const SamplingTable table(g, PolicyKind::pot());
  for (int v = 1; v < g.n; ++v) EXPECT_DOUBLE_EQ(table.probability(0, v), 0.01);
  EXPECT_EQ(table.support_size(0), 100);
}

TEST(SamplingTable, RowsNormalizeAndRespectSupport) {
  for (const auto& spec : {TopologySpec::erdos_renyi(60, 0.1),
                           TopologySpec::barabasi_albert(60, 2),
                           TopologySpec::ring(60)}) {
    const Graph g = build_graph(spec, 17);
    const auto dist = oracles::floyd_warshall(g);
    for (auto policy : {PolicyKind::unif(3), PolicyKind::invsq(3)}) {
      const SamplingTable table(g, policy);
      for (int u = 0; u < g.n; ++u) {
        double total = 0.0;
        for (int v = 0; v < g.n; ++v) {
          const double p = table.probability(u, v);
          total += p;
          const bool in_hood = v != u && dist[u][v] <= policy.k;
          EXPECT_EQ(p > 0.0, in_hood);
          // cross-check against the definition evaluated independently
          EXPECT_NEAR(p, oracles::sampling_row(dist, u, policy)[v], 1e-12);
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
      }
    }
  }
}

TEST(SamplingTable, RingInvSqClosedForm) {
  // two vertices at each hop distance d get (1/d^2) / (2 * H_k^(2))
  const int n = 101, k = 7;
  const Graph g = build_graph(TopologySpec::ring(n), 1);
  const SamplingTable table(g, PolicyKind::invsq(k));
  const double h2 = oracles::harmonic2(k);
  for (int d = 1; d <= k; ++d) {
    const double expect = (1.0 / (double(d) * d)) / (2.0 * h2);
    EXPECT_NEAR(table.probability(0, d), expect, 1e-13);
    EXPECT_NEAR(table.probability(0, n - d), expect, 1e-13);
  }
}

TEST(SamplingTable, UnifOneEqualsInvSqOne) {
  for (const auto& spec : {TopologySpec::erdos_renyi(50, 0.12),
                           TopologySpec::random_regular(50, 3),
                           TopologySpec::spatial_ring(30, 1.0)}) {
    const Graph g = build_graph(spec, 23);
    expect_tables_identical(g, SamplingTable(g, PolicyKind::unif(1)),
                            SamplingTable(g, PolicyKind::invsq(1)));
  }
}

TEST(SamplingTable, UnifAtDiameterEqualsPot) {
  for (const auto& spec : {TopologySpec::ring(9), TopologySpec::erdos_renyi(40, 0.15),
                           TopologySpec::barabasi_albert(40, 2)}) {
    const Graph g = build_graph(spec, 29);
    expect_tables_identical(g, SamplingTable(g, PolicyKind::unif(diameter(g))),
                            SamplingTable(g, PolicyKind::pot()));
  }
}

TEST(SamplePeer, SingleCandidateIsDeterministic) {
  const Graph g = build_graph(TopologySpec::line(2), 1);
  RngStream rng(5);
  for (auto policy : {PolicyKind::pot(), PolicyKind::unif(1), PolicyKind::invsq(4)}) {
    const SamplingTable table(g, policy);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(table.sample(0, rng).vertex, 1);
  }
}

TEST(SamplePeer, EmpiricalFrequenciesMatchTable) {
  const Graph g = build_graph(TopologySpec::ring(10), 1);
  const long draws = 1'000'000;
  {
    const SamplingTable table(g, PolicyKind::unif(2));
    RngStream rng(101);
    std::map<int, long> freq;
    for (long i = 0; i < draws; ++i) ++freq[table.sample(0, rng).vertex];
    for (int v : {1, 2, 8, 9})
      EXPECT_NEAR(double(freq[v]) / draws, 0.25, 0.002);
  }
  {
    const SamplingTable table(g, PolicyKind::invsq(2));
    RngStream rng(102);
    std::map<int, long> freq;
    for (long i = 0; i < draws; ++i) ++freq[table.sample(0, rng).vertex];
    EXPECT_NEAR(double(freq[1]) / draws, 0.4, 0.002);
    EXPECT_NEAR(double(freq[9]) / draws, 0.4, 0.002);
    EXPECT_NEAR(double(freq[2]) / draws, 0.1, 0.002);
  }
}

TEST(SamplePeer, SampleReportsHopDistance) {
  const Graph g = build_graph(TopologySpec::ring(20), 1);
  const SamplingTable table(g, PolicyKind::invsq(4));
  const auto dist = oracles::floyd_warshall(g);
  RngStream rng(7);
  for (int i = 0; i < 2000; ++i) {
    const int u = static_cast<int>(rng.index(g.n));
    const PeerSample s = table.sample(u, rng);
    EXPECT_EQ(s.hop, dist[u][s.vertex]);
    EXPECT_NE(s.vertex, u);
  }
}

TEST(SamplePeer, ChiSquareGoodnessOfFit) {
  // 10^6 draws against the stored table at significance 0.001
  struct Case {
    TopologySpec spec;
    PolicyKind policy;
  };
  const Case cases[] = {
      {TopologySpec::ring(30), PolicyKind::invsq(3)},
      {TopologySpec::erdos_renyi(40, 0.12), PolicyKind::unif(2)},
      {TopologySpec::ring(101), PolicyKind::pot()},
  };
  const long draws = 1'000'000;
  std::uint64_t seed = 900;
  for (const auto& c : cases) {
    const Graph g = build_graph(c.spec, 41);
    const SamplingTable table(g, c.policy);
    const int u = 0;
    RngStream rng(seed++);
    std::map<int, long> freq;
    for (long i = 0; i < draws; ++i) ++freq[table.sample(u, rng).vertex];
    double stat = 0.0;
    int bins = 0;
    for (int v = 0; v < g.n; ++v) {
      const double p = table.probability(u, v);
      if (p == 0.0) continue;
      ++bins;
      const double expected = p * draws;
      const double observed = freq.count(v) ? double(freq[v]) : 0.0;
      stat += (observed - expected) * (observed - expected) / expected;
    }
    EXPECT_LT(stat, oracles::chi_square_crit_999(bins - 1)) << c.spec.name();
  }
}

TEST(Allocate, DeterministicWhenLoadsDiffer) {
  RngStream rng(1);
  EXPECT_EQ(allocate(3, 5, rng), AllocationChoice::Origin);
  EXPECT_EQ(allocate(5, 3, rng), AllocationChoice::Peer);
  EXPECT_EQ(allocate(0, 1, rng), AllocationChoice::Origin);
}

TEST(Allocate, FairCoinOnTies) {
  RngStream rng(77);
  const long trials = 1'000'000;
  long origin = 0;
  for (long i = 0; i < trials; ++i)
    origin += allocate(4, 4, rng) == AllocationChoice::Origin;
  EXPECT_NEAR(double(origin) / trials, 0.5, 0.002);
}

TEST(SamplingTable, RequiresTwoServers) {
  Graph g;
  g.n = 1;
  g.adj.assign(1, {});
  g.spec.kind = Topology::Custom;
  g.spec.n = 1;
  EXPECT_THROW(SamplingTable(g, PolicyKind::pot()), InvalidSpec);
}

TEST(SamplingTable, PrecomputeMatchesLazy) {
  const Graph g = build_graph(TopologySpec::erdos_renyi(50, 0.12), 53);
  const SamplingTable eager(g, PolicyKind::invsq(2));
  EXPECT_TRUE(eager.precompute());
  const SamplingTable lazy(g, PolicyKind::invsq(2));
  expect_tables_identical(g, eager, lazy);

  // a tiny cache budget forces transient rows; results must not change
  const SamplingTable tiny(g, PolicyKind::invsq(2), 8);
  EXPECT_FALSE(tiny.precompute());
  expect_tables_identical(g, eager, tiny);
}
