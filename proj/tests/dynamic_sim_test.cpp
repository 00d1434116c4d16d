#include "potsim/dynamic_sim.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "potsim/graph.hpp"

using namespace potsim;

namespace {

JointDistribution product_of_marginals(const JointDistribution& j) {
  const LoadDistribution a = j.marginal_first();
  const LoadDistribution b = j.marginal_second();
  JointDistribution out;
  out.side = j.side;
  out.p.assign(static_cast<std::size_t>(out.side) * out.side, 0.0);
  for (int x = 0; x < out.side; ++x)
    for (int y = 0; y < out.side; ++y)
      out.p[static_cast<std::size_t>(x) * out.side + y] = a.at(x) * b.at(y);
  return out;
}

}  // namespace

TEST(DynamicConfig, Validation) {
  DynamicConfig cfg = DynamicConfig::make(10, 0.5, 1.0, PolicyKind::unif(2), 100, 1);
  EXPECT_NO_THROW(cfg.validate());

  DynamicConfig bad = cfg;
  bad.lambda = 1.0;  // lambda >= mu refused
  EXPECT_THROW(bad.validate(), Unstable);

  bad = cfg;
  bad.lambda = 0.0;
  EXPECT_THROW(bad.validate(), InvalidConfig);

  bad = cfg;
  bad.horizon_arrivals = 0;
  EXPECT_THROW(bad.validate(), InvalidConfig);

  bad = cfg;
  bad.warmup_fraction = 1.0;
  EXPECT_THROW(bad.validate(), InvalidConfig);

  bad = cfg;
  bad.joint_pairs = {{0, 10}};
  EXPECT_THROW(bad.validate(), InvalidConfig);

  EXPECT_EQ(cfg.joint_pairs.size(), 3u);  // defaults when n > 8
  EXPECT_TRUE(DynamicConfig::make(5, 0.5, 1.0, PolicyKind::pot(), 10, 1).joint_pairs.empty());
}

TEST(RunDynamic, ConservesJobs) {
  DynamicConfig cfg = DynamicConfig::make(50, 0.8, 1.0, PolicyKind::unif(2), 200'000, 21);
  const DynamicResult r = run_dynamic(cfg);
  EXPECT_EQ(r.arrivals, cfg.horizon_arrivals);
  EXPECT_EQ(static_cast<long long>(r.arrivals) - static_cast<long long>(r.departures),
            r.in_system);
  EXPECT_GE(r.in_system, 0);
}

TEST(RunDynamic, DeterministicPerSeed) {
  DynamicConfig cfg = DynamicConfig::make(30, 0.9, 1.0, PolicyKind::invsq(3), 100'000, 5);
  cfg.record_jobs = true;
  const DynamicResult a = run_dynamic(cfg);
  const DynamicResult b = run_dynamic(cfg);
  EXPECT_EQ(a.end_time, b.end_time);
  EXPECT_EQ(a.jobs.hop_sum, b.jobs.hop_sum);
  EXPECT_EQ(a.jobs.sojourn_sum, b.jobs.sojourn_sum);
  ASSERT_EQ(a.jobs.records.size(), b.jobs.records.size());
  for (std::size_t i = 0; i < a.jobs.records.size(); i += 97) {
    EXPECT_EQ(a.jobs.records[i].destination, b.jobs.records[i].destination);
    EXPECT_EQ(a.jobs.records[i].departure, b.jobs.records[i].departure);
  }

  DynamicConfig other = cfg;
  other.seed = 6;
  EXPECT_NE(run_dynamic(other).jobs.sojourn_sum, a.jobs.sojourn_sum);
}

TEST(RunDynamic, RecordsAreCoherent) {
  DynamicConfig cfg = DynamicConfig::make(20, 0.7, 1.0, PolicyKind::unif(2), 50'000, 33);
  cfg.record_jobs = true;
  const DynamicResult r = run_dynamic(cfg);
  ASSERT_EQ(r.jobs.records.size(), static_cast<std::size_t>(r.jobs.arrived));
  long long departed = 0;
  double sojourn = 0.0, hops = 0.0;
  for (const auto& rec : r.jobs.records) {
    EXPECT_GE(rec.arrival, r.measure_start);
    EXPECT_LE(rec.arrival, r.end_time);
    hops += rec.hop;
    if (rec.departed()) {
      ++departed;
      EXPECT_GT(rec.departure, rec.arrival);
      sojourn += rec.departure - rec.arrival;
    }
  }
  EXPECT_EQ(departed, r.jobs.departed);
  EXPECT_DOUBLE_EQ(hops, r.jobs.hop_sum);
  EXPECT_NEAR(sojourn, r.jobs.sojourn_sum, 1e-6);
}

TEST(RunDynamic, MM1MatchesClosedForm) {
  // single server: the probe collapses and the system is a plain M/M/1
  DynamicConfig cfg = DynamicConfig::make(1, 0.5, 1.0, PolicyKind::pot(), 1'000'000, 9);
  const DynamicResult r = run_dynamic(cfg);
  const LoadDistribution pdf = occupancy_pdf(r.occupancy);
  EXPECT_LE(total_variation(pdf, oracles::mm1_pdf(0.5, 64)), 0.01);
  EXPECT_NEAR(mean_sojourn_time(r.jobs), 2.0, 0.05);
  EXPECT_EQ(mean_request_distance(r.jobs), 0.0);
}

TEST(OccupancyEstimatorBasics, IdleWindowPutsAllMassAtZero) {
  OccupancyEstimator est(5, 1.0);
  est.finalize(3.0);  // no moves: every server idle for the whole window
  const LoadDistribution pdf = est.pdf();
  ASSERT_EQ(pdf.p.size(), 1u);
  EXPECT_DOUBLE_EQ(pdf.at(0), 1.0);
}

TEST(RunDynamic, OccupancyPdfIsNormalized) {
  DynamicConfig cfg = DynamicConfig::make(101, 0.9, 1.0, PolicyKind::invsq(5), 500'000, 3);
  const DynamicResult r = run_dynamic(cfg);
  const LoadDistribution pdf = occupancy_pdf(r.occupancy);
  EXPECT_NEAR(pdf.mass(), 1.0, 1e-9);
  for (double v : pdf.p) EXPECT_GE(v, 0.0);
}

TEST(RunDynamic, LittlesLaw) {
  DynamicConfig cfg = DynamicConfig::make(101, 0.95, 1.0, PolicyKind::unif(5), 10'000'000, 13);
  const DynamicResult r = run_dynamic(cfg);
  const double mean_q = occupancy_pdf(r.occupancy).mean();
  const double sojourn = mean_sojourn_time(r.jobs);
  EXPECT_NEAR(mean_q / cfg.lambda, sojourn, 0.02 * sojourn);
}

TEST(RunDynamic, RingServersAreExchangeable) {
  DynamicConfig cfg = DynamicConfig::make(10, 0.9, 1.0, PolicyKind::unif(2), 2'000'000, 7);
  cfg.per_server_occupancy = true;
  const DynamicResult r = run_dynamic(cfg);
  double worst = 0.0;
  for (int a = 0; a < cfg.n; ++a)
    for (int b = a + 1; b < cfg.n; ++b)
      worst = std::max(worst, total_variation(r.per_server->pdf(a), r.per_server->pdf(b)));
  EXPECT_LE(worst, 0.02);
}

TEST(RunDynamic, JointMarginalsMatchServerPdfs) {
  DynamicConfig cfg = DynamicConfig::make(10, 0.9, 1.0, PolicyKind::unif(2), 2'000'000, 17);
  cfg.per_server_occupancy = true;
  const DynamicResult r = run_dynamic(cfg);
  const JointDistribution j = joint_pdf(r.joints, {0, 1});
  EXPECT_LE(total_variation(j.marginal_first(), r.per_server->pdf(0)), 0.01);
  EXPECT_LE(total_variation(j.marginal_second(), r.per_server->pdf(1)), 0.01);
  EXPECT_THROW(joint_pdf(r.joints, {3, 4}), UntrackedPair);
}

TEST(RunDynamic, JointDependsOnDistanceNotMeanField) {
  // joint law of a far pair differs from an adjacent pair, and the adjacent
  // joint stays far from the independence null: no mean-field decoupling
  DynamicConfig cfg = DynamicConfig::make(1000, 0.95, 1.0, PolicyKind::unif(2), 10'000'000, 5);
  const DynamicResult r = run_dynamic(cfg);
  const JointDistribution j01 = joint_pdf(r.joints, {0, 1});
  const JointDistribution j08 = joint_pdf(r.joints, {0, 8});
  EXPECT_NEAR(joint_distance(j01, j08), 0.215, 0.03);
  EXPECT_GT(joint_distance(j01, product_of_marginals(j01)), 0.05);
}

TEST(JointDistance, Examples) {
  JointDistribution a;
  a.side = 2;
  a.p = {0.25, 0.25, 0.25, 0.25};
  EXPECT_DOUBLE_EQ(joint_distance(a, a), 0.0);

  JointDistribution b;
  b.side = 3;
  b.p = {0, 0, 0, 0, 0, 0, 0, 0, 1.0};  // all mass at (2,2)
  JointDistribution c;
  c.side = 1;
  c.p = {1.0};  // all mass at (0,0)
  EXPECT_DOUBLE_EQ(joint_distance(b, c), 1.0);
}

TEST(MeanField, TailValues) {
  const LoadDistribution mf = mean_field_pot_pdf(0.95, 1.0, 2, 60);
  // survival at i: sum of bins from i on
  auto tail = [&](int i) {
    double s = 0.0;
    for (std::size_t j = i; j < mf.p.size(); ++j) s += mf.p[j];
    return s;
  };
  EXPECT_NEAR(tail(1), 0.95, 1e-12);
  EXPECT_NEAR(tail(2), 0.857375, 1e-12);
  EXPECT_NEAR(tail(3), std::pow(0.95, 7), 1e-12);
  EXPECT_NEAR(mf.mass(), 1.0, 1e-12);
  EXPECT_NEAR(mf.mean() / 0.95, 3.383, 0.001);  // mean sojourn via Little's law
}

TEST(MeanField, GeometricWhenSingleChoice) {
  const double rho = 0.6;
  const LoadDistribution mf = mean_field_pot_pdf(0.6, 1.0, 1, 80);
  for (int i = 0; i < 20; ++i)
    EXPECT_NEAR(mf.at(i), (1.0 - rho) * std::pow(rho, i), 1e-12);
}

TEST(MeanField, DegenerateAndInvalidRates) {
  const LoadDistribution idle = mean_field_pot_pdf(0.0, 1.0, 2, 10);
  EXPECT_DOUBLE_EQ(idle.at(0), 1.0);
  EXPECT_THROW(mean_field_pot_pdf(1.0, 1.0, 2, 10), InvalidRate);
  EXPECT_THROW(mean_field_pot_pdf(-0.1, 1.0, 2, 10), InvalidRate);
  EXPECT_THROW(mean_field_pot_pdf(0.5, 1.0, 0, 10), InvalidRate);
}

TEST(RunDynamic, RequestDistanceMatchesRingOracles) {
  // Unif: (k+1)/4; InvSq: H_k / (2 * H_k^(2)); k=1 coincides for both
  const std::uint64_t horizon = 2'000'000;
  for (int k : {1, 3}) {
    DynamicConfig u = DynamicConfig::make(101, 0.95, 1.0, PolicyKind::unif(k), horizon, 41);
    DynamicConfig i = DynamicConfig::make(101, 0.95, 1.0, PolicyKind::invsq(k), horizon, 41);
    const double rd_u = mean_request_distance(run_dynamic(u).jobs);
    const double rd_i = mean_request_distance(run_dynamic(i).jobs);
    EXPECT_NEAR(rd_u, (k + 1) / 4.0, 0.01 * ((k + 1) / 4.0) + 0.003) << k;
    const double expect_i = oracles::harmonic(k) / (2.0 * oracles::harmonic2(k));
    EXPECT_NEAR(rd_i, expect_i, 0.01 * expect_i + 0.003) << k;
    if (k == 1) EXPECT_NEAR(rd_u, rd_i, 0.005);
  }
}

TEST(RunDynamic, ErrorPathsAndEmptyEstimators) {
  EXPECT_THROW(mean_sojourn_time(JobRecords{}), NoDepartures);
  EXPECT_THROW(mean_request_distance(JobRecords{}), EmptyRecords);

  OccupancyEstimator est(4, 1.0);
  EXPECT_THROW(est.pdf(), NoMeasurement);  // never finalized past the warm-up
}

TEST(RunDynamic, GraphMismatchRejected) {
  const Graph g = build_graph(TopologySpec::ring(8), 1);
  DynamicConfig cfg = DynamicConfig::make(10, 0.5, 1.0, PolicyKind::pot(), 100, 1);
  EXPECT_THROW(run_dynamic(g, cfg), InvalidConfig);
}

TEST(RunDynamic, DepartureTimesAreOrderedWithinServers) {
  DynamicConfig cfg = DynamicConfig::make(12, 0.8, 1.0, PolicyKind::unif(2), 30'000, 71);
  cfg.record_jobs = true;
  const DynamicResult r = run_dynamic(cfg);
  // FCFS per server: departures of one server follow its arrival order
  std::vector<double> last_dep(static_cast<std::size_t>(cfg.n), -1.0);
  for (const auto& rec : r.jobs.records) {
    if (!rec.departed()) continue;
    EXPECT_GE(rec.departure, last_dep[static_cast<std::size_t>(rec.destination)]);
    last_dep[static_cast<std::size_t>(rec.destination)] = rec.departure;
  }
}

TEST(RunDynamic, AcceptsArbitraryGraphs) {
  // engine runs on any connected graph even though the study targets rings
  const Graph g = build_graph(TopologySpec::erdos_renyi(30, 0.2), 3);
  DynamicConfig cfg = DynamicConfig::make(30, 0.6, 1.0, PolicyKind::invsq(2), 100'000, 2);
  const DynamicResult r = run_dynamic(g, cfg);
  EXPECT_EQ(r.arrivals, cfg.horizon_arrivals);
  EXPECT_NEAR(occupancy_pdf(r.occupancy).mass(), 1.0, 1e-9);
}
