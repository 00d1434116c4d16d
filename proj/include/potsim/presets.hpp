#pragma once
// Named experiment presets. Each reproduces one study end to end and writes
// its CSV series under <out>/<preset>_<scale>/. Desk scale finishes quickly
// on a small machine; paper scale rebuilds the full-size sweeps.

#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "potsim/experiment.hpp"

namespace potsim {

struct PresetOptions {
  Scale scale = Scale::Desk;
  std::uint64_t seed = 1;
  int seed_count = 0;  // 0 = preset default
  std::string out_dir = "potsim_out";
  int workers = 1;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "tradeoff",       "deterministic-pdf", "tv-vs-n",      "rd-vs-n",    "random-graphs",
      "spatial-graphs", "tv-evolution",      "dynamic-pdfs", "dynamic-tables"};
  return names;
}

namespace presets {

namespace fs = std::filesystem;

struct Context {
  Scale scale;
  std::uint64_t seed;
  int seeds;
  fs::path dir;
  int workers;
  Manifest* manifest;
  std::string note;
};

inline int round_log(int n) {
  const int v = static_cast<int>(std::llround(std::log(static_cast<double>(n))));
  return v < 1 ? 1 : v;
}

// ---- shared static helpers ------------------------------------------------

struct PolicyStats {
  double tv_vs_pot = 0.0;
  double request_distance = 0.0;
  double max_load = 0.0;
};

struct ComparisonResult {
  std::map<std::string, PolicyStats> by_policy;  // keyed by PolicyChoice::str()
  double pot_request_distance = 0.0;
  double pot_max_load = 0.0;
  LoadDistribution pot_dist;
  std::map<std::string, LoadDistribution> dist_by_policy;
};

// Runs every policy against a paired Pot baseline on the same per-seed graph
// and averages the per-seed metrics.
inline ComparisonResult compare_policies(const TopologySpec& spec,
                                         const std::vector<PolicyChoice>& policies, long jobs,
                                         ArrivalKind arrivals, const Context& ctx) {
  ComparisonResult out;
  std::vector<LoadDistribution> pot_dists;
  std::map<std::string, std::vector<LoadDistribution>> dists;
  for (int s = 0; s < ctx.seeds; ++s) {
    const std::uint64_t seed = ctx.seed + static_cast<std::uint64_t>(s);
    const Graph g = build_graph(spec, seed);
    const StaticResult pot = run_static(g, PolicyKind::pot(), jobs, arrivals,
                                        derive_seed(seed, stream::baseline));
    const LoadDistribution pot_dist = load_distribution(pot.state);
    pot_dists.push_back(pot_dist);
    out.pot_request_distance += average_request_distance(pot.trace) / ctx.seeds;
    out.pot_max_load += static_cast<double>(max_load(pot.state)) / ctx.seeds;
    for (const auto& choice : policies) {
      const StaticResult r = run_static(g, choice.resolve(g.n), jobs, arrivals, seed);
      const LoadDistribution dist = load_distribution(r.state);
      PolicyStats& acc = out.by_policy[choice.str()];
      acc.tv_vs_pot += total_variation(dist, pot_dist) / ctx.seeds;
      acc.request_distance += average_request_distance(r.trace) / ctx.seeds;
      acc.max_load += static_cast<double>(max_load(r.state)) / ctx.seeds;
      dists[choice.str()].push_back(dist);
    }
  }
  out.pot_dist = detail::average_distributions(pot_dists);
  for (auto& [name, list] : dists) out.dist_by_policy[name] = detail::average_distributions(list);
  return out;
}

// ---- individual presets ---------------------------------------------------

// Average maximum load versus average request distance as the neighborhood
// radius grows, on a line of 1000 servers.
inline void tradeoff(const Context& ctx) {
  const int n = 1000;
  std::vector<int> ks;
  for (int k = 1; k < n; k *= 2) ks.push_back(k);
  ks.push_back(n);

  struct Row {
    int k;
    double max_load, rd;
  };
  std::vector<Row> rows(ks.size());
  run_parallel(ks.size(), ctx.workers, [&](std::size_t i) {
    StopWatch watch;
    double ml = 0.0, rd = 0.0;
    for (int s = 0; s < ctx.seeds; ++s) {
      const std::uint64_t seed = ctx.seed + static_cast<std::uint64_t>(s);
      const Graph g = build_graph(TopologySpec::line(n), seed);
      const StaticResult r =
          run_static(g, PolicyKind::unif(ks[i]), n, ArrivalKind::UniformOrigin, seed);
      ml += static_cast<double>(max_load(r.state)) / ctx.seeds;
      rd += average_request_distance(r.trace) / ctx.seeds;
    }
    rows[i] = {ks[i], ml, rd};
    ctx.manifest->add_run("tradeoff_k" + std::to_string(ks[i]), watch.seconds());
  });

  CsvFile csv(ctx.dir / "tradeoff.csv", ctx.note, "k,avg_max_load,avg_request_distance");
  for (const auto& r : rows) csv.line(csv_row(r.k, r.max_load, r.rd));
}

// Final load PDFs on the line and the ring for the proximity policies and Pot.
inline void deterministic_pdf(const Context& ctx) {
  const int n = ctx.scale == Scale::Paper ? 10'000 : 1'000;
  const std::vector<PolicyChoice> policies = {
      {PolicyFamily::Unif, KSpec::logn()},
      {PolicyFamily::InvSq, KSpec::logn()},
      {PolicyFamily::InvSq, KSpec::full_n()},
  };
  const TopologySpec specs[] = {TopologySpec::line(n), TopologySpec::ring(n)};
  run_parallel(2, ctx.workers, [&](std::size_t i) {
    StopWatch watch;
    const ComparisonResult cmp =
        compare_policies(specs[i], policies, n, ArrivalKind::UniformOrigin, ctx);
    auto emit = [&](const std::string& policy, const LoadDistribution& dist) {
      CsvFile csv(ctx.dir / ("pdf_" + specs[i].name() + "_" + policy + ".csv"), ctx.note,
                  "load,fraction");
      for (std::size_t l = 0; l < dist.p.size(); ++l) csv.line(csv_row(l, dist.p[l]));
    };
    emit("pot", cmp.pot_dist);
    for (const auto& [name, dist] : cmp.dist_by_policy) emit(name, dist);
    ctx.manifest->add_run("pdf_" + specs[i].name(), watch.seconds());
  });
}

// Total variation to Pot (tv-vs-n) or request distance (rd-vs-n) as the
// server count grows, on the line and the ring.
inline void versus_n(const Context& ctx, bool tv_metric) {
  const std::vector<int> ns = ctx.scale == Scale::Paper
                                  ? std::vector<int>{2000, 4000, 6000, 8000, 10000}
                                  : std::vector<int>{250, 500, 1000, 2000};
  const std::vector<PolicyChoice> policies = {
      {PolicyFamily::Unif, KSpec::logn()},
      {PolicyFamily::InvSq, KSpec::literal(1)},
      {PolicyFamily::InvSq, KSpec::logn()},
      {PolicyFamily::InvSq, KSpec::full_n()},
  };
  for (const char* topo : {"line", "ring"}) {
    struct Row {
      int n;
      std::string policy;
      int k;
      double value;
    };
    std::vector<std::vector<Row>> grid(ns.size());
    run_parallel(ns.size(), ctx.workers, [&](std::size_t i) {
      StopWatch watch;
      const int n = ns[i];
      const TopologySpec spec =
          topo == std::string("line") ? TopologySpec::line(n) : TopologySpec::ring(n);
      const ComparisonResult cmp =
          compare_policies(spec, policies, n, ArrivalKind::UniformOrigin, ctx);
      for (const auto& choice : policies) {
        const PolicyStats& st = cmp.by_policy.at(choice.str());
        grid[i].push_back(
            {n, choice.str(), choice.resolve(n).k, tv_metric ? st.tv_vs_pot : st.request_distance});
      }
      if (!tv_metric) grid[i].push_back({n, "pot", 0, cmp.pot_request_distance});
      ctx.manifest->add_run(std::string(topo) + "_n" + std::to_string(n), watch.seconds());
    });

    CsvFile csv(ctx.dir / ((tv_metric ? "tv_vs_n_" : "rd_vs_n_") + std::string(topo) + ".csv"),
                ctx.note,
                tv_metric ? "n,policy,k,tv_distance" : "n,policy,k,avg_request_distance");
    for (const auto& rows : grid)
      for (const auto& r : rows) csv.line(csv_row(r.n, r.policy, r.k, r.value));
  }
}

// TV and request distance across the three random-graph families, swept over
// each family's density parameter, plus request-distance scaling in n.
inline void random_graphs(const Context& ctx) {
  const int n = ctx.scale == Scale::Paper ? 10'000 : 1'000;
  const double logn_over_n = std::log(static_cast<double>(n)) / n;
  const std::vector<double> gamma_mults = ctx.scale == Scale::Paper
                                              ? std::vector<double>{1.0, 1.2, 1.4, 1.6, 1.8, 2.0}
                                              : std::vector<double>{1.0, 1.5, 2.0};
  const std::vector<int> betas = ctx.scale == Scale::Paper ? std::vector<int>{5, 6, 7, 8, 9, 10, 11}
                                                           : std::vector<int>{5, 8, 11};
  const std::vector<int> alphas = ctx.scale == Scale::Paper
                                      ? std::vector<int>{1, 2, 3, 4, 5, 6, 7}
                                      : std::vector<int>{1, 4, 7};
  const std::vector<PolicyChoice> policies = {
      {PolicyFamily::Unif, KSpec::literal(2)},  {PolicyFamily::Unif, KSpec::logn()},
      {PolicyFamily::Unif, KSpec::full_n()},    {PolicyFamily::InvSq, KSpec::literal(2)},
      {PolicyFamily::InvSq, KSpec::logn()},     {PolicyFamily::InvSq, KSpec::full_n()},
  };

  struct Family {
    std::string name;
    std::vector<double> params;
    std::function<TopologySpec(double)> make;
  };
  std::vector<Family> families;
  {
    std::vector<double> gs;
    for (double m : gamma_mults) gs.push_back(m * logn_over_n);
    families.push_back({"er", gs, [n](double g) { return TopologySpec::erdos_renyi(n, g); }});
  }
  {
    std::vector<double> bs(betas.begin(), betas.end());
    families.push_back(
        {"rr", bs, [n](double b) { return TopologySpec::random_regular(n, static_cast<int>(b)); }});
  }
  {
    std::vector<double> as(alphas.begin(), alphas.end());
    families.push_back({"ba", as,
                        [n](double a) { return TopologySpec::barabasi_albert(n, static_cast<int>(a)); }});
  }

  for (const auto& family : families) {
    struct Cell {
      double param;
      ComparisonResult cmp;
    };
    std::vector<Cell> cells(family.params.size());
    run_parallel(cells.size(), ctx.workers, [&](std::size_t i) {
      StopWatch watch;
      cells[i].param = family.params[i];
      cells[i].cmp = compare_policies(family.make(family.params[i]), policies, n,
                                      ArrivalKind::UniformOrigin, ctx);
      ctx.manifest->add_run(family.name + "_param" + fmt_g(family.params[i]), watch.seconds());
    });
    CsvFile tv(ctx.dir / ("tv_" + family.name + ".csv"), ctx.note, "param,policy,k,tv_distance");
    CsvFile rd(ctx.dir / ("rd_" + family.name + ".csv"), ctx.note,
               "param,policy,k,avg_request_distance");
    for (const auto& cell : cells) {
      for (const auto& choice : policies) {
        const PolicyStats& st = cell.cmp.by_policy.at(choice.str());
        tv.line(csv_row(cell.param, choice.str(), choice.resolve(n).k, st.tv_vs_pot));
        rd.line(csv_row(cell.param, choice.str(), choice.resolve(n).k, st.request_distance));
      }
      rd.line(csv_row(cell.param, "pot", 0, cell.cmp.pot_request_distance));
    }
  }

  // request-distance scaling in n at a fixed mid-range parameter
  const std::vector<int> ns = ctx.scale == Scale::Paper
                                  ? std::vector<int>{2000, 4000, 6000, 8000, 10000}
                                  : std::vector<int>{250, 500, 1000};
  struct ScaleFamily {
    std::string name;
    std::function<TopologySpec(int)> make;
  };
  const ScaleFamily scale_families[] = {
      {"er", [](int nn) {
         return TopologySpec::erdos_renyi(nn, 1.5 * std::log(static_cast<double>(nn)) / nn);
       }},
      {"ba", [](int nn) { return TopologySpec::barabasi_albert(nn, 2); }},
      {"rr", [](int nn) { return TopologySpec::random_regular(nn, 5); }},
  };
  for (const auto& family : scale_families) {
    struct Cell {
      int n;
      ComparisonResult cmp;
    };
    std::vector<Cell> cells(ns.size());
    run_parallel(ns.size(), ctx.workers, [&](std::size_t i) {
      StopWatch watch;
      cells[i].n = ns[i];
      cells[i].cmp = compare_policies(family.make(ns[i]), policies, ns[i],
                                      ArrivalKind::UniformOrigin, ctx);
      ctx.manifest->add_run("rdscale_" + family.name + "_n" + std::to_string(ns[i]),
                            watch.seconds());
    });
    CsvFile csv(ctx.dir / ("rd_vs_n_" + family.name + ".csv"), ctx.note,
                "n,policy,k,avg_request_distance");
    for (const auto& cell : cells) {
      for (const auto& choice : policies) {
        csv.line(csv_row(cell.n, choice.str(), choice.resolve(cell.n).k,
                         cell.cmp.by_policy.at(choice.str()).request_distance));
      }
      csv.line(csv_row(cell.n, "pot", 0, cell.cmp.pot_request_distance));
    }
  }
}

// Spatial families: geometric graphs swept over the radius, spatial lines and
// rings swept over the server count, with spatial user arrivals on the chains.
inline void spatial_graphs(const Context& ctx) {
  const std::vector<PolicyChoice> policies = {
      {PolicyFamily::Unif, KSpec::logn()},
      {PolicyFamily::Unif, KSpec::full_n()},
      {PolicyFamily::InvSq, KSpec::logn()},
      {PolicyFamily::InvSq, KSpec::full_n()},
  };

  {  // geometric graphs: radius sweep between the connectivity threshold and
     // the dense regime. The sweep starts 1.3x above the asymptotic threshold:
     // at finite n the unit square's boundary leaves isolated vertices at the
     // threshold itself, so connected samples there are vanishingly rare.
    const int n = ctx.scale == Scale::Paper ? 10'000 : 1'000;
    const double lo =
        1.3 * std::sqrt(std::log(static_cast<double>(n)) / (TopologySpec::kPi * n));
    const double hi = std::sqrt(std::sqrt(static_cast<double>(n)) / (TopologySpec::kPi * n));
    const int points = ctx.scale == Scale::Paper ? 5 : 3;
    std::vector<double> radii;
    for (int i = 0; i < points; ++i) radii.push_back(lo + (hi - lo) * i / (points - 1));

    struct Cell {
      double r;
      ComparisonResult cmp;
    };
    std::vector<Cell> cells(radii.size());
    run_parallel(cells.size(), ctx.workers, [&](std::size_t i) {
      StopWatch watch;
      cells[i].r = radii[i];
      cells[i].cmp = compare_policies(TopologySpec::random_geometric(n, radii[i]), policies, n,
                                      ArrivalKind::UniformOrigin, ctx);
      ctx.manifest->add_run("rgg_r" + fmt_g(radii[i]), watch.seconds());
    });
    CsvFile tv(ctx.dir / "tv_rgg.csv", ctx.note, "param,policy,k,tv_distance");
    CsvFile rd(ctx.dir / "rd_rgg.csv", ctx.note, "param,policy,k,avg_request_distance");
    for (const auto& cell : cells) {
      for (const auto& choice : policies) {
        const PolicyStats& st = cell.cmp.by_policy.at(choice.str());
        tv.line(csv_row(cell.r, choice.str(), choice.resolve(n).k, st.tv_vs_pot));
        rd.line(csv_row(cell.r, choice.str(), choice.resolve(n).k, st.request_distance));
      }
      rd.line(csv_row(cell.r, "pot", 0, cell.cmp.pot_request_distance));
    }
  }

  // spatial chains with users dropped on the same support
  const std::vector<int> ns = ctx.scale == Scale::Paper ? std::vector<int>{1000, 3000, 5000, 7000}
                                                        : std::vector<int>{250, 500, 1000};
  struct ChainFamily {
    std::string name;
    std::function<TopologySpec(int)> make;
  };
  const ChainFamily chains[] = {
      {"sline", [](int nn) { return TopologySpec::spatial_line(nn, static_cast<double>(nn)); }},
      {"sring", [](int nn) { return TopologySpec::spatial_ring(nn, 1.0); }},
  };
  for (const auto& family : chains) {
    struct Cell {
      int n;
      ComparisonResult cmp;
    };
    std::vector<Cell> cells(ns.size());
    run_parallel(ns.size(), ctx.workers, [&](std::size_t i) {
      StopWatch watch;
      cells[i].n = ns[i];
      cells[i].cmp = compare_policies(family.make(ns[i]), policies, ns[i],
                                      ArrivalKind::SpatialNearest, ctx);
      ctx.manifest->add_run(family.name + "_n" + std::to_string(ns[i]), watch.seconds());
    });
    CsvFile tv(ctx.dir / ("tv_" + family.name + ".csv"), ctx.note, "n,policy,k,tv_distance");
    CsvFile rd(ctx.dir / ("rd_" + family.name + ".csv"), ctx.note,
               "n,policy,k,avg_request_distance");
    for (const auto& cell : cells) {
      for (const auto& choice : policies) {
        const PolicyStats& st = cell.cmp.by_policy.at(choice.str());
        tv.line(csv_row(cell.n, choice.str(), choice.resolve(cell.n).k, st.tv_vs_pot));
        rd.line(csv_row(cell.n, choice.str(), choice.resolve(cell.n).k, st.request_distance));
      }
      rd.line(csv_row(cell.n, "pot", 0, cell.cmp.pot_request_distance));
    }
  }
}

// Per-arrival TV between the inverse-square policy and a paired Pot run, from
// the first arrival to twice the server count.
inline void tv_evolution(const Context& ctx) {
  const int n = ctx.scale == Scale::Paper ? 5000 : 1000;
  const long m = 2L * n;
  const int logn = round_log(n);
  int beta = 2 * logn;
  if ((static_cast<long long>(n) * beta) % 2 != 0) ++beta;

  struct Study {
    std::string name;
    TopologySpec spec;
    ArrivalKind arrivals;
  };
  const std::vector<Study> studies = {
      {"er", TopologySpec::erdos_renyi(n, 2.0 * std::log(static_cast<double>(n)) / n),
       ArrivalKind::UniformOrigin},
      {"ba", TopologySpec::barabasi_albert(n, logn), ArrivalKind::UniformOrigin},
      {"rr", TopologySpec::random_regular(n, beta), ArrivalKind::UniformOrigin},
      {"line", TopologySpec::line(n), ArrivalKind::UniformOrigin},
      {"ring", TopologySpec::ring(n), ArrivalKind::UniformOrigin},
      {"sline", TopologySpec::spatial_line(n, static_cast<double>(n)),
       ArrivalKind::SpatialNearest},
      {"sring", TopologySpec::spatial_ring(n, 1.0), ArrivalKind::SpatialNearest},
  };

  run_parallel(studies.size(), ctx.workers, [&](std::size_t i) {
    StopWatch watch;
    const Study& study = studies[i];
    std::vector<long> every(static_cast<std::size_t>(m));
    for (long t = 1; t <= m; ++t) every[static_cast<std::size_t>(t - 1)] = t;
    std::vector<double> avg_tv(static_cast<std::size_t>(m), 0.0);
    for (int s = 0; s < ctx.seeds; ++s) {
      const std::uint64_t seed = ctx.seed + static_cast<std::uint64_t>(s);
      const Graph g = build_graph(study.spec, seed);
      const StaticResult mine = run_static(g, PolicyKind::invsq(g.n), m, study.arrivals, seed,
                                           std::span<const long>(every));
      const StaticResult pot =
          run_static(g, PolicyKind::pot(), m, study.arrivals,
                     derive_seed(seed, stream::baseline), std::span<const long>(every));
      for (long t = 0; t < m; ++t)
        avg_tv[static_cast<std::size_t>(t)] +=
            total_variation(mine.snapshots[static_cast<std::size_t>(t)],
                            pot.snapshots[static_cast<std::size_t>(t)]) /
            ctx.seeds;
    }
    CsvFile csv(ctx.dir / ("evolution_" + study.name + ".csv"), ctx.note, "t,tv_distance");
    for (long t = 0; t < m; ++t) csv.line(csv_row(t + 1, avg_tv[static_cast<std::size_t>(t)]));
    ctx.manifest->add_run("evolution_" + study.name, watch.seconds());
  });
}

// ---- dynamic presets ------------------------------------------------------

struct DynamicRunSpec {
  std::string tag;
  int n;
  PolicyKind policy;
  std::uint64_t horizon;
};

inline void emit_occupancy(const Context& ctx, const std::string& tag,
                           const LoadDistribution& pdf) {
  CsvFile csv(ctx.dir / ("occupancy_" + tag + ".csv"), ctx.note, "count,probability");
  for (std::size_t c = 0; c < pdf.p.size(); ++c) csv.line(csv_row(c, pdf.p[c]));
}

// Stationary occupancy PDFs across policies, radii, and system sizes, plus
// the mean-field reference curve and a small-system Pot baseline.
inline void dynamic_pdfs(const Context& ctx) {
  const double lambda = 0.95, mu = 1.0;
  const bool paper = ctx.scale == Scale::Paper;
  std::vector<DynamicRunSpec> runs;
  auto horizon_for = [&](int n) {
    return paper ? static_cast<std::uint64_t>(n) * 100'000ull : 2'000'000ull;
  };
  auto add_both = [&](int n, int k) {
    runs.push_back({"unif_k" + std::to_string(k) + "_n" + std::to_string(n), n,
                    PolicyKind::unif(k), horizon_for(n)});
    runs.push_back({"invsq_k" + std::to_string(k) + "_n" + std::to_string(n), n,
                    PolicyKind::invsq(k), horizon_for(n)});
  };

  if (paper) {
    for (int k : {2, 3, 5, 10, 500}) add_both(1001, k);  // policy comparison
    for (int k : {2, 3, 5, 10}) add_both(250, k);        // size convergence
    for (int n : {10, 100, 1000, 2000}) add_both(n, 2);  // fixed k, growing n
  } else {
    for (int k : {2, 5, 50}) add_both(250, k);
    for (int k : {2, 5}) add_both(101, k);
    for (int n : {10, 101}) add_both(n, 2);
  }
  runs.push_back({"pot_n21", 21, PolicyKind::pot(), horizon_for(21)});

  run_parallel(runs.size(), ctx.workers, [&](std::size_t i) {
    StopWatch watch;
    const DynamicRunSpec& spec = runs[i];
    const DynamicConfig cfg =
        DynamicConfig::make(spec.n, lambda, mu, spec.policy, spec.horizon, ctx.seed);
    emit_occupancy(ctx, spec.tag, occupancy_pdf(run_dynamic(cfg).occupancy));
    ctx.manifest->add_run(spec.tag, watch.seconds());
  });

  emit_occupancy(ctx, "meanfield_pot", mean_field_pot_pdf(lambda, mu, 2, 64));
}

// Mean sojourn time and mean request distance per policy and radius.
inline void dynamic_tables(const Context& ctx) {
  const double lambda = 0.95, mu = 1.0;
  const bool paper = ctx.scale == Scale::Paper;
  const int n = paper ? 1001 : 101;
  const std::vector<int> ks =
      paper ? std::vector<int>{2, 3, 5, 10, 15, 20, 125, 500} : std::vector<int>{2, 3, 5, 10, 50};
  const std::uint64_t horizon = paper ? static_cast<std::uint64_t>(n) * 100'000ull : 1'000'000ull;

  std::vector<DynamicRunSpec> runs;
  for (int k : ks) {
    runs.push_back({"unif_k" + std::to_string(k), n, PolicyKind::unif(k), horizon});
    runs.push_back({"invsq_k" + std::to_string(k), n, PolicyKind::invsq(k), horizon});
  }

  struct Row {
    std::string policy;
    int k;
    double sojourn, rd;
    std::uint64_t arrivals, departures;
  };
  std::vector<Row> rows(runs.size());
  run_parallel(runs.size(), ctx.workers, [&](std::size_t i) {
    StopWatch watch;
    const DynamicRunSpec& spec = runs[i];
    const DynamicConfig cfg =
        DynamicConfig::make(spec.n, lambda, mu, spec.policy, spec.horizon, ctx.seed);
    const DynamicResult r = run_dynamic(cfg);
    rows[i] = {spec.policy.name(), spec.policy.k, mean_sojourn_time(r.jobs),
               mean_request_distance(r.jobs), r.arrivals, r.departures};
    ctx.manifest->add_run(spec.tag, watch.seconds());
  });

  CsvFile csv(ctx.dir / "summary.csv", ctx.note,
              "policy,k,n,lambda,mean_sojourn,mean_request_distance,arrivals,departures");
  for (const auto& r : rows)
    csv.line(csv_row(r.policy, r.k, n, lambda, r.sojourn, r.rd, r.arrivals, r.departures));
}

}  // namespace presets

inline int run_preset(const std::string& name, const PresetOptions& opts) {
  namespace fs = std::filesystem;
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string known;
    for (const auto& p : names) known += (known.empty() ? "" : ", ") + p;
    throw ParseError("unknown preset '" + name + "'; known presets: " + known);
  }

  presets::Context ctx;
  ctx.scale = opts.scale;
  ctx.seed = opts.seed;
  ctx.workers = opts.workers;
  // static studies default to 10-seed averages; dynamic runs to a single seed
  const bool dynamic = name.rfind("dynamic", 0) == 0;
  ctx.seeds = opts.seed_count > 0 ? opts.seed_count : (dynamic ? 1 : 10);
  ctx.dir = fs::path(opts.out_dir) / (name + "_" + scale_name(opts.scale));
  fs::create_directories(ctx.dir);

  Manifest manifest("preset:" + name);
  nlohmann::json cfg;
  cfg["preset"] = name;
  cfg["scale"] = scale_name(opts.scale);
  cfg["seed"] = opts.seed;
  cfg["seeds"] = ctx.seeds;
  manifest.set_config(cfg);
  manifest.set_seeds(opts.seed, ctx.seeds);
  ctx.manifest = &manifest;
  ctx.note = "base_seed=" + std::to_string(opts.seed) + " config_hash=" + manifest.config_hash();

  if (name == "tradeoff") presets::tradeoff(ctx);
  else if (name == "deterministic-pdf") presets::deterministic_pdf(ctx);
  else if (name == "tv-vs-n") presets::versus_n(ctx, true);
  else if (name == "rd-vs-n") presets::versus_n(ctx, false);
  else if (name == "random-graphs") presets::random_graphs(ctx);
  else if (name == "spatial-graphs") presets::spatial_graphs(ctx);
  else if (name == "tv-evolution") presets::tv_evolution(ctx);
  else if (name == "dynamic-pdfs") presets::dynamic_pdfs(ctx);
  else if (name == "dynamic-tables") presets::dynamic_tables(ctx);

  manifest.write(ctx.dir / "manifest.json");
  return 0;
}

}  // namespace potsim
