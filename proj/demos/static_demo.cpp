// Place n jobs on a ring under the three policies and compare the resulting
// load distributions and request distances.

#include <cstdio>

#include "potsim/graph.hpp"
#include "potsim/static_sim.hpp"

using namespace potsim;

int main() {
  const int n = 1000;
  const Graph g = build_graph(TopologySpec::ring(n), /*seed=*/42);

  const PolicyKind policies[] = {PolicyKind::pot(), PolicyKind::unif(7), PolicyKind::invsq(7)};
  LoadDistribution pot_dist;
  for (const PolicyKind& policy : policies) {
    const StaticResult r = run_static(g, policy, n, ArrivalKind::UniformOrigin, 42);
    const LoadDistribution dist = load_distribution(r.state);
    if (policy.family == PolicyFamily::Pot) pot_dist = dist;
    std::printf("%-6s max_load=%d  avg_request_distance=%8.3f  tv_vs_pot=%.4f\n",
                policy.name().c_str(), max_load(r.state), average_request_distance(r.trace),
                total_variation(dist, pot_dist));
  }
  return 0;
}
