#pragma once
// Discrete distribution over non-negative load/occupancy values.

#include <cstddef>
#include <vector>

namespace potsim {

struct LoadDistribution {
  std::vector<double> p;  // p[i] = fraction of servers holding exactly i jobs

  double at(std::size_t i) const { return i < p.size() ? p[i] : 0.0; }

  double mass() const {
    double s = 0.0;
    for (double v : p) s += v;
    return s;
  }

  double mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += static_cast<double>(i) * p[i];
    return s;
  }

  void trim() {
    while (!p.empty() && p.back() == 0.0) p.pop_back();
  }
};

// 1/2 * L1 distance over the union of supports; value 0 is a regular bin.
inline double total_variation(const LoadDistribution& a, const LoadDistribution& b) {
  const std::size_t hi = a.p.size() > b.p.size() ? a.p.size() : b.p.size();
  double s = 0.0;
  for (std::size_t i = 0; i < hi; ++i) {
    const double d = a.at(i) - b.at(i);
    s += d < 0 ? -d : d;
  }
  return 0.5 * s;
}

}  // namespace potsim
