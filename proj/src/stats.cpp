#include "barbf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace barbf::stats {

double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean of empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  // Welford update.
  double m = 0.0;
  double ss = 0.0;
  double k = 0.0;
  for (double x : v) {
    k += 1.0;
    const double delta = x - m;
    m += delta / k;
    ss += delta * (x - m);
  }
  return ss / (k - 1.0);
}

double quantile_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (prob < 0.0 || prob > 1.0) throw std::invalid_argument("quantile probability outside [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile(std::vector<double> v, double prob) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, prob);
}

}  // namespace barbf::stats
