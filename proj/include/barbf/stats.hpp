#ifndef BARBF_STATS_HPP
#define BARBF_STATS_HPP

#include <span>
#include <vector>

namespace barbf::stats {

double mean(std::span<const double> v);

/// Unbiased (n-1) sample variance; zero for fewer than two values.
double variance(std::span<const double> v);

/// Linear interpolation between order statistics (Hyndman–Fan type 7).
/// `prob` in [0, 1]; `v` need not be sorted.
double quantile(std::vector<double> v, double prob);

/// Same as quantile() but assumes `sorted` is ascending.
double quantile_sorted(std::span<const double> sorted, double prob);

}  // namespace barbf::stats

#endif  // BARBF_STATS_HPP
