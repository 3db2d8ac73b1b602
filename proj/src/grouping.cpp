#include "hfl/grouping.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "hfl/errors.hpp"

namespace hfl {

JenksSplit jenks_split(const Eigen::VectorXd& values, int classes) {
  if (classes != 2) throw ConfigError("jenks_split: only two classes are supported");
  const Eigen::Index n = values.size();
  if (n < 2) throw ConfigError("jenks_split: need at least two values");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values[a] < values[b]; });

  JenksSplit split;
  split.labels.assign(static_cast<std::size_t>(n), 0);

  if (values[order.front()] == values[order.back()]) {
    // Degenerate all-equal input: everything in the lower class.
    split.threshold = values[order.front()];
    split.lower_count = static_cast<int>(n);
    split.within_ss = 0.0;
    return split;
  }

  // Prefix sums over the sorted values give each candidate split's
  // within-class sum of squared deviations in O(1).
  std::vector<double> sum(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> sumsq(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = values[order[static_cast<std::size_t>(i)]];
    sum[i + 1] = sum[i] + x;
    sumsq[i + 1] = sumsq[i] + x * x;
  }
  auto class_ss = [&](Eigen::Index lo, Eigen::Index hi) {  // [lo, hi)
    const double s = sum[hi] - sum[lo];
    const double s2 = sumsq[hi] - sumsq[lo];
    const double cnt = static_cast<double>(hi - lo);
    return s2 - s * s / cnt;
  };

  // Enumerating ascending keeps the smaller lower class on ties. Splits whose
  // sums of squares agree to within the margin count as tied, so exact ties
  // survive the differing rounding of prefix-sum and two-pass evaluation.
  constexpr double kTieMargin = 1e-7;
  Eigen::Index best = 1;
  double best_ss = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 1; i < n; ++i) {
    const double ss = class_ss(0, i) + class_ss(i, n);
    if (ss < best_ss - kTieMargin) {
      best_ss = ss;
      best = i;
    }
  }

  split.threshold = values[order[static_cast<std::size_t>(best - 1)]];
  split.lower_count = static_cast<int>(best);
  split.within_ss = best_ss;
  for (Eigen::Index rank = best; rank < n; ++rank)
    split.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])] = 1;
  return split;
}

GroupAssignment assign_groups(const LinkQuality& quality, ClusterMode mode) {
  if (quality.q.size() < 2) throw ConfigError("assign_groups: need at least two UEs");

  const JenksSplit split = jenks_split(quality.q);
  GroupAssignment assignment;
  assignment.threshold = split.threshold;
  assignment.indicators.resize(static_cast<std::size_t>(quality.q.size()));
  for (Eigen::Index k = 0; k < quality.q.size(); ++k) {
    const bool low = quality.q[k] <= split.threshold;
    const bool fl = (mode == ClusterMode::Forward) ? low : !low;
    assignment.indicators[static_cast<std::size_t>(k)] = fl ? 0 : 1;
    if (fl) ++assignment.k1;
  }
  return assignment;
}

}  // namespace hfl
