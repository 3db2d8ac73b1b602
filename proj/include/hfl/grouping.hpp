#pragma once

#include <Eigen/Dense>

#include <vector>

#include "hfl/channel.hpp"

namespace hfl {

// Result of a two-class natural-breaks split. `labels[i]` is 0 when values[i]
// landed in the lower class, 1 otherwise, in input order. The threshold is the
// largest value of the lower class.
struct JenksSplit {
  double threshold = 0.0;
  std::vector<int> labels;
  int lower_count = 0;   // split index into the sorted values
  double within_ss = 0.0;
};

// Boundary convention: when duplicates of the threshold value straddle the
// optimal split of the sorted array, the labels follow the split index (sorted
// rank), while downstream group assignment applies q <= q* and therefore pulls
// every duplicate into the lower class. Ties between splits with equal
// within-class sum of squares go to the smaller lower class.
JenksSplit jenks_split(const Eigen::VectorXd& values, int classes = 2);

enum class ClusterMode { Forward, Reverse };

// Per-UE transmission indicator: 0 = FL group (gradient), 1 = FD group (logit).
struct GroupAssignment {
  std::vector<int> indicators;
  double threshold = 0.0;
  int k1 = 0;  // FL group size
};

// Forward assigns UE k to FL iff q_k <= q*; reverse applies the complement.
GroupAssignment assign_groups(const LinkQuality& quality, ClusterMode mode);

}  // namespace hfl
