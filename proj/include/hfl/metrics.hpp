#pragma once

#include <string>
#include <vector>

#include "hfl/orchestrator.hpp"

namespace hfl {

struct MetricsLog {
  std::string config_echo;
  std::vector<RoundMetrics> rounds;  // round indices strictly increasing
  int schema_version = 1;
};

// Writes `round,accuracy,alpha,k1,mean_q_fl,mean_q_fd,wall_ms` plus one row
// per round, numbers in full-precision decimal. A NaN group mean (empty
// group) becomes an empty cell.
void write_metrics_csv(const MetricsLog& log, const std::string& path);

}  // namespace hfl
