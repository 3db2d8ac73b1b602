#include "hfl/metrics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hfl/errors.hpp"

namespace hfl {

namespace {

std::string cell(double x) {
  if (std::isnan(x)) return "";
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

}  // namespace

void write_metrics_csv(const MetricsLog& log, const std::string& path) {
  for (std::size_t i = 1; i < log.rounds.size(); ++i)
    if (log.rounds[i].round <= log.rounds[i - 1].round)
      throw ConfigError("write_metrics_csv: round indices must be strictly increasing");

  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << "round,accuracy,alpha,k1,mean_q_fl,mean_q_fd,wall_ms\n";
  for (const RoundMetrics& m : log.rounds) {
    out << m.round << ',' << cell(m.accuracy) << ',' << cell(m.alpha) << ',' << m.k1 << ','
        << cell(m.mean_q_fl) << ',' << cell(m.mean_q_fd) << ',' << cell(m.wall_ms) << '\n';
  }
  if (!out) throw FormatError("write failed for " + path);
}

}  // namespace hfl
