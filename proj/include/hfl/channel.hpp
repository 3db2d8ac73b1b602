#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "hfl/link_codec.hpp"
#include "hfl/rng.hpp"

namespace hfl {

// N x K Rayleigh-fading coefficients, constant within a communication round.
struct ChannelMatrix {
  Eigen::MatrixXcd H;
};

// N x L signal observed at the BS over one round.
struct ReceivedFrame {
  Eigen::MatrixXcd Y;
};

// Which noise-enhancement formula ranks the UEs: the Gram-diagonal heuristic
// q_k = 1/(rho [H^H H]_kk), or the inverse-Gram diagonal [(H^H H)^{-1}]_kk/rho
// which is the true per-UE ZF noise variance. The two rank UEs differently in
// general; config values are `paper` and `exact`.
enum class QMode { Paper, Exact };

struct LinkQuality {
  Eigen::VectorXd q;  // per-UE noise-enhancement factor, all > 0
  double rho = 1.0;   // linear SNR
  QMode mode = QMode::Paper;
};

// Per-slot AWGN source. Draws are keyed by (seed, round, slot), so any slot's
// noise can be regenerated independently of evaluation order. `enabled=false`
// is the test hook that silences the channel.
struct SlotNoise {
  std::uint64_t seed = 0;
  std::uint64_t round = 0;
  bool enabled = true;

  static SlotNoise disabled() { return {0, 0, false}; }
  Eigen::VectorXcd column(std::uint64_t slot, Eigen::Index n) const;
};

double snr_db_to_linear(double snr_db);

// i.i.d. CN(0,1) entries; resamples internally while cond(H^H H) > 1e10.
ChannelMatrix sample_channel(Eigen::Index n_antennas, Eigen::Index n_users, RngStream& rng);

// Y[:,m] = sqrt(rho) * H * X[:,m] + n[m].
ReceivedFrame uplink_transmit(const TransmitFrame& frame, const ChannelMatrix& channel,
                              double rho, const SlotNoise& noise);

// ZF detection: (H^H H)^{-1} H^H Y / sqrt(rho). The residual per column is
// CN(0, (rho H^H H)^{-1}).
Eigen::MatrixXcd zf_detect(const ReceivedFrame& received, const ChannelMatrix& channel,
                           double rho);

LinkQuality noise_enhancement(const ChannelMatrix& channel, double rho,
                              QMode mode = QMode::Paper);

}  // namespace hfl
