#include "hfl/channel.hpp"

#include <cmath>

#include "hfl/errors.hpp"

namespace hfl {

namespace {
constexpr double kMaxGramCondition = 1e10;
}

double snr_db_to_linear(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

Eigen::VectorXcd SlotNoise::column(std::uint64_t slot, Eigen::Index n) const {
  Eigen::VectorXcd out(n);
  if (!enabled) {
    out.setZero();
    return out;
  }
  RngStream rng = RngStream::keyed(seed, StreamKind::SlotNoise, round, slot);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = rng.complex_normal();
  return out;
}

ChannelMatrix sample_channel(Eigen::Index n_antennas, Eigen::Index n_users, RngStream& rng) {
  if (n_users < 1 || n_antennas < n_users)
    throw ConfigError("sample_channel: requires n_antennas >= n_users >= 1");

  Eigen::MatrixXcd h(n_antennas, n_users);
  while (true) {
    for (Eigen::Index j = 0; j < n_users; ++j)
      for (Eigen::Index i = 0; i < n_antennas; ++i) h(i, j) = rng.complex_normal();

    // cond(H^H H) = (smax/smin)^2 of H; regenerate the (probability-zero)
    // rank-deficient draw.
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin > 0.0 && (smax / smin) * (smax / smin) <= kMaxGramCondition) break;
  }
  return {std::move(h)};
}

ReceivedFrame uplink_transmit(const TransmitFrame& frame, const ChannelMatrix& channel,
                              double rho, const SlotNoise& noise) {
  if (channel.H.cols() != frame.symbols.rows())
    throw ShapeError("uplink_transmit: channel column count must match frame row count");
  if (rho <= 0.0) throw ConfigError("uplink_transmit: rho must be positive");

  ReceivedFrame received;
  received.Y = std::sqrt(rho) * channel.H * frame.symbols;
  if (noise.enabled) {
    for (Eigen::Index m = 0; m < received.Y.cols(); ++m)
      received.Y.col(m) += noise.column(static_cast<std::uint64_t>(m), received.Y.rows());
  }
  return received;
}

Eigen::MatrixXcd zf_detect(const ReceivedFrame& received, const ChannelMatrix& channel,
                           double rho) {
  if (received.Y.rows() != channel.H.rows())
    throw ShapeError("zf_detect: received rows must match antenna count");
  if (rho <= 0.0) throw ConfigError("zf_detect: rho must be positive");

  const Eigen::MatrixXcd gram = channel.H.adjoint() * channel.H;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxGramCondition)
    throw DetectionError("zf_detect: Gram matrix is numerically singular");

  return gram.ldlt().solve(channel.H.adjoint() * received.Y) / std::sqrt(rho);
}

LinkQuality noise_enhancement(const ChannelMatrix& channel, double rho, QMode mode) {
  if (rho <= 0.0) throw ConfigError("noise_enhancement: rho must be positive");
  const Eigen::Index k = channel.H.cols();
  const Eigen::MatrixXcd gram = channel.H.adjoint() * channel.H;

  LinkQuality quality;
  quality.rho = rho;
  quality.mode = mode;
  quality.q.resize(k);
  if (mode == QMode::Paper) {
    for (Eigen::Index i = 0; i < k; ++i) quality.q[i] = 1.0 / (rho * gram(i, i).real());
  } else {
    const Eigen::MatrixXcd inv = gram.ldlt().solve(Eigen::MatrixXcd::Identity(k, k));
    for (Eigen::Index i = 0; i < k; ++i) quality.q[i] = inv(i, i).real() / rho;
  }
  return quality;
}

}  // namespace hfl
