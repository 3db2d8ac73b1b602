#include "hfl/link_codec.hpp"

#include <cmath>

#include "hfl/errors.hpp"

namespace hfl {

namespace {
constexpr double kScaleGuard = 1e-12;
}

Eigen::VectorXcd pair_complex(const Eigen::VectorXd& u) {
  if (u.size() == 0) throw CodecError("pair_complex: empty payload");
  const Eigen::Index m = (u.size() + 1) / 2;
  Eigen::VectorXcd out(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double re = u[2 * i];
    const double im = (2 * i + 1 < u.size()) ? u[2 * i + 1] : 0.0;
    out[i] = {re, im};
  }
  return out;
}

Eigen::VectorXd unpair_real(const Eigen::VectorXcd& v, Eigen::Index original_length) {
  if (v.size() < (original_length + 1) / 2)
    throw CodecError("unpair_real: fewer symbols than the original length requires");
  Eigen::VectorXd out(original_length);
  for (Eigen::Index i = 0; i < original_length; ++i)
    out[i] = (i % 2 == 0) ? v[i / 2].real() : v[i / 2].imag();
  return out;
}

SymbolStream encode_uplink(const Eigen::VectorXd& u, PayloadKind kind) {
  Eigen::VectorXcd v = pair_complex(u);

  Sideband sb;
  sb.kind = kind;
  sb.original_length = u.size();
  sb.mean = v.mean();

  v.array() -= sb.mean;
  double dev = std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
  if (dev < kScaleGuard) dev = 1.0;  // constant payload: symbols become zero
  sb.deviation = dev;
  v /= dev;

  double peak = v.cwiseAbs().maxCoeff();
  if (peak < kScaleGuard) peak = 1.0;
  sb.peak = peak;
  v /= peak;

  return {std::move(v), sb};
}

TransmitFrame pad_and_frame(const std::vector<SymbolStream>& streams) {
  if (streams.empty()) throw CodecError("pad_and_frame: no streams");
  Eigen::Index slots = 0;
  for (const auto& s : streams) slots = std::max(slots, s.symbols.size());

  TransmitFrame frame;
  frame.symbols = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(streams.size()), slots);
  frame.sidebands.reserve(streams.size());
  for (std::size_t k = 0; k < streams.size(); ++k) {
    frame.symbols.row(static_cast<Eigen::Index>(k)).head(streams[k].symbols.size()) =
        streams[k].symbols.transpose();
    frame.sidebands.push_back(streams[k].sideband);
  }
  return frame;
}

Eigen::VectorXd decode_uplink(const Eigen::VectorXcd& detected, const Sideband& sb) {
  const Eigen::Index used = (sb.original_length + 1) / 2;
  if (detected.size() < used)
    throw CodecError("decode_uplink: detected stream shorter than the payload");
  Eigen::VectorXcd v = detected.head(used) * (sb.peak * sb.deviation);
  v.array() += sb.mean;
  return unpair_real(v, sb.original_length);
}

}  // namespace hfl
