#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace hfl {

enum class PayloadKind { Gradient, Logit };

// Error-free side information needed to invert the uplink preprocessing.
// When the deviation or peak of a payload falls below the epsilon guard the
// substituted value (1.0) is what gets recorded here, so decoding a constant
// payload stays exact.
struct Sideband {
  std::complex<double> mean{0.0, 0.0};
  double deviation = 1.0;          // complex RMS deviation of the paired payload
  double peak = 1.0;               // inf-norm of the standardized symbols
  Eigen::Index original_length = 0;  // real-vector length before pairing
  PayloadKind kind = PayloadKind::Gradient;
};

// One UE's unit-peak complex symbol stream plus its sideband.
struct SymbolStream {
  Eigen::VectorXcd symbols;
  Sideband sideband;
};

// Row k holds UE k's zero-padded stream; all rows share length L.
struct TransmitFrame {
  Eigen::MatrixXcd symbols;
  std::vector<Sideband> sidebands;
};

// out[m] = u[2m] + j*u[2m+1]; an odd tail gets imaginary part 0.
Eigen::VectorXcd pair_complex(const Eigen::VectorXd& u);

// Inverse of pair_complex, truncated to the requested real length.
Eigen::VectorXd unpair_real(const Eigen::VectorXcd& v, Eigen::Index original_length);

// Pair, standardize by complex mean and RMS deviation, normalize by the
// inf-norm. The result has max modulus exactly 1 (up to rounding) unless the
// epsilon guard replaced a degenerate scale.
SymbolStream encode_uplink(const Eigen::VectorXd& u, PayloadKind kind);

// Stacks streams into a K x L frame, zero-padding shorter streams at the tail.
TransmitFrame pad_and_frame(const std::vector<SymbolStream>& streams);

// Inverse chain: truncate padding, multiply by peak and deviation, add the
// mean back, unpair.
Eigen::VectorXd decode_uplink(const Eigen::VectorXcd& detected, const Sideband& sideband);

}  // namespace hfl
