#pragma once

#include <complex>
#include <cstdint>

namespace hfl {

// Purpose tags used to derive independent substreams from one experiment seed.
enum class StreamKind : std::uint64_t {
  ModelInit = 1,
  Partition = 2,
  Channel = 3,
  SlotNoise = 4,
  LocalBatch = 5,
  PublicBatch = 6,
  Synthetic = 7,
};

// Deterministic counter-based stream (splitmix64). The same key always
// reproduces the same sequence on every platform, so every random draw in an
// experiment can be replayed from (seed, kind, round, index) alone.
class RngStream {
 public:
  explicit RngStream(std::uint64_t state) : state_(state) {}

  static RngStream keyed(std::uint64_t seed, StreamKind kind, std::uint64_t a = 0,
                         std::uint64_t b = 0);

  std::uint64_t next_u64();

  // Uniform on [0, 1).
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer on [0, n), n >= 1.
  std::uint64_t uniform_index(std::uint64_t n);
  // Standard normal (Box-Muller).
  double normal();
  // Circularly-symmetric complex normal with E|z|^2 = 1.
  std::complex<double> complex_normal();

 private:
  std::uint64_t state_;
};

}  // namespace hfl
