#pragma once

#include <stdexcept>

namespace hfl {

// Configuration or precondition violations caught before any work runs.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dimension or length mismatch between operands.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Payload encode/decode failure.
struct CodecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ZF detection failure (rank-deficient Gram matrix).
struct DetectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed on-disk data (IDX or config files).
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Aggregation requested over an empty UE group.
struct EmptyGroupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hfl
