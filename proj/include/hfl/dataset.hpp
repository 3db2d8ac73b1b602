#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

namespace hfl {

struct Dataset {
  Eigen::MatrixXd inputs;  // one example per row
  Eigen::VectorXi labels;
  Eigen::Index num_classes = 0;
  Eigen::Index size() const { return inputs.rows(); }
};

enum class DataSource { IdxFiles, Synthetic };

struct DataSpec {
  DataSource source = DataSource::Synthetic;

  // idx_files
  std::string image_path;
  std::string label_path;
  Eigen::Index max_examples = 0;  // 0 = keep all loaded examples

  // synthetic: Gaussian class clusters with mean_c = separation * e_{c mod dim}
  Eigen::Index classes = 10;
  Eigen::Index input_dim = 64;
  Eigen::Index samples = 6000;
  double separation = 4.0;  // distance of each class mean from the origin
  double sigma = 1.0;       // within-class standard deviation

  // splits carved out by the orchestrator
  Eigen::Index public_size = 512;
  Eigen::Index test_size = 1000;

  void validate() const;
};

// MNIST-style IDX pair (big-endian, magics 0x803/0x801). Pixels scale to
// [0, 1]; declared counts must agree with the byte lengths and each other.
Dataset load_idx_dataset(const std::string& image_path, const std::string& label_path);

// Balanced Gaussian clusters: exactly n/C examples per class with the
// remainder going to the low classes; deterministic per seed.
Dataset gen_synthetic_dataset(const DataSpec& spec, std::uint64_t seed);

// Same, with caller-provided class means (one row per class).
Dataset gen_synthetic_dataset(const DataSpec& spec, std::uint64_t seed,
                              const Eigen::MatrixXd& class_means);

// Dispatch on spec.source, applying max_examples truncation for IDX data.
Dataset load_dataset(const DataSpec& spec, std::uint64_t seed);

}  // namespace hfl
