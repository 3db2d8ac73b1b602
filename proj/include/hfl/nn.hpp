#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "hfl/rng.hpp"

namespace hfl {

enum class Activation { Relu, Identity };

// Dense feed-forward topology: input dim, hidden dims..., C output classes.
// The final layer is linear; `activation` applies to hidden layers only.
struct Architecture {
  std::vector<Eigen::Index> layer_sizes;
  Activation activation = Activation::Relu;

  Eigen::Index input_dim() const { return layer_sizes.front(); }
  Eigen::Index num_classes() const { return layer_sizes.back(); }
  Eigen::Index num_layers() const { return static_cast<Eigen::Index>(layer_sizes.size()) - 1; }
  Eigen::Index param_count() const;
  void validate() const;
};

// Flat parameter vector of length P. Layout is layer-by-layer: weights
// (out x in) row-major, then the bias. This order is load-bearing for the
// uplink codec roundtrip and must not change.
struct ModelParams {
  Eigen::VectorXd values;
  Architecture arch;
};

struct ExampleBatch {
  Eigen::MatrixXd inputs;  // one example per row
  Eigen::VectorXi labels;  // class indices in [0, C)
  Eigen::Index size() const { return inputs.rows(); }
};

// Per-example class scores (rows x C); flattens row-major.
struct LogitBlock {
  Eigen::MatrixXd values;

  Eigen::VectorXd flatten() const;
  static LogitBlock unflatten(const Eigen::VectorXd& flat, Eigen::Index rows,
                              Eigen::Index cols);
};

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Views of one layer's weights/bias inside the flat vector.
Eigen::Map<const RowMajorMatrix> weight_view(const ModelParams& model, Eigen::Index layer);
Eigen::Map<const Eigen::VectorXd> bias_view(const ModelParams& model, Eigen::Index layer);

// Packs per-layer matrices into the flat layout (inverse of the views).
Eigen::VectorXd pack_params(const Architecture& arch,
                            const std::vector<Eigen::MatrixXd>& weights,
                            const std::vector<Eigen::VectorXd>& biases);

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero; deterministic per seed.
ModelParams init_model(const Architecture& arch, std::uint64_t seed);

LogitBlock forward_logits(const ModelParams& model, const ExampleBatch& batch);

// Mean cross-entropy over the batch and its gradient w.r.t. the flat parameters.
double ce_loss(const ModelParams& model, const ExampleBatch& batch);
Eigen::VectorXd ce_gradient(const ModelParams& model, const ExampleBatch& batch);

// Distillation objective: mean per-sample KL divergence between
// softmax(target_row / tau) and softmax(model_logit_row / tau).
double kd_loss(const ModelParams& model, const ExampleBatch& public_batch,
               const LogitBlock& targets, double tau);
Eigen::VectorXd kd_gradient(const ModelParams& model, const ExampleBatch& public_batch,
                            const LogitBlock& targets, double tau);

ModelParams sgd_step(const ModelParams& model, const Eigen::VectorXd& grad, double lr);

// Fraction of argmax-correct predictions; argmax ties go to the lowest class index.
double evaluate_accuracy(const ModelParams& model, const ExampleBatch& test);

}  // namespace hfl
