#include "hfl/nn.hpp"

#include <cmath>

#include "hfl/errors.hpp"

namespace hfl {

namespace {

Eigen::Index layer_offset(const Architecture& arch, Eigen::Index layer) {
  Eigen::Index off = 0;
  for (Eigen::Index l = 0; l < layer; ++l)
    off += arch.layer_sizes[l] * arch.layer_sizes[l + 1] + arch.layer_sizes[l + 1];
  return off;
}

void check_model(const ModelParams& model) {
  model.arch.validate();
  if (model.values.size() != model.arch.param_count())
    throw ShapeError("model values length does not match the architecture");
}

void check_batch(const Architecture& arch, const ExampleBatch& batch) {
  if (batch.inputs.rows() == 0) throw ShapeError("batch is empty");
  if (batch.inputs.cols() != arch.input_dim())
    throw ShapeError("batch input dimension does not match the architecture");
  if (batch.labels.size() != batch.inputs.rows())
    throw ShapeError("batch label count does not match the input rows");
}

// Row-wise softmax of logits/tau, numerically shifted.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits, double tau = 1.0) {
  Eigen::MatrixXd p = logits / tau;
  const Eigen::VectorXd rowmax = p.rowwise().maxCoeff();
  p.colwise() -= rowmax;
  p = p.array().exp();
  const Eigen::VectorXd rowsum = p.rowwise().sum();
  p.array().colwise() /= rowsum.array();
  return p;
}

struct ForwardPass {
  std::vector<Eigen::MatrixXd> activations;  // activations[0] = inputs
  Eigen::MatrixXd logits;
};

ForwardPass forward_pass(const ModelParams& model, const Eigen::MatrixXd& inputs) {
  const Architecture& arch = model.arch;
  ForwardPass fp;
  fp.activations.reserve(static_cast<std::size_t>(arch.num_layers()));
  fp.activations.push_back(inputs);
  for (Eigen::Index l = 0; l < arch.num_layers(); ++l) {
    Eigen::MatrixXd z = fp.activations.back() * weight_view(model, l).transpose();
    z.rowwise() += bias_view(model, l).transpose();
    if (l + 1 == arch.num_layers()) {
      fp.logits = std::move(z);
    } else if (arch.activation == Activation::Relu) {
      fp.activations.push_back(z.cwiseMax(0.0));
    } else {
      fp.activations.push_back(std::move(z));
    }
  }
  return fp;
}

// Backpropagates d(loss)/d(logits) into a flat parameter gradient.
Eigen::VectorXd backward_pass(const ModelParams& model, const ForwardPass& fp,
                              const Eigen::MatrixXd& dlogits) {
  const Architecture& arch = model.arch;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(model.values.size());
  Eigen::MatrixXd delta = dlogits;
  for (Eigen::Index l = arch.num_layers() - 1; l >= 0; --l) {
    const Eigen::Index in = arch.layer_sizes[l];
    const Eigen::Index out = arch.layer_sizes[l + 1];
    const Eigen::Index off = layer_offset(arch, l);
    Eigen::Map<RowMajorMatrix>(grad.data() + off, out, in) =
        delta.transpose() * fp.activations[static_cast<std::size_t>(l)];
    grad.segment(off + in * out, out) = delta.colwise().sum();
    if (l > 0) {
      delta = delta * weight_view(model, l);
      if (arch.activation == Activation::Relu) {
        // Subgradient 0 at exactly 0.
        delta.array() *=
            (fp.activations[static_cast<std::size_t>(l)].array() > 0.0).cast<double>();
      }
    }
  }
  return grad;
}

void check_targets(const ExampleBatch& batch, const LogitBlock& targets,
                   Eigen::Index num_classes, double tau) {
  if (tau <= 0.0) throw ConfigError("temperature tau must be positive");
  if (targets.values.rows() != batch.inputs.rows() || targets.values.cols() != num_classes)
    throw ShapeError("target logit block does not match the public batch");
}

}  // namespace

Eigen::Index Architecture::param_count() const {
  return layer_offset(*this, num_layers());
}

void Architecture::validate() const {
  if (layer_sizes.size() < 2)
    throw ConfigError("architecture needs at least an input and an output layer");
  for (Eigen::Index s : layer_sizes)
    if (s < 1) throw ConfigError("architecture layer sizes must be positive");
}

Eigen::VectorXd LogitBlock::flatten() const {
  const RowMajorMatrix row_major = values;
  return Eigen::Map<const Eigen::VectorXd>(row_major.data(), row_major.size());
}

LogitBlock LogitBlock::unflatten(const Eigen::VectorXd& flat, Eigen::Index rows,
                                 Eigen::Index cols) {
  if (flat.size() != rows * cols)
    throw ShapeError("flattened logit length does not equal rows * cols");
  LogitBlock block;
  block.values = Eigen::Map<const RowMajorMatrix>(flat.data(), rows, cols);
  return block;
}

Eigen::Map<const RowMajorMatrix> weight_view(const ModelParams& model, Eigen::Index layer) {
  const Eigen::Index in = model.arch.layer_sizes[layer];
  const Eigen::Index out = model.arch.layer_sizes[layer + 1];
  return {model.values.data() + layer_offset(model.arch, layer), out, in};
}

Eigen::Map<const Eigen::VectorXd> bias_view(const ModelParams& model, Eigen::Index layer) {
  const Eigen::Index in = model.arch.layer_sizes[layer];
  const Eigen::Index out = model.arch.layer_sizes[layer + 1];
  return {model.values.data() + layer_offset(model.arch, layer) + in * out, out};
}

Eigen::VectorXd pack_params(const Architecture& arch,
                            const std::vector<Eigen::MatrixXd>& weights,
                            const std::vector<Eigen::VectorXd>& biases) {
  arch.validate();
  if (weights.size() != static_cast<std::size_t>(arch.num_layers()) ||
      biases.size() != weights.size())
    throw ShapeError("pack_params: one weight matrix and bias per layer required");
  Eigen::VectorXd flat(arch.param_count());
  for (Eigen::Index l = 0; l < arch.num_layers(); ++l) {
    const Eigen::Index in = arch.layer_sizes[l];
    const Eigen::Index out = arch.layer_sizes[l + 1];
    if (weights[static_cast<std::size_t>(l)].rows() != out ||
        weights[static_cast<std::size_t>(l)].cols() != in ||
        biases[static_cast<std::size_t>(l)].size() != out)
      throw ShapeError("pack_params: layer shape mismatch");
    const Eigen::Index off = layer_offset(arch, l);
    Eigen::Map<RowMajorMatrix>(flat.data() + off, out, in) =
        weights[static_cast<std::size_t>(l)];
    flat.segment(off + in * out, out) = biases[static_cast<std::size_t>(l)];
  }
  return flat;
}

ModelParams init_model(const Architecture& arch, std::uint64_t seed) {
  arch.validate();
  ModelParams model;
  model.arch = arch;
  model.values = Eigen::VectorXd::Zero(arch.param_count());
  RngStream rng = RngStream::keyed(seed, StreamKind::ModelInit);
  for (Eigen::Index l = 0; l < arch.num_layers(); ++l) {
    const Eigen::Index in = arch.layer_sizes[l];
    const Eigen::Index out = arch.layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    const Eigen::Index off = layer_offset(arch, l);
    for (Eigen::Index i = 0; i < in * out; ++i)
      model.values[off + i] = rng.uniform(-bound, bound);
    // biases stay zero
  }
  return model;
}

LogitBlock forward_logits(const ModelParams& model, const ExampleBatch& batch) {
  check_model(model);
  check_batch(model.arch, batch);
  return {forward_pass(model, batch.inputs).logits};
}

double ce_loss(const ModelParams& model, const ExampleBatch& batch) {
  check_model(model);
  check_batch(model.arch, batch);
  const Eigen::MatrixXd logits = forward_pass(model, batch.inputs).logits;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double zmax = logits.row(i).maxCoeff();
    const double lse = zmax + std::log((logits.row(i).array() - zmax).exp().sum());
    loss += lse - logits(i, batch.labels[i]);
  }
  return loss / static_cast<double>(logits.rows());
}

Eigen::VectorXd ce_gradient(const ModelParams& model, const ExampleBatch& batch) {
  check_model(model);
  check_batch(model.arch, batch);
  const ForwardPass fp = forward_pass(model, batch.inputs);
  Eigen::MatrixXd dlogits = softmax_rows(fp.logits);
  for (Eigen::Index i = 0; i < dlogits.rows(); ++i) {
    if (batch.labels[i] < 0 || batch.labels[i] >= dlogits.cols())
      throw ShapeError("label outside [0, C)");
    dlogits(i, batch.labels[i]) -= 1.0;
  }
  dlogits /= static_cast<double>(dlogits.rows());
  return backward_pass(model, fp, dlogits);
}

double kd_loss(const ModelParams& model, const ExampleBatch& public_batch,
               const LogitBlock& targets, double tau) {
  check_model(model);
  check_batch(model.arch, public_batch);
  check_targets(public_batch, targets, model.arch.num_classes(), tau);
  const Eigen::MatrixXd q = softmax_rows(forward_pass(model, public_batch.inputs).logits, tau);
  const Eigen::MatrixXd p = softmax_rows(targets.values, tau);
  // Softmax outputs are strictly positive, so the logs are safe.
  const double kl = (p.array() * (p.array().log() - q.array().log())).sum();
  return kl / static_cast<double>(p.rows());
}

Eigen::VectorXd kd_gradient(const ModelParams& model, const ExampleBatch& public_batch,
                            const LogitBlock& targets, double tau) {
  check_model(model);
  check_batch(model.arch, public_batch);
  check_targets(public_batch, targets, model.arch.num_classes(), tau);
  const ForwardPass fp = forward_pass(model, public_batch.inputs);
  const Eigen::MatrixXd q = softmax_rows(fp.logits, tau);
  const Eigen::MatrixXd p = softmax_rows(targets.values, tau);
  const Eigen::MatrixXd dlogits = (q - p) / (tau * static_cast<double>(q.rows()));
  return backward_pass(model, fp, dlogits);
}

ModelParams sgd_step(const ModelParams& model, const Eigen::VectorXd& grad, double lr) {
  check_model(model);
  if (grad.size() != model.values.size())
    throw ShapeError("gradient length does not match the parameter count");
  if (lr < 0.0) throw ConfigError("learning rate must be nonnegative");
  ModelParams next;
  next.arch = model.arch;
  next.values = model.values - lr * grad;
  return next;
}

double evaluate_accuracy(const ModelParams& model, const ExampleBatch& test) {
  check_model(model);
  check_batch(model.arch, test);
  const Eigen::MatrixXd logits = forward_pass(model, test.inputs).logits;
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index pred = 0;
    for (Eigen::Index c = 1; c < logits.cols(); ++c)
      if (logits(i, c) > logits(i, pred)) pred = c;  // ties keep the lowest index
    if (pred == test.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(logits.rows());
}

}  // namespace hfl
