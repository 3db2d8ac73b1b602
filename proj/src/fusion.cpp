#include "hfl/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "hfl/errors.hpp"

namespace hfl {

void FusionConfig::validate() const {
  if (eta1 <= 0.0 || eta2 <= 0.0 || eta3 <= 0.0)
    throw ConfigError("fusion rates eta1, eta2, eta3 must be positive");
  if (tau <= 0.0) throw ConfigError("fusion tau must be positive");
  if (newton_epochs < 1) throw ConfigError("fusion newton_epochs must be >= 1");
  if (fixed_alpha < 0.0 || fixed_alpha > 1.0)
    throw ConfigError("fusion fixed_alpha must lie in [0, 1]");
  if (fd_step < 0.0) throw ConfigError("fusion fd_step must be nonnegative");
}

Eigen::VectorXd aggregate_gradients(
    const std::vector<std::pair<Eigen::VectorXd, double>>& grads) {
  if (grads.empty()) throw EmptyGroupError("aggregate_gradients: empty FL group");
  double total = 0.0;
  for (const auto& [g, size] : grads) {
    if (g.size() != grads.front().first.size())
      throw ShapeError("aggregate_gradients: mismatched gradient lengths");
    if (size <= 0.0) throw ConfigError("aggregate_gradients: dataset sizes must be positive");
    total += size;
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(grads.front().first.size());
  for (const auto& [g, size] : grads) out += (size / total) * g;
  return out;
}

LogitBlock aggregate_logits(const std::vector<std::pair<LogitBlock, double>>& logits) {
  if (logits.empty()) throw EmptyGroupError("aggregate_logits: empty FD group");
  double total = 0.0;
  for (const auto& [z, size] : logits) {
    if (z.values.rows() != logits.front().first.values.rows() ||
        z.values.cols() != logits.front().first.values.cols())
      throw ShapeError("aggregate_logits: mismatched logit block shapes");
    if (size <= 0.0) throw ConfigError("aggregate_logits: dataset sizes must be positive");
    total += size;
  }
  LogitBlock out;
  out.values = Eigen::MatrixXd::Zero(logits.front().first.values.rows(),
                                     logits.front().first.values.cols());
  for (const auto& [z, size] : logits) out.values += (size / total) * z.values;
  return out;
}

double sigmoid(double s) { return 1.0 / (1.0 + std::exp(-s)); }

NewtonResult newton_minimize(const std::function<double(double)>& loss,
                             const NewtonOptions& opts) {
  const double h = opts.fd_step;
  double s = 0.0;
  int iters = 0;
  for (int w = 0; w < opts.epochs; ++w) {
    ++iters;
    const double f0 = loss(s);
    const double fp = loss(s + h);
    const double fm = loss(s - h);
    if (!std::isfinite(f0) || !std::isfinite(fp) || !std::isfinite(fm)) {
      s = std::clamp(s, -opts.s_clamp, opts.s_clamp);
      continue;
    }
    const double d1 = (fp - fm) / (2.0 * h);
    const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
    // Below the curvature floor the Newton step is unreliable; fall back to a
    // damped gradient step.
    const double step = (d2 > opts.curvature_floor) ? d1 / d2 : d1;
    if (!std::isfinite(step)) {
      s = std::clamp(s, -opts.s_clamp, opts.s_clamp);
      continue;
    }
    s -= opts.eta3 * step;
  }
  return {sigmoid(s), s, iters};
}

NewtonResult select_weight_newton(const ModelParams& theta, const UpdateDirections& dirs,
                                  const ExampleBatch& public_batch,
                                  const FusionConfig& cfg) {
  cfg.validate();
  if (dirs.d_fl.size() != theta.values.size() || dirs.d_fd.size() != theta.values.size())
    throw ShapeError("select_weight_newton: direction lengths must equal the parameter count");
  if (public_batch.size() == 0)
    throw ShapeError("select_weight_newton: public batch is empty");

  ModelParams candidate;
  candidate.arch = theta.arch;
  auto loss = [&](double s) {
    const double a = sigmoid(s);
    candidate.values = theta.values + a * dirs.d_fl + (1.0 - a) * dirs.d_fd;
    return ce_loss(candidate, public_batch);
  };

  NewtonOptions opts;
  opts.eta3 = cfg.eta3;
  opts.epochs = cfg.newton_epochs;
  return newton_minimize(loss, opts);
}

ModelParams hybrid_update(const ModelParams& theta, const Eigen::VectorXd& g_hat,
                          const LogitBlock& z_hat, double alpha,
                          const ExampleBatch& public_batch, const FusionConfig& cfg) {
  cfg.validate();
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("hybrid_update: alpha must lie in [0, 1]");
  if (alpha > 0.0 && g_hat.size() == 0)
    throw ShapeError("hybrid_update: alpha > 0 requires an aggregated gradient");
  if (alpha < 1.0 && z_hat.values.size() == 0)
    throw ShapeError("hybrid_update: alpha < 1 requires an aggregated logit block");

  ModelParams next;
  next.arch = theta.arch;
  if (alpha == 1.0) {
    next.values = theta.values - cfg.eta1 * g_hat;
    return next;
  }
  const Eigen::VectorXd fd_update =
      theta.values - cfg.eta2 * kd_gradient(theta, public_batch, z_hat, cfg.tau);
  if (alpha == 0.0) {
    next.values = fd_update;
    return next;
  }
  if (g_hat.size() != theta.values.size())
    throw ShapeError("hybrid_update: gradient length must equal the parameter count");
  const Eigen::VectorXd fl_update = theta.values - cfg.eta1 * g_hat;
  next.values = alpha * fl_update + (1.0 - alpha) * fd_update;
  return next;
}

}  // namespace hfl
