#pragma once

#include <Eigen/Dense>

#include <functional>
#include <utility>
#include <vector>

#include "hfl/nn.hpp"

namespace hfl {

enum class WeightMode { Optimized, Fixed };

struct FusionConfig {
  double eta1 = 0.01;  // FL learning rate
  double eta2 = 0.01;  // FD learning rate
  double eta3 = 0.1;   // Newton damping factor
  double tau = 2.0;    // distillation temperature
  int newton_epochs = 30;
  WeightMode weight_mode = WeightMode::Optimized;
  double fixed_alpha = 0.5;
  double fd_step = 0.01;  // FD-UE local SGD rate (defaults to eta1)

  void validate() const;
};

// Global descent directions d_fl = -eta1 * g_hat, d_fd = -eta2 * grad Q.
struct UpdateDirections {
  Eigen::VectorXd d_fl;
  Eigen::VectorXd d_fd;
};

// Dataset-size-weighted means; the weights sum to one per group.
Eigen::VectorXd aggregate_gradients(
    const std::vector<std::pair<Eigen::VectorXd, double>>& grads);
LogitBlock aggregate_logits(const std::vector<std::pair<LogitBlock, double>>& logits);

double sigmoid(double s);

struct NewtonOptions {
  double eta3 = 0.1;
  int epochs = 30;
  double fd_step = 1e-3;          // central-difference step in s-space
  double curvature_floor = 1e-8;  // below this, take a damped gradient step
  double s_clamp = 10.0;          // |s| bound applied when the loss turns non-finite
};

struct NewtonResult {
  double alpha = 0.5;
  double s_star = 0.0;
  int iterations = 0;
};

// Scalar damped Newton descent, s <- s - eta3 * L'(s)/L''(s), from s = 0, with
// derivatives by central finite differences (three loss evaluations per
// iteration). Tests may inject surrogate losses here; the production path
// wraps the public-data CE loss below.
NewtonResult newton_minimize(const std::function<double(double)>& loss,
                             const NewtonOptions& opts);

// Minimizes F(D_pub; theta + sigmoid(s) d_fl + (1 - sigmoid(s)) d_fd) over s
// and returns alpha = sigmoid(s*).
NewtonResult select_weight_newton(const ModelParams& theta, const UpdateDirections& dirs,
                                  const ExampleBatch& public_batch, const FusionConfig& cfg);

// theta' = theta - alpha eta1 g_hat - (1 - alpha) eta2 grad Q(D_pub; theta, z_hat),
// computed as the convex combination of the two pure updates so the result is
// affine in alpha to the last bit. Callers must force alpha to 0/1 when the
// corresponding group is empty.
ModelParams hybrid_update(const ModelParams& theta, const Eigen::VectorXd& g_hat,
                          const LogitBlock& z_hat, double alpha,
                          const ExampleBatch& public_batch, const FusionConfig& cfg);

}  // namespace hfl
