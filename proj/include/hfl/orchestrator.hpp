#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "hfl/channel.hpp"
#include "hfl/dataset.hpp"
#include "hfl/fusion.hpp"
#include "hfl/grouping.hpp"
#include "hfl/nn.hpp"

namespace hfl {

enum class Scheme { FL, FD, HFL };
enum class ClusMode { Forward, Reverse, AllFl, AllFd };

struct ExperimentConfig {
  Eigen::Index n = 30;  // BS antennas
  Eigen::Index k = 30;  // UEs
  double snr_db = -20.0;
  int rounds = 100;
  Scheme scheme = Scheme::HFL;
  ClusMode clus_mode = ClusMode::Forward;
  QMode q_mode = QMode::Paper;
  FusionConfig fusion;
  Architecture arch{{64, 32, 10}, Activation::Relu};
  DataSpec data;
  std::uint64_t seed = 0;
  Eigen::Index local_batch = 64;   // |D_k^(t)|
  Eigen::Index public_batch = 64;  // |D_pub^(t)|
  bool noiseless = false;          // test hook: zero channel noise

  void validate() const;
  // Applies the scheme degenerations: FL forces (all_fl, fixed alpha = 1),
  // FD forces (all_fd, fixed alpha = 0). HFL passes through unchanged.
  ExperimentConfig normalized() const;
};

struct FederationState {
  ModelParams theta;
  std::vector<ExampleBatch> shards;  // disjoint per-UE data
  ExampleBatch public_set;           // labeled, shared by UEs and BS
  ExampleBatch test_set;
  int round = 0;
};

struct RoundMetrics {
  int round = 0;
  double accuracy = 0.0;
  double alpha = 0.0;
  int k1 = 0;
  double mean_q_fl = 0.0;  // NaN when the FL group is empty
  double mean_q_fd = 0.0;  // NaN when the FD group is empty
  double wall_ms = 0.0;
};

struct Partition {
  std::vector<ExampleBatch> shards;
  ExampleBatch public_set;
  ExampleBatch test_set;
};

// IID uniform disjoint split: test and public sets first, then K equal shards
// (remainder examples are dropped). Deterministic per seed.
Partition partition_dataset(const Dataset& data, const DataSpec& spec, Eigen::Index k,
                            std::uint64_t seed);

// Draws `count` examples without replacement (the whole set, in order, when
// count >= set size).
ExampleBatch sample_batch(const ExampleBatch& from, Eigen::Index count, RngStream rng);

FederationState init_federation(const ExperimentConfig& cfg);

// One communication round: channel, grouping, local training, uplink, ZF
// detection, reconstruction, aggregation, weight selection, global update,
// evaluation. Advances state.round.
RoundMetrics run_round(FederationState& state, const ExperimentConfig& cfg);

std::vector<RoundMetrics> run_experiment(const ExperimentConfig& cfg);

struct AblationArm {
  std::string name;
  ClusMode clus_mode;
  WeightMode weight_mode;
  std::vector<RoundMetrics> metrics;
};

// The four DoF configurations {forward, reverse} x {opt, fix}, sharing the
// base seed so all arms see identical channel and noise realizations.
std::vector<AblationArm> run_ablation(const ExperimentConfig& base);

}  // namespace hfl
