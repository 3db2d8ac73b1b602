#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "hfl/errors.hpp"
#include "hfl/metrics.hpp"
#include "hfl/orchestrator.hpp"

using namespace hfl;

namespace {

// Small, fast desk configuration used across the tests.
ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.n = 4;
  cfg.k = 4;
  cfg.snr_db = -10.0;
  cfg.rounds = 5;
  cfg.arch = Architecture{{12, 8, 4}, Activation::Relu};
  cfg.data.classes = 4;
  cfg.data.input_dim = 12;
  cfg.data.samples = 800;
  cfg.data.public_size = 64;
  cfg.data.test_size = 100;
  cfg.local_batch = 16;
  cfg.public_batch = 16;
  cfg.seed = 3;
  return cfg;
}

bool same_metrics(const std::vector<RoundMetrics>& a, const std::vector<RoundMetrics>& b,
                  bool ignore_alpha = false) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool q_fl_equal = (std::isnan(a[i].mean_q_fl) && std::isnan(b[i].mean_q_fl)) ||
                            a[i].mean_q_fl == b[i].mean_q_fl;
    const bool q_fd_equal = (std::isnan(a[i].mean_q_fd) && std::isnan(b[i].mean_q_fd)) ||
                            a[i].mean_q_fd == b[i].mean_q_fd;
    if (a[i].round != b[i].round || a[i].accuracy != b[i].accuracy ||
        (!ignore_alpha && a[i].alpha != b[i].alpha) || a[i].k1 != b[i].k1 || !q_fl_equal ||
        !q_fd_equal)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("partitions are disjoint, exact-sized and deterministic") {
  DataSpec spec;
  spec.classes = 10;
  spec.input_dim = 4;
  spec.samples = 1000;
  spec.public_size = 100;
  spec.test_size = 100;
  const Dataset data = gen_synthetic_dataset(spec, 1);

  const Partition a = partition_dataset(data, spec, 10, 7);
  const Partition b = partition_dataset(data, spec, 10, 7);
  REQUIRE(a.shards.size() == 10);
  for (const auto& shard : a.shards) CHECK(shard.size() == 80);
  CHECK(a.public_set.size() == 100);
  CHECK(a.test_set.size() == 100);
  CHECK(a.public_set.inputs == b.public_set.inputs);
  CHECK(a.shards[3].inputs == b.shards[3].inputs);

  // Disjointness: rows are distinguishable with probability one, so collect
  // the first coordinate of every selected row.
  std::multiset<double> seen;
  auto absorb = [&](const ExampleBatch& batch) {
    for (Eigen::Index i = 0; i < batch.size(); ++i) seen.insert(batch.inputs(i, 0));
  };
  absorb(a.public_set);
  absorb(a.test_set);
  for (const auto& shard : a.shards) absorb(shard);
  CHECK(seen.size() == 1000);
  std::multiset<double> source;
  for (Eigen::Index i = 0; i < 1000; ++i) source.insert(data.inputs(i, 0));
  CHECK(std::includes(source.begin(), source.end(), seen.begin(), seen.end()));
}

TEST_CASE("too-small datasets are configuration errors") {
  DataSpec spec;
  spec.classes = 2;
  spec.input_dim = 4;
  spec.samples = 150;
  spec.public_size = 100;
  spec.test_size = 100;
  const Dataset data = gen_synthetic_dataset(spec, 1);
  CHECK_THROWS_AS(partition_dataset(data, spec, 4, 0), ConfigError);
}

TEST_CASE("sampling without replacement caps at the shard") {
  DataSpec spec;
  spec.classes = 2;
  spec.input_dim = 3;
  spec.samples = 40;
  spec.public_size = 8;
  spec.test_size = 8;
  const Dataset data = gen_synthetic_dataset(spec, 2);
  const Partition part = partition_dataset(data, spec, 2, 5);

  const ExampleBatch whole =
      sample_batch(part.shards[0], 100, RngStream::keyed(1, StreamKind::LocalBatch));
  CHECK(whole.inputs == part.shards[0].inputs);

  const ExampleBatch sub =
      sample_batch(part.shards[0], 5, RngStream::keyed(1, StreamKind::LocalBatch));
  CHECK(sub.size() == 5);
  const ExampleBatch sub2 =
      sample_batch(part.shards[0], 5, RngStream::keyed(1, StreamKind::LocalBatch));
  CHECK(sub.inputs == sub2.inputs);
}

TEST_CASE("experiments replay bit-identically") {
  const ExperimentConfig cfg = tiny_config();
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  REQUIRE(a.size() == 5);
  CHECK(same_metrics(a, b));
  for (const auto& m : a) {
    CHECK(m.accuracy >= 0.0);
    CHECK(m.accuracy <= 1.0);
    CHECK(m.k1 >= 0);
    CHECK(m.k1 <= 4);
  }
}

TEST_CASE("one round of run_experiment equals run_round from the initial state") {
  ExperimentConfig cfg = tiny_config();
  cfg.rounds = 1;
  const auto via_experiment = run_experiment(cfg);

  FederationState state = init_federation(cfg);
  const RoundMetrics direct = run_round(state, cfg);
  CHECK(via_experiment[0].accuracy == direct.accuracy);
  CHECK(via_experiment[0].alpha == direct.alpha);
  CHECK(via_experiment[0].k1 == direct.k1);
  CHECK(state.round == 1);
}

TEST_CASE("round replay from a copied state is bit-exact") {
  const ExperimentConfig cfg = tiny_config();
  FederationState state = init_federation(cfg);
  run_round(state, cfg);  // advance one round
  FederationState copy = state;
  const RoundMetrics once = run_round(state, cfg);
  const RoundMetrics again = run_round(copy, cfg);
  CHECK(once.accuracy == again.accuracy);
  CHECK(once.alpha == again.alpha);
  CHECK(state.theta.values == copy.theta.values);
}

TEST_CASE("the fl scheme is the all-fl fixed-alpha degeneration, bit for bit") {
  ExperimentConfig fl = tiny_config();
  fl.scheme = Scheme::FL;
  fl.noiseless = true;
  fl.rounds = 8;

  ExperimentConfig hfl = tiny_config();
  hfl.scheme = Scheme::HFL;
  hfl.noiseless = true;
  hfl.rounds = 8;
  hfl.clus_mode = ClusMode::AllFl;
  hfl.fusion.weight_mode = WeightMode::Fixed;
  hfl.fusion.fixed_alpha = 1.0;

  CHECK(same_metrics(run_experiment(fl), run_experiment(hfl)));
}

TEST_CASE("the fd scheme is the all-fd fixed-alpha degeneration, bit for bit") {
  ExperimentConfig fd = tiny_config();
  fd.scheme = Scheme::FD;
  fd.noiseless = true;
  fd.rounds = 8;

  ExperimentConfig hfl = tiny_config();
  hfl.scheme = Scheme::HFL;
  hfl.noiseless = true;
  hfl.rounds = 8;
  hfl.clus_mode = ClusMode::AllFd;
  hfl.fusion.weight_mode = WeightMode::Fixed;
  hfl.fusion.fixed_alpha = 0.0;

  CHECK(same_metrics(run_experiment(fd), run_experiment(hfl)));
}

TEST_CASE("noiseless all-fl pipeline reproduces a direct FedAvg trajectory") {
  ExperimentConfig cfg = tiny_config();
  cfg.scheme = Scheme::FL;
  cfg.noiseless = true;
  cfg.rounds = 10;
  const auto pipeline = run_experiment(cfg);

  // Direct FedAvg with the same batch draws, bypassing codec and channel.
  const ExperimentConfig eff = cfg.normalized();
  FederationState state = init_federation(eff);
  ModelParams theta = state.theta;
  std::vector<double> accuracies;
  for (int t = 0; t < eff.rounds; ++t) {
    std::vector<std::pair<Eigen::VectorXd, double>> grads;
    for (Eigen::Index ue = 0; ue < eff.k; ++ue) {
      const ExampleBatch local = sample_batch(
          state.shards[static_cast<std::size_t>(ue)], eff.local_batch,
          RngStream::keyed(eff.seed, StreamKind::LocalBatch, static_cast<std::uint64_t>(t),
                           static_cast<std::uint64_t>(ue)));
      grads.push_back({ce_gradient(theta, local), static_cast<double>(local.size())});
    }
    theta = sgd_step(theta, aggregate_gradients(grads), eff.fusion.eta1);
    accuracies.push_back(evaluate_accuracy(theta, state.test_set));
  }
  ModelParams pipeline_theta = state.theta;
  {
    FederationState run_state = init_federation(eff);
    for (int t = 0; t < eff.rounds; ++t) run_round(run_state, eff);
    pipeline_theta = run_state.theta;
  }
  CHECK((pipeline_theta.values - theta.values).cwiseAbs().maxCoeff() < 1e-8);
  for (int t = 0; t < eff.rounds; ++t)
    CHECK(pipeline[static_cast<std::size_t>(t)].accuracy ==
          doctest::Approx(accuracies[static_cast<std::size_t>(t)]));
}

TEST_CASE("ablation arms pair the channel draws") {
  ExperimentConfig base = tiny_config();
  base.rounds = 6;
  base.snr_db = -15.0;
  const auto arms = run_ablation(base);
  REQUIRE(arms.size() == 4);

  const auto& fwd_opt = arms[0];
  const auto& fwd_fix = arms[1];
  const auto& rev_opt = arms[2];
  CHECK(fwd_opt.name == "forward-opt");

  for (std::size_t t = 0; t < 6; ++t) {
    // Same channel, same forward grouping: the q statistics agree.
    CHECK(fwd_opt.metrics[t].k1 == fwd_fix.metrics[t].k1);
    CHECK(fwd_opt.metrics[t].mean_q_fl == fwd_fix.metrics[t].mean_q_fl);
    // weight-fix holds alpha at one half whenever both groups are live.
    if (fwd_fix.metrics[t].k1 > 0 && fwd_fix.metrics[t].k1 < 4)
      CHECK(fwd_fix.metrics[t].alpha == 0.5);
    // Reverse complements the forward split when it is not degenerate.
    if (fwd_opt.metrics[t].k1 > 0 && fwd_opt.metrics[t].k1 < 4)
      CHECK(rev_opt.metrics[t].k1 == 4 - fwd_opt.metrics[t].k1);
  }
}

TEST_CASE("ablation requires the hfl scheme") {
  ExperimentConfig base = tiny_config();
  base.scheme = Scheme::FL;
  CHECK_THROWS_AS(run_ablation(base), ConfigError);
}

TEST_CASE("invalid configurations are rejected up front") {
  ExperimentConfig cfg = tiny_config();
  cfg.n = 2;  // n < k
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  ExperimentConfig bad_arch = tiny_config();
  bad_arch.data.input_dim = 5;  // mismatch with arch input
  CHECK_THROWS_AS(bad_arch.validate(), ConfigError);
}
