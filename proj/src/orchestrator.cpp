#include "hfl/orchestrator.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "hfl/errors.hpp"
#include "hfl/link_codec.hpp"

namespace hfl {

namespace {

ExampleBatch take_rows(const Dataset& data, const std::vector<Eigen::Index>& order,
                       Eigen::Index begin, Eigen::Index count) {
  ExampleBatch batch;
  batch.inputs.resize(count, data.inputs.cols());
  batch.labels.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    batch.inputs.row(i) = data.inputs.row(order[static_cast<std::size_t>(begin + i)]);
    batch.labels[i] = data.labels[order[static_cast<std::size_t>(begin + i)]];
  }
  return batch;
}

double mean_q_of_group(const LinkQuality& quality, const std::vector<int>& indicators,
                       int group) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t k = 0; k < indicators.size(); ++k) {
    if (indicators[k] == group) {
      sum += quality.q[static_cast<Eigen::Index>(k)];
      ++count;
    }
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / count;
}

GroupAssignment make_assignment(const LinkQuality& quality, ClusMode mode) {
  const auto k = static_cast<std::size_t>(quality.q.size());
  if (mode == ClusMode::Forward) return assign_groups(quality, ClusterMode::Forward);
  if (mode == ClusMode::Reverse) return assign_groups(quality, ClusterMode::Reverse);
  GroupAssignment assignment;
  assignment.threshold = std::numeric_limits<double>::quiet_NaN();
  if (mode == ClusMode::AllFl) {
    assignment.indicators.assign(k, 0);
    assignment.k1 = static_cast<int>(k);
  } else {
    assignment.indicators.assign(k, 1);
    assignment.k1 = 0;
  }
  return assignment;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (k < 1 || n < k) throw ConfigError("config requires n >= k >= 1");
  if (rounds < 1) throw ConfigError("config rounds must be >= 1");
  if (local_batch < 1) throw ConfigError("config local_batch must be positive");
  if (public_batch < 1) throw ConfigError("config public_batch must be positive");
  fusion.validate();
  arch.validate();
  data.validate();
  if (data.source == DataSource::Synthetic && data.input_dim != arch.input_dim())
    throw ConfigError("data.input_dim must match the architecture input layer");
  if (scheme == Scheme::FL &&
      (clus_mode != ClusMode::AllFl || fusion.weight_mode != WeightMode::Fixed ||
       fusion.fixed_alpha != 1.0))
    throw ConfigError("scheme=fl forces clus_mode=all_fl and fixed alpha=1");
  if (scheme == Scheme::FD &&
      (clus_mode != ClusMode::AllFd || fusion.weight_mode != WeightMode::Fixed ||
       fusion.fixed_alpha != 0.0))
    throw ConfigError("scheme=fd forces clus_mode=all_fd and fixed alpha=0");
}

ExperimentConfig ExperimentConfig::normalized() const {
  ExperimentConfig cfg = *this;
  if (cfg.scheme == Scheme::FL) {
    cfg.clus_mode = ClusMode::AllFl;
    cfg.fusion.weight_mode = WeightMode::Fixed;
    cfg.fusion.fixed_alpha = 1.0;
  } else if (cfg.scheme == Scheme::FD) {
    cfg.clus_mode = ClusMode::AllFd;
    cfg.fusion.weight_mode = WeightMode::Fixed;
    cfg.fusion.fixed_alpha = 0.0;
  }
  return cfg;
}

Partition partition_dataset(const Dataset& data, const DataSpec& spec, Eigen::Index k,
                            std::uint64_t seed) {
  spec.validate();
  if (k < 1) throw ConfigError("partition_dataset: k must be positive");
  const Eigen::Index n = data.size();
  const Eigen::Index shard_size = (n - spec.public_size - spec.test_size) / k;
  if (spec.public_size + spec.test_size >= n || shard_size < 1)
    throw ConfigError("partition_dataset: dataset too small for the requested splits");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  RngStream rng = RngStream::keyed(seed, StreamKind::Partition);
  for (Eigen::Index i = n - 1; i > 0; --i)
    std::swap(order[static_cast<std::size_t>(i)],
              order[rng.uniform_index(static_cast<std::uint64_t>(i) + 1)]);

  Partition part;
  part.test_set = take_rows(data, order, 0, spec.test_size);
  part.public_set = take_rows(data, order, spec.test_size, spec.public_size);
  Eigen::Index at = spec.test_size + spec.public_size;
  part.shards.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index u = 0; u < k; ++u, at += shard_size)
    part.shards.push_back(take_rows(data, order, at, shard_size));
  return part;
}

ExampleBatch sample_batch(const ExampleBatch& from, Eigen::Index count, RngStream rng) {
  if (count >= from.size()) return from;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(from.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  // Partial Fisher-Yates: only the first `count` slots are needed.
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto j = i + static_cast<Eigen::Index>(
                           rng.uniform_index(static_cast<std::uint64_t>(from.size() - i)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  ExampleBatch batch;
  batch.inputs.resize(count, from.inputs.cols());
  batch.labels.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    batch.inputs.row(i) = from.inputs.row(order[static_cast<std::size_t>(i)]);
    batch.labels[i] = from.labels[order[static_cast<std::size_t>(i)]];
  }
  return batch;
}

FederationState init_federation(const ExperimentConfig& raw) {
  const ExperimentConfig cfg = raw.normalized();
  cfg.validate();
  const Dataset data = load_dataset(cfg.data, cfg.seed);
  Partition part = partition_dataset(data, cfg.data, cfg.k, cfg.seed);

  FederationState state;
  state.theta = init_model(cfg.arch, cfg.seed);
  state.shards = std::move(part.shards);
  state.public_set = std::move(part.public_set);
  state.test_set = std::move(part.test_set);
  state.round = 0;
  return state;
}

RoundMetrics run_round(FederationState& state, const ExperimentConfig& raw) {
  const ExperimentConfig cfg = raw.normalized();
  const auto t0 = std::chrono::steady_clock::now();
  const auto t = static_cast<std::uint64_t>(state.round);
  const double rho = snr_db_to_linear(cfg.snr_db);

  try {
    // Channel state and FL/FD grouping for the round.
    RngStream channel_rng = RngStream::keyed(cfg.seed, StreamKind::Channel, t);
    const ChannelMatrix channel = sample_channel(cfg.n, cfg.k, channel_rng);
    const LinkQuality quality = noise_enhancement(channel, rho, cfg.q_mode);
    const GroupAssignment groups = make_assignment(quality, cfg.clus_mode);

    // Round public minibatch, shared by all FD UEs and the BS.
    const ExampleBatch round_public =
        sample_batch(state.public_set, cfg.public_batch,
                     RngStream::keyed(cfg.seed, StreamKind::PublicBatch, t));

    // Local training and payload encoding, in UE index order.
    std::vector<SymbolStream> streams;
    std::vector<double> payload_sizes(static_cast<std::size_t>(cfg.k), 0.0);
    streams.reserve(static_cast<std::size_t>(cfg.k));
    for (Eigen::Index ue = 0; ue < cfg.k; ++ue) {
      const ExampleBatch local = sample_batch(
          state.shards[static_cast<std::size_t>(ue)], cfg.local_batch,
          RngStream::keyed(cfg.seed, StreamKind::LocalBatch, t, static_cast<std::uint64_t>(ue)));
      payload_sizes[static_cast<std::size_t>(ue)] = static_cast<double>(local.size());
      if (groups.indicators[static_cast<std::size_t>(ue)] == 0) {
        streams.push_back(encode_uplink(ce_gradient(state.theta, local), PayloadKind::Gradient));
      } else {
        const ModelParams local_model =
            sgd_step(state.theta, ce_gradient(state.theta, local), cfg.fusion.fd_step);
        streams.push_back(
            encode_uplink(forward_logits(local_model, round_public).flatten(), PayloadKind::Logit));
      }
    }

    // Uplink transmission and ZF detection.
    const TransmitFrame frame = pad_and_frame(streams);
    const SlotNoise noise{cfg.seed, t, !cfg.noiseless};
    const ReceivedFrame received = uplink_transmit(frame, channel, rho, noise);
    const Eigen::MatrixXcd detected = zf_detect(received, channel, rho);

    // Reconstruction and per-group aggregation.
    std::vector<std::pair<Eigen::VectorXd, double>> grads;
    std::vector<std::pair<LogitBlock, double>> logits;
    for (Eigen::Index ue = 0; ue < cfg.k; ++ue) {
      const Eigen::VectorXd payload =
          decode_uplink(detected.row(ue).transpose(), frame.sidebands[static_cast<std::size_t>(ue)]);
      if (groups.indicators[static_cast<std::size_t>(ue)] == 0) {
        grads.emplace_back(payload, payload_sizes[static_cast<std::size_t>(ue)]);
      } else {
        logits.emplace_back(
            LogitBlock::unflatten(payload, round_public.size(), cfg.arch.num_classes()),
            payload_sizes[static_cast<std::size_t>(ue)]);
      }
    }
    const Eigen::VectorXd g_hat =
        grads.empty() ? Eigen::VectorXd() : aggregate_gradients(grads);
    const LogitBlock z_hat = logits.empty() ? LogitBlock{} : aggregate_logits(logits);

    // Fusion weight: empty groups force alpha, otherwise apply the weight mode.
    double alpha = 0.0;
    if (groups.k1 == cfg.k) {
      alpha = 1.0;
    } else if (groups.k1 == 0) {
      alpha = 0.0;
    } else if (cfg.fusion.weight_mode == WeightMode::Fixed) {
      alpha = cfg.fusion.fixed_alpha;
    } else {
      UpdateDirections dirs;
      dirs.d_fl = -cfg.fusion.eta1 * g_hat;
      dirs.d_fd =
          -cfg.fusion.eta2 * kd_gradient(state.theta, round_public, z_hat, cfg.fusion.tau);
      alpha = select_weight_newton(state.theta, dirs, round_public, cfg.fusion).alpha;
    }

    state.theta = hybrid_update(state.theta, g_hat, z_hat, alpha, round_public, cfg.fusion);

    RoundMetrics metrics;
    metrics.round = state.round;
    metrics.accuracy = evaluate_accuracy(state.theta, state.test_set);
    metrics.alpha = alpha;
    metrics.k1 = groups.k1;
    metrics.mean_q_fl = mean_q_of_group(quality, groups.indicators, 0);
    metrics.mean_q_fd = mean_q_of_group(quality, groups.indicators, 1);
    metrics.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    state.round += 1;
    return metrics;
  } catch (const DetectionError& e) {
    throw DetectionError("round " + std::to_string(state.round) + ": " + e.what());
  } catch (const CodecError& e) {
    throw CodecError("round " + std::to_string(state.round) + ": " + e.what());
  }
}

std::vector<RoundMetrics> run_experiment(const ExperimentConfig& raw) {
  const ExperimentConfig cfg = raw.normalized();
  cfg.validate();
  FederationState state = init_federation(cfg);
  std::vector<RoundMetrics> metrics;
  metrics.reserve(static_cast<std::size_t>(cfg.rounds));
  for (int t = 0; t < cfg.rounds; ++t) metrics.push_back(run_round(state, cfg));
  return metrics;
}

std::vector<AblationArm> run_ablation(const ExperimentConfig& base) {
  if (base.scheme != Scheme::HFL)
    throw ConfigError("run_ablation: base scheme must be hfl");
  std::vector<AblationArm> arms = {
      {"forward-opt", ClusMode::Forward, WeightMode::Optimized, {}},
      {"forward-fix", ClusMode::Forward, WeightMode::Fixed, {}},
      {"reverse-opt", ClusMode::Reverse, WeightMode::Optimized, {}},
      {"reverse-fix", ClusMode::Reverse, WeightMode::Fixed, {}},
  };
  for (AblationArm& arm : arms) {
    ExperimentConfig cfg = base;
    cfg.clus_mode = arm.clus_mode;
    cfg.fusion.weight_mode = arm.weight_mode;
    cfg.fusion.fixed_alpha = 0.5;  // weight-fix holds alpha at sigmoid(0)
    arm.metrics = run_experiment(cfg);
  }
  return arms;
}

}  // namespace hfl
