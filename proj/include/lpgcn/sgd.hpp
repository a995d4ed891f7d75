#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "lpgcn/model.hpp"
#include "lpgcn/prox.hpp"

namespace lpgcn {

// Optimizer and experiment hyperparameters for one training run.
struct TrainConfig {
  double p = 2.0;
  double lambda = 1e-3;   // regularization weight
  double eta = 0.1;       // learning rate
  double lambda_t = 0.0;  // prox scale; 0 means the eta*lambda default
  std::size_t epochs = 200;
  LossKind loss = LossKind::Logistic;
  ActivationKind activation = ActivationKind::Sigmoid;
  FilterKind filter_kind = FilterKind::AugmentedNormalized;
  std::uint64_t seed = 0;
  double prox_tol = 1e-12;
  std::size_t record_every = 1;  // epochs between trajectory snapshots
  Mode mode = Mode::Theory;
  bool gaussian_init = false;  // default w0 = 0, which makes B the exact
  double init_stddev = 0.01;   // initial loss bound
  bool shuffle_epochs = false; // epoch-permutation sampling instead of
                               // with-replacement draws
  double eps_sparsity = 1e-6;

  double effective_lambda_t() const { return lambda_t > 0.0 ? lambda_t : eta * lambda; }
  void validate() const;
};

// Mutable optimizer state between sgd_step calls.
struct SgdState {
  ModelParams params;
  std::size_t step = 0;
  std::mt19937_64 rng;
  double radius = 0.0;  // (B/lambda)^(1/p)
};

struct Trajectory {
  // (step, flat weights copy) at recording points; always includes the
  // final iterate.
  std::vector<std::pair<std::size_t, std::vector<double>>> snapshots;
  std::vector<std::size_t> index_sequence;  // sampled training node ids
};

// Per-epoch record of one run. Canonical train/test errors are mean loss in
// theory mode and misclassification rate in experiment mode; both raw
// metrics are kept alongside.
struct EpochMetrics {
  std::size_t epoch = 0;
  double train_error = 0.0;
  double test_error = 0.0;
  double gen_gap = 0.0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double train_misclass = 0.0;
  double test_misclass = 0.0;
  double param_distance = 0.0;  // filled by twin runs
  double sparsity_pct = 0.0;
};

struct RunMetrics {
  std::vector<EpochMetrics> rows;
};

struct TrainResult {
  ModelParams params;
  Trajectory trajectory;
  RunMetrics metrics;
};

// Precomputed quantities shared by every step of a run.
struct SgdSetup {
  SparseMatrix filter;
  DenseMatrix z;  // propagate(filter, features)
  double B = 0.0;
  double radius = 0.0;  // (B/lambda)^(1/p)
  double lambda_t = 0.0;
};

SgdSetup prepare_training(const Dataset& dataset, const TrainConfig& config);

SgdState init_state(const Dataset& dataset, const TrainConfig& config, double radius);

// One iterate of the constrained inexact proximal step at the given
// training node: gradient step, projection onto the radius ball, then the
// lp prox. Keeps ||w||_2 <= radius afterwards.
void sgd_step_at(SgdState& state, const Dataset& dataset, const DenseMatrix& z,
                 const TrainConfig& config, std::size_t node);

// Draws the node uniformly (with replacement) from the train mask using the
// state's generator, then applies sgd_step_at.
std::size_t sgd_step(SgdState& state, const Dataset& dataset, const DenseMatrix& z,
                     const TrainConfig& config);

// Index sequence for a full run: epochs * m draws from the train mask.
std::vector<std::size_t> sample_sequence(const Dataset& dataset, const TrainConfig& config);

// Full training run; one epoch is m iterations. Deterministic given the
// config seed.
TrainResult train(const Dataset& dataset, const TrainConfig& config);

// Same, but replaying a fixed index sequence (twin trainings share one).
TrainResult train_with_sequence(const Dataset& dataset, const TrainConfig& config,
                                std::span<const std::size_t> sequence);

// Metrics of the current parameters over both masks.
EpochMetrics evaluate_epoch(const ModelParams& params, const Dataset& dataset,
                            const DenseMatrix& z, const TrainConfig& config,
                            std::size_t epoch);

}  // namespace lpgcn
