#include "lpgcn/sgd.hpp"

#include <algorithm>
#include <cmath>

#include "lpgcn/errors.hpp"
#include "lpgcn/kernels.hpp"
#include "lpgcn/rng.hpp"
#include "lpgcn/stability.hpp"

namespace lpgcn {

void TrainConfig::validate() const {
  if (!(p > 1.0 && p <= 2.0)) throw InputError("p must lie in (1,2]");
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  if (!(eta >= 0.0)) throw InputError("eta must be non-negative");
  if (lambda_t < 0.0) throw InputError("lambda_t must be positive when set");
  if (!(prox_tol > 0.0)) throw InputError("prox_tol must be positive");
  if (record_every == 0) throw InputError("record_every must be positive");
  if (!(eps_sparsity > 0.0)) throw InputError("eps_sparsity must be positive");
  if (mode == Mode::Theory && loss == LossKind::SoftmaxCrossEntropy) {
    throw InputError("softmax loss requires experiment mode");
  }
  if (mode == Mode::Experiment && loss != LossKind::SoftmaxCrossEntropy) {
    throw InputError("experiment mode uses the softmax loss");
  }
}

SgdSetup prepare_training(const Dataset& dataset, const TrainConfig& config) {
  config.validate();
  dataset.validate();
  if (config.mode == Mode::Experiment) {
    for (int y : dataset.labels) {
      if (y < 0) throw InputError("experiment mode needs class-index labels (>= 0)");
    }
  }
  SgdSetup s;
  s.filter = build_filter(dataset.graph, config.filter_kind);
  s.z = propagate(s.filter, dataset.features);
  s.B = loss_bound(config.loss, config.activation, dataset, config.mode);
  s.radius = std::pow(s.B / config.lambda, 1.0 / config.p);
  s.lambda_t = config.effective_lambda_t();
  return s;
}

SgdState init_state(const Dataset& dataset, const TrainConfig& config, double radius) {
  SgdState st;
  const std::size_t c = config.mode == Mode::Experiment ? dataset.n_classes() : 1;
  st.params = ModelParams::zeros(dataset.n_features(), c, config.mode);
  st.rng.seed(config.seed);
  st.radius = radius;
  if (config.gaussian_init) {
    std::mt19937_64 init_rng(mix_seed(config.seed, 7));
    for (double& w : st.params.weights) w = config.init_stddev * gaussian(init_rng);
    project_ball_inplace(st.params.weights, radius);
  }
  return st;
}

void sgd_step_at(SgdState& state, const Dataset& dataset, const DenseMatrix& z,
                 const TrainConfig& config, std::size_t node) {
  const std::size_t d = state.params.dim;
  const double* zrow = z.row(node);
  std::vector<double>& w = state.params.weights;

  if (config.mode == Mode::Theory) {
    const double t = kernels::dot(zrow, w.data(), d);
    const double g = loss_deriv(config.loss, theory_label(dataset.labels[node]),
                                activate(config.activation, t)) *
                     activate_deriv(config.activation, t);
    kernels::axpy(-config.eta * g, zrow, w.data(), d);
  } else {
    const std::size_t c = state.params.outputs;
    std::vector<double> t(c), s(c);
    for (std::size_t k = 0; k < c; ++k) {
      t[k] = kernels::dot(zrow, state.params.class_weights(k), d);
      s[k] = activate(config.activation, t[k]);
    }
    const double mx = *std::max_element(s.begin(), s.end());
    double se = 0.0;
    for (std::size_t k = 0; k < c; ++k) se += std::exp(s[k] - mx);
    const auto label = static_cast<std::size_t>(dataset.labels[node]);
    for (std::size_t k = 0; k < c; ++k) {
      const double prob = std::exp(s[k] - mx) / se;
      const double g = (prob - (label == k ? 1.0 : 0.0)) *
                       activate_deriv(config.activation, t[k]);
      kernels::axpy(-config.eta * g, zrow, state.params.class_weights(k), d);
    }
  }

  project_ball_inplace(w, state.radius);
  prox_lp_inplace(w, config.effective_lambda_t(), config.p, config.prox_tol);
  state.step++;
}

std::size_t sgd_step(SgdState& state, const Dataset& dataset, const DenseMatrix& z,
                     const TrainConfig& config) {
  const std::size_t node =
      dataset.train_mask[bounded_uint(state.rng, dataset.train_mask.size())];
  sgd_step_at(state, dataset, z, config, node);
  return node;
}

std::vector<std::size_t> sample_sequence(const Dataset& dataset, const TrainConfig& config) {
  const std::size_t m = dataset.train_mask.size();
  std::vector<std::size_t> seq;
  seq.reserve(config.epochs * m);
  std::mt19937_64 rng(config.seed);
  if (config.shuffle_epochs) {
    std::vector<std::size_t> perm(dataset.train_mask);
    for (std::size_t e = 0; e < config.epochs; ++e) {
      // Fisher-Yates with the portable bounded draw.
      for (std::size_t i = m; i > 1; --i) {
        std::swap(perm[i - 1], perm[bounded_uint(rng, i)]);
      }
      seq.insert(seq.end(), perm.begin(), perm.end());
    }
  } else {
    for (std::size_t k = 0; k < config.epochs * m; ++k) {
      seq.push_back(dataset.train_mask[bounded_uint(rng, m)]);
    }
  }
  return seq;
}

namespace {

double evaluate_node_loss(const ModelParams& params, const Dataset& dataset,
                          const DenseMatrix& z, const TrainConfig& config,
                          std::size_t node, bool& misclassified) {
  const double* zrow = z.row(node);
  if (config.mode == Mode::Theory) {
    const double t = kernels::dot(zrow, params.weights.data(), params.dim);
    const double y = theory_label(dataset.labels[node]);
    misclassified = (y > 0.0) != (t > 0.0);
    return loss_eval(config.loss, y, activate(config.activation, t));
  }
  std::vector<double> s(params.outputs);
  for (std::size_t k = 0; k < params.outputs; ++k) {
    s[k] = activate(config.activation,
                    kernels::dot(zrow, params.class_weights(k), params.dim));
  }
  const auto best = static_cast<std::size_t>(
      std::max_element(s.begin(), s.end()) - s.begin());
  misclassified = best != static_cast<std::size_t>(dataset.labels[node]);
  return loss_eval_multi(s, dataset.labels[node]);
}

void evaluate_mask(const ModelParams& params, const Dataset& dataset,
                   const DenseMatrix& z, const TrainConfig& config,
                   const std::vector<std::size_t>& mask, double& mean_loss,
                   double& misclass_rate) {
  double loss_sum = 0.0;
  std::size_t errors = 0;
  for (std::size_t node : mask) {
    bool mis = false;
    loss_sum += evaluate_node_loss(params, dataset, z, config, node, mis);
    errors += mis ? 1 : 0;
  }
  mean_loss = loss_sum / static_cast<double>(mask.size());
  misclass_rate = static_cast<double>(errors) / static_cast<double>(mask.size());
}

}  // namespace

EpochMetrics evaluate_epoch(const ModelParams& params, const Dataset& dataset,
                            const DenseMatrix& z, const TrainConfig& config,
                            std::size_t epoch) {
  EpochMetrics m;
  m.epoch = epoch;
  evaluate_mask(params, dataset, z, config, dataset.train_mask, m.train_loss,
                m.train_misclass);
  if (!dataset.test_mask.empty()) {
    evaluate_mask(params, dataset, z, config, dataset.test_mask, m.test_loss,
                  m.test_misclass);
  }
  if (config.mode == Mode::Theory) {
    m.train_error = m.train_loss;
    m.test_error = m.test_loss;
  } else {
    m.train_error = m.train_misclass;
    m.test_error = m.test_misclass;
  }
  m.gen_gap = std::abs(m.train_error - m.test_error);
  m.sparsity_pct = sparsity_ratio(params.weights, config.eps_sparsity);
  return m;
}

TrainResult train_with_sequence(const Dataset& dataset, const TrainConfig& config,
                                std::span<const std::size_t> sequence) {
  const SgdSetup setup = prepare_training(dataset, config);
  SgdState state = init_state(dataset, config, setup.radius);
  const std::size_t m = dataset.train_mask.size();
  if (sequence.size() != config.epochs * m) {
    throw InputError("train_with_sequence: sequence length must be epochs * m");
  }

  TrainResult result;
  result.trajectory.index_sequence.assign(sequence.begin(), sequence.end());

  if (config.epochs == 0) {
    result.trajectory.snapshots.emplace_back(0, state.params.weights);
    result.params = std::move(state.params);
    return result;
  }

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t k = 0; k < m; ++k) {
      sgd_step_at(state, dataset, setup.z, config, sequence[(epoch - 1) * m + k]);
    }
    if (epoch % config.record_every == 0 || epoch == config.epochs) {
      result.trajectory.snapshots.emplace_back(state.step, state.params.weights);
      result.metrics.rows.push_back(
          evaluate_epoch(state.params, dataset, setup.z, config, epoch));
    }
  }
  result.params = std::move(state.params);
  return result;
}

TrainResult train(const Dataset& dataset, const TrainConfig& config) {
  config.validate();
  dataset.validate();
  return train_with_sequence(dataset, config, sample_sequence(dataset, config));
}

}  // namespace lpgcn
