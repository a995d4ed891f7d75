#include "lpgcn/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lpgcn/errors.hpp"
#include "lpgcn/kernels.hpp"

namespace lpgcn {

const char* to_string(Mode mode) {
  return mode == Mode::Theory ? "theory" : "experiment";
}

const char* to_string(ActivationKind act) {
  switch (act) {
    case ActivationKind::Sigmoid: return "sigmoid";
    case ActivationKind::Tanh: return "tanh";
    case ActivationKind::Identity: return "identity";
  }
  return "?";
}

const char* to_string(LossKind loss) {
  switch (loss) {
    case LossKind::Square: return "square";
    case LossKind::Logistic: return "logistic";
    case LossKind::SoftmaxCrossEntropy: return "softmax";
  }
  return "?";
}

Mode mode_from_string(const std::string& name) {
  if (name == "theory") return Mode::Theory;
  if (name == "experiment") return Mode::Experiment;
  throw InputError("unknown mode: " + name);
}

ActivationKind activation_from_string(const std::string& name) {
  if (name == "sigmoid") return ActivationKind::Sigmoid;
  if (name == "tanh") return ActivationKind::Tanh;
  if (name == "identity") return ActivationKind::Identity;
  throw InputError("unknown activation: " + name);
}

LossKind loss_from_string(const std::string& name) {
  if (name == "square") return LossKind::Square;
  if (name == "logistic") return LossKind::Logistic;
  if (name == "softmax") return LossKind::SoftmaxCrossEntropy;
  throw InputError("unknown loss: " + name);
}

ModelParams ModelParams::zeros(std::size_t dim, std::size_t outputs, Mode mode) {
  ModelParams p;
  p.dim = dim;
  p.outputs = mode == Mode::Theory ? 1 : outputs;
  p.mode = mode;
  p.weights.assign(p.dim * p.outputs, 0.0);
  return p;
}

std::size_t Dataset::n_classes() const {
  int max_label = 0;
  for (int y : labels) max_label = std::max(max_label, y);
  return static_cast<std::size_t>(max_label) + 1;
}

void Dataset::validate() const {
  const std::size_t n = n_nodes();
  if (labels.size() != n) throw InputError("dataset: labels/features size mismatch");
  if (graph.n_rows != n || graph.n_cols != n) {
    throw InputError("dataset: graph/features size mismatch");
  }
  if (train_mask.empty()) throw InputError("dataset: train mask must be non-empty");
  std::set<std::size_t> seen;
  for (std::size_t i : train_mask) {
    if (i >= n) throw InputError("dataset: train mask index out of range");
    seen.insert(i);
  }
  for (std::size_t i : test_mask) {
    if (i >= n) throw InputError("dataset: test mask index out of range");
    if (seen.count(i)) throw InputError("dataset: train and test masks overlap");
  }
}

double activate(ActivationKind act, double x) {
  switch (act) {
    case ActivationKind::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case ActivationKind::Tanh: return std::tanh(x);
    case ActivationKind::Identity: return x;
  }
  return x;
}

double activate_deriv(ActivationKind act, double x) {
  switch (act) {
    case ActivationKind::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
    case ActivationKind::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case ActivationKind::Identity: return 1.0;
  }
  return 1.0;
}

double activation_lipschitz(ActivationKind act) {
  switch (act) {
    case ActivationKind::Sigmoid: return 0.25;
    case ActivationKind::Tanh: return 1.0;
    case ActivationKind::Identity: return 1.0;
  }
  return 1.0;
}

double activation_smoothness(ActivationKind act) {
  switch (act) {
    // sup |sigma''| = 1/(6*sqrt(3)) for the sigmoid, 4/(3*sqrt(3)) for tanh.
    case ActivationKind::Sigmoid: return 1.0 / (6.0 * std::sqrt(3.0));
    case ActivationKind::Tanh: return 4.0 / (3.0 * std::sqrt(3.0));
    case ActivationKind::Identity: return 0.0;
  }
  return 0.0;
}

DenseMatrix propagate(const SparseMatrix& filter, const DenseMatrix& features) {
  if (filter.n_cols != features.rows) {
    throw InputError("propagate: filter/feature dimension mismatch");
  }
  DenseMatrix z(filter.n_rows, features.cols);
  for (std::size_t i = 0; i < filter.n_rows; ++i) {
    double* zi = z.row(i);
    for (std::size_t k = filter.row_offsets[i]; k < filter.row_offsets[i + 1]; ++k) {
      kernels::axpy(filter.values[k], features.row(filter.col_indices[k]), zi,
                    features.cols);
    }
  }
  return z;
}

double predict(std::span<const double> z, const ModelParams& params, ActivationKind act) {
  if (z.size() != params.dim || params.outputs != 1) {
    throw InputError("predict: dimension mismatch");
  }
  return activate(act, kernels::dot(z.data(), params.weights.data(), z.size()));
}

std::vector<double> predict_multi(std::span<const double> z, const ModelParams& params,
                                  ActivationKind act) {
  if (z.size() != params.dim) throw InputError("predict_multi: dimension mismatch");
  std::vector<double> out(params.outputs);
  for (std::size_t k = 0; k < params.outputs; ++k) {
    out[k] = activate(act, kernels::dot(z.data(), params.class_weights(k), params.dim));
  }
  return out;
}

double loss_eval(LossKind loss, double y, double f) {
  switch (loss) {
    case LossKind::Square: {
      const double d = y - f;
      return d * d;
    }
    case LossKind::Logistic: {
      const double m = -y * f;  // log(1 + exp(m)), stable for large |m|
      return m > 30.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
    }
    case LossKind::SoftmaxCrossEntropy:
      throw InputError("loss_eval: softmax cross-entropy needs a score vector");
  }
  return 0.0;
}

double loss_deriv(LossKind loss, double y, double f) {
  switch (loss) {
    case LossKind::Square: return 2.0 * (f - y);
    case LossKind::Logistic: return -y / (1.0 + std::exp(y * f));
    case LossKind::SoftmaxCrossEntropy:
      throw InputError("loss_deriv: softmax cross-entropy needs a score vector");
  }
  return 0.0;
}

double loss_eval_multi(std::span<const double> scores, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= scores.size()) {
    throw InputError("loss_eval_multi: label out of range");
  }
  const double mx = *std::max_element(scores.begin(), scores.end());
  double se = 0.0;
  for (double s : scores) se += std::exp(s - mx);
  return std::log(se) + mx - scores[label];
}

void grad_sample(std::span<const double> z, const ModelParams& params, double y,
                 LossKind loss, ActivationKind act, std::span<double> out) {
  if (z.size() != params.dim || out.size() != params.dim || params.outputs != 1) {
    throw InputError("grad_sample: dimension mismatch");
  }
  const double t = kernels::dot(z.data(), params.weights.data(), z.size());
  const double g = loss_deriv(loss, y, activate(act, t)) * activate_deriv(act, t);
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = g * z[i];
}

void grad_sample_multi(std::span<const double> z, const ModelParams& params, int label,
                       ActivationKind act, std::span<double> out) {
  if (z.size() != params.dim || out.size() != params.weights.size()) {
    throw InputError("grad_sample_multi: dimension mismatch");
  }
  const std::size_t c = params.outputs;
  std::vector<double> t(c), s(c);
  for (std::size_t k = 0; k < c; ++k) {
    t[k] = kernels::dot(z.data(), params.class_weights(k), params.dim);
    s[k] = activate(act, t[k]);
  }
  const double mx = *std::max_element(s.begin(), s.end());
  double se = 0.0;
  for (std::size_t k = 0; k < c; ++k) se += std::exp(s[k] - mx);
  for (std::size_t k = 0; k < c; ++k) {
    const double p = std::exp(s[k] - mx) / se;
    const double g = (p - (static_cast<std::size_t>(label) == k ? 1.0 : 0.0)) *
                     activate_deriv(act, t[k]);
    double* ok = out.data() + k * params.dim;
    for (std::size_t i = 0; i < params.dim; ++i) ok[i] = g * z[i];
  }
}

double loss_bound(LossKind loss, ActivationKind act, const Dataset& dataset, Mode mode) {
  if (mode == Mode::Experiment || loss == LossKind::SoftmaxCrossEntropy) {
    // Zero weights give equal scores, so the softmax is uniform.
    return std::log(static_cast<double>(dataset.n_classes()));
  }
  const double f0 = activate(act, 0.0);
  double b = 0.0;
  for (std::size_t i : dataset.train_mask) {
    b = std::max(b, loss_eval(loss, theory_label(dataset.labels[i]), f0));
  }
  return b;
}

SmoothnessConstants smoothness_constants(LossKind loss, ActivationKind act,
                                         const Dataset& dataset, double radius,
                                         Mode mode) {
  if (!(radius > 0.0)) throw InputError("smoothness_constants: radius must be positive");

  SmoothnessConstants c;
  c.a_sigma = activation_lipschitz(act);
  c.b_sigma = activation_smoothness(act);
  c.B = loss_bound(loss, act, dataset, mode);

  // Prediction interval induced by pre-activations in [-radius, radius].
  double lo = 0.0, hi = 0.0;
  switch (act) {
    case ActivationKind::Sigmoid:
      lo = activate(act, -radius);
      hi = activate(act, radius);
      break;
    case ActivationKind::Tanh:
      hi = std::tanh(radius);
      lo = -hi;
      break;
    case ActivationKind::Identity:
      hi = radius;
      lo = -radius;
      break;
  }

  switch (loss) {
    case LossKind::Square: {
      double worst = 0.0;
      for (std::size_t i : dataset.train_mask) {
        const double y = mode == Mode::Theory ? theory_label(dataset.labels[i])
                                              : static_cast<double>(dataset.labels[i]);
        worst = std::max({worst, std::abs(lo - y), std::abs(hi - y)});
      }
      c.a_l = 2.0 * worst;
      c.b_l = 2.0;
      break;
    }
    case LossKind::Logistic:
      // sup |l'| over the interval: sigma(-lo) for y=+1, sigma(hi) for y=-1.
      c.a_l = std::max(1.0 / (1.0 + std::exp(lo)), 1.0 / (1.0 + std::exp(-hi)));
      c.b_l = 0.25;
      break;
    case LossKind::SoftmaxCrossEntropy:
      // Gradient norm of cross-entropy w.r.t. scores is at most sqrt(2);
      // the log-sum-exp Hessian has spectral norm at most 1.
      c.a_l = std::sqrt(2.0);
      c.b_l = 1.0;
      break;
  }
  return c;
}

}  // namespace lpgcn
