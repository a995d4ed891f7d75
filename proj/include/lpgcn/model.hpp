#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lpgcn/dense.hpp"
#include "lpgcn/graph.hpp"

namespace lpgcn {

// Theory mode is the scalar-output predictor with +/-1 coded binary labels;
// experiment mode extends to one weight vector per class with softmax
// cross-entropy, with the regularizer and prox applied entrywise.
enum class Mode { Theory, Experiment };

enum class ActivationKind { Sigmoid, Tanh, Identity };
enum class LossKind { Square, Logistic, SoftmaxCrossEntropy };

const char* to_string(Mode mode);
const char* to_string(ActivationKind act);
const char* to_string(LossKind loss);
Mode mode_from_string(const std::string& name);
ActivationKind activation_from_string(const std::string& name);
LossKind loss_from_string(const std::string& name);

// Weights of the single-layer model. Theory mode: one vector of length dim.
// Experiment mode: `outputs` class blocks of length dim each, stored
// contiguously (weights for class k occupy [k*dim, (k+1)*dim)).
struct ModelParams {
  std::vector<double> weights;
  std::size_t dim = 0;
  std::size_t outputs = 1;
  Mode mode = Mode::Theory;

  static ModelParams zeros(std::size_t dim, std::size_t outputs = 1,
                           Mode mode = Mode::Theory);
  const double* class_weights(std::size_t k) const { return weights.data() + k * dim; }
  double* class_weights(std::size_t k) { return weights.data() + k * dim; }
};

// One semi-supervised learning instance: features, integer labels (class
// index, or 0/1 resp. -1/+1 in theory mode), disjoint train/test masks and
// the graph adjacency.
struct Dataset {
  DenseMatrix features;
  std::vector<int> labels;
  std::vector<std::size_t> train_mask;
  std::vector<std::size_t> test_mask;
  SparseMatrix graph;

  std::size_t n_nodes() const { return features.rows; }
  std::size_t n_features() const { return features.cols; }
  std::size_t n_classes() const;
  void validate() const;
};

// +/-1 coding for theory mode; accepts labels already coded as -1/+1 and
// 0/1 alike (non-positive -> -1).
inline double theory_label(int label) { return label > 0 ? 1.0 : -1.0; }

struct SmoothnessConstants {
  double a_l = 0.0;      // Lipschitz constant of the loss in its prediction slot
  double b_l = 0.0;      // Lipschitz constant of the loss derivative
  double a_sigma = 0.0;  // Lipschitz constant of the activation
  double b_sigma = 0.0;  // Lipschitz constant of the activation derivative
  double B = 0.0;        // bound on the loss at the zero-weight predictor
};

double activate(ActivationKind act, double x);
double activate_deriv(ActivationKind act, double x);
double activation_lipschitz(ActivationKind act);   // a_sigma
double activation_smoothness(ActivationKind act);  // b_sigma = sup |sigma''|

// Z = filter * X, the aggregation computed once per filter/dataset pair.
DenseMatrix propagate(const SparseMatrix& filter, const DenseMatrix& features);

// sigma(z.w) for theory mode.
double predict(std::span<const double> z, const ModelParams& params, ActivationKind act);
// sigma applied componentwise to the per-class scores, experiment mode.
std::vector<double> predict_multi(std::span<const double> z, const ModelParams& params,
                                  ActivationKind act);

double loss_eval(LossKind loss, double y, double f);
// d/df of the loss at prediction f.
double loss_deriv(LossKind loss, double y, double f);
// Softmax cross-entropy over a score vector.
double loss_eval_multi(std::span<const double> scores, int label);

// Per-sample gradient l'(y, sigma(z.w)) * sigma'(z.w) * z.
void grad_sample(std::span<const double> z, const ModelParams& params, double y,
                 LossKind loss, ActivationKind act, std::span<double> out);
// Experiment-mode gradient of softmax cross-entropy through the activation;
// out has params.weights.size() entries in the same class-block layout.
void grad_sample_multi(std::span<const double> z, const ModelParams& params, int label,
                       ActivationKind act, std::span<double> out);

// B = max over training labels of l(y, sigma(0)); independent of any domain
// bound, which is what breaks the circularity between B and the projection
// radius.
double loss_bound(LossKind loss, ActivationKind act, const Dataset& dataset, Mode mode);

// Constants valid on pre-activations within [-radius, radius], where
// radius is the product of the projection radius and g_e.
SmoothnessConstants smoothness_constants(LossKind loss, ActivationKind act,
                                         const Dataset& dataset, double radius,
                                         Mode mode = Mode::Theory);

}  // namespace lpgcn
