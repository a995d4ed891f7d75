#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lpgcn/sgd.hpp"

namespace lpgcn {

// The feature row and label that replaced node i when building the
// perturbed dataset.
struct Replacement {
  std::size_t source_node = 0;
  std::vector<double> features;
  int label = 0;
};

// Copy of the dataset with node i's feature row and label replaced by those
// of another uniformly chosen training node (never i itself). The graph is
// left untouched: the perturbation swaps a sample z_i = (x_i, y_i), not the
// structure shared by both runs.
std::pair<Dataset, Replacement> perturb_dataset(const Dataset& dataset, std::size_t i,
                                                std::uint64_t seed);

// sqrt(||w - w2||^2 / (||w||^2 + ||w2||^2)); 0 when both vectors are zero.
// Always in [0, sqrt(2)].
double param_distance(std::span<const double> w, std::span<const double> w2);

// Percentage of coordinates with |w_j| <= eps.
double sparsity_ratio(std::span<const double> w, double eps);

// |mean error over the train mask - mean error over the test mask|; error
// is mean loss in theory mode and misclassification rate in experiment
// mode.
double generalization_gap(const ModelParams& params, const Dataset& dataset,
                          const DenseMatrix& z, LossKind loss, ActivationKind act,
                          Mode mode);

// A pair of trainings on D and D^i driven by the identical index sequence
// from identical initialization; run_a metrics carry the per-epoch
// parameter distance to run_b.
struct TwinRun {
  TrainResult run_a;
  TrainResult run_b;
  std::size_t perturbed_index = 0;
  Replacement replacement;
};

TwinRun twin_train(const Dataset& dataset, const TrainConfig& config, std::size_t i);

// Shared-sequence twin on an explicit dataset pair (the datasets must agree
// on node count, masks and graph).
TwinRun twin_train_on(const Dataset& dataset_a, const Dataset& dataset_b,
                      const TrainConfig& config, std::size_t perturbed_index);

// One metrics.csv row.
struct SweepRow {
  std::string run_id;
  double p = 0.0;
  FilterKind filter = FilterKind::Unnormalized;
  std::size_t epoch = 0;
  double train_error = 0.0;
  double test_error = 0.0;
  double gen_gap = 0.0;
  double param_distance = 0.0;
  double sparsity_pct = 0.0;
  std::uint64_t seed = 0;
};

// Mean and standard deviation per epoch across the repeats of one
// (p, filter) cell.
struct SweepCellSummary {
  double p = 0.0;
  FilterKind filter = FilterKind::Unnormalized;
  std::size_t repeats = 0;
  std::vector<std::size_t> epochs;
  std::vector<double> gap_mean, gap_std;
  std::vector<double> dist_mean, dist_std;
  std::vector<double> sparsity_mean, sparsity_std;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepCellSummary> cells;
};

// One twin run per (p, filter, repeat); repeat r uses seed base.seed + r,
// and the perturbed index is drawn from the repeat's seed. Cells execute in
// parallel on up to `threads` workers (0 = hardware concurrency); the
// result is assembled in grid order regardless of scheduling.
SweepResult sweep(const Dataset& dataset, const TrainConfig& base,
                  std::span<const double> p_grid, std::span<const FilterKind> filter_grid,
                  std::size_t repeats, std::size_t threads = 0);

}  // namespace lpgcn
