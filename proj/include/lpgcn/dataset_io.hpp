#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lpgcn/model.hpp"
#include "lpgcn/stability.hpp"

namespace lpgcn {

struct DatasetManifest {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t classes = 0;
  std::size_t edges = 0;  // undirected edge count
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

DatasetManifest manifest_of(const Dataset& dataset);

// Reads edges.txt, features.csv, labels.txt, train_mask.txt, test_mask.txt
// from the directory. Errors name the offending file and line. With
// normalize_features, feature rows are rescaled to unit Euclidean norm
// (zero rows stay zero).
std::pair<Dataset, DatasetManifest> load_dataset(const std::filesystem::path& dir,
                                                 bool normalize_features = false);

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

// Stochastic-block-model dataset: contiguous class blocks, intra-class edge
// probability edge_prob, inter-class probability edge_prob * (1 -
// homophily), Gaussian features around per-class means. Deterministic given
// the seed.
Dataset make_synthetic(std::size_t n, std::size_t d, std::size_t classes,
                       double edge_prob, double homophily, std::uint64_t seed,
                       double train_fraction = 0.3, double feature_noise = 0.6);

// Flat key=value run configuration; unknown keys are rejected.
struct ExperimentConfig {
  std::filesystem::path dataset_dir;
  std::filesystem::path output_dir = ".";
  TrainConfig train;  // p and filter_kind are taken from the grids
  std::vector<double> p_grid{2.0};
  std::vector<FilterKind> filter_grid{FilterKind::AugmentedNormalized};
  std::size_t repeats = 1;
  bool normalize_features = false;
  double delta = 0.05;  // confidence for bounds.csv
  std::size_t threads = 0;

  void validate() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);

// Runs the sweep over the config grids and writes metrics.csv, bounds.csv
// and manifest.json into output_dir. Returns the sweep result.
SweepResult run_experiment(const ExperimentConfig& config);

void write_metrics_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);
std::vector<SweepRow> read_metrics_csv(const std::filesystem::path& path);

enum class PlotKind { GapCurves, DistanceCurves, SparsityTable };

// Long-format plot CSV derived from a metrics file; returns the output
// path. GapCurves/DistanceCurves aggregate per (p, filter, epoch) across
// repeats into (epoch, series, mean, stddev) rows; SparsityTable pivots
// final-epoch sparsity with one row per filter and one column per p.
std::filesystem::path emit_plotdata(const std::filesystem::path& metrics_csv,
                                    PlotKind kind, const std::filesystem::path& out_path);

}  // namespace lpgcn
