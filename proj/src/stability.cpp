#include "lpgcn/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "lpgcn/errors.hpp"
#include "lpgcn/kernels.hpp"
#include "lpgcn/rng.hpp"

namespace lpgcn {

std::pair<Dataset, Replacement> perturb_dataset(const Dataset& dataset, std::size_t i,
                                                std::uint64_t seed) {
  const auto& mask = dataset.train_mask;
  if (std::find(mask.begin(), mask.end(), i) == mask.end()) {
    throw InputError("perturb_dataset: node is not in the train mask");
  }
  if (mask.size() < 2) {
    throw InputError("perturb_dataset: train mask too small for a distinct replacement");
  }

  std::mt19937_64 rng(seed);
  std::size_t source = i;
  while (source == i) source = mask[bounded_uint(rng, mask.size())];

  Dataset copy = dataset;
  const std::size_t d = dataset.n_features();
  Replacement rep;
  rep.source_node = source;
  rep.features.assign(dataset.features.row(source), dataset.features.row(source) + d);
  rep.label = dataset.labels[source];

  std::copy(rep.features.begin(), rep.features.end(), copy.features.row(i));
  copy.labels[i] = rep.label;
  return {std::move(copy), std::move(rep)};
}

double param_distance(std::span<const double> w, std::span<const double> w2) {
  if (w.size() != w2.size()) throw InputError("param_distance: length mismatch");
  double diff2 = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double d = w[j] - w2[j];
    diff2 += d * d;
  }
  const double denom = kernels::sum_sq(w.data(), w.size()) +
                       kernels::sum_sq(w2.data(), w2.size());
  if (denom == 0.0) return 0.0;  // both zero: identical models
  return std::sqrt(diff2 / denom);
}

double sparsity_ratio(std::span<const double> w, double eps) {
  if (!(eps > 0.0)) throw InputError("sparsity_ratio: eps must be positive");
  if (w.empty()) return 100.0;
  std::size_t near_zero = 0;
  for (double x : w) {
    if (std::abs(x) <= eps) ++near_zero;
  }
  return 100.0 * static_cast<double>(near_zero) / static_cast<double>(w.size());
}

double generalization_gap(const ModelParams& params, const Dataset& dataset,
                          const DenseMatrix& z, LossKind loss, ActivationKind act,
                          Mode mode) {
  if (dataset.train_mask.empty() || dataset.test_mask.empty()) {
    throw InputError("generalization_gap: masks must be non-empty");
  }
  TrainConfig cfg;
  cfg.loss = loss;
  cfg.activation = act;
  cfg.mode = mode;
  const EpochMetrics m = evaluate_epoch(params, dataset, z, cfg, 0);
  return m.gen_gap;
}

TwinRun twin_train_on(const Dataset& dataset_a, const Dataset& dataset_b,
                      const TrainConfig& config, std::size_t perturbed_index) {
  const auto sequence = sample_sequence(dataset_a, config);
  TwinRun twin;
  twin.perturbed_index = perturbed_index;
  twin.run_a = train_with_sequence(dataset_a, config, sequence);
  twin.run_b = train_with_sequence(dataset_b, config, sequence);

  const auto& snaps_a = twin.run_a.trajectory.snapshots;
  const auto& snaps_b = twin.run_b.trajectory.snapshots;
  const std::size_t n_rows =
      std::min(twin.run_a.metrics.rows.size(), twin.run_b.metrics.rows.size());
  for (std::size_t k = 0; k < n_rows; ++k) {
    // Snapshots and metric rows are recorded at the same epochs.
    const std::size_t snap = k + (snaps_a.size() - n_rows);
    const double dist = param_distance(snaps_a[snap].second, snaps_b[snap].second);
    twin.run_a.metrics.rows[k].param_distance = dist;
    twin.run_b.metrics.rows[k].param_distance = dist;
  }
  return twin;
}

TwinRun twin_train(const Dataset& dataset, const TrainConfig& config, std::size_t i) {
  auto [perturbed, rep] = perturb_dataset(dataset, i, mix_seed(config.seed, 11));
  TwinRun twin = twin_train_on(dataset, perturbed, config, i);
  twin.replacement = std::move(rep);
  return twin;
}

namespace {

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace

SweepResult sweep(const Dataset& dataset, const TrainConfig& base,
                  std::span<const double> p_grid, std::span<const FilterKind> filter_grid,
                  std::size_t repeats, std::size_t threads) {
  if (p_grid.empty() || filter_grid.empty() || repeats == 0) {
    throw InputError("sweep: grids and repeats must be non-empty");
  }

  struct Cell {
    double p;
    FilterKind filter;
    std::vector<TwinRun> runs;  // one per repeat
  };
  std::vector<Cell> cells;
  for (FilterKind f : filter_grid) {
    for (double p : p_grid) {
      cells.push_back({p, f, {}});
    }
  }

  auto run_cell = [&](Cell& cell) {
    cell.runs.reserve(repeats);
    for (std::size_t r = 0; r < repeats; ++r) {
      TrainConfig cfg = base;
      cfg.p = cell.p;
      cfg.filter_kind = cell.filter;
      cfg.seed = base.seed + r;
      std::mt19937_64 pick(mix_seed(cfg.seed, 23));
      const std::size_t i =
          dataset.train_mask[bounded_uint(pick, dataset.train_mask.size())];
      cell.runs.push_back(twin_train(dataset, cfg, i));
    }
  };

  std::size_t workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
  workers = std::max<std::size_t>(1, std::min(workers, cells.size()));
  if (workers == 1) {
    for (auto& cell : cells) run_cell(cell);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next.fetch_add(1); k < cells.size(); k = next.fetch_add(1)) {
          run_cell(cells[k]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  SweepResult result;
  for (const auto& cell : cells) {
    SweepCellSummary summary;
    summary.p = cell.p;
    summary.filter = cell.filter;
    summary.repeats = repeats;

    const std::size_t n_epochs = cell.runs.front().run_a.metrics.rows.size();
    for (std::size_t e = 0; e < n_epochs; ++e) {
      std::vector<double> gaps, dists, sparsities;
      for (const auto& run : cell.runs) {
        const auto& row = run.run_a.metrics.rows[e];
        gaps.push_back(row.gen_gap);
        dists.push_back(row.param_distance);
        sparsities.push_back(row.sparsity_pct);
      }
      summary.epochs.push_back(cell.runs.front().run_a.metrics.rows[e].epoch);
      const double gm = mean_of(gaps), dm = mean_of(dists), sm = mean_of(sparsities);
      summary.gap_mean.push_back(gm);
      summary.gap_std.push_back(stddev_of(gaps, gm));
      summary.dist_mean.push_back(dm);
      summary.dist_std.push_back(stddev_of(dists, dm));
      summary.sparsity_mean.push_back(sm);
      summary.sparsity_std.push_back(stddev_of(sparsities, sm));
    }
    result.cells.push_back(std::move(summary));

    char p_label[32];
    std::snprintf(p_label, sizeof(p_label), "%g", cell.p);
    for (std::size_t r = 0; r < repeats; ++r) {
      const auto& run = cell.runs[r];
      for (const auto& row : run.run_a.metrics.rows) {
        SweepRow out;
        out.run_id = "p" + std::string(p_label) + "_" + to_string(cell.filter) +
                     "_r" + std::to_string(r);
        out.p = cell.p;
        out.filter = cell.filter;
        out.epoch = row.epoch;
        out.train_error = row.train_error;
        out.test_error = row.test_error;
        out.gen_gap = row.gen_gap;
        out.param_distance = row.param_distance;
        out.sparsity_pct = row.sparsity_pct;
        out.seed = base.seed + r;
        result.rows.push_back(std::move(out));
      }
    }
  }
  return result;
}

}  // namespace lpgcn
