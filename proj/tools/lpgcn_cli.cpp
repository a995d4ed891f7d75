// lpgcn command line: dataset generation, training, twin-stability runs,
// grid sweeps, bound calculators and plot-data extraction.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lpgcn/bounds.hpp"
#include "lpgcn/dataset_io.hpp"
#include "lpgcn/errors.hpp"
#include "lpgcn/rng.hpp"
#include "lpgcn/spectral.hpp"
#include "lpgcn/stability.hpp"

namespace fs = std::filesystem;
using namespace lpgcn;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool normalize_features = false;
  std::optional<double> eps_sparsity;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required = true) {
  auto* opt = cmd->add_option("--config", flags.config_path, "run configuration file");
  if (config_required) opt->required();
  cmd->add_option("--seed", flags.seed, "override the config seed");
  cmd->add_flag("--normalize-features", flags.normalize_features,
                "rescale feature rows to unit Euclidean norm");
  cmd->add_option("--eps-sparsity", flags.eps_sparsity,
                  "threshold below which a coordinate counts as zero");
  cmd->add_option("--threads", flags.threads, "sweep worker threads (0 = auto)");
}

ExperimentConfig resolve_config(const CommonFlags& flags) {
  ExperimentConfig cfg = load_config(flags.config_path);
  if (flags.seed) cfg.train.seed = *flags.seed;
  if (flags.normalize_features) cfg.normalize_features = true;
  if (flags.eps_sparsity) cfg.train.eps_sparsity = *flags.eps_sparsity;
  if (flags.threads) {
    cfg.threads = *flags.threads;
  } else if (const char* env = std::getenv("LPGCN_THREADS")) {
    cfg.threads = static_cast<std::size_t>(std::strtoull(env, nullptr, 10));
  }
  cfg.validate();
  return cfg;
}

TrainConfig single_cell_config(const ExperimentConfig& cfg, const char* what) {
  if (cfg.p_grid.size() != 1 || cfg.filter_grid.size() != 1) {
    throw InputError(std::string(what) + " expects single-value p and filter settings");
  }
  TrainConfig tc = cfg.train;
  tc.p = cfg.p_grid.front();
  tc.filter_kind = cfg.filter_grid.front();
  return tc;
}

int run_train(const CommonFlags& flags) {
  const ExperimentConfig cfg = resolve_config(flags);
  const TrainConfig tc = single_cell_config(cfg, "train");
  auto [dataset, manifest] = load_dataset(cfg.dataset_dir, cfg.normalize_features);

  const TrainResult result = train(dataset, tc);
  fs::create_directories(cfg.output_dir);

  std::vector<SweepRow> rows;
  for (const auto& row : result.metrics.rows) {
    SweepRow r;
    r.run_id = "train_r0";
    r.p = tc.p;
    r.filter = tc.filter_kind;
    r.epoch = row.epoch;
    r.train_error = row.train_error;
    r.test_error = row.test_error;
    r.gen_gap = row.gen_gap;
    r.param_distance = row.param_distance;
    r.sparsity_pct = row.sparsity_pct;
    r.seed = tc.seed;
    rows.push_back(std::move(r));
  }
  write_metrics_csv(rows, cfg.output_dir / "metrics.csv");

  const auto& last = result.metrics.rows.back();
  std::cout << "n=" << manifest.n << " d=" << manifest.d << " m=" << manifest.train_size
            << "\nfinal train_error=" << last.train_error
            << " test_error=" << last.test_error << " gen_gap=" << last.gen_gap
            << " sparsity_pct=" << last.sparsity_pct << "\nwrote "
            << (cfg.output_dir / "metrics.csv").string() << "\n";
  return 0;
}

int run_twin(const CommonFlags& flags, std::optional<std::size_t> perturb_index) {
  const ExperimentConfig cfg = resolve_config(flags);
  const TrainConfig tc = single_cell_config(cfg, "twin");
  auto [dataset, manifest] = load_dataset(cfg.dataset_dir, cfg.normalize_features);

  std::size_t index;
  if (perturb_index) {
    index = *perturb_index;
  } else {
    std::mt19937_64 pick(mix_seed(tc.seed, 23));
    index = dataset.train_mask[bounded_uint(pick, dataset.train_mask.size())];
  }

  const TwinRun twin = twin_train(dataset, tc, index);
  fs::create_directories(cfg.output_dir);

  std::vector<SweepRow> rows;
  for (const auto& row : twin.run_a.metrics.rows) {
    SweepRow r;
    r.run_id = "twin_r0";
    r.p = tc.p;
    r.filter = tc.filter_kind;
    r.epoch = row.epoch;
    r.train_error = row.train_error;
    r.test_error = row.test_error;
    r.gen_gap = row.gen_gap;
    r.param_distance = row.param_distance;
    r.sparsity_pct = row.sparsity_pct;
    r.seed = tc.seed;
    rows.push_back(std::move(r));
  }
  write_metrics_csv(rows, cfg.output_dir / "metrics.csv");

  const auto& last = twin.run_a.metrics.rows.back();
  std::cout << "perturbed node " << twin.perturbed_index << " (replacement from node "
            << twin.replacement.source_node << ")\nfinal param_distance="
            << last.param_distance << " gen_gap=" << last.gen_gap << "\nwrote "
            << (cfg.output_dir / "metrics.csv").string() << "\n";
  return 0;
}

int run_sweep(const CommonFlags& flags) {
  const ExperimentConfig cfg = resolve_config(flags);
  const SweepResult result = run_experiment(cfg);
  std::cout << "wrote " << (cfg.output_dir / "metrics.csv").string() << ", "
            << (cfg.output_dir / "bounds.csv").string() << ", "
            << (cfg.output_dir / "manifest.json").string() << " (" << result.rows.size()
            << " metric rows)\n";
  return 0;
}

int run_bounds(const CommonFlags& flags) {
  const ExperimentConfig cfg = resolve_config(flags);
  auto [dataset, manifest] = load_dataset(cfg.dataset_dir, cfg.normalize_features);

  std::cout << "p,filter,lambda_g_max,g_e,B,radius,c_p_lambda,beta_n,log_beta_n,gen_bound\n";
  for (FilterKind f : cfg.filter_grid) {
    const SpectralEstimate spectral =
        filter_spectral_radius(dataset.graph, f, {1e-10, 100000, cfg.train.seed});
    const double ge = compute_ge(build_filter(dataset.graph, f), dataset.features);
    for (double p : cfg.p_grid) {
      TrainConfig tc = cfg.train;
      tc.p = p;
      tc.filter_kind = f;
      const double B = loss_bound(tc.loss, tc.activation, dataset, tc.mode);
      const double radius = minimizer_radius(B, tc.lambda, p);
      const SmoothnessConstants sc =
          smoothness_constants(tc.loss, tc.activation, dataset, radius * ge, tc.mode);
      BoundInputs bi;
      bi.a_l = sc.a_l;
      bi.a_sigma = sc.a_sigma;
      bi.lambda_g_max = spectral.lambda_max_abs;
      bi.g_e = ge;
      bi.eta = tc.eta;
      bi.n = dataset.train_mask.size();
      bi.T = tc.epochs * dataset.train_mask.size();
      bi.p = p;
      bi.lambda = tc.lambda;
      bi.lambda_t = tc.effective_lambda_t();
      bi.B = B;
      bi.delta = cfg.delta;
      const BetaBound beta = stability_beta(bi);
      std::cout << p << "," << to_string(f) << "," << spectral.lambda_max_abs << "," << ge
                << "," << B << "," << radius << ","
                << c_p_lambda(p, tc.lambda, bi.lambda_t, B) << "," << beta.value << ","
                << beta.log_value << ","
                << generalization_bound(beta.value, B, bi.n, cfg.delta) << "\n";
    }
  }
  return 0;
}

int run_spectral(const CommonFlags& flags) {
  const ExperimentConfig cfg = resolve_config(flags);
  auto [dataset, manifest] = load_dataset(cfg.dataset_dir, cfg.normalize_features);
  std::cout << "filter,lambda_max_abs,iterations,residual,g_e\n";
  for (FilterKind f : cfg.filter_grid) {
    const SpectralEstimate est =
        filter_spectral_radius(dataset.graph, f, {1e-10, 100000, cfg.train.seed});
    const double ge = compute_ge(build_filter(dataset.graph, f), dataset.features);
    std::cout << to_string(f) << "," << est.lambda_max_abs << "," << est.iterations_used
              << "," << est.residual << "," << ge << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lp-regularized single-layer GCN trainer and stability lab"};
  app.require_subcommand(1);

  CommonFlags train_flags, twin_flags, sweep_flags, bounds_flags, spectral_flags;
  std::optional<std::size_t> perturb_index;

  auto* train_cmd = app.add_subcommand("train", "single training run");
  add_common(train_cmd, train_flags);

  auto* twin_cmd = app.add_subcommand("twin", "shared-sequence twin training on D and D^i");
  add_common(twin_cmd, twin_flags);
  twin_cmd->add_option("--perturb-index", perturb_index,
                       "train-mask node to replace (default: drawn from the seed)");

  auto* sweep_cmd = app.add_subcommand("sweep", "twin-training sweep over the p/filter grids");
  add_common(sweep_cmd, sweep_flags);

  auto* bounds_cmd = app.add_subcommand("bounds", "stability/generalization bound calculator");
  add_common(bounds_cmd, bounds_flags);

  auto* spectral_cmd = app.add_subcommand("spectral", "filter spectral radius and g_e");
  add_common(spectral_cmd, spectral_flags);

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic SBM dataset directory");
  std::string synth_out;
  std::size_t synth_n = 400, synth_d = 32, synth_classes = 2;
  double synth_edge_prob = 0.05, synth_homophily = 0.9, synth_train_frac = 0.3;
  double synth_noise = 0.6;
  std::uint64_t synth_seed = 0;
  synth_cmd->add_option("--out", synth_out, "output dataset directory")->required();
  synth_cmd->add_option("--n", synth_n, "node count");
  synth_cmd->add_option("--d", synth_d, "feature dimension");
  synth_cmd->add_option("--classes", synth_classes, "class count");
  synth_cmd->add_option("--edge-prob", synth_edge_prob, "intra-class edge probability");
  synth_cmd->add_option("--homophily", synth_homophily,
                        "1 - ratio of inter- to intra-class edge probability");
  synth_cmd->add_option("--train-frac", synth_train_frac, "train mask fraction");
  synth_cmd->add_option("--feature-noise", synth_noise, "feature noise level");
  synth_cmd->add_option("--seed", synth_seed, "generator seed");

  auto* plot_cmd = app.add_subcommand("plotdata", "plot-ready CSV from a metrics file");
  std::string plot_metrics, plot_kind_name = "gap", plot_out;
  plot_cmd->add_option("--metrics", plot_metrics, "metrics.csv path")->required();
  plot_cmd->add_option("--kind", plot_kind_name, "gap | distance | sparsity");
  plot_cmd->add_option("--out", plot_out, "output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return run_train(train_flags);
    if (twin_cmd->parsed()) return run_twin(twin_flags, perturb_index);
    if (sweep_cmd->parsed()) return run_sweep(sweep_flags);
    if (bounds_cmd->parsed()) return run_bounds(bounds_flags);
    if (spectral_cmd->parsed()) return run_spectral(spectral_flags);
    if (synth_cmd->parsed()) {
      const Dataset ds = make_synthetic(synth_n, synth_d, synth_classes, synth_edge_prob,
                                        synth_homophily, synth_seed, synth_train_frac,
                                        synth_noise);
      save_dataset(ds, synth_out);
      const DatasetManifest m = manifest_of(ds);
      std::cout << "wrote " << synth_out << " (n=" << m.n << " d=" << m.d
                << " classes=" << m.classes << " edges=" << m.edges
                << " train=" << m.train_size << " test=" << m.test_size << ")\n";
      return 0;
    }
    if (plot_cmd->parsed()) {
      PlotKind kind;
      if (plot_kind_name == "gap") {
        kind = PlotKind::GapCurves;
      } else if (plot_kind_name == "distance") {
        kind = PlotKind::DistanceCurves;
      } else if (plot_kind_name == "sparsity") {
        kind = PlotKind::SparsityTable;
      } else {
        throw InputError("plotdata kind must be gap, distance or sparsity");
      }
      const fs::path out = emit_plotdata(plot_metrics, kind, plot_out);
      std::cout << "wrote " << out.string() << "\n";
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
