#include "lpgcn/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lpgcn/bounds.hpp"
#include "lpgcn/errors.hpp"
#include "lpgcn/kernels.hpp"
#include "lpgcn/rng.hpp"
#include "lpgcn/spectral.hpp"

namespace lpgcn {

namespace fs = std::filesystem;

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Grid labels (p values) are user inputs like 1.149; the short form
// round-trips them and keeps headers readable.
std::string fmt_p(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

[[noreturn]] void file_error(const fs::path& file, std::size_t line, const std::string& what) {
  throw InputError(file.filename().string() + " line " + std::to_string(line) + ": " + what);
}

std::ifstream open_or_throw(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("missing or unreadable file: " + path.string());
  return in;
}

bool data_line(const std::string& line) {
  for (char c : line) {
    if (c == '#') return false;
    if (!std::isspace(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

std::vector<std::pair<std::size_t, std::size_t>> read_edge_list(const fs::path& path) {
  auto in = open_or_throw(path);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!data_line(line)) continue;
    std::istringstream ss(line);
    long long a = -1, b = -1;
    if (!(ss >> a >> b) || a < 0 || b < 0) {
      file_error(path, lineno, "expected two non-negative node ids");
    }
    std::string rest;
    if (ss >> rest) file_error(path, lineno, "trailing tokens after the two node ids");
    edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  }
  return edges;
}

DenseMatrix read_features_csv(const fs::path& path) {
  auto in = open_or_throw(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(cell, &pos));
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        file_error(path, lineno, "not a number: '" + cell + "'");
      }
    }
    if (row.empty()) file_error(path, lineno, "empty row");
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      file_error(path, lineno, "expected " + std::to_string(width) + " columns, found " +
                                   std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(path.filename().string() + ": no feature rows");
  DenseMatrix m(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), m.row(i));
  }
  return m;
}

std::vector<long long> read_int_lines(const fs::path& path) {
  auto in = open_or_throw(path);
  std::vector<long long> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!data_line(line)) continue;
    std::istringstream ss(line);
    long long v;
    if (!(ss >> v)) file_error(path, lineno, "expected an integer");
    std::string rest;
    if (ss >> rest) file_error(path, lineno, "trailing tokens");
    values.push_back(v);
  }
  return values;
}

std::vector<std::size_t> read_mask(const fs::path& path, std::size_t n) {
  const auto raw = read_int_lines(path);
  std::vector<std::size_t> mask;
  mask.reserve(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    if (raw[k] < 0 || static_cast<std::size_t>(raw[k]) >= n) {
      throw InputError(path.filename().string() + ": node index " +
                       std::to_string(raw[k]) + " out of range [0," + std::to_string(n) + ")");
    }
    mask.push_back(static_cast<std::size_t>(raw[k]));
  }
  std::sort(mask.begin(), mask.end());
  mask.erase(std::unique(mask.begin(), mask.end()), mask.end());
  return mask;
}

}  // namespace

DatasetManifest manifest_of(const Dataset& dataset) {
  DatasetManifest m;
  m.n = dataset.n_nodes();
  m.d = dataset.n_features();
  m.classes = dataset.n_classes();
  m.edges = dataset.graph.nnz() / 2;
  m.train_size = dataset.train_mask.size();
  m.test_size = dataset.test_mask.size();
  return m;
}

std::pair<Dataset, DatasetManifest> load_dataset(const fs::path& dir, bool normalize_features) {
  Dataset d;
  d.features = read_features_csv(dir / "features.csv");
  const std::size_t n = d.features.rows;

  const auto labels = read_int_lines(dir / "labels.txt");
  if (labels.size() != n) {
    throw InputError("labels.txt: expected " + std::to_string(n) + " labels, found " +
                     std::to_string(labels.size()));
  }
  d.labels.assign(labels.begin(), labels.end());

  d.graph = build_adjacency(read_edge_list(dir / "edges.txt"), n);
  d.train_mask = read_mask(dir / "train_mask.txt", n);
  d.test_mask = read_mask(dir / "test_mask.txt", n);

  if (normalize_features) {
    for (std::size_t i = 0; i < n; ++i) {
      const double norm = std::sqrt(kernels::sum_sq(d.features.row(i), d.features.cols));
      if (norm > 0.0) kernels::scale(1.0 / norm, d.features.row(i), d.features.cols);
    }
  }
  d.validate();
  DatasetManifest manifest = manifest_of(d);
  return {std::move(d), manifest};
}

void save_dataset(const Dataset& dataset, const fs::path& dir) {
  fs::create_directories(dir);

  std::ofstream edges(dir / "edges.txt");
  for (std::size_t i = 0; i < dataset.graph.n_rows; ++i) {
    for (std::size_t k = dataset.graph.row_offsets[i]; k < dataset.graph.row_offsets[i + 1]; ++k) {
      const std::size_t j = dataset.graph.col_indices[k];
      if (i < j) edges << i << " " << j << "\n";
    }
  }

  std::ofstream features(dir / "features.csv");
  for (std::size_t i = 0; i < dataset.features.rows; ++i) {
    for (std::size_t j = 0; j < dataset.features.cols; ++j) {
      if (j) features << ",";
      features << fmt(dataset.features.at(i, j));
    }
    features << "\n";
  }

  std::ofstream labels(dir / "labels.txt");
  for (int y : dataset.labels) labels << y << "\n";

  std::ofstream train(dir / "train_mask.txt");
  for (std::size_t i : dataset.train_mask) train << i << "\n";
  std::ofstream test(dir / "test_mask.txt");
  for (std::size_t i : dataset.test_mask) test << i << "\n";
}

Dataset make_synthetic(std::size_t n, std::size_t d, std::size_t classes,
                       double edge_prob, double homophily, std::uint64_t seed,
                       double train_fraction, double feature_noise) {
  if (n == 0) throw InputError("make_synthetic: n must be positive");
  if (d == 0 || classes == 0) throw InputError("make_synthetic: d and classes must be positive");
  if (classes > n) throw InputError("make_synthetic: more classes than nodes");
  if (edge_prob < 0.0 || edge_prob > 1.0 || homophily < 0.0 || homophily > 1.0) {
    throw InputError("make_synthetic: edge_prob and homophily must lie in [0,1]");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InputError("make_synthetic: train_fraction must lie in (0,1)");
  }

  Dataset ds;
  std::mt19937_64 rng(seed);

  // Contiguous class blocks.
  std::vector<std::size_t> klass(n);
  for (std::size_t i = 0; i < n; ++i) klass[i] = i * classes / n;
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) ds.labels[i] = static_cast<int>(klass[i]);

  const double inter = edge_prob * (1.0 - homophily);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double prob = klass[i] == klass[j] ? edge_prob : inter;
      if (uniform_unit(rng) < prob) edges.emplace_back(i, j);
    }
  }
  ds.graph = build_adjacency(edges, n);

  // Class means occupy the first half of the dimensions (interleaved per
  // class); the second half is pure noise.
  ds.features = DenseMatrix(n, d);
  const std::size_t informative_dims = (d + 1) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    double* row = ds.features.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const bool informative = j < informative_dims && j % classes == klass[i];
      row[j] = (informative ? 1.0 : 0.0) + feature_noise * gaussian(rng);
    }
  }

  // Random train/test split.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[bounded_uint(rng, i)]);
  }
  auto m = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(n)));
  m = std::clamp<std::size_t>(m, 1, n - 1);
  ds.train_mask.assign(order.begin(), order.begin() + m);
  ds.test_mask.assign(order.begin() + m, order.end());
  std::sort(ds.train_mask.begin(), ds.train_mask.end());
  std::sort(ds.test_mask.begin(), ds.test_mask.end());

  ds.validate();
  return ds;
}

void ExperimentConfig::validate() const {
  train.validate();
  if (p_grid.empty() || filter_grid.empty()) throw InputError("config: grids must be non-empty");
  for (double p : p_grid) {
    if (!(p > 1.0 && p <= 2.0)) throw InputError("p must lie in (1,2]");
  }
  if (repeats == 0) throw InputError("config: repeats must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("config: delta must lie in (0,1)");
  if (dataset_dir.empty()) throw InputError("config: dataset_dir is required");
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw InputError("config: key '" + key + "' has a non-numeric value '" + value + "'");
  }
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  const double x = parse_double(key, value);
  if (x < 0.0 || x != std::floor(x)) {
    throw InputError("config: key '" + key + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(x);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw InputError("config: key '" + key + "' must be true or false");
}

}  // namespace

ExperimentConfig load_config(const fs::path& path) {
  auto in = open_or_throw(path);
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) file_error(path, lineno, "expected key=value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));

    if (key == "dataset_dir") {
      cfg.dataset_dir = value;
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "mode") {
      cfg.train.mode = mode_from_string(value);
      if (cfg.train.mode == Mode::Experiment) cfg.train.loss = LossKind::SoftmaxCrossEntropy;
    } else if (key == "p_grid" || key == "p") {
      cfg.p_grid.clear();
      for (const auto& tok : split(value, ',')) cfg.p_grid.push_back(parse_double(key, trim(tok)));
    } else if (key == "filter_grid" || key == "filter") {
      cfg.filter_grid.clear();
      for (const auto& tok : split(value, ',')) {
        cfg.filter_grid.push_back(filter_kind_from_string(trim(tok)));
      }
    } else if (key == "repeats") {
      cfg.repeats = parse_count(key, value);
    } else if (key == "epochs") {
      cfg.train.epochs = parse_count(key, value);
    } else if (key == "eta") {
      cfg.train.eta = parse_double(key, value);
    } else if (key == "lambda") {
      cfg.train.lambda = parse_double(key, value);
    } else if (key == "lambda_t") {
      cfg.train.lambda_t = parse_double(key, value);
    } else if (key == "loss") {
      cfg.train.loss = loss_from_string(value);
    } else if (key == "activation") {
      cfg.train.activation = activation_from_string(value);
    } else if (key == "seed") {
      cfg.train.seed = static_cast<std::uint64_t>(parse_count(key, value));
    } else if (key == "prox_tol") {
      cfg.train.prox_tol = parse_double(key, value);
    } else if (key == "record_every") {
      cfg.train.record_every = parse_count(key, value);
    } else if (key == "eps_sparsity") {
      cfg.train.eps_sparsity = parse_double(key, value);
    } else if (key == "gaussian_init") {
      cfg.train.gaussian_init = parse_bool(key, value);
    } else if (key == "shuffle_epochs") {
      cfg.train.shuffle_epochs = parse_bool(key, value);
    } else if (key == "normalize_features") {
      cfg.normalize_features = parse_bool(key, value);
    } else if (key == "delta") {
      cfg.delta = parse_double(key, value);
    } else if (key == "threads") {
      cfg.threads = parse_count(key, value);
    } else {
      file_error(path, lineno, "unknown key '" + key + "'");
    }
  }
  // Grid values are validated here so a bad p fails at load time.
  for (double p : cfg.p_grid) {
    if (!(p > 1.0 && p <= 2.0)) throw InputError("p must lie in (1,2]");
  }
  return cfg;
}

void write_metrics_csv(const std::vector<SweepRow>& rows, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "run_id,p,filter,epoch,train_error,test_error,gen_gap,param_distance,"
         "sparsity_pct,seed\n";
  for (const auto& r : rows) {
    out << r.run_id << "," << fmt_p(r.p) << "," << to_string(r.filter) << "," << r.epoch
        << "," << fmt(r.train_error) << "," << fmt(r.test_error) << "," << fmt(r.gen_gap)
        << "," << fmt(r.param_distance) << "," << fmt(r.sparsity_pct) << "," << r.seed
        << "\n";
  }
}

std::vector<SweepRow> read_metrics_csv(const fs::path& path) {
  auto in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty metrics file");
  if (line.rfind("run_id,", 0) != 0) {
    throw InputError(path.filename().string() + " line 1: not a metrics header");
  }
  std::vector<SweepRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 10) {
      file_error(path, lineno, "expected 10 columns, found " + std::to_string(cells.size()));
    }
    SweepRow r;
    r.run_id = cells[0];
    r.p = parse_double("p", cells[1]);
    r.filter = filter_kind_from_string(cells[2]);
    r.epoch = parse_count("epoch", cells[3]);
    r.train_error = parse_double("train_error", cells[4]);
    r.test_error = parse_double("test_error", cells[5]);
    r.gen_gap = parse_double("gen_gap", cells[6]);
    r.param_distance = parse_double("param_distance", cells[7]);
    r.sparsity_pct = parse_double("sparsity_pct", cells[8]);
    r.seed = static_cast<std::uint64_t>(parse_count("seed", cells[9]));
    rows.push_back(std::move(r));
  }
  return rows;
}

SweepResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  auto [dataset, manifest] = load_dataset(config.dataset_dir, config.normalize_features);
  fs::create_directories(config.output_dir);

  SweepResult result = sweep(dataset, config.train, config.p_grid, config.filter_grid,
                             config.repeats, config.threads);
  write_metrics_csv(result.rows, config.output_dir / "metrics.csv");

  // Theory quantities per grid cell.
  std::ofstream bounds_csv(config.output_dir / "bounds.csv");
  bounds_csv << "p,filter,lambda_g_max,g_e,B,radius,c_p_lambda,beta_n,log_beta_n,"
                "saturated,gen_bound\n";
  for (FilterKind f : config.filter_grid) {
    const SpectralEstimate spectral =
        filter_spectral_radius(dataset.graph, f, {1e-10, 100000, config.train.seed});
    const double ge = compute_ge(build_filter(dataset.graph, f), dataset.features);
    for (double p : config.p_grid) {
      TrainConfig tc = config.train;
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
      bi.delta = config.delta;
      const BetaBound beta = stability_beta(bi);
      const double gen = generalization_bound(beta.value, B, bi.n, config.delta);
      bounds_csv << fmt_p(p) << "," << to_string(f) << "," << fmt(spectral.lambda_max_abs)
                 << "," << fmt(ge) << "," << fmt(B) << "," << fmt(radius) << ","
                 << fmt(c_p_lambda(p, tc.lambda, bi.lambda_t, B)) << "," << fmt(beta.value)
                 << "," << fmt(beta.log_value) << "," << (beta.saturated ? 1 : 0) << ","
                 << fmt(gen) << "\n";
    }
  }
  bounds_csv.close();

  nlohmann::json summary;
  summary["dataset"] = {{"n", manifest.n},          {"d", manifest.d},
                        {"classes", manifest.classes}, {"edges", manifest.edges},
                        {"train_size", manifest.train_size},
                        {"test_size", manifest.test_size}};
  summary["mode"] = to_string(config.train.mode);
  summary["epochs"] = config.train.epochs;
  summary["eta"] = config.train.eta;
  summary["lambda"] = config.train.lambda;
  summary["lambda_t"] = config.train.effective_lambda_t();
  summary["loss"] = to_string(config.train.loss);
  summary["activation"] = to_string(config.train.activation);
  summary["seed"] = config.train.seed;
  summary["repeats"] = config.repeats;
  summary["normalize_features"] = config.normalize_features;
  summary["eps_sparsity"] = config.train.eps_sparsity;
  summary["p_grid"] = config.p_grid;
  {
    std::vector<std::string> filters;
    for (FilterKind f : config.filter_grid) filters.emplace_back(to_string(f));
    summary["filter_grid"] = filters;
  }
  std::ofstream mj(config.output_dir / "manifest.json");
  mj << summary.dump(2) << "\n";

  return result;
}

namespace {

struct CellKey {
  double p;
  std::string filter;
  bool operator<(const CellKey& o) const {
    return p != o.p ? p < o.p : filter < o.filter;
  }
};

}  // namespace

fs::path emit_plotdata(const fs::path& metrics_csv, PlotKind kind, const fs::path& out_path) {
  const auto rows = read_metrics_csv(metrics_csv);
  std::ofstream out(out_path);
  if (!out) throw InputError("cannot write " + out_path.string());

  if (kind == PlotKind::SparsityTable) {
    // Final-epoch sparsity pivoted by (filter, p).
    std::map<std::string, std::map<double, std::vector<double>>> final_sparsity;
    std::map<CellKey, std::size_t> last_epoch;
    for (const auto& r : rows) {
      auto& e = last_epoch[{r.p, to_string(r.filter)}];
      e = std::max(e, r.epoch);
    }
    std::set<double> ps;
    for (const auto& r : rows) {
      ps.insert(r.p);
      if (r.epoch == last_epoch[{r.p, to_string(r.filter)}]) {
        final_sparsity[to_string(r.filter)][r.p].push_back(r.sparsity_pct);
      }
    }
    out << "filter";
    for (double p : ps) out << ",p=" << fmt_p(p);
    out << "\n";
    for (const auto& [filter, by_p] : final_sparsity) {
      out << filter;
      for (double p : ps) {
        const auto it = by_p.find(p);
        if (it == by_p.end()) {
          out << ",";
        } else {
          double mean = 0.0;
          for (double v : it->second) mean += v;
          out << "," << fmt(mean / static_cast<double>(it->second.size()));
        }
      }
      out << "\n";
    }
    return out_path;
  }

  // Long format: one row per (series, epoch) with mean and stddev across
  // repeats.
  std::map<std::pair<CellKey, std::size_t>, std::vector<double>> groups;
  for (const auto& r : rows) {
    const double v = kind == PlotKind::GapCurves ? r.gen_gap : r.param_distance;
    groups[{{r.p, to_string(r.filter)}, r.epoch}].push_back(v);
  }
  out << "epoch,series,mean,stddev\n";
  for (const auto& [key, values] : groups) {
    const auto& [cell, epoch] = key;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double sd = 0.0;
    if (values.size() > 1) {
      for (double v : values) sd += (v - mean) * (v - mean);
      sd = std::sqrt(sd / static_cast<double>(values.size() - 1));
    }
    out << epoch << ",p=" << fmt_p(cell.p) << "|" << cell.filter << "," << fmt(mean) << ","
        << fmt(sd) << "\n";
  }
  return out_path;
}

}  // namespace lpgcn
