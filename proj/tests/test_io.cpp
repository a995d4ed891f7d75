#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "lpgcn/dataset_io.hpp"
#include "lpgcn/errors.hpp"

using namespace lpgcn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_minimal_fixture(const fs::path& dir) {
  write_file(dir / "edges.txt", "0 1\n1 2\n");
  write_file(dir / "features.csv", "1.0,0.0\n0.5,0.5\n0.0,1.0\n");
  write_file(dir / "labels.txt", "0\n1\n1\n");
  write_file(dir / "train_mask.txt", "0\n1\n");
  write_file(dir / "test_mask.txt", "2\n");
}

}  // namespace

TEST_CASE("load_dataset on the minimal fixture") {
  TempDir tmp("lpgcn_io_fixture");
  write_minimal_fixture(tmp.path);
  const auto [dataset, manifest] = load_dataset(tmp.path);
  CHECK(manifest.n == 3);
  CHECK(manifest.d == 2);
  CHECK(manifest.classes == 2);
  CHECK(manifest.edges == 2);
  CHECK(manifest.train_size == 2);
  CHECK(manifest.test_size == 1);
  CHECK(dataset.features.at(1, 0) == 0.5);
}

TEST_CASE("load_dataset error contract names file and line") {
  TempDir tmp("lpgcn_io_errors");
  write_minimal_fixture(tmp.path);
  write_file(tmp.path / "features.csv", "1.0,0.0\n0.5,0.5\n0.0,1.0\n2.0,1.0\n1.0,2.0,3.0\n");
  write_file(tmp.path / "labels.txt", "0\n1\n1\n0\n1\n");
  try {
    load_dataset(tmp.path);
    FAIL("expected an InputError");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("features.csv") != std::string::npos);
    CHECK(msg.find("line 5") != std::string::npos);
  }

  SUBCASE("missing file") {
    fs::remove(tmp.path / "edges.txt");
    write_file(tmp.path / "features.csv", "1.0,0.0\n0.5,0.5\n0.0,1.0\n");
    write_file(tmp.path / "labels.txt", "0\n1\n1\n");
    CHECK_THROWS_AS(load_dataset(tmp.path), InputError);
  }

  SUBCASE("out-of-range mask index") {
    write_file(tmp.path / "features.csv", "1.0,0.0\n0.5,0.5\n0.0,1.0\n");
    write_file(tmp.path / "labels.txt", "0\n1\n1\n");
    write_file(tmp.path / "train_mask.txt", "0\n7\n");
    CHECK_THROWS_AS(load_dataset(tmp.path), InputError);
  }
}

TEST_CASE("save/load round trip reproduces the dataset exactly") {
  TempDir tmp("lpgcn_io_roundtrip");
  const Dataset d = make_synthetic(35, 6, 3, 0.15, 0.8, 7);
  save_dataset(d, tmp.path);
  const auto [loaded, manifest] = load_dataset(tmp.path);
  CHECK(loaded.features.data == d.features.data);
  CHECK(loaded.labels == d.labels);
  CHECK(loaded.train_mask == d.train_mask);
  CHECK(loaded.test_mask == d.test_mask);
  CHECK(loaded.graph.col_indices == d.graph.col_indices);
  CHECK(loaded.graph.row_offsets == d.graph.row_offsets);
}

TEST_CASE("feature normalization flag") {
  TempDir tmp("lpgcn_io_norm");
  write_minimal_fixture(tmp.path);
  const auto [dataset, manifest] = load_dataset(tmp.path, /*normalize_features=*/true);
  for (std::size_t i = 0; i < dataset.n_nodes(); ++i) {
    double norm = 0.0;
    for (std::size_t j = 0; j < dataset.n_features(); ++j) {
      norm += dataset.features.at(i, j) * dataset.features.at(i, j);
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("make_synthetic") {
  SUBCASE("determinism") {
    const Dataset a = make_synthetic(40, 8, 3, 0.2, 0.7, 123);
    const Dataset b = make_synthetic(40, 8, 3, 0.2, 0.7, 123);
    CHECK(a.features.data == b.features.data);
    CHECK(a.labels == b.labels);
    CHECK(a.graph.col_indices == b.graph.col_indices);
    CHECK(a.train_mask == b.train_mask);
  }

  SUBCASE("homophily 1 with full edge probability gives block cliques") {
    const Dataset d = make_synthetic(12, 4, 3, 1.0, 1.0, 3);
    for (std::size_t i = 0; i < d.graph.n_rows; ++i) {
      for (std::size_t k = d.graph.row_offsets[i]; k < d.graph.row_offsets[i + 1]; ++k) {
        CHECK(d.labels[i] == d.labels[d.graph.col_indices[k]]);
      }
    }
    // Within a class block every pair is connected.
    CHECK(d.graph.nnz() == 3 * 4 * 3);  // 3 blocks of K4
  }

  SUBCASE("n = 0 is an error") {
    CHECK_THROWS_AS(make_synthetic(0, 4, 2, 0.2, 0.5, 1), InputError);
  }
}

TEST_CASE("config parsing") {
  TempDir tmp("lpgcn_io_config");

  SUBCASE("full round trip") {
    write_file(tmp.path / "run.cfg",
               "# comment\n"
               "dataset_dir=" + (tmp.path / "data").string() + "\n"
               "output_dir=" + (tmp.path / "out").string() + "\n"
               "p_grid=1.001,1.5,2\n"
               "filter_grid=normalized,unnormalized\n"
               "repeats=3\n"
               "epochs=10\n"
               "eta=0.5\n"
               "lambda=0.002\n"
               "seed=9\n"
               "normalize_features=true\n");
    const auto cfg = load_config(tmp.path / "run.cfg");
    CHECK(cfg.p_grid.size() == 3);
    CHECK(cfg.filter_grid.size() == 2);
    CHECK(cfg.repeats == 3);
    CHECK(cfg.train.epochs == 10);
    CHECK(cfg.train.eta == 0.5);
    CHECK(cfg.train.seed == 9);
    CHECK(cfg.normalize_features);
  }

  SUBCASE("unknown keys are rejected") {
    write_file(tmp.path / "bad.cfg", "dataset_dir=x\nnot_a_key=1\n");
    CHECK_THROWS_AS(load_config(tmp.path / "bad.cfg"), InputError);
  }

  SUBCASE("p outside (1,2] is rejected with the contract message") {
    write_file(tmp.path / "badp.cfg", "dataset_dir=x\np_grid=2.5\n");
    CHECK_THROWS_WITH_AS(load_config(tmp.path / "badp.cfg"), "p must lie in (1,2]",
                         InputError);
  }
}

TEST_CASE("run_experiment writes the three outputs deterministically") {
  TempDir tmp("lpgcn_io_runexp");
  const Dataset d = make_synthetic(24, 5, 2, 0.2, 0.85, 11);
  save_dataset(d, tmp.path / "data");

  ExperimentConfig cfg;
  cfg.dataset_dir = tmp.path / "data";
  cfg.output_dir = tmp.path / "out";
  cfg.p_grid = {1.5};
  cfg.filter_grid = {FilterKind::Normalized};
  cfg.repeats = 1;
  cfg.train.epochs = 3;
  cfg.train.seed = 4;

  run_experiment(cfg);
  CHECK(fs::exists(cfg.output_dir / "metrics.csv"));
  CHECK(fs::exists(cfg.output_dir / "bounds.csv"));
  CHECK(fs::exists(cfg.output_dir / "manifest.json"));

  const std::string metrics1 = read_file(cfg.output_dir / "metrics.csv");
  CHECK(metrics1.rfind("run_id,p,filter,epoch,train_error,test_error,gen_gap,"
                       "param_distance,sparsity_pct,seed",
                       0) == 0);
  const std::string bounds1 = read_file(cfg.output_dir / "bounds.csv");
  CHECK(bounds1.find("lambda_g_max") != std::string::npos);

  run_experiment(cfg);
  CHECK(read_file(cfg.output_dir / "metrics.csv") == metrics1);
  CHECK(read_file(cfg.output_dir / "bounds.csv") == bounds1);
}

TEST_CASE("emit_plotdata") {
  TempDir tmp("lpgcn_io_plot");

  SUBCASE("empty metrics give a header-only file") {
    write_file(tmp.path / "metrics.csv",
               "run_id,p,filter,epoch,train_error,test_error,gen_gap,param_distance,"
               "sparsity_pct,seed\n");
    const auto out = emit_plotdata(tmp.path / "metrics.csv", PlotKind::GapCurves,
                                   tmp.path / "gap.csv");
    CHECK(read_file(out) == "epoch,series,mean,stddev\n");
  }

  SUBCASE("2 p-values x 3 epochs give 6 rows") {
    std::string csv =
        "run_id,p,filter,epoch,train_error,test_error,gen_gap,param_distance,"
        "sparsity_pct,seed\n";
    for (const char* p : {"1.5", "2"}) {
      for (int e = 1; e <= 3; ++e) {
        csv += std::string("r0,") + p + ",normalized," + std::to_string(e) +
               ",0.5,0.6,0.1,0.0,10,1\n";
      }
    }
    write_file(tmp.path / "metrics.csv", csv);
    const auto out = emit_plotdata(tmp.path / "metrics.csv", PlotKind::GapCurves,
                                   tmp.path / "gap.csv");
    const std::string content = read_file(out);
    std::size_t rows = 0;
    for (char c : content) rows += c == '\n';
    CHECK(rows == 7);  // header + 6
  }

  SUBCASE("distance curves aggregate param_distance") {
    std::string csv =
        "run_id,p,filter,epoch,train_error,test_error,gen_gap,param_distance,"
        "sparsity_pct,seed\n"
        "r0,1.5,normalized,1,0.5,0.6,0.1,0.25,10,1\n"
        "r1,1.5,normalized,1,0.5,0.6,0.1,0.75,10,2\n";
    write_file(tmp.path / "metrics.csv", csv);
    const auto out = emit_plotdata(tmp.path / "metrics.csv", PlotKind::DistanceCurves,
                                   tmp.path / "dist.csv");
    const std::string content = read_file(out);
    CHECK(content.find("epoch,series,mean,stddev") == 0);
    CHECK(content.find("1,p=1.5|normalized,0.5,") != std::string::npos);
  }

  SUBCASE("sparsity pivot is filters x p") {
    std::string csv =
        "run_id,p,filter,epoch,train_error,test_error,gen_gap,param_distance,"
        "sparsity_pct,seed\n";
    const char* filters[] = {"unnormalized", "normalized", "random_walk",
                             "augmented_normalized"};
    const char* ps[] = {"1.001", "1.149", "1.32", "1.516", "1.741", "2"};
    for (const char* f : filters) {
      for (const char* p : ps) {
        csv += std::string("r0,") + p + "," + f + ",1,0.5,0.6,0.1,0.0,25,1\n";
        csv += std::string("r0,") + p + "," + f + ",2,0.5,0.6,0.1,0.0,50,1\n";
      }
    }
    write_file(tmp.path / "metrics.csv", csv);
    const auto out = emit_plotdata(tmp.path / "metrics.csv", PlotKind::SparsityTable,
                                   tmp.path / "sparsity.csv");
    const std::string content = read_file(out);
    std::size_t rows = 0;
    for (char c : content) rows += c == '\n';
    CHECK(rows == 5);  // header + 4 filters
    CHECK(content.find(",50") != std::string::npos);  // final-epoch values
  }

  SUBCASE("malformed metrics file") {
    write_file(tmp.path / "metrics.csv", "not,a,metrics,file\n");
    CHECK_THROWS_AS(
        emit_plotdata(tmp.path / "metrics.csv", PlotKind::GapCurves, tmp.path / "x.csv"),
        InputError);
  }
}
