#include "lpgcn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lpgcn/errors.hpp"
#include "lpgcn/kernels.hpp"

namespace lpgcn {

void SparseMatrix::multiply(const double* x, double* y) const {
  for (std::size_t i = 0; i < n_rows; ++i) {
    double s = 0.0;
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      s += values[k] * x[col_indices[k]];
    }
    y[i] = s;
  }
}

bool SparseMatrix::valid() const {
  if (row_offsets.size() != n_rows + 1) return false;
  if (row_offsets.front() != 0) return false;
  if (row_offsets.back() != values.size()) return false;
  if (col_indices.size() != values.size()) return false;
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (row_offsets[i] > row_offsets[i + 1]) return false;
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      if (col_indices[k] >= n_cols) return false;
      if (k > row_offsets[i] && col_indices[k] <= col_indices[k - 1]) return false;
      if (values[k] == 0.0) return false;
    }
  }
  return true;
}

const char* to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::Unnormalized: return "unnormalized";
    case FilterKind::Normalized: return "normalized";
    case FilterKind::RandomWalk: return "random_walk";
    case FilterKind::AugmentedNormalized: return "augmented_normalized";
  }
  return "?";
}

FilterKind filter_kind_from_string(const std::string& name) {
  if (name == "unnormalized") return FilterKind::Unnormalized;
  if (name == "normalized") return FilterKind::Normalized;
  if (name == "random_walk") return FilterKind::RandomWalk;
  if (name == "augmented_normalized") return FilterKind::AugmentedNormalized;
  throw InputError("unknown filter kind: " + name);
}

SparseMatrix build_adjacency(const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                             std::size_t n) {
  if (n == 0) throw InputError("build_adjacency: node count must be positive");

  std::vector<std::pair<std::size_t, std::size_t>> directed;
  directed.reserve(edges.size() * 2);
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n) {
      throw InputError("build_adjacency: node id out of range: (" +
                       std::to_string(a) + ", " + std::to_string(b) + ") with n=" +
                       std::to_string(n));
    }
    if (a == b) continue;  // filters add the diagonal themselves
    directed.emplace_back(a, b);
    directed.emplace_back(b, a);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  SparseMatrix m;
  m.n_rows = m.n_cols = n;
  m.row_offsets.assign(n + 1, 0);
  m.col_indices.reserve(directed.size());
  m.values.assign(directed.size(), 1.0);
  for (const auto& [i, j] : directed) {
    m.row_offsets[i + 1]++;
    m.col_indices.push_back(j);
  }
  for (std::size_t i = 0; i < n; ++i) m.row_offsets[i + 1] += m.row_offsets[i];
  return m;
}

std::vector<std::size_t> degrees(const SparseMatrix& adj) {
  std::vector<std::size_t> deg(adj.n_rows);
  for (std::size_t i = 0; i < adj.n_rows; ++i) {
    deg[i] = adj.row_offsets[i + 1] - adj.row_offsets[i];
  }
  return deg;
}

SparseMatrix build_filter(const SparseMatrix& adj, FilterKind kind) {
  if (adj.n_rows != adj.n_cols) {
    throw InputError("build_filter: adjacency matrix must be square");
  }
  const std::size_t n = adj.n_rows;
  const auto deg = degrees(adj);

  std::vector<double> row_weight(n, 1.0);  // scaling applied from the left
  std::vector<double> col_weight(n, 1.0);  // scaling applied from the right
  std::vector<double> diag(n, 1.0);
  switch (kind) {
    case FilterKind::Unnormalized:
      break;
    case FilterKind::Normalized:
      for (std::size_t i = 0; i < n; ++i) {
        const double w = deg[i] > 0 ? 1.0 / std::sqrt(static_cast<double>(deg[i])) : 0.0;
        row_weight[i] = col_weight[i] = w;
      }
      break;
    case FilterKind::RandomWalk:
      for (std::size_t i = 0; i < n; ++i) {
        row_weight[i] = deg[i] > 0 ? 1.0 / static_cast<double>(deg[i]) : 0.0;
      }
      break;
    case FilterKind::AugmentedNormalized:
      for (std::size_t i = 0; i < n; ++i) {
        const double w = 1.0 / std::sqrt(static_cast<double>(deg[i] + 1));
        row_weight[i] = col_weight[i] = w;
        diag[i] = w * w;  // (d_i+1)^{-1}
      }
      break;
  }

  SparseMatrix f;
  f.n_rows = f.n_cols = n;
  f.row_offsets.assign(n + 1, 0);
  f.col_indices.reserve(adj.nnz() + n);
  f.values.reserve(adj.nnz() + n);
  for (std::size_t i = 0; i < n; ++i) {
    bool diag_done = false;
    for (std::size_t k = adj.row_offsets[i]; k < adj.row_offsets[i + 1]; ++k) {
      const std::size_t j = adj.col_indices[k];
      if (!diag_done && j > i) {
        f.col_indices.push_back(i);
        f.values.push_back(diag[i]);
        diag_done = true;
      }
      f.col_indices.push_back(j);
      f.values.push_back(row_weight[i] * adj.values[k] * col_weight[j]);
    }
    if (!diag_done) {
      f.col_indices.push_back(i);
      f.values.push_back(diag[i]);
    }
    f.row_offsets[i + 1] = f.col_indices.size();
  }
  return f;
}

SparseVector ego_row(const SparseMatrix& filter, std::size_t node) {
  if (node >= filter.n_rows) {
    throw InputError("ego_row: node index out of range");
  }
  SparseVector r;
  const std::size_t begin = filter.row_offsets[node];
  const std::size_t end = filter.row_offsets[node + 1];
  r.indices.assign(filter.col_indices.begin() + begin, filter.col_indices.begin() + end);
  r.values.assign(filter.values.begin() + begin, filter.values.begin() + end);
  return r;
}

double compute_ge(const SparseMatrix& filter, const DenseMatrix& features) {
  if (filter.n_cols != features.rows) {
    throw InputError("compute_ge: filter/feature dimension mismatch");
  }
  const std::size_t d = features.cols;
  std::vector<double> acc(d);
  double best = 0.0;
  for (std::size_t i = 0; i < filter.n_rows; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t k = filter.row_offsets[i]; k < filter.row_offsets[i + 1]; ++k) {
      kernels::axpy(filter.values[k], features.row(filter.col_indices[k]), acc.data(), d);
    }
    best = std::max(best, kernels::sum_sq(acc.data(), d));
  }
  return std::sqrt(best);
}

SparseMatrix induced_subgraph(const SparseMatrix& adj,
                              const std::vector<std::size_t>& nodes) {
  std::vector<std::size_t> local(adj.n_rows, static_cast<std::size_t>(-1));
  for (std::size_t k = 0; k < nodes.size(); ++k) local[nodes[k]] = k;

  SparseMatrix sub;
  sub.n_rows = sub.n_cols = nodes.size();
  sub.row_offsets.assign(nodes.size() + 1, 0);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const std::size_t i = nodes[k];
    for (std::size_t p = adj.row_offsets[i]; p < adj.row_offsets[i + 1]; ++p) {
      const std::size_t lj = local[adj.col_indices[p]];
      if (lj != static_cast<std::size_t>(-1)) {
        sub.col_indices.push_back(lj);
        sub.values.push_back(adj.values[p]);
      }
    }
    sub.row_offsets[k + 1] = sub.col_indices.size();
  }
  return sub;
}

}  // namespace lpgcn
