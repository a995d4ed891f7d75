#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lpgcn/dense.hpp"

namespace lpgcn {

// Compressed sparse row matrix; carrier for the adjacency matrix and the
// graph convolution filters. Immutable after construction and safe to share
// across threads.
//
// Invariants: row_offsets has n_rows+1 non-decreasing entries starting at 0
// and ending at nnz; column indices are strictly increasing within a row;
// no explicit zeros are stored.
struct SparseMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_offsets{0};
  std::vector<std::size_t> col_indices;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }

  // y = M * x (serial; summation order fixed by the CSR layout).
  void multiply(const double* x, double* y) const;

  // Structural + value check of the CSR invariants (used by tests and the
  // dataset loader).
  bool valid() const;
};

// The four graph convolution filters. The names follow the usual
// normalization vocabulary: A+I, D^{-1/2}AD^{-1/2}+I, D^{-1}A+I and
// (D+I)^{-1/2}(A+I)(D+I)^{-1/2}.
enum class FilterKind {
  Unnormalized,
  Normalized,
  RandomWalk,
  AugmentedNormalized,
};

const char* to_string(FilterKind kind);
FilterKind filter_kind_from_string(const std::string& name);

// Sparse row slice returned by ego_row.
struct SparseVector {
  std::vector<std::size_t> indices;
  std::vector<double> values;
};

// Symmetric 0/1 adjacency matrix from an undirected edge list. Duplicate
// edges and orientation are collapsed; self loops are dropped (the filters
// add their own diagonal term). Node ids must lie in [0, n) and n > 0.
SparseMatrix build_adjacency(const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                             std::size_t n);

// Filter matrix for the given kind. Rows of isolated nodes keep only the
// diagonal term: the D^{-1} and D^{-1/2} factors are defined as 0 on
// zero-degree entries.
SparseMatrix build_filter(const SparseMatrix& adj, FilterKind kind);

// Node degrees of an adjacency matrix (row populations).
std::vector<std::size_t> degrees(const SparseMatrix& adj);

// The node's filter row; its support is the node's receptive field.
SparseVector ego_row(const SparseMatrix& filter, std::size_t node);

// g_e: the largest Euclidean norm over nodes of the filter-aggregated
// feature row, max_i || row_i(filter * X) ||_2.
double compute_ge(const SparseMatrix& filter, const DenseMatrix& features);

// Adjacency of the subgraph induced by the given (sorted, unique) nodes.
SparseMatrix induced_subgraph(const SparseMatrix& adj,
                              const std::vector<std::size_t>& nodes);

}  // namespace lpgcn
