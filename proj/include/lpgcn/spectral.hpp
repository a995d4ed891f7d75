#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lpgcn/graph.hpp"

namespace lpgcn {

struct SpectralEstimate {
  double lambda_max_abs = 0.0;
  std::size_t iterations_used = 0;
  double residual = 0.0;
};

struct PowerOptions {
  double tol = 1e-8;
  std::size_t max_iter = 10000;
  std::uint64_t seed = 0;
};

// Largest absolute eigenvalue of a square matrix by power iteration with a
// Rayleigh-quotient residual. Two phases: the first finds the dominant
// extreme eigenvalue mu1, the second iterates on M - mu1*I to expose the
// eigenvalue farthest from mu1 (the opposite end of the spectrum); the
// reported value is the larger magnitude of the two. Deterministic given
// the seed. Throws ConvergenceError (carrying the best estimate and its
// residual) if either phase fails to reach tol within max_iter.
SpectralEstimate spectral_radius(const SparseMatrix& m, const PowerOptions& opts = {});

// Spectral radius of the filter built from the adjacency matrix. For the
// random-walk filter the iteration runs on the normalized filter instead:
// D^{-1}A+I is D^{-1/2}(D^{-1/2}AD^{-1/2}+I)D^{1/2}, so the two share a
// spectrum, and on the symmetric twin the residual bounds the eigenvalue
// error directly.
SpectralEstimate filter_spectral_radius(const SparseMatrix& adj, FilterKind kind,
                                        const PowerOptions& opts = {});

// All eigenvalues of a symmetric dense matrix (cyclic Jacobi sweeps),
// ascending. Intended for small matrices (n <= a few hundred).
std::vector<double> dense_symmetric_eigenvalues(const DenseMatrix& a);

// (lambda_max_abs of the node's ego-graph filter, lambda_max_abs of the
// full filter), both by dense eigensolve. The ego graph is the subgraph
// induced by the node and its adjacency neighbors, with the filter rebuilt
// on it. Only for graphs small enough for the dense path (n <= 200).
std::pair<double, double> ego_eigen_check(const SparseMatrix& adj, FilterKind kind,
                                          std::size_t node);

}  // namespace lpgcn
