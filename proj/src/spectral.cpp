#include "lpgcn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lpgcn/errors.hpp"
#include "lpgcn/kernels.hpp"
#include "lpgcn/rng.hpp"

namespace lpgcn {

namespace {

struct ExtremeResult {
  double eigenvalue = 0.0;  // signed eigenvalue of M at the converged vector
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Power iteration on M - shift*I. The Rayleigh quotient and residual are
// reported for M itself, evaluated at the current iterate.
ExtremeResult power_extreme(const SparseMatrix& m, double shift,
                            const PowerOptions& opts, std::mt19937_64& rng) {
  const std::size_t n = m.n_rows;
  std::vector<double> x(n), z(n);
  for (auto& v : x) v = uniform_real(rng, -1.0, 1.0);
  double nx = std::sqrt(kernels::sum_sq(x.data(), n));
  kernels::scale(1.0 / nx, x.data(), n);

  ExtremeResult res;
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    res.iterations = it;
    m.multiply(x.data(), z.data());
    if (shift != 0.0) kernels::axpy(-shift, x.data(), z.data(), n);

    const double r = kernels::dot(x.data(), z.data(), n);  // Rayleigh of M - shift*I
    double rs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = z[i] - r * x[i];
      rs += d * d;
    }
    res.eigenvalue = r + shift;
    res.residual = std::sqrt(rs);
    if (res.residual <= opts.tol) {
      res.converged = true;
      return res;
    }

    const double nz = std::sqrt(kernels::sum_sq(z.data(), n));
    if (nz == 0.0) {
      // x lies exactly in the kernel of M - shift*I: an exact eigenpair.
      res.eigenvalue = shift;
      res.residual = 0.0;
      res.converged = true;
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = z[i] / nz;
  }
  return res;
}

}  // namespace

SpectralEstimate spectral_radius(const SparseMatrix& m, const PowerOptions& opts) {
  if (m.n_rows != m.n_cols) throw InputError("spectral_radius: matrix must be square");
  if (!(opts.tol > 0.0)) throw InputError("spectral_radius: tol must be positive");
  if (m.n_rows == 0) return {0.0, 0, 0.0};

  std::mt19937_64 rng(opts.seed);
  const ExtremeResult first = power_extreme(m, 0.0, opts, rng);
  if (!first.converged) {
    throw ConvergenceError("spectral_radius: power iteration did not converge",
                           std::abs(first.eigenvalue), first.residual);
  }
  // Second run shifted by the first extreme to reach the other end of the
  // spectrum; the dominant eigenvalue of M - mu1*I is the one farthest
  // from mu1.
  const ExtremeResult second = power_extreme(m, first.eigenvalue, opts, rng);
  if (!second.converged) {
    throw ConvergenceError("spectral_radius: shifted power iteration did not converge",
                           std::max(std::abs(first.eigenvalue), std::abs(second.eigenvalue)),
                           second.residual);
  }

  SpectralEstimate est;
  est.lambda_max_abs = std::max(std::abs(first.eigenvalue), std::abs(second.eigenvalue));
  est.iterations_used = first.iterations + second.iterations;
  est.residual = std::max(first.residual, second.residual);
  return est;
}

SpectralEstimate filter_spectral_radius(const SparseMatrix& adj, FilterKind kind,
                                        const PowerOptions& opts) {
  const FilterKind effective =
      kind == FilterKind::RandomWalk ? FilterKind::Normalized : kind;
  return spectral_radius(build_filter(adj, effective), opts);
}

std::vector<double> dense_symmetric_eigenvalues(const DenseMatrix& a) {
  if (a.rows != a.cols) {
    throw InputError("dense_symmetric_eigenvalues: matrix must be square");
  }
  const std::size_t n = a.rows;
  std::vector<double> w(a.data);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return w[i * n + j]; };

  double frob = std::sqrt(kernels::sum_sq(w.data(), w.size()));
  if (frob == 0.0) return std::vector<double>(n, 0.0);

  const std::size_t max_sweeps = 64;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (std::sqrt(2.0 * off) <= 1e-13 * frob) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double wkp = at(k, p);
          const double wkq = at(k, q);
          at(k, p) = c * wkp - s * wkq;
          at(k, q) = s * wkp + c * wkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double wpk = at(p, k);
          const double wqk = at(q, k);
          at(p, k) = c * wpk - s * wqk;
          at(q, k) = s * wpk + c * wqk;
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

namespace {

DenseMatrix to_dense(const SparseMatrix& m) {
  DenseMatrix d(m.n_rows, m.n_cols);
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    for (std::size_t k = m.row_offsets[i]; k < m.row_offsets[i + 1]; ++k) {
      d.at(i, m.col_indices[k]) = m.values[k];
    }
  }
  return d;
}

double dense_lambda_max_abs(const SparseMatrix& m) {
  const auto eig = dense_symmetric_eigenvalues(to_dense(m));
  return std::max(std::abs(eig.front()), std::abs(eig.back()));
}

}  // namespace

std::pair<double, double> ego_eigen_check(const SparseMatrix& adj, FilterKind kind,
                                          std::size_t node) {
  if (adj.n_rows != adj.n_cols) throw InputError("ego_eigen_check: matrix must be square");
  if (node >= adj.n_rows) throw InputError("ego_eigen_check: node index out of range");
  if (adj.n_rows > 200) {
    throw InputError("ego_eigen_check: graph too large for the dense eigensolve path");
  }
  // Random-walk filters share their spectrum with the normalized filter
  // (degree similarity transform), which keeps the dense solve symmetric.
  const FilterKind effective =
      kind == FilterKind::RandomWalk ? FilterKind::Normalized : kind;

  std::vector<std::size_t> nodes;
  nodes.push_back(node);
  for (std::size_t k = adj.row_offsets[node]; k < adj.row_offsets[node + 1]; ++k) {
    nodes.push_back(adj.col_indices[k]);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  const double ego = dense_lambda_max_abs(build_filter(induced_subgraph(adj, nodes), effective));
  const double full = dense_lambda_max_abs(build_filter(adj, effective));
  return {ego, full};
}

}  // namespace lpgcn
