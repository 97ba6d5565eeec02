#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Sparse>

namespace qtube {

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

struct EigenOptions {
  int max_krylov = 160;
  int max_restarts = 40;
  double tolerance = 1e-10;   // Ritz convergence
  double residual_target = 1e-8;
  std::uint64_t seed = 1;
};

/// m smallest eigenpairs of K v = lambda M v (K symmetric, M SPD), in
/// ascending order, vectors M-normalized.
struct EigenResult {
  std::vector<double> values;
  std::vector<Eigen::VectorXd> vectors;
  std::vector<double> residuals;  // |K v - lambda M v| / |K v|
  double shift = 0.0;
  int below_shift = 0;  // inertia of K - shift M
  int iterations = 0;
  int restarts = 0;
};

/// Shift-invert Lanczos in the M inner product with full
/// reorthogonalization. A coarse pass at shift 0 locates the bottom of the
/// spectrum; the shift is then moved just below it, confirmed by the inertia
/// of the LDL^T factorization. NoConvergence if the residual target is missed.
EigenResult lowest_eigenpairs(const SparseMat& K, const SparseMat& M, int m, const EigenOptions& options = {});

/// Number of negative pivots of K - sigma M (eigenvalues below sigma).
int count_below(const SparseMat& K, const SparseMat& M, double sigma);

}  // namespace qtube
