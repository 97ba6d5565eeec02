#include "qtube/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "qtube/error.hpp"
#include "qtube/kernels.hpp"

namespace qtube {

namespace {

using Vector = Eigen::VectorXd;
using ColSparse = Eigen::SparseMatrix<double>;
using Factor = Eigen::SimplicialLDLT<ColSparse, Eigen::Lower, Eigen::AMDOrdering<int>>;

std::span<const double> view(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<double> view(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

kernels::CsrView csr(const SparseMat& A) {
  kernels::CsrView v;
  v.rows = A.rows();
  v.outer = {A.outerIndexPtr(), static_cast<std::size_t>(A.rows() + 1)};
  v.inner = {A.innerIndexPtr(), static_cast<std::size_t>(A.nonZeros())};
  v.values = {A.valuePtr(), static_cast<std::size_t>(A.nonZeros())};
  return v;
}

Vector apply(const SparseMat& A, const Vector& x) {
  Vector y(A.rows());
  kernels::spmv(csr(A), view(x), view(y));
  return y;
}

struct Shifted {
  Factor factor;
  int negatives = 0;
};

void factorize(Shifted& s, const SparseMat& K, const SparseMat& M, double sigma) {
  ColSparse A = ColSparse(K) - sigma * ColSparse(M);
  s.factor.compute(A);
  if (s.factor.info() != Eigen::Success) fail(ErrorKind::Singular, "shifted factorization failed");
  const Vector D = s.factor.vectorD();
  s.negatives = static_cast<int>((D.array() < 0.0).count());
  if ((D.array() == 0.0).any()) fail(ErrorKind::Singular, "shift hits an eigenvalue");
}

struct LanczosOutcome {
  std::vector<double> values;
  std::vector<Vector> vectors;
  bool converged = false;
  int steps = 0;
  int restarts = 0;
};

// Lanczos for Op = (K - sigma M)^{-1} M, self-adjoint in the M inner product.
LanczosOutcome lanczos(const Shifted& shifted, const SparseMat& K, const SparseMat& M, double sigma, int m,
                       const Vector& start, const EigenOptions& opt, int step_cap) {
  const Eigen::Index n = K.rows();
  LanczosOutcome out;
  Vector q0 = start;
  const int kmax = static_cast<int>(std::min<Eigen::Index>(opt.max_krylov, n));
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    out.restarts = restart;
    std::vector<Vector> Q;
    std::vector<Vector> MQ;
    std::vector<double> alpha, beta;
    Vector Mq = apply(M, q0);
    double nrm = std::sqrt(kernels::dot(view(q0), view(Mq)));
    Q.push_back(q0 / nrm);
    MQ.push_back(Mq / nrm);
    Eigen::MatrixXd S;
    Vector theta;
    int j = 0;
    bool done = false;
    for (; j < kmax; ++j) {
      Vector w = shifted.factor.solve(MQ[j]);
      ++out.steps;
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t i = 0; i < Q.size(); ++i) {
          const double c = kernels::dot(view(w), view(MQ[i]));
          if (pass == 0 && i == static_cast<std::size_t>(j)) alpha.push_back(c);
          kernels::axpy(-c, view(Q[i]), view(w));
        }
      Vector Mw = apply(M, w);
      const double b = std::sqrt(std::max(kernels::dot(view(w), view(Mw)), 0.0));
      const int dim = j + 1;
      const bool check = dim >= m && (dim % 5 == 0 || dim == kmax || b < 1e-14);
      if (check) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) {
          T(i, i) = alpha[i];
          if (i + 1 < dim) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        theta = es.eigenvalues();
        S = es.eigenvectors();
        // Largest theta of Op correspond to the smallest lambda.
        bool ok = true;
        for (int i = 0; i < m; ++i) {
          const int col = dim - 1 - i;
          if (!(theta[col] > 0.0) || b * std::abs(S(dim - 1, col)) > opt.tolerance * std::abs(theta[col])) ok = false;
        }
        if (ok || b < 1e-14) {
          done = ok || b < 1e-14;
          j = dim;
          break;
        }
      }
      if (out.steps >= step_cap) {
        j = dim;
        break;
      }
      beta.push_back(b);
      Q.push_back(w / b);
      MQ.push_back(Mw / b);
    }
    const int dim = static_cast<int>(theta.size());
    if (dim == 0) break;
    out.values.clear();
    out.vectors.clear();
    for (int i = 0; i < m && i < dim; ++i) {
      const int col = dim - 1 - i;
      Vector y = Vector::Zero(n);
      for (int r = 0; r < dim; ++r) kernels::axpy(S(r, col), view(Q[r]), view(y));
      out.values.push_back(sigma + 1.0 / theta[col]);
      out.vectors.push_back(std::move(y));
    }
    if (done) {
      out.converged = true;
      return out;
    }
    if (out.steps >= step_cap) return out;
    // Explicit restart from the sum of the wanted Ritz vectors.
    q0 = Vector::Zero(n);
    for (const auto& v : out.vectors) q0 += v;
  }
  return out;
}

}  // namespace

int count_below(const SparseMat& K, const SparseMat& M, double sigma) {
  Shifted s;
  factorize(s, K, M, sigma);
  return s.negatives;
}

EigenResult lowest_eigenpairs(const SparseMat& K, const SparseMat& M, int m, const EigenOptions& options) {
  const Eigen::Index n = K.rows();
  if (K.cols() != n || M.rows() != n || M.cols() != n) fail(ErrorKind::DimensionError, "matrix sizes disagree");
  if (m < 1 || m > n) fail(ErrorKind::IndexError, "requested eigenpair count out of range");

  // Small problems: dense solve.
  if (n <= 64) {
    const Eigen::MatrixXd Kd(K), Md(M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kd, Md);
    if (es.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "dense generalized eigensolver failed");
    EigenResult res;
    for (int i = 0; i < m; ++i) {
      res.values.push_back(es.eigenvalues()[i]);
      Vector v = es.eigenvectors().col(i);
      const Vector Kv = apply(K, v);
      res.residuals.push_back((Kv - res.values.back() * apply(M, v)).norm() / std::max(Kv.norm(), 1e-300));
      res.vectors.push_back(std::move(v));
    }
    return res;
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  Vector start(n);
  for (Eigen::Index i = 0; i < n; ++i) start[i] = 1.0 + noise(rng);

  // Coarse pass: shift at zero, or below zero when K is only semidefinite.
  double sigma = 0.0;
  Shifted shifted;
  factorize(shifted, K, M, sigma);
  for (int tries = 0; shifted.negatives > 0 && tries < 60; ++tries) {
    sigma = sigma == 0.0 ? -1.0 : 2.0 * sigma;
    factorize(shifted, K, M, sigma);
  }
  EigenOptions coarse = options;
  coarse.tolerance = 1e-4;
  coarse.max_restarts = 4;
  LanczosOutcome first = lanczos(shifted, K, M, sigma, m, start, coarse, 400);
  if (first.values.empty()) fail(ErrorKind::NoConvergence, "Lanczos produced no Ritz values");

  // Move the shift just below the estimated bottom; Ritz values are upper
  // bounds, so confirm with the inertia that nothing lies below the shift.
  const double lam0 = first.values.front();
  double gap = std::max(1e-3 * std::abs(lam0), 1e-8);
  if (m > 1) gap = std::max(gap, 0.05 * (first.values.back() - lam0));
  double target = lam0 - gap;
  Shifted refined;
  factorize(refined, K, M, target);
  for (int tries = 0; refined.negatives > 0 && tries < 60; ++tries) {
    gap *= 2.0;
    target = lam0 - gap;
    factorize(refined, K, M, target);
  }
  if (refined.negatives > 0) fail(ErrorKind::NoConvergence, "could not place the shift below the spectrum");

  Vector restart_vec = Vector::Zero(n);
  for (const auto& v : first.vectors) restart_vec += v;
  LanczosOutcome fine = lanczos(refined, K, M, target, m, restart_vec, options, 100000);

  // The Ritz test bounds the shifted-inverse residual only; on fine meshes the
  // original residual can lag. A few subspace inverse-iteration steps with
  // Rayleigh-Ritz damp the high-frequency error.
  for (int polish = 0; polish < 4 && !fine.vectors.empty(); ++polish) {
    const int q = static_cast<int>(fine.vectors.size());
    double worst = 0.0;
    for (const auto& v : fine.vectors) {
      const double nrm = std::sqrt(v.dot(apply(M, v)));
      const Vector Kv = apply(K, v / nrm);
      const double lam = (v / nrm).dot(Kv);
      worst = std::max(worst, (Kv - lam * apply(M, v / nrm)).norm() / std::max(Kv.norm(), 1e-300));
    }
    if (worst < 0.1 * options.residual_target) break;
    Eigen::MatrixXd V(n, q);
    for (int i = 0; i < q; ++i) V.col(i) = refined.factor.solve(apply(M, fine.vectors[i]));
    Eigen::MatrixXd MV(n, q), KV(n, q);
    for (int i = 0; i < q; ++i) {
      MV.col(i) = apply(M, V.col(i));
      KV.col(i) = apply(K, V.col(i));
    }
    const Eigen::MatrixXd Ks = V.transpose() * KV, Ms = V.transpose() * MV;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> small(0.5 * (Ks + Ks.transpose()),
                                                                   0.5 * (Ms + Ms.transpose()));
    if (small.info() != Eigen::Success) break;
    for (int i = 0; i < q; ++i) {
      fine.vectors[i] = V * small.eigenvectors().col(i);
      fine.values[i] = small.eigenvalues()[i];
    }
  }

  EigenResult res;
  res.shift = target;
  res.below_shift = refined.negatives;
  res.iterations = first.steps + fine.steps;
  res.restarts = first.restarts + fine.restarts;
  std::vector<int> order(fine.values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return fine.values[a] < fine.values[b]; });
  for (int idx : order) {
    Vector v = fine.vectors[idx];
    const double nrm = std::sqrt(v.dot(apply(M, v)));
    v /= nrm;
    const Vector Kv = apply(K, v);
    // Rayleigh quotient is the better eigenvalue estimate for the final vector.
    const double lam = v.dot(Kv);
    res.values.push_back(lam);
    res.residuals.push_back((Kv - lam * apply(M, v)).norm() / std::max(Kv.norm(), 1e-300));
    res.vectors.push_back(std::move(v));
  }
  for (double r : res.residuals)
    if (!(r < options.residual_target))
      fail(ErrorKind::NoConvergence, "eigenpair residual above target after " + std::to_string(res.iterations) +
                                         " Lanczos steps");
  if (!fine.converged) fail(ErrorKind::NoConvergence, "Lanczos did not converge");
  return res;
}

}  // namespace qtube
