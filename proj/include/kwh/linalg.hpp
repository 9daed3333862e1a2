#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "kwh/errors.hpp"

namespace kwh {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultRankThreshold = 1e-10;
inline constexpr double kHermiticityTol = 1e-10;

/// Largest entry magnitude; 1 for an all-zero matrix so relative tolerances
/// stay meaningful on degenerate inputs.
inline double entry_scale(const ComplexMatrix& m) {
  if (m.size() == 0) return 1.0;
  const double s = m.cwiseAbs().maxCoeff();
  return s > 0 ? s : 1.0;
}

inline void require_finite(const ComplexMatrix& m, const std::string& what) {
  if (!m.allFinite()) throw Error(what + ": non-finite entries");
}

/// Ascending real eigenvalues with orthonormal eigenvector columns.
struct EigenResult {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
};

struct SvdResult {
  RealVector singular_values;  // descending, nonnegative
  ComplexMatrix left;          // full U
  ComplexMatrix right;         // full W, M = U diag(sigma) W*
  Eigen::Index rank;           // #{sigma_i > rank_threshold * sigma_max}
};

inline double hermiticity_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline EigenResult hermitian_eig(const ComplexMatrix& m) {
  if (m.rows() != m.cols())
    throw NonSquareError("hermitian_eig: matrix is " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()));
  if (m.size() == 0) throw EmptyMatrixError("hermitian_eig: empty matrix");
  require_finite(m, "hermitian_eig");
  const double defect = hermiticity_defect(m);
  if (defect > kHermiticityTol * entry_scale(m))
    throw NotHermitianError("hermitian_eig: max asymmetry " +
                            std::to_string(defect));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      ((m + m.adjoint()) * 0.5).eval());
  if (solver.info() != Eigen::Success)
    throw Error("hermitian_eig: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline SvdResult svd(const ComplexMatrix& m, double rank_threshold) {
  if (m.size() == 0) throw EmptyMatrixError("svd: empty matrix");
  require_finite(m, "svd");
  Eigen::JacobiSVD<ComplexMatrix> solver(m, Eigen::ComputeFullU |
                                                Eigen::ComputeFullV);
  const RealVector sigma = solver.singularValues();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > rank_threshold * smax) ++rank;
  if (smax == 0.0) rank = 0;
  return {sigma, solver.matrixU(), solver.matrixV(), rank};
}

inline ComplexMatrix pseudo_inverse(const ComplexMatrix& m,
                                    double rank_threshold = kDefaultRankThreshold) {
  const SvdResult f = svd(m, rank_threshold);
  ComplexMatrix pinv = ComplexMatrix::Zero(m.cols(), m.rows());
  for (Eigen::Index i = 0; i < f.rank; ++i)
    pinv += (1.0 / f.singular_values(i)) * f.right.col(i) *
            f.left.col(i).adjoint();
  return pinv;
}

inline double operator_norm_of(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return svd(m, kDefaultRankThreshold).singular_values(0);
}

struct PsdResult {
  bool positive;
  double min_eigenvalue;
  ComplexVector witness;  // eigenvector of the violating eigenvalue when !positive

  explicit operator bool() const { return positive; }
};

/// PSD within a tolerance relative to the spectral scale of the matrix.
/// The all-zero matrix counts as PSD.
inline PsdResult psd_test(const ComplexMatrix& m, double tol) {
  const EigenResult eig = hermitian_eig(m);
  const double lo = eig.eigenvalues(0);
  const double hi = eig.eigenvalues(eig.eigenvalues.size() - 1);
  const double spectral = std::max(std::abs(lo), std::abs(hi));
  if (lo >= -tol * std::max(1.0, spectral)) return {true, lo, {}};
  return {false, lo, eig.eigenvectors.col(0)};
}

/// Orthonormal basis of the numerical range of a Hermitian PSD matrix.
inline ComplexMatrix range_basis(const ComplexMatrix& den,
                                 double rank_threshold,
                                 RealVector* kept_eigenvalues = nullptr) {
  const EigenResult eig = hermitian_eig(den);
  const double top = eig.eigenvalues(eig.eigenvalues.size() - 1);
  if (top <= 0)
    throw ZeroDenominatorError("range_basis: matrix is numerically zero");
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
    if (eig.eigenvalues(i) > rank_threshold * top) kept.push_back(i);
  ComplexMatrix q(den.rows(), static_cast<Eigen::Index>(kept.size()));
  RealVector lambda(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    q.col(static_cast<Eigen::Index>(j)) = eig.eigenvectors.col(kept[j]);
    lambda(static_cast<Eigen::Index>(j)) = eig.eigenvalues(kept[j]);
  }
  if (kept_eigenvalues) *kept_eigenvalues = lambda;
  return q;
}

/// Extremes of <Num f, f> / <Den f, f> restricted to range(Den): with Q an
/// orthonormal eigenbasis of the retained part of Den and D its eigenvalues,
/// the extreme eigenvalues of D^{-1/2} (Q* Num Q) D^{-1/2}.
inline std::pair<double, double> subspace_rayleigh_extremes(
    const ComplexMatrix& num, const ComplexMatrix& den,
    double rank_threshold = kDefaultRankThreshold) {
  if (num.rows() != den.rows() || num.cols() != den.cols())
    throw DimensionMismatchError("subspace_rayleigh_extremes: size mismatch");
  RealVector lambda;
  const ComplexMatrix q = range_basis(den, rank_threshold, &lambda);
  const RealVector scale = lambda.cwiseSqrt().cwiseInverse();
  const ComplexMatrix reduced =
      scale.asDiagonal() * (q.adjoint() * num * q) * scale.asDiagonal();
  const EigenResult eig = hermitian_eig(reduced);
  return {eig.eigenvalues(0), eig.eigenvalues(eig.eigenvalues.size() - 1)};
}

/// Relative range-inclusion residual ||(I - B B^dag) A|| / max(1, ||A||).
inline double range_inclusion_residual(const ComplexMatrix& a,
                                       const ComplexMatrix& b,
                                       double rank_threshold = kDefaultRankThreshold) {
  const ComplexMatrix proj = b * pseudo_inverse(b, rank_threshold);
  const ComplexMatrix residual =
      a - proj * a;
  return operator_norm_of(residual) / std::max(1.0, operator_norm_of(a));
}

}  // namespace kwh
