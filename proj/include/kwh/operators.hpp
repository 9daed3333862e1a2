#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "kwh/grid.hpp"
#include "kwh/linalg.hpp"
#include "kwh/rng.hpp"

namespace kwh {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Dense operator on the grid space, stored as an N x N matrix.
struct BoundedOperator {
  GridSpec grid;
  ComplexMatrix matrix;
};

inline void check_vector_length(const GridSpec& grid, std::size_t len,
                                const char* what) {
  if (static_cast<long>(len) != grid.dimension())
    throw DimensionMismatchError(std::string(what) + ": vector length " +
                                 std::to_string(len) + " != grid dimension " +
                                 std::to_string(grid.dimension()));
}

/// Cyclic shift (T_a f)(t) = f((t - a) mod sizes); a permutation, unitary.
inline BoundedOperator translation_op(const GridSpec& grid,
                                      const std::vector<long>& a) {
  check_vector_length(grid, a.size(), "translation_op");
  const long n = grid.total();
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (long t = 0; t < n; ++t) {
    const long src = grid.flatten(grid.wrap_minus(grid.unflatten(t), a));
    m(t, src) = 1.0;
  }
  return {grid, std::move(m)};
}

inline std::complex<double> modulation_phase(const GridSpec& grid,
                                             const std::vector<double>& b,
                                             const std::vector<long>& t) {
  double arg = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j)
    arg += b[j] * static_cast<double>(t[j]) / static_cast<double>(grid.sizes[j]);
  return {std::cos(kTwoPi * arg), std::sin(kTwoPi * arg)};
}

/// Diagonal phase (E_b f)(t) = exp(2 pi i sum_j b_j t_j / N_j) f(t); integer b
/// gives the DFT characters.
inline BoundedOperator modulation_op(const GridSpec& grid,
                                     const std::vector<double>& b) {
  check_vector_length(grid, b.size(), "modulation_op");
  const long n = grid.total();
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (long t = 0; t < n; ++t)
    m(t, t) = modulation_phase(grid, b, grid.unflatten(t));
  return {grid, std::move(m)};
}

inline BoundedOperator identity_op(const GridSpec& grid) {
  return {grid, ComplexMatrix::Identity(grid.total(), grid.total())};
}

inline BoundedOperator zero_op(const GridSpec& grid) {
  return {grid, ComplexMatrix::Zero(grid.total(), grid.total())};
}

inline BoundedOperator adjoint(const BoundedOperator& t) {
  return {t.grid, t.matrix.adjoint()};
}

inline double operator_norm(const BoundedOperator& t) {
  return operator_norm_of(t.matrix);
}

inline Signal apply(const BoundedOperator& t, const Signal& f) {
  if (t.grid != f.grid) throw GridMismatchError("apply: grid mismatch");
  return {f.grid, t.matrix * f.values};
}

inline bool is_unitary(const BoundedOperator& t, double tol = 1e-10) {
  const long n = t.grid.total();
  return operator_norm_of(t.matrix.adjoint() * t.matrix -
                          ComplexMatrix::Identity(n, n)) <= tol;
}

/// Normalized multi-dimensional DFT matrix, F(t,s) = e^{2 pi i sum t_j s_j / N_j} / sqrt(N).
inline ComplexMatrix fourier_matrix(const GridSpec& grid) {
  const long n = grid.total();
  ComplexMatrix f(n, n);
  const double root = 1.0 / std::sqrt(static_cast<double>(n));
  for (long t = 0; t < n; ++t) {
    const std::vector<long> ti = grid.unflatten(t);
    for (long s = 0; s < n; ++s) {
      const std::vector<long> si = grid.unflatten(s);
      double arg = 0.0;
      for (long j = 0; j < grid.dimension(); ++j)
        arg += static_cast<double>(ti[j]) * static_cast<double>(si[j]) /
               static_cast<double>(grid.sizes[j]);
      f(t, s) = root * std::complex<double>(std::cos(kTwoPi * arg),
                                            std::sin(kTwoPi * arg));
    }
  }
  return f;
}

/// A commuting pair (K, U), both diagonal in the Fourier basis; U is bounded
/// away from zero (|entry| in [0.5, 2]), unit-modulus when unitary_u.
inline std::pair<BoundedOperator, BoundedOperator> fourier_diagonal_pair(
    const GridSpec& grid, std::uint64_t seed, bool unitary_u) {
  const long n = grid.total();
  Rng rng(derive_seed(seed, 0x464450ULL));  // "FDP"
  ComplexVector dk(n), du(n);
  for (long i = 0; i < n; ++i)
    dk(i) = rng.uniform(0.2, 2.0) * rng.unit_complex();
  for (long i = 0; i < n; ++i) {
    const double mag = unitary_u ? 1.0 : rng.uniform(0.5, 2.0);
    du(i) = mag * rng.unit_complex();
  }
  const ComplexMatrix f = fourier_matrix(grid);
  BoundedOperator k{grid, f * dk.asDiagonal() * f.adjoint()};
  BoundedOperator u{grid, f * du.asDiagonal() * f.adjoint()};
  return {std::move(k), std::move(u)};
}

}  // namespace kwh
