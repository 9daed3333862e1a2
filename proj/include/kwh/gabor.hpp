#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kwh/linalg.hpp"
#include "kwh/operators.hpp"

namespace kwh {

/// Modulation-translation system: window g, frequency vectors {c_m} (real,
/// per-axis normalized by N_j) and integer shift vectors {b_n}.
struct GaborSystem {
  GridSpec grid;
  Signal window;
  std::vector<std::vector<double>> frequencies;  // M vectors of length d
  std::vector<std::vector<long>> shifts;         // P vectors of length d

  long num_frequencies() const { return static_cast<long>(frequencies.size()); }
  long num_shifts() const { return static_cast<long>(shifts.size()); }
  long num_atoms() const { return num_frequencies() * num_shifts(); }

  void validate() const {
    if (!grid.valid()) throw Error("GaborSystem: invalid grid");
    if (window.grid != grid) throw GridMismatchError("GaborSystem: window grid");
    if (frequencies.empty() || shifts.empty())
      throw Error("GaborSystem: needs at least one frequency and one shift");
    for (const auto& c : frequencies)
      check_vector_length(grid, c.size(), "GaborSystem frequency");
    std::set<long> seen;
    for (const auto& b : shifts) {
      check_vector_length(grid, b.size(), "GaborSystem shift");
      if (!seen.insert(grid.flatten(grid.wrap(b))).second)
        throw Error("GaborSystem: duplicate shift mod grid sizes");
    }
    if (window.norm() == 0.0) throw Error("GaborSystem: zero window");
  }
};

/// Synthesis matrix: column (m,n) is E_{c_m} T_{b_n} g.  Column order is
/// n fastest, m slower: col(m,n) = m * P + n.
struct AtomMatrix {
  GaborSystem system;
  ComplexMatrix columns;  // N x (M*P)

  long col_index(long m, long n) const { return m * system.num_shifts() + n; }
};

struct FrameOperatorMatrix {
  ComplexMatrix S;  // N x N, Hermitian PSD, S = V V*
};

struct DensityCheck {
  double density;          // D
  double slack;            // L
  bool uniform;            // max_n |lambda_n - n/D| <= L
  double worst_deviation;
};

/// Distinct points (generator * n) mod grid sizes, in lexicographic order.
inline std::vector<std::vector<long>> lattice_shifts(
    const std::vector<std::vector<long>>& generator, const GridSpec& grid) {
  const long d = grid.dimension();
  if (static_cast<long>(generator.size()) != d)
    throw DimensionMismatchError("lattice_shifts: generator is not d x d");
  Eigen::MatrixXd gen(d, d);
  for (long i = 0; i < d; ++i) {
    if (static_cast<long>(generator[i].size()) != d)
      throw DimensionMismatchError("lattice_shifts: generator is not d x d");
    for (long j = 0; j < d; ++j) gen(i, j) = static_cast<double>(generator[i][j]);
  }
  if (std::abs(gen.determinant()) < 0.5)
    throw SingularGeneratorError("lattice_shifts: zero determinant");

  // closure of {0} under adding generator columns mod sizes; integer lattices
  // always close on a cyclic grid
  std::set<long> seen;
  std::vector<long> frontier{grid.flatten(std::vector<long>(d, 0))};
  seen.insert(frontier[0]);
  while (!frontier.empty()) {
    const long point = frontier.back();
    frontier.pop_back();
    const std::vector<long> p = grid.unflatten(point);
    for (long j = 0; j < d; ++j) {
      std::vector<long> step(d);
      for (long i = 0; i < d; ++i) step[i] = p[i] + generator[i][j];
      const long next = grid.flatten(grid.wrap(step));
      if (seen.insert(next).second) frontier.push_back(next);
    }
  }
  std::vector<std::vector<long>> out;
  out.reserve(seen.size());
  for (long flat : seen) out.push_back(grid.unflatten(flat));
  std::sort(out.begin(), out.end());
  return out;
}

inline AtomMatrix atoms(const GaborSystem& system) {
  system.validate();
  const long n_grid = system.grid.total();
  const long p = system.num_shifts();
  ComplexMatrix cols(n_grid, system.num_atoms());
  for (long m = 0; m < system.num_frequencies(); ++m) {
    for (long n = 0; n < p; ++n) {
      const long col = m * p + n;
      for (long t = 0; t < n_grid; ++t) {
        const std::vector<long> ti = system.grid.unflatten(t);
        const long src = system.grid.flatten(
            system.grid.wrap_minus(ti, system.shifts[n]));
        cols(t, col) = modulation_phase(system.grid, system.frequencies[m], ti) *
                       system.window.values(src);
      }
    }
  }
  return {system, std::move(cols)};
}

/// Analysis coefficients {<f, E_{c_m} T_{b_n} g>}, ordered as the columns.
inline ComplexVector analysis(const AtomMatrix& v, const Signal& f) {
  if (f.grid != v.system.grid) throw GridMismatchError("analysis: grid mismatch");
  return v.columns.adjoint() * f.values;
}

inline Signal synthesis(const AtomMatrix& v, const ComplexVector& c) {
  if (c.size() != v.columns.cols())
    throw LengthMismatchError("synthesis: coefficient length " +
                              std::to_string(c.size()) + " != " +
                              std::to_string(v.columns.cols()));
  return {v.system.grid, v.columns * c};
}

inline FrameOperatorMatrix frame_operator(const AtomMatrix& v) {
  return {v.columns * v.columns.adjoint()};
}

/// Optimal ordinary bounds: extreme eigenvalues of S.  A > 0 iff the system
/// is a frame for the whole grid space.
inline std::pair<double, double> ordinary_frame_bounds(
    const FrameOperatorMatrix& s) {
  const EigenResult eig = hermitian_eig(s.S);
  return {eig.eigenvalues(0), eig.eigenvalues(eig.eigenvalues.size() - 1)};
}

/// Optimal Bessel bound ||V||^2; consistency-checked against lambda_max(S).
inline double bessel_check(const AtomMatrix& v) {
  const double norm_v = operator_norm_of(v.columns);
  const double bound = norm_v * norm_v;
  const double lmax = ordinary_frame_bounds(frame_operator(v)).second;
  if (std::abs(bound - lmax) > 1e-9 * std::max(1.0, lmax))
    throw Error("bessel_check: ||V||^2 disagrees with lambda_max(S): " +
                std::to_string(bound) + " vs " + std::to_string(lmax));
  return bound;
}

/// Uniform density test: |lambda_n - n/D| <= L over the given index range.
inline DensityCheck uniform_density_check(
    const std::vector<std::pair<long, double>>& sequence, double d, double l) {
  if (sequence.empty()) throw EmptySequenceError("uniform_density_check");
  if (d <= 0 || l <= 0) throw Error("uniform_density_check: D, L must be > 0");
  double worst = 0.0;
  for (const auto& [n, lambda] : sequence)
    worst = std::max(worst, std::abs(lambda - static_cast<double>(n) / d));
  return {d, l, worst <= l, worst};
}

/// p(t) = sum_n |g((t - b_n) mod sizes)|^2, real-valued and nonnegative.
inline Signal periodization(const Signal& g,
                            const std::vector<std::vector<long>>& shifts) {
  if (shifts.empty()) throw EmptyShiftsError("periodization: no shifts");
  const long n_grid = g.grid.total();
  ComplexVector p = ComplexVector::Zero(n_grid);
  for (const auto& b : shifts) {
    check_vector_length(g.grid, b.size(), "periodization shift");
    for (long t = 0; t < n_grid; ++t) {
      const long src = g.grid.flatten(g.grid.wrap_minus(g.grid.unflatten(t), b));
      p(t) += std::norm(g.values(src));
    }
  }
  return {g.grid, std::move(p)};
}

/// Ordinary frame bounds of the exponential family {E_{c_m}} viewed on the
/// given support set (rows restricted to support points).
inline std::pair<double, double> exponential_frame_bounds(
    const GridSpec& grid, const std::vector<std::vector<double>>& frequencies,
    const std::vector<long>& support) {
  if (support.empty()) throw EmptySequenceError("exponential_frame_bounds");
  const long m_count = static_cast<long>(frequencies.size());
  ComplexMatrix e(static_cast<long>(support.size()), m_count);
  for (long m = 0; m < m_count; ++m)
    for (std::size_t r = 0; r < support.size(); ++r)
      e(static_cast<long>(r), m) =
          modulation_phase(grid, frequencies[m], grid.unflatten(support[r]));
  const EigenResult eig = hermitian_eig((e * e.adjoint()).eval());
  return {eig.eigenvalues(0), eig.eigenvalues(eig.eigenvalues.size() - 1)};
}

/// All grid points as integer frequency vectors: the full DFT character set.
inline std::vector<std::vector<double>> full_frequency_set(const GridSpec& grid) {
  std::vector<std::vector<double>> freqs;
  freqs.reserve(grid.total());
  for (long m = 0; m < grid.total(); ++m) {
    const std::vector<long> mi = grid.unflatten(m);
    freqs.emplace_back(mi.begin(), mi.end());
  }
  return freqs;
}

inline std::vector<long> window_support(const Signal& g, double rel_tol = 1e-14) {
  const double top = g.values.cwiseAbs().maxCoeff();
  std::vector<long> support;
  for (long t = 0; t < g.grid.total(); ++t)
    if (std::abs(g.values(t)) > rel_tol * top) support.push_back(t);
  return support;
}

}  // namespace kwh
