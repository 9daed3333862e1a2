#pragma once

#include <numeric>
#include <vector>

#include "kwh/linalg.hpp"
#include "kwh/rng.hpp"

namespace kwh {

/// Finite cyclic grid Z_{N1} x ... x Z_{Nd}; row-major flattening.
struct GridSpec {
  std::vector<long> sizes;

  long dimension() const { return static_cast<long>(sizes.size()); }

  long total() const {
    long n = 1;
    for (long s : sizes) n *= s;
    return n;
  }

  bool valid() const {
    if (sizes.empty()) return false;
    for (long s : sizes)
      if (s < 1) return false;
    return true;
  }

  long flatten(const std::vector<long>& idx) const {
    long flat = 0;
    for (std::size_t j = 0; j < sizes.size(); ++j)
      flat = flat * sizes[j] + idx[j];
    return flat;
  }

  std::vector<long> unflatten(long flat) const {
    std::vector<long> idx(sizes.size());
    for (std::size_t j = sizes.size(); j-- > 0;) {
      idx[j] = flat % sizes[j];
      flat /= sizes[j];
    }
    return idx;
  }

  // componentwise (t - a) mod sizes
  std::vector<long> wrap_minus(const std::vector<long>& t,
                               const std::vector<long>& a) const {
    std::vector<long> r(sizes.size());
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      long v = (t[j] - a[j]) % sizes[j];
      if (v < 0) v += sizes[j];
      r[j] = v;
    }
    return r;
  }

  std::vector<long> wrap(const std::vector<long>& t) const {
    return wrap_minus(t, std::vector<long>(sizes.size(), 0));
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Complex-valued function on the grid.
struct Signal {
  GridSpec grid;
  ComplexVector values;

  double norm() const { return values.norm(); }
  double squared_norm() const { return values.squaredNorm(); }
};

inline std::complex<double> inner(const Signal& f, const Signal& g) {
  if (f.grid != g.grid) throw GridMismatchError("inner: grid mismatch");
  // <f,g> = sum f(t) conj(g(t))
  return g.values.dot(f.values);
}

inline Signal random_signal(const GridSpec& grid, Rng& rng) {
  ComplexVector v(grid.total());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_gaussian();
  return {grid, v};
}

}  // namespace kwh
