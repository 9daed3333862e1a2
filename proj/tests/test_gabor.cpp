#include <doctest.h>

#include <algorithm>

#include "kwh/gabor.hpp"
#include "kwh/kframe.hpp"
#include "kwh/suite.hpp"
#include "oracles.hpp"

using namespace kwh;

namespace {

Signal delta(const GridSpec& grid, long at = 0) {
  ComplexVector v = ComplexVector::Zero(grid.total());
  v(at) = 1.0;
  return {grid, v};
}

}  // namespace

TEST_CASE("lattice_shifts: arithmetic progression and full grid") {
  const GridSpec line{{64}};
  const auto prog = lattice_shifts({{8}}, line);
  REQUIRE(prog.size() == 8);
  for (long i = 0; i < 8; ++i) CHECK(prog[i] == std::vector<long>{8 * i});

  const auto all = lattice_shifts({{1}}, line);
  CHECK(all.size() == 64);

  const GridSpec plane{{8, 8}};
  const auto quad = lattice_shifts({{4, 0}, {0, 4}}, plane);
  const std::vector<std::vector<long>> expected{{0, 0}, {0, 4}, {4, 0}, {4, 4}};
  CHECK(quad == expected);

  CHECK_THROWS_AS(lattice_shifts({{0}}, line), SingularGeneratorError);
  CHECK_THROWS_AS(lattice_shifts({{1, 0}}, plane), DimensionMismatchError);
}

TEST_CASE("atoms: delta window over the full time-frequency set") {
  const GridSpec grid{{4}};
  std::vector<std::vector<double>> freqs;
  std::vector<std::vector<long>> shifts;
  for (long i = 0; i < 4; ++i) {
    freqs.push_back({static_cast<double>(i)});
    shifts.push_back({i});
  }
  const AtomMatrix v = atoms({grid, delta(grid), freqs, shifts});
  REQUIRE(v.columns.cols() == 16);
  // every atom is a phase-modulated shifted delta with unit norm
  const ComplexMatrix gram = v.columns.adjoint() * v.columns;
  for (int i = 0; i < 16; ++i)
    CHECK(std::abs(gram(i, i) - std::complex<double>(1.0)) <= 1e-12);
  // column (m,n) is supported at t = n with phase e^{2 pi i m n / 4}
  for (long m = 0; m < 4; ++m)
    for (long n = 0; n < 4; ++n) {
      const ComplexVector col = v.columns.col(v.col_index(m, n));
      CHECK(std::abs(col(n) - modulation_phase(grid, {double(m)}, {n})) <=
            1e-12);
    }
}

TEST_CASE("atoms: single atom equals the window; columns keep the window norm") {
  const GridSpec grid{{6}};
  Rng rng(3);
  const Signal g = gen::random_window(grid, rng);
  const AtomMatrix single = atoms({grid, g, {{0.0}}, {{0}}});
  CHECK((single.columns.col(0) - g.values).norm() <= 1e-14);

  const GaborSystem system = gen::random_frame_system(8, rng);
  const AtomMatrix v = atoms(system);
  for (long c = 0; c < v.columns.cols(); ++c)
    CHECK(v.columns.col(c).norm() ==
          doctest::Approx(system.window.norm()).epsilon(1e-12));
}

TEST_CASE("analysis/synthesis: canonical vectors and the frame identity") {
  const Example32 ex = example_3_2(16, 4, 0);
  Rng rng(5);

  // orthonormal atoms: analyzing the first atom gives the first basis vector
  Signal first{ex.system.grid, ex.atom_matrix.columns.col(0)};
  const ComplexVector c = analysis(ex.atom_matrix, first);
  CHECK(std::abs(c(0) - std::complex<double>(1.0)) <= 1e-10);
  CHECK(c.tail(c.size() - 1).norm() <= 1e-10);

  const Signal zero{ex.system.grid, ComplexVector::Zero(16)};
  CHECK(analysis(ex.atom_matrix, zero).norm() == 0.0);

  ComplexVector basis = ComplexVector::Zero(16);
  basis(5) = 1.0;
  CHECK((synthesis(ex.atom_matrix, basis).values -
         ex.atom_matrix.columns.col(5)).norm() <= 1e-14);
  CHECK(synthesis(ex.atom_matrix, ComplexVector::Zero(16)).values.norm() == 0.0);
  CHECK_THROWS_AS(synthesis(ex.atom_matrix, ComplexVector::Zero(3)),
                  LengthMismatchError);

  // synthesis(analysis(f)) = S f and ||V* f||^2 = <S f, f>
  const GaborSystem system = gen::random_frame_system(8, rng);
  const AtomMatrix v = atoms(system);
  const ComplexMatrix s = frame_operator(v).S;
  for (int trial = 0; trial < 5; ++trial) {
    const Signal f = random_signal(system.grid, rng);
    const Signal sf = synthesis(v, analysis(v, f));
    CHECK((sf.values - s * f.values).norm() <= 1e-10 * entry_scale(s));
    const double coeff = analysis(v, f).squaredNorm();
    const double quad = (f.values.adjoint() * s * f.values).real()(0, 0);
    CHECK(coeff == doctest::Approx(quad).epsilon(1e-10));
  }
}

TEST_CASE("frame_operator: Parseval, bilinear scaling, diagonal structure") {
  const Example32 ex = example_3_2(16, 4, 0);
  CHECK(operator_norm_of(frame_operator(ex.atom_matrix).S -
                         ComplexMatrix::Identity(16, 16)) <= 1e-10);

  Rng rng(17);
  GaborSystem system = gen::random_frame_system(8, rng);
  const ComplexMatrix s1 = frame_operator(atoms(system)).S;
  system.window.values *= 2.0;
  const ComplexMatrix s4 = frame_operator(atoms(system)).S;
  CHECK(operator_norm_of(s4 - 4.0 * s1) <= 1e-10 * entry_scale(s4));

  // full modulation set, single shift: S = N diag(|g|^2)
  const GridSpec grid{{6}};
  const Signal g = gen::random_window(grid, rng);
  const AtomMatrix v = atoms({grid, g, full_frequency_set(grid), {{0}}});
  const ComplexMatrix s = frame_operator(v).S;
  for (long i = 0; i < 6; ++i)
    for (long j = 0; j < 6; ++j) {
      const std::complex<double> expect =
          i == j ? 6.0 * std::norm(g.values(i)) : 0.0;
      CHECK(std::abs(s(i, j) - expect) <= 1e-10 * entry_scale(s));
    }
}

TEST_CASE("ordinary_frame_bounds: diagonal case and Rayleigh sampling") {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 0.5;
  d(1, 1) = 2.0;
  const auto [a, b] = ordinary_frame_bounds({d});
  CHECK(a == doctest::Approx(0.5));
  CHECK(b == doctest::Approx(2.0));

  CHECK(ordinary_frame_bounds({ComplexMatrix::Identity(4, 4)}).first ==
        doctest::Approx(1.0));

  Rng rng(19);
  const GaborSystem system = gen::random_frame_system(8, rng);
  const ComplexMatrix s = frame_operator(atoms(system)).S;
  const auto [lo, hi] = ordinary_frame_bounds({s});
  for (int trial = 0; trial < 10000; ++trial) {
    const Signal f = random_signal(system.grid, rng);
    const double q = (f.values.adjoint() * s * f.values).real()(0, 0) /
                     f.squared_norm();
    CHECK(q >= lo - 1e-9 * std::max(1.0, hi));
    CHECK(q <= hi + 1e-9 * std::max(1.0, hi));
  }
}

TEST_CASE("bessel_check: orthonormal atoms, repeated atom, consistency") {
  const Example32 ex = example_3_2(16, 4, 0);
  CHECK(bessel_check(ex.atom_matrix) == doctest::Approx(1.0).epsilon(1e-9));

  // M*P copies of one unit vector: Bessel bound M*P
  const GridSpec grid{{5}};
  const AtomMatrix repeated =
      atoms({grid, delta(grid), {{0.0}, {0.0}, {0.0}}, {{0}}});
  CHECK(bessel_check(repeated) == doctest::Approx(3.0).epsilon(1e-9));

  Rng rng(23);
  const GaborSystem system = gen::random_frame_system(10, rng);
  const AtomMatrix v = atoms(system);
  const double norm_v = operator_norm_of(v.columns);
  CHECK(bessel_check(v) == doctest::Approx(norm_v * norm_v).epsilon(1e-10));
}

TEST_CASE("uniform_density_check") {
  std::vector<std::pair<long, double>> integers;
  for (long n = -10; n <= 10; ++n) integers.emplace_back(n, double(n));
  const DensityCheck exact = uniform_density_check(integers, 1.0, 0.1);
  CHECK(exact.uniform);
  CHECK(exact.worst_deviation == doctest::Approx(0.0));

  std::vector<std::pair<long, double>> squares;
  for (long n = -10; n <= 10; ++n) squares.emplace_back(n, double(n * n));
  const DensityCheck quad = uniform_density_check(squares, 1.0, 10.0);
  CHECK_FALSE(quad.uniform);
  CHECK(quad.worst_deviation == doctest::Approx(110.0));  // |100 - (-10)|

  Rng rng(29);
  std::vector<std::pair<long, double>> jittered;
  for (long n = -12; n <= 12; ++n)
    jittered.emplace_back(n, double(n) / 2.0 + rng.uniform(-0.05, 0.05));
  CHECK(uniform_density_check(jittered, 2.0, 0.05).uniform);

  CHECK_THROWS_AS(uniform_density_check({}, 1.0, 1.0), EmptySequenceError);
}

TEST_CASE("periodization: cover, single shift, zero window, total mass") {
  const GridSpec grid{{64}};
  Signal block{grid, ComplexVector::Zero(64)};
  for (long t = 0; t < 8; ++t) block.values(t) = 1.0;
  std::vector<std::vector<long>> step8;
  for (long s = 0; s < 64; s += 8) step8.push_back({s});
  const Signal cover = periodization(block, step8);
  for (long t = 0; t < 64; ++t)
    CHECK(cover.values(t).real() == doctest::Approx(1.0));

  Rng rng(31);
  const Signal g = gen::random_window(GridSpec{{12}}, rng);
  const Signal self = periodization(g, {{0}});
  for (long t = 0; t < 12; ++t)
    CHECK(self.values(t).real() ==
          doctest::Approx(std::norm(g.values(t))).epsilon(1e-12));

  const Signal zero{GridSpec{{8}}, ComplexVector::Zero(8)};
  CHECK(periodization(zero, {{0}, {4}}).values.norm() == 0.0);
  CHECK_THROWS_AS(periodization(zero, {}), EmptyShiftsError);

  const auto shifts = gen::random_distinct_shifts(g.grid, 5, rng);
  const Signal p = periodization(g, shifts);
  CHECK(p.values.real().sum() ==
        doctest::Approx(5.0 * g.squared_norm()).epsilon(1e-10));
}

TEST_CASE("frame operator is invariant under relabeling the atom lists") {
  Rng rng(37);
  GaborSystem system = gen::random_frame_system(8, rng);
  const ComplexMatrix s = frame_operator(atoms(system)).S;
  std::reverse(system.frequencies.begin(), system.frequencies.end());
  std::reverse(system.shifts.begin(), system.shifts.end());
  const ComplexMatrix s2 = frame_operator(atoms(system)).S;
  CHECK((s - s2).cwiseAbs().maxCoeff() <= 1e-13 * entry_scale(s));
}

TEST_CASE("exponential_frame_bounds: full character set is tight") {
  const GridSpec grid{{12}};
  const auto [a, b] = exponential_frame_bounds(grid, full_frequency_set(grid),
                                               {0, 1, 2, 3, 4});
  CHECK(a == doctest::Approx(12.0).epsilon(1e-10));
  CHECK(b == doctest::Approx(12.0).epsilon(1e-10));
}

TEST_CASE("GaborSystem validation") {
  const GridSpec grid{{4}};
  GaborSystem dup{grid, delta(grid), {{0.0}}, {{1}, {5}}};  // 5 = 1 mod 4
  CHECK_THROWS(atoms(dup));
  GaborSystem zero{grid, {grid, ComplexVector::Zero(4)}, {{0.0}}, {{0}}};
  CHECK_THROWS(atoms(zero));
}
