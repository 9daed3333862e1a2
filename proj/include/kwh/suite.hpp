#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "kwh/gabor.hpp"
#include "kwh/kframe.hpp"
#include "kwh/linalg.hpp"
#include "kwh/operators.hpp"
#include "kwh/report.hpp"
#include "kwh/rng.hpp"

namespace kwh::gen {

inline ComplexMatrix random_matrix(long rows, long cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) m(i, j) = rng.complex_gaussian();
  return m;
}

inline ComplexMatrix random_hermitian(long n, Rng& rng) {
  const ComplexMatrix m = random_matrix(n, n, rng);
  return ((m + m.adjoint()) * 0.5).eval();
}

inline ComplexMatrix random_psd(long n, Rng& rng) {
  const ComplexMatrix m = random_matrix(n, n, rng);
  return (m * m.adjoint()).eval();
}

inline ComplexMatrix random_of_rank(long rows, long cols, long rank, Rng& rng) {
  if (rank == 0) return ComplexMatrix::Zero(rows, cols);
  return random_matrix(rows, rank, rng) * random_matrix(rank, cols, rng);
}

inline ComplexMatrix random_unitary(long n, Rng& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(n, n, rng));
  ComplexMatrix q = qr.householderQ();
  return q;
}

/// Invertible with singular values in [0.5, 2].
inline ComplexMatrix random_invertible(long n, Rng& rng) {
  const ComplexMatrix u = random_unitary(n, rng);
  const ComplexMatrix w = random_unitary(n, rng);
  RealVector sigma(n);
  for (long i = 0; i < n; ++i) sigma(i) = rng.uniform(0.5, 2.0);
  return u * sigma.asDiagonal() * w.adjoint();
}

inline Signal random_window(const GridSpec& grid, Rng& rng) {
  ComplexVector v(grid.total());
  // entries bounded away from zero so periodizations stay positive
  for (long t = 0; t < grid.total(); ++t)
    v(t) = rng.uniform(0.4, 1.5) * rng.unit_complex();
  return {grid, v};
}

inline std::vector<std::vector<long>> random_distinct_shifts(
    const GridSpec& grid, long count, Rng& rng) {
  std::set<long> flats;
  while (static_cast<long>(flats.size()) < count)
    flats.insert(static_cast<long>(rng.index(grid.total())));
  std::vector<std::vector<long>> shifts;
  for (long f : flats) shifts.push_back(grid.unflatten(f));
  return shifts;
}

/// Random irregular system on Z_n whose frame operator is well conditioned
/// (lambda_min >= 1e-3 lambda_max); rerolls frequencies until it is.
inline GaborSystem random_frame_system(long n, Rng& rng) {
  const GridSpec grid{{n}};
  for (int attempt = 0; attempt < 32; ++attempt) {
    const long p = 2 + static_cast<long>(rng.index(std::max<long>(1, n / 2)));
    const long m = (2 * n) / p + 2;
    std::vector<std::vector<double>> freqs;
    for (long i = 0; i < m; ++i)
      freqs.push_back({rng.uniform(0.0, static_cast<double>(n))});
    GaborSystem system{grid, random_window(grid, rng), freqs,
                       random_distinct_shifts(grid, p, rng)};
    const auto [a, b] = ordinary_frame_bounds(frame_operator(atoms(system)));
    if (a > 1e-3 * b) return system;
  }
  throw Error("random_frame_system: failed to draw a well-conditioned frame");
}

}  // namespace kwh::gen

namespace kwh {

struct SuiteOptions {
  std::uint64_t seed = 0;
  long size_cap = 32;
};

namespace suite_detail {

inline long capped(long want, long cap) { return std::min(want, cap); }

}  // namespace suite_detail

/// Every Invariants & Properties entry of the library modules, exercised at
/// desk scale with per-check derived random streams.
inline VerificationReport run_suite(const SuiteOptions& opt) {
  using suite_detail::capped;
  VerificationReport report;
  report.environment = {{"suite", "property"},
                        {"seed", opt.seed},
                        {"size_cap", opt.size_cap}};
  const long cap = std::max<long>(2, opt.size_cap);

  run_check(report, "eig_trace_identity", "frame operator spectra (Sec 1)",
            true, [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 1));
              rec.pass = true;
              double worst = 0.0;
              for (int trial = 0; trial < 20; ++trial) {
                const long n = capped(8, cap);
                const ComplexMatrix m = gen::random_hermitian(n, rng);
                const EigenResult eig = hermitian_eig(m);
                const double err =
                    std::abs(eig.eigenvalues.sum() - m.trace().real());
                const double lim = 1e-10 * entry_scale(m) * n;
                worst = std::max(worst, err - lim);
                if (err > lim) rec.pass = false;
              }
              rec.margin = -worst;
            });

  run_check(report, "svd_eig_consistency", "synthesis operator (Sec 3)", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 2));
              rec.pass = true;
              for (int trial = 0; trial < 20; ++trial) {
                const long rows = 2 + static_cast<long>(rng.index(capped(7, cap)));
                const long cols = 2 + static_cast<long>(rng.index(capped(7, cap)));
                const ComplexMatrix m = gen::random_matrix(rows, cols, rng);
                const SvdResult f = svd(m, kDefaultRankThreshold);
                const EigenResult gram = hermitian_eig((m.adjoint() * m).eval());
                for (long i = 0; i < std::min(rows, cols); ++i) {
                  const double lam =
                      gram.eigenvalues(gram.eigenvalues.size() - 1 - i);
                  const double sig = f.singular_values(i);
                  if (std::abs(sig - std::sqrt(std::max(0.0, lam))) >
                      1e-9 * std::max(1.0, sig))
                    rec.pass = false;
                }
              }
            });

  run_check(report, "penrose_identities", "pseudo-inverse (Sec 3)", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 3));
              rec.pass = true;
              double worst = 0.0;
              for (int trial = 0; trial < 100; ++trial) {
                const long rows = 2 + static_cast<long>(rng.index(6));
                const long cols = 2 + static_cast<long>(rng.index(6));
                const long rank = static_cast<long>(
                    rng.index(std::min(rows, cols) + 1));
                const ComplexMatrix m = gen::random_of_rank(rows, cols, rank, rng);
                const ComplexMatrix p = pseudo_inverse(m);
                const double scale = std::max(1.0, operator_norm_of(m));
                const double err = std::max(
                    {operator_norm_of(m * p * m - m),
                     operator_norm_of(p * m * p - p),
                     hermiticity_defect(m * p),
                     hermiticity_defect(p * m)});
                worst = std::max(worst, err / scale);
                if (err > 1e-10 * scale) rec.pass = false;
              }
              rec.margin = 1e-10 - worst;
            });

  run_check(report, "psd_two_sided_small_norm", "Prop 3.3", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 4));
              rec.pass = true;
              const double tol = 1e-8;
              for (int trial = 0; trial < 20; ++trial) {
                const long n = capped(6, cap);
                ComplexMatrix m = gen::random_hermitian(n, rng);
                const double norm = operator_norm_of(m);
                // both-sided PSD forces the norm under 2 tol scale
                if (psd_test(m, tol).positive &&
                    psd_test((-m).eval(), tol).positive) {
                  if (norm > 2 * tol * std::max(1.0, norm)) rec.pass = false;
                }
                // and a scaled-down copy must pass both
                const ComplexMatrix tiny = m * (tol / std::max(1.0, norm) * 0.5);
                if (!psd_test(tiny, tol).positive ||
                    !psd_test((-tiny).eval(), tol).positive)
                  rec.pass = false;
              }
            });

  run_check(report, "rayleigh_identity_denominator", "Def 3.1 Eq (3.1)", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 5));
              rec.pass = true;
              for (int trial = 0; trial < 20; ++trial) {
                const long n = capped(7, cap);
                const ComplexMatrix num = gen::random_psd(n, rng);
                const ComplexMatrix den = ComplexMatrix::Identity(n, n);
                const auto [lo, hi] = subspace_rayleigh_extremes(num, den);
                const EigenResult eig = hermitian_eig(num);
                if (std::abs(lo - eig.eigenvalues(0)) > 1e-12 ||
                    std::abs(hi - eig.eigenvalues(n - 1)) > 1e-12)
                  rec.pass = false;
              }
            });

  run_check(report, "modulation_translation_commutation", "Sec 2 operators",
            true, [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 6));
              rec.pass = true;
              for (int trial = 0; trial < 10; ++trial) {
                const GridSpec grid{{capped(12, cap)}};
                const long a = static_cast<long>(rng.index(grid.total()));
                // integer b: fractional modulations pick up an extra phase
                // across the cyclic wrap and the relation gains no single phase
                const double b = static_cast<double>(rng.index(grid.total()));
                const BoundedOperator t = translation_op(grid, {a});
                const BoundedOperator e = modulation_op(grid, {b});
                const std::complex<double> phase = modulation_phase(
                    grid, {b}, {a});  // e^{2 pi i b a / N}
                const double err = operator_norm_of(
                    e.matrix * t.matrix - phase * t.matrix * e.matrix);
                if (err > 1e-10 || std::abs(std::abs(phase) - 1.0) > 1e-12)
                  rec.pass = false;
              }
            });

  run_check(report, "structured_operators_unitary", "Sec 2 operators", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 7));
              rec.pass = true;
              for (int trial = 0; trial < 10; ++trial) {
                const GridSpec grid{{capped(9, cap)}};
                const long a = static_cast<long>(rng.index(grid.total()));
                const double b = rng.uniform(-4.0, 4.0);
                if (std::abs(operator_norm(translation_op(grid, {a})) - 1.0) >
                        1e-12 ||
                    std::abs(operator_norm(modulation_op(grid, {b})) - 1.0) >
                        1e-12)
                  rec.pass = false;
              }
            });

  run_check(report, "adjoint_involution", "Sec 3 adjoints", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 8));
              const GridSpec grid{{capped(8, cap)}};
              BoundedOperator t{grid,
                                gen::random_matrix(grid.total(), grid.total(), rng)};
              rec.pass = adjoint(adjoint(t)).matrix == t.matrix;
            });

  run_check(report, "fourier_pair_commutators", "Thm 3.8 precondition", true,
            [&](CheckRecord& rec) {
              rec.pass = true;
              double worst = 0.0;
              for (int trial = 0; trial < 5; ++trial) {
                const GridSpec grid{{capped(10, cap)}};
                const auto [k, u] = fourier_diagonal_pair(
                    grid, derive_seed(opt.seed, 9, trial), trial % 2 == 0);
                const double c1 =
                    operator_norm_of(u.matrix * k.matrix - k.matrix * u.matrix);
                const double c2 = operator_norm_of(
                    u.matrix * k.matrix.adjoint() - k.matrix.adjoint() * u.matrix);
                worst = std::max({worst, c1, c2});
                if (c1 > 1e-10 || c2 > 1e-10) rec.pass = false;
                if (trial % 2 == 0 && !is_unitary(u)) rec.pass = false;
              }
              rec.margin = 1e-10 - worst;
            });

  run_check(report, "parseval_orthonormal_atoms", "Example 3.2", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 10));
              const long l = 4;
              const long n = capped(16, cap) / l * l;
              const Example32 ex = example_3_2(std::max(l, n), l, 0);
              rec.pass = true;
              for (int trial = 0; trial < 100; ++trial) {
                const Signal f = random_signal(ex.system.grid, rng);
                const double sum = analysis(ex.atom_matrix, f).squaredNorm();
                if (std::abs(sum - f.squared_norm()) >
                    1e-10 * std::max(1.0, f.squared_norm()))
                  rec.pass = false;
              }
            });

  run_check(report, "frame_operator_factorization", "Sec 3 frame operator",
            true, [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 11));
              rec.pass = true;
              for (int trial = 0; trial < 5; ++trial) {
                const GaborSystem system =
                    gen::random_frame_system(capped(10, cap), rng);
                const AtomMatrix v = atoms(system);
                const ComplexMatrix s = frame_operator(v).S;
                ComplexMatrix direct =
                    ComplexMatrix::Zero(s.rows(), s.cols());
                for (long c = 0; c < v.columns.cols(); ++c)
                  direct += v.columns.col(c) * v.columns.col(c).adjoint();
                if ((s - direct).cwiseAbs().maxCoeff() >
                    1e-10 * entry_scale(s))
                  rec.pass = false;
                if (hermiticity_defect(s) > 1e-10 * entry_scale(s))
                  rec.pass = false;
              }
            });

  run_check(report, "bessel_equals_upper_bound", "Lemma 2.2", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 12));
              rec.pass = true;
              for (int trial = 0; trial < 10; ++trial) {
                const GaborSystem system =
                    gen::random_frame_system(capped(10, cap), rng);
                bessel_check(atoms(system));  // throws on disagreement
              }
            });

  run_check(report, "relabeling_invariance", "Def 3.1", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 13));
              rec.pass = true;
              for (int trial = 0; trial < 5; ++trial) {
                GaborSystem system =
                    gen::random_frame_system(capped(8, cap), rng);
                const ComplexMatrix s = frame_operator(atoms(system)).S;
                std::reverse(system.frequencies.begin(),
                             system.frequencies.end());
                std::reverse(system.shifts.begin(), system.shifts.end());
                const ComplexMatrix s2 = frame_operator(atoms(system)).S;
                if ((s - s2).cwiseAbs().maxCoeff() > 1e-13 * entry_scale(s))
                  rec.pass = false;
              }
            });

  run_check(report, "periodization_mass", "Thm 3.5", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 14));
              rec.pass = true;
              for (int trial = 0; trial < 10; ++trial) {
                const GridSpec grid{{capped(12, cap)}};
                const Signal g = gen::random_window(grid, rng);
                const long p_count =
                    1 + static_cast<long>(rng.index(grid.total()));
                const auto shifts =
                    gen::random_distinct_shifts(grid, p_count, rng);
                const Signal p = periodization(g, shifts);
                const double mass = p.values.real().sum();
                const double expected =
                    static_cast<double>(shifts.size()) * g.squared_norm();
                if (std::abs(mass - expected) > 1e-10 * std::max(1.0, expected))
                  rec.pass = false;
              }
            });

  run_check(report, "kframe_bound_optimality", "Prop 3.3", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 15));
              rec.pass = true;
              for (int trial = 0; trial < 10; ++trial) {
                const long n = capped(8, cap);
                const GaborSystem system = gen::random_frame_system(n, rng);
                const FrameOperatorMatrix s = frame_operator(atoms(system));
                const BoundedOperator k{GridSpec{{n}},
                                        gen::random_invertible(n, rng)};
                const KFrameReport kr = kframe_bounds(s, k);
                if (!kr.is_kframe()) {
                  rec.pass = false;
                  continue;
                }
                const auto [lo, hi] =
                    check_prop_3_3(kr.lower_bound, *kr.upper_k, s, k, 1e-8);
                const auto [lo_bumped, hi_unused] = check_prop_3_3(
                    kr.lower_bound * (1.0 + 1e-3), *kr.upper_k, s, k, 1e-8);
                (void)hi_unused;
                if (!lo.positive || !hi.positive || lo_bumped.positive)
                  rec.pass = false;
              }
            });

  run_check(report, "douglas_three_way_agreement", "Thm 2.3", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 16));
              rec.pass = true;
              double worst = 0.0;
              for (int trial = 0; trial < 200; ++trial) {
                const long rows = 3 + static_cast<long>(rng.index(6));
                const long cols2 = 2 + static_cast<long>(rng.index(5));
                const ComplexMatrix t2 = gen::random_of_rank(
                    rows, cols2, std::min(rows - 1, cols2), rng);
                ComplexMatrix t1;
                const bool include = trial % 2 == 0;
                if (include) {
                  t1 = t2 * gen::random_matrix(cols2, cols2, rng);
                } else {
                  // add a unit component outside range(T2)
                  const ComplexMatrix proj = t2 * pseudo_inverse(t2);
                  ComplexVector v = gen::random_matrix(rows, 1, rng).col(0);
                  v -= proj * v;
                  if (v.norm() < 1e-8) continue;
                  v.normalize();
                  t1 = t2 * gen::random_matrix(cols2, cols2, rng) +
                       v * gen::random_matrix(1, cols2, rng);
                }
                const DouglasReport dr = douglas_check(t1, t2, 1e-8);
                if (dr.range_included != include) rec.pass = false;
                if (include) {
                  const double res = operator_norm_of(t1 - t2 * *dr.factor);
                  worst = std::max(worst,
                                   res / std::max(1.0, operator_norm_of(t1)));
                  if (res > 1e-10 * std::max(1.0, operator_norm_of(t1)))
                    rec.pass = false;
                }
              }
              rec.margin = 1e-10 - worst;
            });

  run_check(report, "image_frame_inequality_chain", "Thm 3.7", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 17));
              rec.pass = true;
              for (int trial = 0; trial < 100; ++trial) {
                const long n = capped(8, cap);
                const GaborSystem system = gen::random_frame_system(n, rng);
                const BoundedOperator k{GridSpec{{n}},
                                        gen::random_matrix(n, n, rng)};
                const ImageFrameReport ir = image_frame_3_7(
                    atoms(system), k, derive_seed(opt.seed, 17, trial + 1), 100);
                if (!ir.verified) rec.pass = false;
              }
            });

  run_check(report, "homeomorphism_bound_sandwich", "Thm 3.8 Eq (3.8)", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 18));
              rec.pass = true;
              for (int trial = 0; trial < 100; ++trial) {
                const long n = capped(8, cap);
                const GaborSystem system = gen::random_frame_system(n, rng);
                const bool unitary = trial % 2 == 0;
                const auto [k, u] = fourier_diagonal_pair(
                    GridSpec{{n}}, derive_seed(opt.seed, 18, trial + 1), unitary);
                const BoundSandwich bs =
                    homeomorphism_3_8(atoms(system), k, u, 1e-8);
                if (!bs.general_lower_a || !bs.general_upper_b) rec.pass = false;
                if (unitary && !bs.unitary_equality) rec.pass = false;
              }
            });

  run_check(report, "unit_window_basis_coefficients", "Example 3.2", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 19));
              const long n = std::max<long>(8, capped(32, cap) / 8 * 8);
              const Example32 ex = example_3_2(n, std::min<long>(8, n), 3);
              rec.pass = true;
              for (int trial = 0; trial < 50; ++trial) {
                const Signal f = random_signal(ex.system.grid, rng);
                const double coeff = analysis(ex.atom_matrix, f).squaredNorm();
                const double shifted =
                    (ex.k.matrix * f.values).squaredNorm();
                const double ref = std::max(1.0, f.squared_norm());
                if (std::abs(coeff - f.squared_norm()) > 1e-10 * ref ||
                    std::abs(coeff - shifted) > 1e-10 * ref)
                  rec.pass = false;
              }
            });

  run_check(report, "kframe_scale_covariance", "Def 3.1 Eq (3.1)", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 20));
              rec.pass = true;
              for (int trial = 0; trial < 5; ++trial) {
                const long n = capped(8, cap);
                GaborSystem system = gen::random_frame_system(n, rng);
                const BoundedOperator k{GridSpec{{n}},
                                        gen::random_invertible(n, rng)};
                const KFrameReport base =
                    kframe_bounds(frame_operator(atoms(system)), k);
                const double c = rng.uniform(0.3, 2.5);
                system.window.values *= c;
                const KFrameReport scaled =
                    kframe_bounds(frame_operator(atoms(system)), k);
                const double c2 = c * c;
                if (!approx_eq(scaled.lower_bound, c2 * base.lower_bound, 1e-9) ||
                    !approx_eq(scaled.upper_std, c2 * base.upper_std, 1e-9) ||
                    !approx_eq(*scaled.upper_k, c2 * *base.upper_k, 1e-9))
                  rec.pass = false;
              }
            });

  run_check(report, "restricted_homeomorphism", "Sec 3 displays", true,
            [&](CheckRecord& rec) {
              Rng rng(derive_seed(opt.seed, 21));
              rec.pass = true;
              for (int trial = 0; trial < 10; ++trial) {
                const long n = capped(8, cap);
                const GaborSystem system = gen::random_frame_system(n, rng);
                const FrameOperatorMatrix s = frame_operator(atoms(system));
                const BoundedOperator k{GridSpec{{n}},
                                        gen::random_invertible(n, rng)};
                const KFrameReport kr = kframe_bounds(s, k);
                if (!kr.is_kframe()) {
                  rec.pass = false;
                  continue;
                }
                const RestrictionReport rr = restricted_homeomorphism_check(
                    s, k, kr.lower_bound, kr.upper_std,
                    derive_seed(opt.seed, 21, trial + 1), 100);
                if (!rr.pass) rec.pass = false;
              }
            });

  return report;
}

}  // namespace kwh
