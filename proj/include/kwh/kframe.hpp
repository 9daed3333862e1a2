#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kwh/gabor.hpp"
#include "kwh/linalg.hpp"
#include "kwh/operators.hpp"

namespace kwh {

inline constexpr double kVerdictTol = 1e-8;

/// Optimal constants of a system relative to K.  Three conventions are
/// carried side by side:
///   lower_bound (A):  largest A with A ||K* f||^2 <= <S f, f> on range(K)
///   upper_std  (B):  lambda_max(S), the upper constant against ||f||^2
///   upper_k (B_K):   smallest B with <S f, f> <= B ||K f||^2, finite only
///                    when ker(K) is contained in ker(S)
struct KFrameReport {
  enum class Status { KFrame, BesselOnlyStd, Degenerate };

  Status status = Status::Degenerate;
  double lower_bound = 0.0;
  double upper_std = 0.0;
  std::optional<double> upper_k;   // absent = infeasible
  bool lower_feasible = false;     // range(K) inside range(S)
  std::string degenerate_reason;
  Eigen::Index k_rank = 0;
  double s_min = 0.0, s_max = 0.0;

  bool is_kframe() const { return status == Status::KFrame; }
};

struct DouglasReport {
  bool range_included = false;
  bool majorized = false;
  bool factor_exists = false;
  std::optional<ComplexMatrix> factor;
  std::optional<double> lambda;  // least lambda >= 0 with T1 T1* <= lambda^2 T2 T2*
  double range_residual = 0.0;
  double factor_residual = 0.0;
};

struct SufficiencyReport {
  double p_min = 0.0, p_max = 0.0;
  double norm_k = 0.0;
  bool admissible = false;
  double exp_lower = 0.0, exp_upper = 0.0;  // A1, B1 of the exponential system
  double implied_lower = 0.0;               // A1 * p_min * ||K||^-2
  double implied_upper = 0.0;               // B1 * p_max (= B1 * B * ||K||^-2)
  std::optional<KFrameReport> report;
  bool verified = false;
};

struct NecessityReport {
  bool pass = false;
  double bound = 0.0;         // (B / A0) ||K||^2
  double worst_margin = 0.0;  // bound - max_t p(t)
};

struct BoundSandwich {
  double lower_original = 0.0, upper_original = 0.0;      // A1, B1
  double lower_transformed = 0.0, upper_transformed = 0.0;  // A2, B2
  double norm_u = 0.0, norm_u_inverse = 0.0;
  bool general_lower_a = false;   // A2 >= A1 ||U^-1||^-2 (required)
  bool general_upper_b = false;   // B2 <= B1 ||U||^2     (required)
  bool paper_upper_a = false;     // A2 <= A1 ||U^-1||^2  (informational)
  bool paper_lower_b = false;     // B2 >= B1 ||U||^-2    (informational)
  bool unitary_equality = false;  // A2 = A1 and B2 = B1, reported when U unitary
  bool u_unitary = false;
};

struct RestrictionReport {
  bool pass = false;
  double worst_margin = std::numeric_limits<double>::infinity();
};

inline bool approx_ge(double a, double b, double tol = kVerdictTol) {
  return a >= b - tol * std::max({std::abs(a), std::abs(b), 1.0});
}

inline bool approx_le(double a, double b, double tol = kVerdictTol) {
  return approx_ge(b, a, tol);
}

inline bool approx_eq(double a, double b, double tol = kVerdictTol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1.0});
}

inline KFrameReport kframe_bounds(const FrameOperatorMatrix& s,
                                  const BoundedOperator& k,
                                  double rank_threshold = kDefaultRankThreshold) {
  if (s.S.rows() != k.matrix.rows())
    throw GridMismatchError("kframe_bounds: operator size mismatch");

  KFrameReport report;
  const EigenResult s_eig = hermitian_eig(s.S);
  report.s_min = s_eig.eigenvalues(0);
  report.s_max = s_eig.eigenvalues(s_eig.eigenvalues.size() - 1);
  report.upper_std = report.s_max;

  const SvdResult k_svd = svd(k.matrix, rank_threshold);
  report.k_rank = k_svd.rank;
  if (k_svd.rank == 0) {
    report.status = KFrameReport::Status::Degenerate;
    report.degenerate_reason = "K=0: lower inequality vacuous";
    return report;
  }

  const ComplexMatrix kks = k.matrix * k.matrix.adjoint();
  report.lower_bound = subspace_rayleigh_extremes(s.S, kks, rank_threshold).first;
  // a positive lower constant valid for every f needs range(K) inside range(S)
  report.lower_feasible =
      report.s_max > 0 &&
      range_inclusion_residual(k.matrix, s.S, rank_threshold) <= kVerdictTol;

  // B_K is finite only if S annihilates ker(K)
  bool upper_k_feasible = true;
  if (k_svd.rank < k.matrix.cols()) {
    const ComplexMatrix kernel =
        k_svd.right.rightCols(k.matrix.cols() - k_svd.rank);
    upper_k_feasible = operator_norm_of(s.S * kernel) <=
                       kVerdictTol * std::max(1.0, report.s_max);
  }
  if (upper_k_feasible) {
    const ComplexMatrix ksk = k.matrix.adjoint() * k.matrix;
    report.upper_k = subspace_rayleigh_extremes(s.S, ksk, rank_threshold).second;
  }

  report.status = (report.lower_feasible && report.lower_bound > 0 &&
                   report.upper_k.has_value())
                      ? KFrameReport::Status::KFrame
                      : KFrameReport::Status::BesselOnlyStd;
  return report;
}

/// A KK* <= S <= B K*K as a pair of PSD tests on the differences.
inline std::pair<PsdResult, PsdResult> check_prop_3_3(double a, double b,
                                                      const FrameOperatorMatrix& s,
                                                      const BoundedOperator& k,
                                                      double tol) {
  if (a <= 0 || b <= 0) throw Error("check_prop_3_3: bounds must be positive");
  const ComplexMatrix kks = k.matrix * k.matrix.adjoint();
  const ComplexMatrix ksk = k.matrix.adjoint() * k.matrix;
  return {psd_test((s.S - a * kks).eval(), tol),
          psd_test((b * ksk - s.S).eval(), tol)};
}

/// Douglas equivalence, checked three independent ways:
/// (i) range inclusion via the orthogonal projector onto range(T2),
/// (ii) majorization T1 T1* <= lambda^2 T2 T2*,
/// (iii) existence of a factor S with T1 = T2 S.
inline DouglasReport douglas_check(const ComplexMatrix& t1,
                                   const ComplexMatrix& t2, double tol,
                                   double rank_threshold = kDefaultRankThreshold) {
  if (t1.rows() != t2.rows())
    throw DimensionMismatchError("douglas_check: output dimension mismatch");
  DouglasReport report;

  const double scale1 = std::max(1.0, operator_norm_of(t1));
  const ComplexMatrix t2_pinv = pseudo_inverse(t2, rank_threshold);
  const ComplexMatrix proj = t2 * t2_pinv;  // orthogonal projector onto range(T2)

  report.range_residual = operator_norm_of(t1 - proj * t1) / scale1;
  report.range_included = report.range_residual <= tol;

  const ComplexMatrix factor = t2_pinv * t1;
  report.factor_residual = operator_norm_of(t1 - t2 * factor) / scale1;
  report.factor_exists = report.factor_residual <= tol;
  if (report.factor_exists) report.factor = factor;

  const ComplexMatrix g1 = t1 * t1.adjoint();
  const ComplexMatrix g2 = t2 * t2.adjoint();
  const double g2_norm = operator_norm_of(g2);
  if (g2_norm <= 0) {
    report.majorized = operator_norm_of(g1) <= tol;
    if (report.majorized) report.lambda = 0.0;
  } else {
    const double compat =
        operator_norm_of(g1 - proj * g1 * proj) / std::max(1.0, operator_norm_of(g1));
    report.majorized = compat <= tol;
    if (report.majorized) {
      if (operator_norm_of(g1) <= tol * scale1 * scale1) {
        report.lambda = 0.0;
      } else {
        report.lambda =
            std::sqrt(std::max(0.0,
                               subspace_rayleigh_extremes(g1, g2, rank_threshold)
                                   .second));
      }
    }
  }

  if (report.range_included != report.majorized ||
      report.range_included != report.factor_exists)
    throw InconsistentVerdictsError(
        "douglas_check: verdicts disagree (range " +
        std::to_string(report.range_included) + ", majorization " +
        std::to_string(report.majorized) + ", factor " +
        std::to_string(report.factor_exists) +
        "); tolerance likely misconfigured");
  return report;
}

inline DouglasReport douglas_check(const BoundedOperator& t1,
                                   const BoundedOperator& t2, double tol,
                                   double rank_threshold = kDefaultRankThreshold) {
  return douglas_check(t1.matrix, t2.matrix, tol, rank_threshold);
}

struct RangeCharacterization {
  bool range_included = false;
  bool kframe_lower = false;
  bool agree = false;
};

/// Range(K) inside Range(V)  iff  the system admits a positive lower K-frame
/// constant; both sides computed independently.
inline RangeCharacterization thm_3_4_check(const AtomMatrix& v,
                                           const BoundedOperator& k,
                                           double tol = kVerdictTol,
                                           double rank_threshold = kDefaultRankThreshold) {
  RangeCharacterization rc;
  rc.range_included =
      range_inclusion_residual(k.matrix, v.columns, rank_threshold) <= tol;
  const KFrameReport report = kframe_bounds(frame_operator(v), k, rank_threshold);
  rc.kframe_lower = report.lower_feasible && report.lower_bound > 0;
  rc.agree = (rc.range_included == rc.kframe_lower);
  return rc;
}

/// Periodization-based sufficient condition: with the full DFT character set
/// as frequencies, p_min > 0 makes the system a K-frame with lower constant
/// at least A1 * p_min * ||K||^-2 and standard upper constant at most
/// B1 * p_max.
inline SufficiencyReport sufficient_condition_3_5(
    const Signal& g, const std::vector<std::vector<long>>& shifts,
    const BoundedOperator& k, double rank_threshold = kDefaultRankThreshold) {
  if (shifts.empty()) throw EmptyShiftsError("sufficient_condition_3_5");
  SufficiencyReport out;
  const Signal p = periodization(g, shifts);
  out.p_min = p.values.real().minCoeff();
  out.p_max = p.values.real().maxCoeff();
  out.norm_k = operator_norm(k);
  out.admissible = out.p_min > kVerdictTol * std::max(1.0, out.p_max) &&
                   out.norm_k > 0;
  if (!out.admissible) return out;

  const auto freqs = full_frequency_set(g.grid);
  const auto [a1, b1] =
      exponential_frame_bounds(g.grid, freqs, window_support(g));
  out.exp_lower = a1;
  out.exp_upper = b1;
  out.implied_lower = a1 * out.p_min / (out.norm_k * out.norm_k);
  out.implied_upper = b1 * out.p_max;

  GaborSystem system{g.grid, g, freqs, shifts};
  const KFrameReport report =
      kframe_bounds(frame_operator(atoms(system)), k, rank_threshold);
  out.verified = report.is_kframe() &&
                 approx_ge(report.lower_bound, out.implied_lower) &&
                 approx_le(report.upper_std, out.implied_upper);
  out.report = report;
  return out;
}

/// Necessary condition: a K-frame's periodization is bounded by
/// (B / A0) ||K||^2, with B the optimal upper constant against ||K f||^2 and
/// A0 a computed lower bound of the exponential system.
inline NecessityReport necessary_condition_3_6(
    const AtomMatrix& v, const BoundedOperator& k, double exp_lower,
    double rank_threshold = kDefaultRankThreshold) {
  if (exp_lower <= 0)
    throw Error("necessary_condition_3_6: exponential lower bound must be > 0");
  const KFrameReport report = kframe_bounds(frame_operator(v), k, rank_threshold);
  if (!report.is_kframe())
    throw NotAKFrameError("necessary_condition_3_6: system is not a K-frame");
  const Signal p = periodization(v.system.window, v.system.shifts);
  NecessityReport out;
  const double nk = operator_norm(k);
  out.bound = (*report.upper_k / exp_lower) * nk * nk;
  const double p_max = p.values.real().maxCoeff();
  out.worst_margin = out.bound - p_max;
  out.pass = p_max <= out.bound + 1e-9 * std::max(1.0, out.bound);
  return out;
}

struct ImageFrameReport {
  ComplexMatrix transformed;  // columns K * phi_mn
  bool verified = false;
  double lower_used = 0.0, upper_used = 0.0;  // ordinary (A, B) of the source frame
};

/// Image of a standard frame under K: verifies
/// A ||K* f||^2 <= sum |<f, K phi>|^2 <= B ||K||^2 ||f||^2 on random signals.
inline ImageFrameReport image_frame_3_7(const AtomMatrix& v,
                                        const BoundedOperator& k,
                                        std::uint64_t seed = 0,
                                        long trials = 100) {
  const auto [a, b] = ordinary_frame_bounds(frame_operator(v));
  if (a <= kDefaultRankThreshold * std::max(1.0, b))
    throw NotAFrameError("image_frame_3_7: source system is not a frame");
  ImageFrameReport out;
  out.lower_used = a;
  out.upper_used = b;
  out.transformed = k.matrix * v.columns;
  const double nk = operator_norm(k);
  const ComplexMatrix k_adj = k.matrix.adjoint();
  Rng rng(derive_seed(seed, 0x333700ULL));
  out.verified = true;
  for (long i = 0; i < trials; ++i) {
    const Signal f = random_signal(v.system.grid, rng);
    const double mid = (out.transformed.adjoint() * f.values).squaredNorm();
    const double lhs = a * (k_adj * f.values).squaredNorm();
    const double rhs = b * nk * nk * f.values.squaredNorm();
    const double tol = 1e-9 * std::max(1.0, rhs);
    if (lhs > mid + tol || mid > rhs + tol) out.verified = false;
  }
  return out;
}

/// Best-bound sandwich under an invertible U commuting with K and K*.
/// A uses the lower convention against ||K* f||^2, B the standard upper
/// against ||f||^2; both recomputed from scratch for the transformed system.
inline BoundSandwich homeomorphism_3_8(const AtomMatrix& v,
                                       const BoundedOperator& k,
                                       const BoundedOperator& u, double tol,
                                       double rank_threshold = kDefaultRankThreshold) {
  const SvdResult u_svd = svd(u.matrix, rank_threshold);
  const double u_max = u_svd.singular_values(0);
  const double u_min = u_svd.singular_values(u_svd.singular_values.size() - 1);
  if (u_min <= rank_threshold * u_max)
    throw NotInvertibleError("homeomorphism_3_8: U is singular");
  const double comm_scale =
      std::max(1.0, u_max * operator_norm(k));
  const double c1 = operator_norm_of(u.matrix * k.matrix - k.matrix * u.matrix);
  const double c2 = operator_norm_of(u.matrix * k.matrix.adjoint() -
                                     k.matrix.adjoint() * u.matrix);
  if (c1 > tol * comm_scale || c2 > tol * comm_scale)
    throw NonCommutingError("homeomorphism_3_8: commutators " +
                            std::to_string(c1) + ", " + std::to_string(c2));

  BoundSandwich out;
  out.norm_u = u_max;
  out.norm_u_inverse = 1.0 / u_min;
  out.u_unitary = is_unitary(u);

  const KFrameReport original = kframe_bounds(frame_operator(v), k, rank_threshold);
  AtomMatrix transformed = v;
  transformed.columns = u.matrix * v.columns;
  const KFrameReport moved =
      kframe_bounds(frame_operator(transformed), k, rank_threshold);

  out.lower_original = original.lower_bound;
  out.upper_original = original.upper_std;
  out.lower_transformed = moved.lower_bound;
  out.upper_transformed = moved.upper_std;

  const double nu2 = u_max * u_max;
  const double nui2 = out.norm_u_inverse * out.norm_u_inverse;
  // the universal lower estimate scales by the smallest singular value of U:
  // <U S U* f, f> = <S U*f, U*f> >= A1 ||K* U* f||^2 >= A1 ||U^-1||^-2 ||K* f||^2
  // (U* preserves range(K) because U commutes with K and K*).  The sharper
  // looking A1 ||U||^-2 only holds when U is unitary, where the two agree.
  out.general_lower_a = approx_ge(out.lower_transformed, out.lower_original / nui2);
  out.general_upper_b = approx_le(out.upper_transformed, out.upper_original * nu2);
  out.paper_upper_a = approx_le(out.lower_transformed, out.lower_original * nui2);
  out.paper_lower_b = approx_ge(out.upper_transformed, out.upper_original / nu2);
  out.unitary_equality =
      out.u_unitary && approx_eq(out.lower_transformed, out.lower_original) &&
      approx_eq(out.upper_transformed, out.upper_original);
  return out;
}

/// S restricted to range(K) is a homeomorphism onto its image:
///   B^-1 ||f|| <= ||S^-1 f|| <= A^-1 ||K^dag||^2 ||f||  on S(range(K)),
///   A ||K^dag||^-2 ||f||^2 <= <S f, f> <= B ||f||^2     on range(K).
inline RestrictionReport restricted_homeomorphism_check(
    const FrameOperatorMatrix& s, const BoundedOperator& k, double a, double b,
    std::uint64_t seed = 0, long trials = 100,
    double rank_threshold = kDefaultRankThreshold) {
  if (a <= 0 || b <= 0)
    throw NotAKFrameError("restricted_homeomorphism_check: bounds not positive");
  const double pinv_norm = operator_norm_of(pseudo_inverse(k.matrix, rank_threshold));
  Rng rng(derive_seed(seed, 0x524843ULL));
  RestrictionReport out;
  out.pass = true;
  for (long i = 0; i < trials; ++i) {
    const Signal x = random_signal(k.grid, rng);
    const ComplexVector h = k.matrix * x.values;  // element of range(K)
    const double hn = h.norm();
    if (hn < 1e-12) continue;
    const ComplexVector f = s.S * h;  // element of S(range(K))
    const double fn = f.norm();

    const double lower = fn / b;
    const double upper = pinv_norm * pinv_norm * fn / a;
    const double tol = 1e-9 * std::max({1.0, lower, upper, hn});
    out.worst_margin = std::min({out.worst_margin, hn - lower, upper - hn});
    if (hn < lower - tol || hn > upper + tol) out.pass = false;

    const double quad = (h.adjoint() * s.S * h).real()(0, 0);
    const double quad_lo = a / (pinv_norm * pinv_norm) * hn * hn;
    const double quad_hi = b * hn * hn;
    const double quad_tol = 1e-9 * std::max({1.0, quad_lo, quad_hi});
    out.worst_margin = std::min({out.worst_margin, quad - quad_lo, quad_hi - quad});
    if (quad < quad_lo - quad_tol || quad > quad_hi + quad_tol) out.pass = false;
  }
  return out;
}

struct Example32 {
  GaborSystem system;
  AtomMatrix atom_matrix;
  BoundedOperator k;
  KFrameReport report;
};

/// Discrete unit-interval Gabor basis: unit-norm indicator window of length L
/// on Z_N, shifts {0, L, ..., N-L}, frequencies {0, N/L, ..., (L-1) N/L}
/// (the characters e^{2 pi i m t / L}); K is the cyclic translation by xi.
/// The atoms form an orthonormal basis, so the optimal constants are 1.
inline Example32 example_3_2(long n, long l, long xi) {
  if (n < 1 || l < 1 || n % l != 0)
    throw NonDividingError("example_3_2: L must divide N");
  const GridSpec grid{{n}};
  ComplexVector w = ComplexVector::Zero(n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(l));
  for (long t = 0; t < l; ++t) w(t) = amp;

  std::vector<std::vector<long>> shifts;
  for (long s = 0; s < n; s += l) shifts.push_back({s});
  std::vector<std::vector<double>> freqs;
  for (long m = 0; m < l; ++m)
    freqs.push_back({static_cast<double>(m) * static_cast<double>(n) /
                     static_cast<double>(l)});

  Example32 out{GaborSystem{grid, Signal{grid, std::move(w)}, std::move(freqs),
                            std::move(shifts)},
                {}, translation_op(grid, {xi}), {}};
  out.atom_matrix = atoms(out.system);
  out.report = kframe_bounds(frame_operator(out.atom_matrix), out.k);
  return out;
}

}  // namespace kwh
