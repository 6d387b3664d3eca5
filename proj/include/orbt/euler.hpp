#pragma once

#include <vector>

#include "orbt/spectrum.hpp"
#include "orbt/strata.hpp"

namespace orbt {

namespace detail {

inline Rat class_trace_exact(const CheckedPresentation& cp, const CheckedRep& cr, const AffineElement& g) {
  CMat m = rep_evaluate(cp, cr, g);
  Cplx tr = m.trace();
  if (std::abs(tr.imag()) > 1e-9)
    throw Error(Errc::BadInput, "class trace is not real; exact averaging unavailable");
  auto r = rationalize(tr.real(), 100000, 1e-9);
  if (!r) throw Error(Errc::BadInput, "class trace does not rationalize");
  return *r;
}

}  // namespace detail

struct GbcResult {
  std::vector<Rat> betti;  // exact twisted Betti numbers
  Rat lhs = 0;             // alternating Betti sum
  Rat rhs = 0;             // point-stratum side
  bool equal = false;
};

/// Exact Gauss-Bonnet accounting: the alternating sum of twisted Betti numbers
/// against the point strata, each weighted by its class trace, multiplicity and
/// linear-part determinant.  Both sides are exact rationals.
inline GbcResult gauss_bonnet_check(const CheckedPresentation& cp, CheckedRep& cr,
                                    const std::vector<Stratum>& strata) {
  GbcResult r;
  r.betti = betti_exact(cp, cr);
  int sign = 1;
  for (const auto& b : r.betti) {
    r.lhs += Rat(sign) * b;
    sign = -sign;
  }
  const int n = cp.dim();
  Rat par = (n % 2 == 0) ? 1 : -1;
  for (const auto& s : strata) {
    if (s.id == 0 || s.dimension != 0) continue;
    Rat tr = detail::class_trace_exact(cp, cr, s.rep);
    Rat det = Rat(int_det(s.rep.A));
    r.rhs += tr * par / (Rat(s.multiplicity) * det);
  }
  r.equal = (r.lhs == r.rhs);
  return r;
}

/// Exact coefficient of log c in the scale anomaly: the q-weighted alternating
/// sum of the constant heat coefficients, assembled from the point strata.
inline Rat anomaly_coefficient_exact(const CheckedPresentation& cp, const CheckedRep& cr,
                                     const std::vector<Stratum>& strata) {
  const std::size_t n = static_cast<std::size_t>(cp.dim());
  Rat coeff = 0;
  for (const auto& s : strata) {
    if (s.id == 0 || s.dimension != 0) continue;
    Rat tr = detail::class_trace_exact(cp, cr, s.rep);
    IntMat ainv = int_inverse_unimodular(s.rep.A);
    Rat qsum = 0;
    int sign = 1;
    for (std::size_t q = 0; q <= n; ++q) {
      qsum += Rat(sign) * Rat(static_cast<long>(q)) * Rat(trace_wedge(ainv, q));
      sign = -sign;
    }
    IntMat ima(n, IntVec(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) ima[i][j] = ((i == j) ? Int(1) : Int(0)) - s.rep.A[i][j];
    RatMat imar(n, RatVec(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) imar[i][j] = Rat(ima[i][j]);
    Rat det = rat_det(imar);
    coeff += tr * qsum / (Rat(s.multiplicity) * det);
  }
  return coeff;
}

/// Orbifold Euler characteristic through the stratum ledger: chi of each closed
/// stratum divided by its multiplicity, principal stratum included.
inline Rat chi_top_from_strata(const std::vector<Stratum>& strata) {
  Rat s = 0;
  for (const auto& st : strata) s += st.chi_orb / Rat(st.multiplicity);
  return s;
}

}  // namespace orbt
