#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "orbt/locsym.hpp"
#include "orbt/torsion.hpp"
#include "orbt/zeta.hpp"

namespace orbt {

namespace detail {

/// Holonomy angles of the generating translation acting on the relevant
/// coefficient space: character angles for a circle lattice, eigenangles of
/// the invariant-space action for a rank-one quotient.
inline std::vector<std::pair<double, double>> axis_angles(const CheckedPresentation& cp,
                                                          const CheckedRep& cr) {
  std::vector<std::pair<double, double>> out;  // (angle, multiplicity)
  if (cp.p.kind == PresentationKind::RankOne) {
    for (double th : cr.theta) out.emplace_back(th, 1.0);
  } else {
    for (const auto& blk : cr.blocks)
      out.emplace_back(2 * M_PI * blk.mu_d[0], static_cast<double>(blk.basis.cols()));
  }
  return out;
}

inline double axis_length(const CheckedPresentation& cp) {
  if (cp.p.kind == PresentationKind::RankOne) return to_double(cp.p.rank_one.ell);
  return std::sqrt(to_double(cp.gram[0][0]));
}

}  // namespace detail

/// log R(sigma) of the dynamical zeta function, from the product over closed
/// geodesics resummed in closed form.  Vanishes identically when the split
/// rank exceeds one.
inline double ruelle_log(const CheckedPresentation& cp, const CheckedRep& cr, double sigma) {
  if (cp.p.kind == PresentationKind::FlatCrystallographic && cp.p.dimension >= 2) return 0.0;
  double ell = detail::axis_length(cp);
  double x = std::exp(-sigma * ell);
  double s = 0.0;
  for (const auto& [th, d] : detail::axis_angles(cp, cr)) {
    std::complex<double> f = 1.0 - std::polar(x, th);
    s += d * 2.0 * std::log(std::abs(f));
  }
  return s;
}

struct RuelleValue {
  double sigma = 0.0;
  double log_value = 0.0;
  double value = 1.0;
  bool identically_one = false;
  bool weights_vanish = false;   // every class weight is exactly zero (split rank >= 2)
  double partial_deviation = 0.0;  // truncated geodesic sum against the closed form
};

/// Evaluate the dynamical zeta function and cross-check the closed form
/// against the truncated sum over the class table out to displacement l_max.
inline RuelleValue ruelle_zeta(const CheckedPresentation& cp, const CheckedRep& cr,
                               double sigma, const Rat& l_max = Rat(24)) {
  RuelleValue out;
  out.sigma = sigma;
  ClassTable tab = class_table(cp, cr, l_max, false);
  if (cp.p.kind == PresentationKind::FlatCrystallographic && cp.p.dimension >= 2) {
    out.identically_one = true;
    out.weights_vanish = true;
    for (const auto& c : tab.classes)
      if (c.weight_euler != 0) out.weights_vanish = false;
    out.log_value = 0.0;
    out.value = 1.0;
    return out;
  }
  out.log_value = ruelle_log(cp, cr, sigma);
  out.value = std::exp(out.log_value);
  double xi = 0.0;
  for (const auto& c : tab.classes) {
    if (c.elliptic) continue;
    xi += to_double(c.weight_euler) * c.rho_trace.real() * std::exp(-sigma * c.length);
  }
  out.partial_deviation = std::abs(std::exp(-xi) - out.value);
  return out;
}

struct FriedRow {
  double sigma = 0.0;
  double log_ruelle = 0.0;
  double log_rhs = 0.0;      // log det(sigma^2 + Delta_1) - sigma E
  double deviation = 0.0;
};

struct FriedResult {
  bool identically_one = false;  // split rank >= 2: zeta is 1 and there is nothing to match
  bool weights_vanish = false;
  bool acyclic = false;
  double e_term = 0.0;           // E from the elliptic classes
  double e_term_expected = 0.0;  // axis length times coefficient dimension
  double e_class_deviation = 0.0;
  double log_t2 = 0.0;           // 2 log T
  double log_r0 = 0.0;
  double r0_deviation = 0.0;
  double max_functional_deviation = 0.0;
  std::vector<FriedRow> rows;
};

/// Dynamical zeta against spectral data: the value at zero against the squared
/// torsion when acyclic, and the shifted-determinant identity on a sigma grid.
inline FriedResult fried_check(const CheckedPresentation& cp, CheckedRep& cr,
                               const std::vector<double>& sigmas,
                               double e1_tol = 1e-16) {
  FriedResult res;
  if (cp.p.kind == PresentationKind::FlatCrystallographic && cp.p.dimension >= 2) {
    RuelleValue rv = ruelle_zeta(cp, cr, 1.0, Rat(6));
    res.identically_one = rv.identically_one;
    res.weights_vanish = rv.weights_vanish;
    return res;
  }

  double ell = detail::axis_length(cp);
  double cutoff = heat_cutoff(1, cr.rep.rank, 1.0, e1_tol);

  ClassTable tab = class_table(cp, cr, Rat(2), true);
  double elliptic_sum = 0.0;
  for (const auto& c : tab.classes)
    if (c.elliptic)
      elliptic_sum += c.rho_trace.real() * c.s_gamma.convert_to<double>() /
                      c.delta_order.convert_to<double>();

  if (cp.p.kind == PresentationKind::RankOne) {
    SpectrumTable st = rank_one_spectrum(cp, cr, cutoff);
    ZetaInput in = rank_one_zeta_input(cp, cr, st);
    double dim_vh = static_cast<double>(cr.q_mat.rows());
    res.e_term_expected = ell * dim_vh;
    res.e_term = ell * elliptic_sum;
    res.e_class_deviation = std::abs(res.e_term - res.e_term_expected);
    res.acyclic = (in.kernel == 0);
    for (double s : sigmas) {
      FriedRow row;
      row.sigma = s;
      row.log_ruelle = ruelle_log(cp, cr, s);
      row.log_rhs = log_det_shifted(in, s) - s * res.e_term_expected;
      row.deviation = std::abs(row.log_ruelle - row.log_rhs);
      res.max_functional_deviation = std::max(res.max_functional_deviation, row.deviation);
      res.rows.push_back(row);
    }
    if (res.acyclic) {
      TorsionResult tr = rank_one_torsion(cp, cr);
      res.log_t2 = 2.0 * tr.log_t;
      res.log_r0 = ruelle_log(cp, cr, 0.0);
      res.r0_deviation = std::abs(res.log_r0 - res.log_t2);
    }
    return res;
  }

  SpectrumTable st = flat_spectrum(cp, cr, cutoff);
  FlatHeatEvaluator ev(cp, cr);
  ZetaInput in = flat_zeta_input(ev, st, 1);
  res.e_term_expected = ell * static_cast<double>(cr.rep.rank);
  res.e_term = ell * elliptic_sum;
  res.e_class_deviation = std::abs(res.e_term - res.e_term_expected);
  res.acyclic = (in.kernel == 0);
  for (double s : sigmas) {
    FriedRow row;
    row.sigma = s;
    row.log_ruelle = ruelle_log(cp, cr, s);
    row.log_rhs = log_det_shifted(in, s) - s * res.e_term_expected;
    row.deviation = std::abs(row.log_ruelle - row.log_rhs);
    res.max_functional_deviation = std::max(res.max_functional_deviation, row.deviation);
    res.rows.push_back(row);
  }
  if (res.acyclic) {
    TorsionResult tr = flat_torsion(cp, cr);
    res.log_t2 = 2.0 * tr.log_t;
    res.log_r0 = ruelle_log(cp, cr, 0.0);
    res.r0_deviation = std::abs(res.log_r0 - res.log_t2);
  }
  return res;
}

}  // namespace orbt
