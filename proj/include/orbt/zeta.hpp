#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "orbt/heat.hpp"

namespace orbt {

/// Everything the Mellin machinery needs about one Laplacian: the exact
/// half-power heat coefficients, the exponentially small remainder on (0,1],
/// the discrete spectrum past t = 1, and the kernel dimension.
struct ZetaInput {
  std::vector<double> alpha;                   // alpha[d] multiplies t^{-d/2}
  std::function<double(double)> regular;       // heat trace minus the singular part
  double gap = 1.0;                            // least nonzero squared displacement
  std::vector<std::pair<double, long>> eigs;   // positive eigenvalues with multiplicities
  long kernel = 0;
};

struct ZetaResult {
  double zeta0 = 0.0;        // zeta(0)
  double zeta_prime0 = 0.0;  // zeta'(0)
  double log_det = 0.0;      // log det' = -zeta'(0)
};

namespace detail {

inline double mellin_lower_regular(const ZetaInput& in, double sigma2) {
  // int_0^1 t^{-1} e^{-sigma2 t} R(t) dt via tau = 1/t
  using boost::math::quadrature::gauss_kronrod;
  double tau_max = std::max(16.0, (4.0 / std::max(in.gap, 1e-6)) * (std::log(1e18) + 10.0));
  auto f = [&](double tau) {
    double t = 1.0 / tau;
    return in.regular(t) * std::exp(-sigma2 * t) / tau;
  };
  return gauss_kronrod<double, 61>::integrate(f, 1.0, tau_max, 12, 1e-12);
}

inline double mellin_lower_singular(const ZetaInput& in, double sigma2) {
  // int_0^1 t^{-1} sum_d alpha_d t^{-d/2} (e^{-sigma2 t} - T_d(sigma2 t)) dt
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (std::size_t d = 0; d < in.alpha.size(); ++d) {
    if (in.alpha[d] == 0.0) continue;
    long kmax = static_cast<long>(d / 2);
    auto f = [&](double u) {
      double t = u * u;  // u-substitution tames the endpoint
      double x = sigma2 * t;
      double ex = std::exp(-x);
      double term = 1.0, tail = ex;
      for (long k = 0; k <= kmax; ++k) {
        tail -= term;
        term *= -x / static_cast<double>(k + 1);
      }
      return 2.0 * std::pow(t, -0.5 * d) * tail / u;
    };
    if (sigma2 == 0.0) continue;  // tail vanishes identically
    total += in.alpha[d] * gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 12, 1e-12);
  }
  return total;
}

inline double e1_sum(const ZetaInput& in, double sigma2, bool include_kernel) {
  double s = 0.0;
  for (const auto& [lam, m] : in.eigs) {
    double x = lam + sigma2;
    if (x > 700.0) continue;
    s += static_cast<double>(m) * boost::math::expint(1, x);
  }
  if (include_kernel && in.kernel > 0) {
    if (sigma2 <= 0.0) throw Error(Errc::SigmaAtPole, "kernel present at sigma = 0");
    s += static_cast<double>(in.kernel) * boost::math::expint(1, sigma2);
  }
  return s;
}

}  // namespace detail

/// zeta(0) and zeta'(0) of the kernel-excluded zeta function.
inline ZetaResult zeta_determinant(const ZetaInput& in) {
  const double ge = boost::math::constants::euler<double>();
  ZetaResult r;
  double c0 = (in.alpha.empty() ? 0.0 : in.alpha[0]) - static_cast<double>(in.kernel);
  double neg = 0.0;
  for (std::size_t d = 1; d < in.alpha.size(); ++d) neg -= 2.0 * in.alpha[d] / static_cast<double>(d);
  double a0 = detail::mellin_lower_regular(in, 0.0);
  double e1 = detail::e1_sum(in, 0.0, false);
  r.zeta0 = c0;
  r.zeta_prime0 = ge * c0 + neg + a0 + e1;
  r.log_det = -r.zeta_prime0;
  return r;
}

/// log det(sigma^2 + Delta) with the kernel included; sigma = 0 is allowed only
/// when acyclic in this degree.
inline double log_det_shifted(const ZetaInput& in, double sigma) {
  if (sigma < 0) throw Error(Errc::BadInput, "sigma must be nonnegative");
  const double s2 = sigma * sigma;
  if (s2 == 0.0 && in.kernel > 0) throw Error(Errc::SigmaAtPole, "kernel present at sigma = 0");
  const double ge = boost::math::constants::euler<double>();
  double c0 = 0.0, neg = 0.0;
  double fact = 1.0;
  for (std::size_t d = 0; d < in.alpha.size(); ++d) {
    if (in.alpha[d] == 0.0) continue;
    long kmax = static_cast<long>(d / 2);
    double pw = 1.0;
    fact = 1.0;
    for (long k = 0; k <= kmax; ++k) {
      double e = static_cast<double>(k) - 0.5 * static_cast<double>(d);
      double coef = in.alpha[d] * pw / fact;
      if (e < -1e-12)
        neg += coef / e;
      else
        c0 += coef;
      pw *= -s2;
      fact *= static_cast<double>(k + 1);
    }
  }
  double lower = detail::mellin_lower_singular(in, s2) + detail::mellin_lower_regular(in, s2);
  double e1 = detail::e1_sum(in, s2, true);
  double zeta_prime = ge * c0 + neg + lower + e1;
  return -zeta_prime;
}

/// Assemble the zeta input for one form degree of a flat quotient.
inline ZetaInput flat_zeta_input(const FlatHeatEvaluator& ev, const SpectrumTable& st, int degree) {
  ZetaInput in;
  in.alpha = ev.singular_alpha(degree);
  in.regular = [&ev, degree](double t) { return ev.evaluate_regular(degree, t); };
  in.gap = ev.gap();
  for (const auto& sh : st.shells)
    if (sh.q != 0 && sh.mult[degree] != 0) in.eigs.emplace_back(sh.lambda, sh.mult[degree]);
  in.kernel = st.betti[degree];
  return in;
}

/// Zeta input for the rank-one circle quotient (degrees 0 and 1 coincide).
inline ZetaInput rank_one_zeta_input(const CheckedPresentation& cp, const CheckedRep& cr,
                                     const SpectrumTable& st) {
  ZetaInput in;
  double ell = to_double(cp.p.rank_one.ell);
  double dim_vh = static_cast<double>(cr.q_mat.rows());
  in.alpha = {0.0, ell * dim_vh / std::sqrt(4 * M_PI)};
  in.regular = [ell, qm = cr.q_mat](double t) {
    double s = 0.0;
    CMat p = qm;
    for (long n = 1;; ++n) {
      double w = static_cast<double>(n) * ell;
      double g = std::exp(-w * w / (4 * t));
      if (g < 1e-20 && n > 2) break;
      s += 2.0 * p.trace().real() * g;
      p = p * qm;
    }
    return s * ell / std::sqrt(4 * M_PI * t);
  };
  in.gap = ell * ell;
  for (const auto& sh : st.shells)
    if (sh.q != 0 && sh.mult[0] != 0) in.eigs.emplace_back(sh.lambda, sh.mult[0]);
  in.kernel = st.betti[0];
  return in;
}

}  // namespace orbt
