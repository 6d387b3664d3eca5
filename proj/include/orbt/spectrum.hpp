#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "orbt/rep.hpp"
#include "orbt/strata.hpp"

namespace orbt {

/// One Laplace eigenvalue shell.  q is the exact quadratic-form value, the
/// eigenvalue is 4*pi^2*q.  Multiplicities are listed per form degree; the raw
/// averaged values are kept so integrality can be audited.
struct Shell {
  Rat q;
  double lambda = 0.0;
  std::vector<double> mult_raw;
  std::vector<long> mult;
};

struct SpectrumTable {
  int dimension = 0;
  int degrees = 0;  // number of form degrees listed (dimension+1)
  double cutoff = 0.0;
  std::vector<Shell> shells;  // ascending in q, q = 0 shell included when the kernel is nonzero
  std::vector<long> betti;
  double integrality_deviation = 0.0;
};

namespace detail {

struct ModeKey {
  std::size_t block;
  IntVec k;
};

/// xi = k + mu as exact rationals
inline RatVec mode_xi(const IntVec& k, const RatVec& mu) {
  RatVec xi(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) xi[i] = Rat(k[i]) + mu[i];
  return xi;
}

inline Rat quad_form(const RatMat& minv, const RatVec& xi) {
  Rat q = 0;
  for (std::size_t i = 0; i < xi.size(); ++i)
    for (std::size_t j = 0; j < xi.size(); ++j) q += xi[i] * minv[i][j] * xi[j];
  return q;
}

}  // namespace detail

/// Merge character blocks with identical shift vectors (the averaging trace
/// needs one block per character).
inline void merge_equal_blocks(CheckedRep& cr) {
  std::vector<CharBlock> merged;
  for (auto& b : cr.blocks) {
    bool done = false;
    for (auto& m : merged) {
      if (m.mu == b.mu) {
        CMat nb(m.basis.rows(), m.basis.cols() + b.basis.cols());
        nb << m.basis, b.basis;
        m.basis = nb;
        done = true;
        break;
      }
    }
    if (!done) merged.push_back(b);
  }
  cr.blocks = std::move(merged);
}

/// Full form-valued spectrum of the flat quotient up to the eigenvalue cutoff:
/// exact shell keys, point-group averaged multiplicities for every degree.
inline SpectrumTable flat_spectrum(const CheckedPresentation& cp, CheckedRep& cr, double cutoff) {
  if (cp.p.kind != PresentationKind::FlatCrystallographic)
    throw Error(Errc::UnsupportedGroup, "flat_spectrum expects a flat presentation");
  if (cutoff <= 0) throw Error(Errc::CutoffTooSmall, "cutoff must be positive");
  merge_equal_blocks(cr);
  const std::size_t n = static_cast<std::size_t>(cp.dim());
  const double qmax = cutoff / (4 * M_PI * M_PI);

  Eigen::MatrixXd minv_d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) minv_d(i, j) = to_double(cp.gram_inv[i][j]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(minv_d);
  double lam_min = es.eigenvalues().minCoeff();
  if (lam_min <= 0) throw Error(Errc::NonPositiveMetric, "inverse Gram matrix is not positive");
  long radius = static_cast<long>(std::floor(std::sqrt(qmax / lam_min))) + 2;

  // precompute per-coset data
  struct CosetData {
    const AffineElement* g;
    IntMat ainv;
    std::vector<Rat> wedge;       // tr Lambda^p(A^{-1}), p = 0..n
    std::vector<Cplx> block_tr;   // tr of rho(g) restricted to each block (0 if the block moves)
    std::vector<bool> block_fixed;
  };
  std::vector<CosetData> cosets;
  for (std::size_t k = 0; k < cp.p.elements.size(); ++k) {
    CosetData cd;
    cd.g = &cp.p.elements[k];
    cd.ainv = int_inverse_unimodular(cd.g->A);
    for (std::size_t p = 0; p <= n; ++p) cd.wedge.push_back(numerator(trace_wedge(cd.ainv, p)));
    for (const auto& blk : cr.blocks) {
      // block is preserved iff A^{-T} mu = mu mod 1
      RatVec mu2(n, 0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) mu2[i] += Rat(cd.ainv[j][i]) * blk.mu[j];
      bool fixed = true;
      for (std::size_t i = 0; i < n; ++i)
        if (rat_mod1(mu2[i] - blk.mu[i]) != 0) { fixed = false; break; }
      cd.block_fixed.push_back(fixed);
      if (fixed) {
        CMat m = cr.rep.coset[k];
        cd.block_tr.push_back((blk.basis.adjoint() * m * blk.basis).trace());
      } else {
        cd.block_tr.push_back(0.0);
      }
    }
    cosets.push_back(std::move(cd));
  }

  std::map<Rat, std::vector<detail::ModeKey>> shells;
  IntVec k(n, -radius);
  while (true) {
    for (std::size_t b = 0; b < cr.blocks.size(); ++b) {
      RatVec xi = detail::mode_xi(k, cr.blocks[b].mu);
      Rat q = detail::quad_form(cp.gram_inv, xi);
      if (to_double(q) <= qmax + 1e-12) shells[q].push_back({b, k});
    }
    std::size_t i = 0;
    for (; i < n; ++i) {
      k[i] += 1;
      if (k[i] <= radius) break;
      k[i] = -radius;
    }
    if (i == n) break;
  }

  SpectrumTable out;
  out.dimension = static_cast<int>(n);
  out.degrees = static_cast<int>(n) + 1;
  out.cutoff = cutoff;
  const double inv_p = 1.0 / static_cast<double>(cp.p.elements.size());

  for (const auto& [q, modes] : shells) {
    Shell sh;
    sh.q = q;
    sh.lambda = 4 * M_PI * M_PI * to_double(q);
    sh.mult_raw.assign(n + 1, 0.0);
    for (const auto& cd : cosets) {
      Cplx acc = 0.0;
      for (const auto& mk : modes) {
        if (!cd.block_fixed[mk.block]) continue;
        RatVec xi = detail::mode_xi(mk.k, cr.blocks[mk.block].mu);
        // fixed-mode condition A^{-T} xi == xi exactly
        bool fixed = true;
        for (std::size_t i = 0; i < n && fixed; ++i) {
          Rat s = 0;
          for (std::size_t j = 0; j < n; ++j) s += Rat(cd.ainv[j][i]) * xi[j];
          if (s != xi[i]) fixed = false;
        }
        if (!fixed) continue;
        double phase = 0.0;
        for (std::size_t i = 0; i < n; ++i) phase -= 2 * M_PI * to_double(xi[i] * cd.g->v[i]);
        acc += std::polar(1.0, phase) * cd.block_tr[mk.block];
      }
      for (std::size_t p = 0; p <= n; ++p)
        sh.mult_raw[p] += inv_p * to_double(cd.wedge[p]) * acc.real();
    }
    sh.mult.assign(n + 1, 0);
    for (std::size_t p = 0; p <= n; ++p) {
      double r = std::round(sh.mult_raw[p]);
      out.integrality_deviation = std::max(out.integrality_deviation, std::abs(sh.mult_raw[p] - r));
      sh.mult[p] = static_cast<long>(r);
    }
    bool any = false;
    for (long m : sh.mult)
      if (m != 0) any = true;
    if (any || q == 0) out.shells.push_back(std::move(sh));
  }

  out.betti.assign(n + 1, 0);
  if (!out.shells.empty() && out.shells.front().q == 0)
    for (std::size_t p = 0; p <= n; ++p) out.betti[p] = out.shells.front().mult[p];
  return out;
}

/// Spectrum of the rank-one circle quotient: eigenvalues ((2*pi*k + theta_j)/ell)^2
/// on the H-invariants, identical in degrees 0 and 1.
inline SpectrumTable rank_one_spectrum(const CheckedPresentation& cp, const CheckedRep& cr, double cutoff) {
  if (cp.p.kind != PresentationKind::RankOne)
    throw Error(Errc::UnsupportedGroup, "rank_one_spectrum expects a rank-one presentation");
  if (cutoff <= 0) throw Error(Errc::CutoffTooSmall, "cutoff must be positive");
  SpectrumTable out;
  out.dimension = 1;
  out.degrees = 2;
  out.cutoff = cutoff;
  const Rat ell = cp.p.rank_one.ell;
  const double qmax = cutoff / (4 * M_PI * M_PI);

  std::map<Rat, long> shells;
  for (std::size_t j = 0; j < cr.theta_frac.size(); ++j) {
    Rat mu = cr.theta_frac[j];
    long kr = static_cast<long>(std::ceil(std::sqrt(qmax) * to_double(ell))) + 2;
    for (long k = -kr; k <= kr; ++k) {
      Rat base = (Rat(k) + mu) / ell;
      Rat q = base * base;
      if (to_double(q) <= qmax + 1e-12) shells[q] += 1;
    }
  }
  for (const auto& [q, m] : shells) {
    Shell sh;
    sh.q = q;
    sh.lambda = 4 * M_PI * M_PI * to_double(q);
    sh.mult_raw = {static_cast<double>(m), static_cast<double>(m)};
    sh.mult = {m, m};
    out.shells.push_back(std::move(sh));
  }
  out.betti = {0, 0};
  if (!out.shells.empty() && out.shells.front().q == 0) {
    out.betti[0] = out.shells.front().mult[0];
    out.betti[1] = out.shells.front().mult[1];
  }
  return out;
}

/// Eigenvalue cutoff large enough that the heat-trace tail at time t_min is
/// below tol for every degree.
inline double heat_cutoff(int dimension, int rank, double t_min, double tol) {
  if (t_min <= 0 || tol <= 0) throw Error(Errc::BadInput, "need positive time and tolerance");
  double lam = 1.0;
  auto tail = [&](double l) {
    double forms = std::pow(2.0, dimension) * rank;
    double count = forms * std::pow(l / (4 * M_PI * M_PI) + 2.0, dimension / 2.0 + 1.0) * 16.0;
    return count * std::exp(-l * t_min);
  };
  while (tail(lam) > tol && lam < 1e9) lam *= 1.5;
  return lam;
}

/// Exact rational Betti numbers by character averaging at the zero mode; trace
/// values must rationalize (corpus reps have algebraic entries with rational
/// traces).  Used by the exact Euler characteristic checks.
inline std::vector<Rat> betti_exact(const CheckedPresentation& cp, CheckedRep& cr) {
  if (cp.p.kind != PresentationKind::FlatCrystallographic)
    throw Error(Errc::UnsupportedGroup, "betti_exact expects a flat presentation");
  merge_equal_blocks(cr);
  const std::size_t n = static_cast<std::size_t>(cp.dim());
  std::vector<Rat> betti(n + 1, 0);
  const CharBlock* zero = nullptr;
  for (const auto& blk : cr.blocks) {
    bool z = true;
    for (const auto& m : blk.mu)
      if (m != 0) z = false;
    if (z) zero = &blk;
  }
  if (!zero) return betti;
  Rat order = Rat(static_cast<long>(cp.p.elements.size()));
  for (std::size_t k = 0; k < cp.p.elements.size(); ++k) {
    const auto& g = cp.p.elements[k];
    IntMat ainv = int_inverse_unimodular(g.A);
    Cplx tr = (zero->basis.adjoint() * cr.rep.coset[k] * zero->basis).trace();
    if (std::abs(tr.imag()) > 1e-9)
      throw Error(Errc::BadInput, "zero-block trace is not real; exact Betti averaging unavailable");
    auto trr = rationalize(tr.real(), 100000, 1e-9);
    if (!trr) throw Error(Errc::BadInput, "zero-block trace does not rationalize");
    for (std::size_t p = 0; p <= n; ++p) betti[p] += Rat(trace_wedge(ainv, p)) * (*trr) / order;
  }
  for (std::size_t p = 0; p <= n; ++p)
    if (denominator(betti[p]) != 1)
      throw Error(Errc::KernelMismatch, "averaged Betti number is not an integer");
  return betti;
}

}  // namespace orbt
