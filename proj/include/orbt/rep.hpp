#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "orbt/presentation.hpp"

namespace orbt {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Unitary representation data for the fundamental / deck group.  For flat
/// presentations: one matrix per lattice basis translation and one per listed
/// coset (aligned with the presentation's element order, identity included).
/// For rank-one presentations: a matrix for the hyperbolic generator and one
/// per normalized H element.
struct HolonomyRep {
  int rank = 0;
  std::vector<CMat> lattice;
  std::vector<CMat> coset;
  CMat g1;
  std::vector<CMat> h;
  std::string name;
};

namespace detail {

inline double unitary_residual(const CMat& m) {
  return (m.adjoint() * m - CMat::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

inline CMat mat_int_power(const CMat& m, const Int& e) {
  CMat base = (e < 0) ? CMat(m.adjoint()) : m;
  Int k = e < 0 ? -e : e;
  CMat acc = CMat::Identity(m.rows(), m.cols());
  while (k > 0) {
    acc = acc * base;
    k -= 1;
  }
  return acc;
}

/// Orthonormalize columns in place (thin QR).
inline CMat orthonormal(const CMat& b) {
  Eigen::HouseholderQR<CMat> qr(b);
  CMat q = qr.householderQ() * CMat::Identity(b.rows(), b.cols());
  return q;
}

}  // namespace detail

struct CharBlock {
  RatVec mu;                 // character shifts in [0,1), exact
  std::vector<double> mu_d;  // same as doubles
  CMat basis;                // rank x dim orthonormal columns spanning the isotypic block
  int dim() const { return static_cast<int>(basis.cols()); }
};

struct CheckedRep {
  HolonomyRep rep;
  double relation_residual = 0.0;
  std::vector<CharBlock> blocks;  // flat: joint character decomposition of the lattice action
  CMat vh_basis;                  // rank-one: orthonormal basis of the H-invariants
  CMat q_mat;                     // rank-one: generator action on the invariants
  std::vector<Rat> theta_frac;    // rank-one: eigenangles of q_mat over 2*pi, exact
  std::vector<double> theta;      // rank-one: eigenangles in [0, 2*pi)
  std::uint64_t hash = 0;

  int rank() const { return rep.rank; }
};

namespace detail {

inline Rat rationalize_angle(double frac, const char* what) {
  frac -= std::floor(frac);
  if (frac > 1.0 - 1e-12) frac = 0.0;
  auto r = rationalize(frac, 100000, 1e-9);
  if (!r) throw Error(Errc::BadInput, std::string(what) + ": character angle is not a rational multiple of 2*pi");
  Rat v = rat_mod1(*r);
  return v;
}

inline std::uint64_t rep_hash(const HolonomyRep& r) {
  std::string s = r.name + "#" + std::to_string(r.rank) + "#";
  char buf[64];
  auto add = [&](const CMat& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%.12e,%.12e;", m(i, j).real(), m(i, j).imag());
        s += buf;
      }
    s += "|";
  };
  for (const auto& m : r.lattice) add(m);
  for (const auto& m : r.coset) add(m);
  if (r.g1.size() > 0) add(r.g1);
  for (const auto& m : r.h) add(m);
  return fnv1a(s);
}

}  // namespace detail

/// Evaluate a flat rep on an arbitrary group element (A|v): factor through the
/// listed coset with the same linear part, v = w + v_coset, w integral.
inline CMat rep_evaluate(const CheckedPresentation& cp, const CheckedRep& cr, const AffineElement& g) {
  const std::size_t n = static_cast<std::size_t>(cp.dim());
  for (std::size_t k = 0; k < cp.p.elements.size(); ++k) {
    const auto& coset = cp.p.elements[k];
    if (coset.A != g.A) continue;
    bool integral = true;
    IntVec w(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      Rat d = g.v[i] - coset.v[i];
      if (denominator(d) != 1) { integral = false; break; }
      w[i] = numerator(d);
    }
    if (!integral) continue;
    CMat m = cr.rep.coset[k];
    for (std::size_t i = 0; i < n; ++i) m = detail::mat_int_power(cr.rep.lattice[i], w[i]) * m;
    return m;
  }
  throw Error(Errc::BadInput, "element does not belong to the presented group");
}

/// Check unitarity and all defining relations of the rep against the
/// presentation; decompose into character blocks (flat) or extract the twist
/// angles on the H-invariants (rank-one).
inline CheckedRep validate_rep(const CheckedPresentation& cp, const HolonomyRep& rep, double tol = 1e-9) {
  CheckedRep cr;
  cr.rep = rep;
  const int r = rep.rank;
  if (r <= 0) throw Error(Errc::RankMismatch, "rep rank must be positive");
  double resid = 0.0;
  auto check_mat = [&](const CMat& m, const char* what) {
    if (m.rows() != r || m.cols() != r)
      throw Error(Errc::RankMismatch, std::string(what) + ": matrix size does not match rank");
    double u = detail::unitary_residual(m);
    if (u > tol) throw Error(Errc::NonUnitaryRep, std::string(what) + ": unitarity residual " + std::to_string(u));
  };

  if (cp.p.kind == PresentationKind::FlatCrystallographic) {
    const std::size_t n = static_cast<std::size_t>(cp.dim());
    if (rep.lattice.size() != n)
      throw Error(Errc::RankMismatch, "need one lattice matrix per basis translation");
    if (rep.coset.size() != cp.p.elements.size())
      throw Error(Errc::RankMismatch, "need one coset matrix per listed element");
    for (std::size_t i = 0; i < n; ++i) check_mat(rep.lattice[i], "lattice generator");
    for (std::size_t k = 0; k < rep.coset.size(); ++k) check_mat(rep.coset[k], "coset generator");

    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double d = (rep.lattice[i] * rep.lattice[j] - rep.lattice[j] * rep.lattice[i]).cwiseAbs().maxCoeff();
        resid = std::max(resid, d);
      }
    for (std::size_t k = 0; k < cp.p.elements.size(); ++k) {
      const auto& g = cp.p.elements[k];
      if (g.is_identity()) {
        resid = std::max(resid, (rep.coset[k] - CMat::Identity(r, r)).cwiseAbs().maxCoeff());
        continue;
      }
      // g t_i g^{-1} = t^{A e_i}
      for (std::size_t i = 0; i < n; ++i) {
        CMat lhs = rep.coset[k] * rep.lattice[i] * rep.coset[k].adjoint();
        CMat rhs = CMat::Identity(r, r);
        for (std::size_t j = 0; j < n; ++j) rhs = detail::mat_int_power(rep.lattice[j], g.A[j][i]) * rhs;
        resid = std::max(resid, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    }
    // coset cocycle: g_a g_b = t^w g_c
    for (std::size_t a = 0; a < cp.p.elements.size(); ++a)
      for (std::size_t b = 0; b < cp.p.elements.size(); ++b) {
        AffineElement prod = affine_compose(cp.p.elements[a], cp.p.elements[b]);
        CMat rhs;
        bool found = false;
        for (std::size_t c = 0; c < cp.p.elements.size() && !found; ++c) {
          if (cp.p.elements[c].A != prod.A) continue;
          IntVec w(n);
          bool integral = true;
          for (std::size_t i = 0; i < n; ++i) {
            Rat d = prod.v[i] - cp.p.elements[c].v[i];
            if (denominator(d) != 1) { integral = false; break; }
            w[i] = numerator(d);
          }
          if (!integral) continue;
          rhs = rep.coset[c];
          for (std::size_t i = 0; i < n; ++i) rhs = detail::mat_int_power(rep.lattice[i], w[i]) * rhs;
          found = true;
        }
        if (!found) throw Error(Errc::NonClosedGroup, "coset product escapes the listed elements");
        resid = std::max(resid, (rep.coset[a] * rep.coset[b] - rhs).cwiseAbs().maxCoeff());
      }
    if (resid > tol)
      throw Error(Errc::RelationViolated, "relation residual " + std::to_string(resid));
    cr.relation_residual = resid;

    // joint diagonalization of the commuting lattice unitaries
    std::vector<CMat> bases{CMat::Identity(r, r)};
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<CMat> next;
      for (const auto& b : bases) {
        CMat h = b.adjoint() * rep.lattice[i] * b;
        Eigen::ComplexEigenSolver<CMat> es(h);
        if (es.info() != Eigen::Success) throw Error(Errc::BadInput, "eigen decomposition failed");
        CVec vals = es.eigenvalues();
        CMat vecs = es.eigenvectors();
        std::vector<int> order(vals.size());
        for (int k = 0; k < vals.size(); ++k) order[k] = k;
        auto ang = [&](int k) {
          double a = std::arg(vals[k]) / (2 * M_PI);
          a -= std::floor(a);
          if (a > 1.0 - 1e-12) a = 0.0;
          return a;
        };
        std::sort(order.begin(), order.end(), [&](int x, int y) { return ang(x) < ang(y); });
        std::size_t s = 0;
        while (s < order.size()) {
          std::size_t e = s + 1;
          while (e < order.size() && ang(order[e]) - ang(order[e - 1]) < 1e-8) ++e;
          CMat cols(h.rows(), e - s);
          for (std::size_t k = s; k < e; ++k) cols.col(k - s) = vecs.col(order[k]);
          next.push_back(detail::orthonormal(b * cols));
          s = e;
        }
      }
      bases = std::move(next);
    }
    for (const auto& b : bases) {
      CharBlock blk;
      blk.basis = b;
      for (std::size_t i = 0; i < n; ++i) {
        CMat h = b.adjoint() * rep.lattice[i] * b;
        Cplx lam = h(0, 0);
        double scal = (h - lam * CMat::Identity(h.rows(), h.cols())).cwiseAbs().maxCoeff();
        if (scal > 1e-7)
          throw Error(Errc::BadInput, "joint diagonalization failed to isolate a character block");
        double frac = std::arg(lam) / (2 * M_PI);
        Rat mu = detail::rationalize_angle(frac, "lattice character");
        blk.mu.push_back(mu);
        blk.mu_d.push_back(to_double(mu));
      }
      cr.blocks.push_back(std::move(blk));
    }
    std::sort(cr.blocks.begin(), cr.blocks.end(), [](const CharBlock& a, const CharBlock& b) {
      for (std::size_t i = 0; i < a.mu.size(); ++i) {
        if (a.mu[i] != b.mu[i]) return a.mu[i] < b.mu[i];
      }
      return false;
    });
  } else {
    if (rep.h.size() != cp.h_closure.size())
      throw Error(Errc::RankMismatch, "need one matrix per normalized H element");
    check_mat(rep.g1, "hyperbolic generator");
    for (std::size_t k = 0; k < rep.h.size(); ++k) check_mat(rep.h[k], "H generator");
    // H multiplication table
    for (std::size_t a = 0; a < rep.h.size(); ++a)
      for (std::size_t b = 0; b < rep.h.size(); ++b) {
        std::size_t c = cp.h_table[a][b];
        resid = std::max(resid, (rep.h[a] * rep.h[b] - rep.h[c]).cwiseAbs().maxCoeff());
      }
    // g1 h g1^{-1} = u0 h u0^{-1}
    for (std::size_t a = 0; a < rep.h.size(); ++a) {
      CMat lhs = rep.g1 * rep.h[a] * rep.g1.adjoint();
      resid = std::max(resid, (lhs - rep.h[cp.u0_conj[a]]).cwiseAbs().maxCoeff());
    }
    if (resid > tol)
      throw Error(Errc::RelationViolated, "relation residual " + std::to_string(resid));
    cr.relation_residual = resid;

    // H-invariants and the twist acting on them
    CMat p = CMat::Zero(r, r);
    for (const auto& m : rep.h) p += m;
    p /= static_cast<double>(rep.h.size());
    CMat ph = (p + p.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMat> es(ph);
    std::vector<int> keep;
    for (int k = 0; k < es.eigenvalues().size(); ++k)
      if (std::abs(es.eigenvalues()[k] - 1.0) < 1e-8) keep.push_back(k);
    CMat bh(r, keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) bh.col(k) = es.eigenvectors().col(keep[k]);
    cr.vh_basis = bh;
    if (keep.empty()) {
      cr.q_mat = CMat(0, 0);
    } else {
      cr.q_mat = bh.adjoint() * rep.g1 * bh;
      double u = detail::unitary_residual(cr.q_mat);
      if (u > 1e-8) throw Error(Errc::NotAProperBundle, "generator does not preserve the H-invariants");
      Eigen::ComplexEigenSolver<CMat> qs(cr.q_mat);
      std::vector<double> th;
      for (int k = 0; k < qs.eigenvalues().size(); ++k) {
        double a = std::arg(qs.eigenvalues()[k]);
        if (a < 0) a += 2 * M_PI;
        if (a > 2 * M_PI - 1e-12) a = 0.0;
        th.push_back(a);
      }
      std::sort(th.begin(), th.end());
      for (double a : th) {
        cr.theta.push_back(a);
        cr.theta_frac.push_back(detail::rationalize_angle(a / (2 * M_PI), "twist"));
      }
    }
  }
  cr.hash = detail::rep_hash(rep);
  return cr;
}

}  // namespace orbt
