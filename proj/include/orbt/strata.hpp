#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "orbt/presentation.hpp"

namespace orbt {

/// One connected stratum of ΣZ ∪ {Z}: the pair (fixed set of a conjugacy class
/// of isotropy elements, the class itself).  id 0 is the principal stratum Z
/// with the identity class.
struct Stratum {
  int id = 0;
  AffineElement rep;            // class representative (identity for id 0)
  int dimension = 0;
  Int multiplicity = 1;         // m_i: # of centralizer elements restricting to id on the fixed set
  Rat chi_orb = 0;
  RatVec base_point;            // a point of the fixed set (empty for id 0)
  std::vector<RatVec> directions;  // rational basis of the fixed set's direction space
  std::string class_key;        // canonical label of the conjugacy class
};

inline Rat chi_orb(const Stratum& s) { return s.chi_orb; }

namespace detail {

/// Canonical translation-class coordinates of (A | v_A + w): reduce y = U w
/// modulo the elementary divisors of I−A.  Rows with zero divisor keep y as is.
inline std::string translation_class_key(const Smith& sm, const IntVec& w, const AffineElement& coset) {
  std::size_t n = w.size();
  IntVec y(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) y[i] += sm.u[i][j] * w[j];
  std::string key;
  for (std::size_t i = 0; i < n; ++i) {
    Int d = (i < (sm.d.empty() ? 0 : sm.d[0].size())) ? sm.d[i][i] : Int(0);
    Int yi = y[i];
    if (d != 0) {
      yi %= d;
      if (yi < 0) yi += d;
    }
    key += yi.str() + ",";
  }
  std::string akey;
  for (const auto& row : coset.A)
    for (const auto& x : row) akey += x.str() + ",";
  return akey + "|" + key;
}

inline IntMat i_minus_a(const IntMat& a) {
  std::size_t n = a.size();
  IntMat m(n, IntVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = ((i == j) ? Int(1) : Int(0)) - a[i][j];
  return m;
}

}  // namespace detail

/// Enumerate the conjugacy classes of elements of Γ with nonempty fixed set
/// (besides the identity), one connected stratum per class, plus the principal
/// stratum.  Exact rational arithmetic throughout.
inline std::vector<Stratum> enumerate_strata(const CheckedPresentation& cp) {
  if (cp.p.kind != PresentationKind::FlatCrystallographic)
    throw Error(Errc::UnsupportedGroup, "strata enumeration expects a flat crystallographic presentation");
  const std::size_t n = static_cast<std::size_t>(cp.dim());

  struct Candidate {
    AffineElement g;
    RatVec x0;
    std::vector<RatVec> dirs;
    std::string key;
  };
  std::map<std::string, Candidate> classes;
  std::map<std::string, Smith> smith_by_coset;  // keyed by A serialization

  auto a_key = [](const IntMat& a) {
    std::string s;
    for (const auto& row : a)
      for (const auto& x : row) s += x.str() + ",";
    return s;
  };

  for (const auto& coset : cp.p.elements) {
    if (coset.linear_is_identity()) continue;  // pure translations fix nothing
    IntMat ima = detail::i_minus_a(coset.A);
    Smith sm = smith_normal_form(ima);
    smith_by_coset.emplace(a_key(coset.A), sm);

    // real-solvability of (I−A)x = v_A + w at the zero rows of D: y rows fixed
    std::size_t m = sm.d.empty() ? 0 : sm.d[0].size();
    std::vector<std::size_t> free_rows, torsion_rows;
    for (std::size_t i = 0; i < n; ++i) {
      Int d = (i < m) ? sm.d[i][i] : Int(0);
      (d == 0 ? free_rows : torsion_rows).push_back(i);
    }
    // (U v_A)_i must be ≡ integer-compatible: at free rows we need y_i = −(U v_A)_i exactly.
    RatVec uva(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) uva[i] += Rat(sm.u[i][j]) * coset.v[j];
    bool coset_ok = true;
    IntVec y(n, 0);
    for (std::size_t i : free_rows) {
      Rat yi = -uva[i];
      if (denominator(yi) != 1) { coset_ok = false; break; }  // glide: no fixed translate
      y[i] = numerator(yi);
    }
    if (!coset_ok) continue;

    // enumerate torsion coordinates 0..d_i−1
    std::vector<Int> divs;
    for (std::size_t i : torsion_rows) divs.push_back(sm.d[i][i]);
    std::vector<Int> idx(divs.size(), 0);
    while (true) {
      for (std::size_t k = 0; k < divs.size(); ++k) y[torsion_rows[k]] = idx[k];
      // w = U^{-1} y
      IntMat uinv = int_inverse_unimodular(sm.u);
      IntVec w(n, 0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w[i] += uinv[i][j] * y[j];
      AffineElement g = coset;
      for (std::size_t i = 0; i < n; ++i) g.v[i] += Rat(w[i]);
      // solve (I−A)x = v
      RatMat imar(n, RatVec(n));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) imar[i][j] = Rat(ima[i][j]);
      auto x0 = rat_solve_any(imar, g.v);
      if (x0) {
        Candidate c;
        c.g = g;
        c.x0 = *x0;
        c.dirs = rat_kernel(imar);
        IntVec wg(n);
        for (std::size_t i = 0; i < n; ++i) wg[i] = w[i];
        c.key = detail::translation_class_key(sm, wg, coset);
        classes.emplace(c.key, std::move(c));
      }
      // next index tuple
      std::size_t k = 0;
      for (; k < divs.size(); ++k) {
        idx[k] += 1;
        if (idx[k] < divs[k]) break;
        idx[k] = 0;
      }
      if (divs.empty() || k == divs.size()) break;
    }
  }

  // merge candidates conjugate under the full group: γ' = σ γ σ^{-1}, σ over
  // coset reps (translation conjugacy is already canonical in the key)
  std::map<std::string, std::string> canon;  // key -> canonical orbit key
  for (const auto& [key, cand] : classes) {
    std::string best = key;
    for (const auto& sigma : cp.p.elements) {
      AffineElement gp = affine_compose(sigma, affine_compose(cand.g, affine_inverse(sigma)));
      // express translation part relative to the listed coset of A'
      for (const auto& coset : cp.p.elements) {
        if (coset.A != gp.A) continue;
        RatVec diff(n);
        bool integral = true;
        for (std::size_t i = 0; i < n; ++i) {
          diff[i] = gp.v[i] - coset.v[i];
          if (denominator(diff[i]) != 1) integral = false;
        }
        if (!integral) continue;
        IntVec w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = numerator(diff[i]);
        auto it = smith_by_coset.find(a_key(coset.A));
        if (it == smith_by_coset.end()) continue;
        std::string k2 = detail::translation_class_key(it->second, w, coset);
        if (k2 < best) best = k2;
      }
    }
    canon[key] = best;
  }

  std::vector<Stratum> out;
  Stratum z0;
  z0.id = 0;
  z0.rep = affine_identity(n);
  z0.dimension = static_cast<int>(n);
  z0.multiplicity = 1;
  z0.chi_orb = (n == 0) ? 1 : 0;
  z0.class_key = "principal";
  out.push_back(z0);

  std::set<std::string> emitted;
  int next_id = 1;
  for (const auto& [key, cand] : classes) {
    const std::string& ckey = canon.at(key);
    if (ckey != key && classes.count(ckey) && canon.at(ckey) == ckey) continue;  // folded into canonical rep
    if (emitted.count(ckey)) continue;
    emitted.insert(ckey);
    const Candidate& c = classes.count(ckey) ? classes.at(ckey) : cand;

    Stratum s;
    s.id = next_id++;
    s.rep = c.g;
    s.dimension = static_cast<int>(c.dirs.size());
    s.chi_orb = (s.dimension == 0) ? 1 : 0;
    s.base_point = c.x0;
    s.directions = c.dirs;
    s.class_key = ckey;

    // m_i: elements h = (B|u) with h commuting with the rep and h restricting to
    // the identity on the fixed set (B fixes the direction space pointwise and
    // (I−B)x0 lands in the listed coset translation v_B + Λ).
    Int m = 0;
    for (const auto& coset : cp.p.elements) {
      bool fixes_dirs = true;
      for (const auto& d : c.dirs) {
        RatVec bd(n, 0);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) bd[i] += Rat(coset.A[i][j]) * d[j];
        if (bd != d) { fixes_dirs = false; break; }
      }
      if (!fixes_dirs) continue;
      // u forced: u = (I−B)x0; must be in v_B + Λ
      RatVec u(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        u[i] = c.x0[i];
        for (std::size_t j = 0; j < n; ++j) u[i] -= Rat(coset.A[i][j]) * c.x0[j];
      }
      bool in_coset = true;
      for (std::size_t i = 0; i < n; ++i)
        if (denominator(Rat(u[i] - coset.v[i])) != 1) { in_coset = false; break; }
      if (!in_coset) continue;
      AffineElement h;
      h.A = coset.A;
      h.v = u;
      AffineElement comm = affine_compose(h, affine_compose(c.g, affine_compose(affine_inverse(h), affine_inverse(c.g))));
      if (comm.is_identity()) m += 1;
    }
    s.multiplicity = m;
    out.push_back(std::move(s));
  }

  std::sort(out.begin() + 1, out.end(), [](const Stratum& a, const Stratum& b) {
    return a.class_key < b.class_key;
  });
  for (std::size_t i = 1; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

}  // namespace orbt
