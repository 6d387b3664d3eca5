#pragma once

#include <algorithm>
#include <string>

#include "orbt/rational.hpp"

namespace orbt {

/// Affine isometry x |-> A x + v in lattice coordinates: A integral, v rational.
struct AffineElement {
  IntMat A;
  RatVec v;

  std::size_t dim() const { return v.size(); }

  bool is_identity() const {
    for (std::size_t i = 0; i < A.size(); ++i)
      for (std::size_t j = 0; j < A.size(); ++j)
        if (A[i][j] != ((i == j) ? 1 : 0)) return false;
    for (const auto& x : v)
      if (x != 0) return false;
    return true;
  }

  bool linear_is_identity() const {
    for (std::size_t i = 0; i < A.size(); ++i)
      for (std::size_t j = 0; j < A.size(); ++j)
        if (A[i][j] != ((i == j) ? 1 : 0)) return false;
    return true;
  }
};

inline AffineElement affine_identity(std::size_t n) {
  AffineElement e;
  e.A.assign(n, IntVec(n, 0));
  for (std::size_t i = 0; i < n; ++i) e.A[i][i] = 1;
  e.v.assign(n, Rat(0));
  return e;
}

inline RatVec affine_apply(const AffineElement& g, const RatVec& x) {
  std::size_t n = g.dim();
  RatVec y(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) y[i] += Rat(g.A[i][j]) * x[j];
    y[i] += g.v[i];
  }
  return y;
}

/// (g1*g2)(x) = g1(g2(x)) = A1 A2 x + A1 v2 + v1.
inline AffineElement affine_compose(const AffineElement& g1, const AffineElement& g2) {
  std::size_t n = g1.dim();
  AffineElement r;
  r.A.assign(n, IntVec(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (g1.A[i][k] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) r.A[i][j] += g1.A[i][k] * g2.A[k][j];
    }
  r.v.assign(n, Rat(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) r.v[i] += Rat(g1.A[i][j]) * g2.v[j];
    r.v[i] += g1.v[i];
  }
  return r;
}

inline Int int_det(const IntMat& a0) {
  RatMat a(a0.size());
  for (std::size_t i = 0; i < a0.size(); ++i)
    for (const auto& x : a0[i]) a[i].push_back(Rat(x));
  Rat d = rat_det(a);
  return numerator(d) / denominator(d);
}

/// Inverse of a unimodular integer matrix (det = ±1).
inline IntMat int_inverse_unimodular(const IntMat& a) {
  std::size_t n = a.size();
  RatMat ar(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& x : a[i]) ar[i].push_back(Rat(x));
  RatMat inv = rat_inverse(ar);
  IntMat r(n, IntVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (denominator(inv[i][j]) != 1) throw std::domain_error("matrix not unimodular");
      r[i][j] = numerator(inv[i][j]);
    }
  return r;
}

inline AffineElement affine_inverse(const AffineElement& g) {
  AffineElement r;
  r.A = int_inverse_unimodular(g.A);
  std::size_t n = g.dim();
  r.v.assign(n, Rat(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r.v[i] -= Rat(r.A[i][j]) * g.v[j];
  return r;
}

/// Same coset of the translation lattice: A equal, v difference integral.
inline bool same_mod_lattice(const AffineElement& a, const AffineElement& b) {
  if (a.A != b.A) return false;
  for (std::size_t i = 0; i < a.v.size(); ++i)
    if (denominator(Rat(a.v[i] - b.v[i])) != 1) return false;
  return true;
}

inline AffineElement reduce_mod_lattice(AffineElement g) {
  for (auto& x : g.v) x = rat_mod1(x);
  return g;
}

inline std::string affine_key(const AffineElement& g) {
  std::string s;
  for (const auto& row : g.A)
    for (const auto& x : row) s += x.str() + ",";
  s += "|";
  for (const auto& x : g.v) s += rat_str(x) + ",";
  return s;
}

/// Elementary symmetric function e_p of the eigenvalues of an integer matrix,
/// i.e. tr Λ^p(B), via minors: sum of principal p×p minors.
inline Rat trace_wedge(const IntMat& b, std::size_t p) {
  std::size_t n = b.size();
  if (p == 0) return 1;
  if (p > n) return 0;
  std::vector<std::size_t> idx(p);
  // iterate over p-subsets of {0..n-1}
  for (std::size_t i = 0; i < p; ++i) idx[i] = i;
  Rat total = 0;
  while (true) {
    RatMat sub(p, RatVec(p));
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) sub[i][j] = Rat(b[idx[i]][idx[j]]);
    total += rat_det(sub);
    std::size_t k = p;
    while (k > 0) {
      --k;
      if (idx[k] + (p - k) < n) {
        ++idx[k];
        for (std::size_t l = k + 1; l < p; ++l) idx[l] = idx[l - 1] + 1;
        break;
      }
      if (k == 0) return total;
    }
  }
}

}  // namespace orbt
