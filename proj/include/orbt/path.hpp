#pragma once

#include <algorithm>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "orbt/error.hpp"
#include "orbt/presentation.hpp"
#include "orbt/rep.hpp"

namespace orbt {

/// Group-element germ in the chart groupoid: the affine action on the cover in
/// lattice coordinates plus, for rank-one quotients, the isotropy index.
struct Germ {
  AffineElement a;
  int h = 0;
};

inline bool germ_equal(const Germ& x, const Germ& y) {
  return x.h == y.h && x.a.A == y.a.A && x.a.v == y.a.v;
}

inline Germ germ_identity(std::size_t n) { return Germ{affine_identity(n), 0}; }

inline bool germ_is_identity(const Germ& g) { return g.h == 0 && g.a.is_identity(); }

inline Germ germ_compose(const CheckedPresentation& cp, const Germ& x, const Germ& y) {
  Germ r;
  r.a = affine_compose(x.a, y.a);
  if (cp.p.kind == PresentationKind::RankOne) {
    // gamma^j f . gamma^k g = gamma^{j+k} alpha^{-k}(f) g with alpha = u0-conjugation
    long k = numerator(y.a.v[0]).convert_to<long>();
    int f = x.h;
    std::size_t m = cp.h_closure.size();
    std::vector<int> alpha_inv(m);
    for (std::size_t i = 0; i < m; ++i) alpha_inv[static_cast<std::size_t>(cp.u0_conj[i])] = static_cast<int>(i);
    if (k >= 0)
      for (long i = 0; i < k; ++i) f = alpha_inv[static_cast<std::size_t>(f)];
    else
      for (long i = 0; i < -k; ++i) f = cp.u0_conj[static_cast<std::size_t>(f)];
    r.h = cp.h_table[static_cast<std::size_t>(f)][static_cast<std::size_t>(y.h)];
  }
  return r;
}

inline Germ germ_inverse(const CheckedPresentation& cp, const Germ& x) {
  std::size_t n = x.a.dim();
  Germ r;
  RatMat am(n, RatVec(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) am[i][j] = Rat(x.a.A[i][j]);
  RatMat ainv = rat_inverse(am);
  r.a.A.assign(n, IntVec(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (denominator(ainv[i][j]) != 1)
        throw Error(Errc::BadInput, "germ linear part is not unimodular");
      r.a.A[i][j] = numerator(ainv[i][j]);
    }
  r.a.v.assign(n, Rat(0));
  for (std::size_t i = 0; i < n; ++i) {
    Rat s = 0;
    for (std::size_t j = 0; j < n; ++j) s += ainv[i][j] * x.a.v[j];
    r.a.v[i] = -s;
  }
  if (cp.p.kind == PresentationKind::RankOne && x.h != 0) {
    long k = numerator(x.a.v[0]).convert_to<long>();
    int f = cp.h_inv[static_cast<std::size_t>(x.h)];
    std::size_t m = cp.h_closure.size();
    std::vector<int> alpha_inv(m);
    for (std::size_t i = 0; i < m; ++i) alpha_inv[static_cast<std::size_t>(cp.u0_conj[i])] = static_cast<int>(i);
    if (k >= 0)
      for (long i = 0; i < k; ++i) f = alpha_inv[static_cast<std::size_t>(f)];
    else
      for (long i = 0; i < -k; ++i) f = cp.u0_conj[static_cast<std::size_t>(f)];
    r.h = f;
  }
  return r;
}

/// Fiber action of a germ under the representation.
inline CMat germ_matrix(const CheckedPresentation& cp, const CheckedRep& cr, const Germ& g) {
  if (cp.p.kind == PresentationKind::RankOne) {
    Int k = numerator(g.a.v[0]);
    CMat m = detail::mat_int_power(cr.rep.g1, k);
    return m * cr.rep.h[static_cast<std::size_t>(g.h)];
  }
  return rep_evaluate(cp, cr, g.a);
}

/// Finite atlas: every chart is the image of the closed reference box
/// [-eps, 1+eps]^n under one germ.
struct Atlas {
  std::size_t dim = 1;
  Rat eps = Rat(1, 8);
  std::vector<Germ> charts;
  std::vector<AffineElement> chart_inv;  // cached affine inverses

  bool box_contains(const RatVec& y) const {
    for (const auto& c : y)
      if (c < -eps || c > Rat(1) + eps) return false;
    return true;
  }

  bool chart_contains(std::size_t i, const RatVec& x) const {
    return box_contains(affine_apply(chart_inv[i], x));
  }

  std::size_t identity_chart() const {
    for (std::size_t i = 0; i < charts.size(); ++i)
      if (germ_is_identity(charts[i])) return i;
    throw Error(Errc::BadInput, "atlas has no identity chart");
  }

  std::size_t find_chart(const Germ& g) const {
    for (std::size_t i = 0; i < charts.size(); ++i)
      if (germ_equal(charts[i], g)) return i;
    throw Error(Errc::PathLeavesAtlas, "no chart for the requested germ");
  }
};

/// Charts indexed by the identity, the lattice generators and inverses, and
/// the point-group coset elements and inverses (rank-one: the generator
/// translation and its inverse).
inline Atlas default_atlas(const CheckedPresentation& cp) {
  Atlas at;
  std::size_t n = (cp.p.kind == PresentationKind::RankOne) ? 1 : static_cast<std::size_t>(cp.p.dimension);
  at.dim = n;
  auto push = [&](const Germ& g) {
    for (const auto& c : at.charts)
      if (germ_equal(c, g)) return;
    at.charts.push_back(g);
  };
  push(germ_identity(n));
  if (cp.p.kind == PresentationKind::RankOne) {
    for (int s : {1, -1}) {
      Germ g = germ_identity(1);
      g.a.v[0] = s;
      push(g);
    }
  } else {
    for (std::size_t j = 0; j < n; ++j)
      for (int s : {1, -1}) {
        Germ g = germ_identity(n);
        g.a.v[j] = s;
        push(g);
      }
    for (const auto& el : cp.p.elements) {
      if (el.is_identity()) continue;
      Germ g{el, 0};
      push(g);
      push(germ_inverse(cp, g));
    }
  }
  at.chart_inv.reserve(at.charts.size());
  for (const auto& c : at.charts) at.chart_inv.push_back(germ_inverse(cp, c).a);
  return at;
}

/// Piecewise-linear run inside a single chart, rational breakpoints.
struct PathSegment {
  std::size_t chart = 0;
  std::vector<RatVec> points;
};

/// A chart path c = (b_1, ..., b_k; g_0, ..., g_k): segments joined by germ
/// arrows, with the leading arrow moving the start point onto b_1 and the
/// trailing arrow moving b_k onto the end point.
struct GPath {
  std::vector<Rat> partition;          // k+1 strictly increasing times, 0 to 1
  std::vector<PathSegment> segments;   // k
  std::vector<Germ> arrows;            // k+1
  std::size_t start_chart = 0, end_chart = 0;
  RatVec start, end;
};

inline void validate_path(const Atlas& at, const GPath& c) {
  std::size_t k = c.segments.size();
  if (k == 0 || c.arrows.size() != k + 1 || c.partition.size() != k + 1)
    throw Error(Errc::BadInput, "path needs k segments, k+1 arrows, k+1 times");
  for (std::size_t i = 0; i + 1 < c.partition.size(); ++i)
    if (!(c.partition[i] < c.partition[i + 1]))
      throw Error(Errc::BadInput, "path times must increase");
  for (const auto& seg : c.segments) {
    if (seg.points.empty()) throw Error(Errc::BadInput, "empty path segment");
    if (seg.chart >= at.charts.size()) throw Error(Errc::PathLeavesAtlas, "segment chart out of range");
    for (const auto& pt : seg.points)
      if (!at.chart_contains(seg.chart, pt))
        throw Error(Errc::PathLeavesAtlas, "segment leaves its chart");
  }
  auto moved = [&](const Germ& g, const RatVec& x) { return affine_apply(g.a, x); };
  if (moved(c.arrows[0], c.start) != c.segments[0].points.front())
    throw Error(Errc::EndpointMismatch, "leading arrow misses the first segment");
  for (std::size_t i = 0; i + 1 < k; ++i)
    if (moved(c.arrows[i + 1], c.segments[i].points.back()) != c.segments[i + 1].points.front())
      throw Error(Errc::EndpointMismatch, "arrow misses the next segment");
  if (moved(c.arrows[k], c.segments[k - 1].points.back()) != c.end)
    throw Error(Errc::EndpointMismatch, "trailing arrow misses the end point");
  if (c.start_chart >= at.charts.size() || c.end_chart >= at.charts.size())
    throw Error(Errc::PathLeavesAtlas, "endpoint chart out of range");
  if (!at.chart_contains(c.start_chart, c.start) || !at.chart_contains(c.end_chart, c.end))
    throw Error(Errc::PathLeavesAtlas, "endpoint outside its chart");
}

inline GPath constant_path(const Atlas& at, std::size_t chart, const RatVec& x) {
  GPath c;
  c.partition = {Rat(0), Rat(1)};
  c.segments = {PathSegment{chart, {x}}};
  c.arrows = {germ_identity(at.dim), germ_identity(at.dim)};
  c.start_chart = c.end_chart = chart;
  c.start = c.end = x;
  return c;
}

inline GPath reverse_path(const CheckedPresentation& cp, const GPath& c) {
  GPath r;
  std::size_t k = c.segments.size();
  r.partition.reserve(k + 1);
  for (std::size_t i = 0; i <= k; ++i) r.partition.push_back(Rat(1) - c.partition[k - i]);
  r.segments.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    PathSegment s = c.segments[k - 1 - i];
    std::reverse(s.points.begin(), s.points.end());
    r.segments.push_back(s);
  }
  r.arrows.reserve(k + 1);
  for (std::size_t i = 0; i <= k; ++i) r.arrows.push_back(germ_inverse(cp, c.arrows[k - i]));
  r.start_chart = c.end_chart;
  r.end_chart = c.start_chart;
  r.start = c.end;
  r.end = c.start;
  return r;
}

/// Concatenation c1 then c2; the two junction arrows merge into their product.
inline GPath compose_paths(const CheckedPresentation& cp, const GPath& c1, const GPath& c2) {
  if (c1.end != c2.start) throw Error(Errc::EndpointMismatch, "paths do not meet");
  GPath r;
  std::size_t k1 = c1.segments.size(), k2 = c2.segments.size();
  r.partition.reserve(k1 + k2 + 1);
  for (std::size_t i = 0; i <= k1; ++i) r.partition.push_back(c1.partition[i] / 2);
  for (std::size_t i = 1; i <= k2; ++i) r.partition.push_back(Rat(1, 2) + c2.partition[i] / 2);
  r.segments = c1.segments;
  r.segments.insert(r.segments.end(), c2.segments.begin(), c2.segments.end());
  r.arrows.reserve(k1 + k2 + 1);
  for (std::size_t i = 0; i < k1; ++i) r.arrows.push_back(c1.arrows[i]);
  r.arrows.push_back(germ_compose(cp, c2.arrows[0], c1.arrows[k1]));
  for (std::size_t i = 1; i <= k2; ++i) r.arrows.push_back(c2.arrows[i]);
  r.start_chart = c1.start_chart;
  r.end_chart = c2.end_chart;
  r.start = c1.start;
  r.end = c2.end;
  return r;
}

namespace detail {

inline std::vector<Rat> box_grid_values() {
  return {Rat(0), Rat(1, 4), Rat(3, 8), Rat(1, 2), Rat(5, 8), Rat(3, 4), Rat(1)};
}

inline std::vector<RatVec> box_grid(std::size_t n) {
  std::vector<RatVec> out;
  std::vector<Rat> vals = box_grid_values();
  RatVec cur(n, 0);
  std::function<void(std::size_t)> walk = [&](std::size_t pos) {
    if (pos == n) {
      out.push_back(cur);
      return;
    }
    for (const auto& v : vals) {
      cur[pos] = v;
      walk(pos + 1);
    }
  };
  walk(0);
  return out;
}

}  // namespace detail

/// Canonical loop representing the germ: jump to gamma x0 with the leading
/// arrow, then walk back to the base point through a shared chart point.
inline GPath generator_loop(const CheckedPresentation& cp, const Atlas& at, const Germ& g,
                            const RatVec& x0) {
  std::size_t id = at.identity_chart();
  if (germ_is_identity(g) || (g.h != 0 && g.a.is_identity())) {
    GPath c = constant_path(at, id, x0);
    c.arrows[0] = g;  // isotropy loop: the germ fixes the chart pointwise
    return c;
  }
  std::size_t gc = at.find_chart(g);
  RatVec y0 = affine_apply(g.a, x0);
  RatVec w;
  bool found = false;
  for (const auto& q : detail::box_grid(at.dim)) {
    RatVec cand = affine_apply(at.charts[gc].a, q);
    if (at.chart_contains(id, cand)) {
      w = cand;
      found = true;
      break;
    }
  }
  if (!found) throw Error(Errc::PathLeavesAtlas, "generator chart does not meet the base chart");
  GPath c;
  c.partition = {Rat(0), Rat(1, 2), Rat(1)};
  c.segments = {PathSegment{gc, {y0, w}}, PathSegment{id, {w, x0}}};
  c.arrows = {g, germ_identity(at.dim), germ_identity(at.dim)};
  c.start_chart = c.end_chart = id;
  c.start = c.end = x0;
  return c;
}

/// Canonical base point: interior, off every reflection and rotation axis of
/// the corpus actions.
inline RatVec base_point(std::size_t n) { return RatVec(n, Rat(3, 8)); }

/// The canonical generating loops: lattice directions then coset elements for
/// a crystallographic quotient, the translation then the isotropy elements for
/// a rank-one quotient.
inline std::vector<GPath> generator_loops(const CheckedPresentation& cp, const Atlas& at) {
  std::vector<GPath> out;
  std::size_t n = at.dim;
  RatVec x0 = base_point(n);
  if (cp.p.kind == PresentationKind::RankOne) {
    Germ g = germ_identity(1);
    g.a.v[0] = 1;
    out.push_back(generator_loop(cp, at, g, x0));
    for (std::size_t j = 1; j < cp.h_closure.size(); ++j) {
      Germ h = germ_identity(1);
      h.h = static_cast<int>(j);
      out.push_back(generator_loop(cp, at, h, x0));
    }
    return out;
  }
  for (std::size_t j = 0; j < n; ++j) {
    Germ g = germ_identity(n);
    g.a.v[j] = 1;
    out.push_back(generator_loop(cp, at, g, x0));
  }
  for (const auto& el : cp.p.elements) {
    if (el.is_identity()) continue;
    out.push_back(generator_loop(cp, at, Germ{el, 0}, x0));
  }
  return out;
}

}  // namespace orbt
