#pragma once

#include <complex>
#include <random>
#include <vector>

#include "orbt/path.hpp"

namespace orbt {

/// Constant transition attached to one oriented overlap: a point x in the
/// source chart with germ(x) in the target chart carries fiber frames by t.
struct OverlapEdge {
  std::size_t to = 0, from = 0;
  Germ g;
  CMat t;
};

struct LocalAction {
  Germ g;
  CMat t;
  bool trivial_on_chart = false;  // germ fixes the chart pointwise
};

struct FlatBundleCocycle {
  int rank = 0;
  Atlas atlas;
  std::vector<OverlapEdge> edges;
  std::vector<std::vector<LocalAction>> local_groups;  // per chart
  bool proper = true;

  const CMat* lookup(std::size_t to, std::size_t from, const Germ& g) const {
    for (const auto& e : edges)
      if (e.to == to && e.from == from && germ_equal(e.g, g)) return &e.t;
    return nullptr;
  }
};

namespace detail {

/// The germ alphabet of the transition table: identity, chart germs, their
/// inverses, and the isotropy germs of a rank-one quotient.
inline std::vector<Germ> germ_alphabet(const CheckedPresentation& cp, const Atlas& at) {
  std::vector<Germ> out;
  auto push = [&](const Germ& g) {
    for (const auto& x : out)
      if (germ_equal(x, g)) return;
    out.push_back(g);
  };
  for (const auto& c : at.charts) {
    push(c);
    push(germ_inverse(cp, c));
  }
  if (cp.p.kind == PresentationKind::RankOne)
    for (std::size_t j = 0; j < cp.h_closure.size(); ++j) {
      Germ h = germ_identity(1);
      h.h = static_cast<int>(j);
      push(h);
      for (int s : {1, -1}) {
        Germ gh = germ_identity(1);
        gh.a.v[0] = s;
        gh.h = static_cast<int>(j);
        push(gh);
      }
    }
  return out;
}

inline bool charts_overlap(const Atlas& at, std::size_t to, std::size_t from, const Germ& g) {
  for (const auto& q : box_grid(at.dim)) {
    RatVec x = affine_apply(at.charts[from].a, q);
    if (at.chart_contains(to, affine_apply(g.a, x))) return true;
  }
  return false;
}

inline bool germ_fixes_chart(const Atlas& at, std::size_t chart, const Germ& g) {
  for (const auto& q : box_grid_values()) {
    RatVec x(at.dim, q);
    RatVec y = affine_apply(at.charts[chart].a, x);
    if (affine_apply(g.a, y) != y) return false;
  }
  return true;
}

inline bool germ_has_fixed_point_in_chart(const Atlas& at, std::size_t chart, const Germ& g) {
  std::size_t n = at.dim;
  RatMat m(n, RatVec(n, 0));
  RatVec b(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = Rat((i == j) ? 1 : 0) - Rat(g.a.A[i][j]);
    b[i] = g.a.v[i];
  }
  auto sol = rat_solve_any(m, b);
  if (!sol) return false;
  return at.chart_contains(chart, *sol);
}

}  // namespace detail

/// The associated bundle of a validated representation over the default
/// atlas: transitions are the germ images, local groups record the chart
/// stabilizers.
inline FlatBundleCocycle bundle_from_rep(const CheckedPresentation& cp, const CheckedRep& cr) {
  FlatBundleCocycle b;
  b.rank = cr.rep.rank;
  b.atlas = default_atlas(cp);
  std::size_t nc = b.atlas.charts.size();
  auto alphabet = detail::germ_alphabet(cp, b.atlas);
  for (std::size_t to = 0; to < nc; ++to)
    for (std::size_t from = 0; from < nc; ++from)
      for (const auto& g : alphabet)
        if (detail::charts_overlap(b.atlas, to, from, g))
          b.edges.push_back(OverlapEdge{to, from, g, germ_matrix(cp, cr, g)});
  b.local_groups.assign(nc, {});
  b.proper = true;
  for (std::size_t i = 0; i < nc; ++i)
    for (const auto& g : alphabet) {
      if (germ_is_identity(g)) continue;
      bool fixes_all = detail::germ_fixes_chart(b.atlas, i, g);
      bool has_fixed = fixes_all || detail::germ_has_fixed_point_in_chart(b.atlas, i, g);
      if (!has_fixed) continue;
      if (!detail::charts_overlap(b.atlas, i, i, g)) continue;
      LocalAction la{g, germ_matrix(cp, cr, g), fixes_all};
      if (fixes_all && (la.t - CMat::Identity(b.rank, b.rank)).norm() > 1e-9) b.proper = false;
      b.local_groups[i].push_back(la);
    }
  return b;
}

/// Parallel transport along a chart path: the ordered product of the arrow
/// transitions, last arrow leftmost.
inline CMat parallel_transport(const FlatBundleCocycle& b, const GPath& c) {
  validate_path(b.atlas, c);
  std::size_t k = c.segments.size();
  CMat tau = CMat::Identity(b.rank, b.rank);
  for (std::size_t i = 0; i <= k; ++i) {
    std::size_t from = (i == 0) ? c.start_chart : c.segments[i - 1].chart;
    std::size_t to = (i == k) ? c.end_chart : c.segments[i].chart;
    const CMat* t = b.lookup(to, from, c.arrows[i]);
    if (!t) throw Error(Errc::PathLeavesAtlas, "arrow has no transition in the cocycle");
    tau = (*t) * tau;
  }
  return tau;
}

struct HolonomyReadout {
  HolonomyRep rep;
  double relation_residual = 0.0;
};

/// Transport around each generating loop and reassemble a representation in
/// the presentation's generator order; the relation residual is recomputed
/// from the transported images.
inline HolonomyReadout holonomy_of(const CheckedPresentation& cp, const FlatBundleCocycle& b,
                                   const std::vector<GPath>& generators) {
  for (const auto& c : generators)
    if (c.start != c.end || c.start_chart != c.end_chart)
      throw Error(Errc::EndpointMismatch, "generator path is not a loop");
  HolonomyReadout out;
  out.rep.rank = b.rank;
  out.rep.name = "holonomy";
  std::size_t expected = 0;
  if (cp.p.kind == PresentationKind::RankOne)
    expected = cp.h_closure.size();  // the translation plus the nontrivial isotropy
  else {
    expected = static_cast<std::size_t>(cp.p.dimension);
    for (const auto& el : cp.p.elements)
      if (!el.is_identity()) ++expected;
  }
  if (generators.size() != expected)
    throw Error(Errc::BadInput, "generator loop count does not match the presentation");
  std::vector<CMat> images;
  images.reserve(generators.size());
  for (const auto& c : generators) images.push_back(parallel_transport(b, c));
  if (cp.p.kind == PresentationKind::RankOne) {
    out.rep.g1 = images[0];
    out.rep.h.clear();
    out.rep.h.push_back(CMat::Identity(b.rank, b.rank));
    for (std::size_t j = 1; j < cp.h_closure.size(); ++j) out.rep.h.push_back(images[j]);
  } else {
    std::size_t n = static_cast<std::size_t>(cp.p.dimension);
    out.rep.lattice.assign(images.begin(), images.begin() + static_cast<long>(n));
    out.rep.coset.clear();
    std::size_t at = n;
    for (const auto& el : cp.p.elements) {
      if (el.is_identity()) {
        out.rep.coset.push_back(CMat::Identity(b.rank, b.rank));
        continue;
      }
      out.rep.coset.push_back(images[at++]);
    }
  }
  CheckedRep checked = validate_rep(cp, out.rep);
  out.relation_residual = checked.relation_residual;
  return out;
}

/// Restrict the fibers to the invariants of the local kernel: germs acting
/// trivially on the chart but not on the fiber.  Output is proper.
inline FlatBundleCocycle properize(const FlatBundleCocycle& b) {
  std::size_t nc = b.atlas.charts.size();
  CMat p = CMat::Identity(b.rank, b.rank);
  long count = 1;
  for (std::size_t i = 0; i < nc && count == 1; ++i) {
    CMat acc = CMat::Identity(b.rank, b.rank);
    long c = 1;
    for (const auto& la : b.local_groups[i])
      if (la.trivial_on_chart) {
        acc += la.t;
        ++c;
      }
    if (c > 1) {
      p = acc / static_cast<double>(c);
      count = c;
    }
  }
  if (count == 1) return b;  // already proper

  Eigen::SelfAdjointEigenSolver<CMat> es((p + p.adjoint()) / 2.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
    if (es.eigenvalues()(j) > 0.5) keep.push_back(j);
  CMat basis(b.rank, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) basis.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);

  FlatBundleCocycle out;
  out.rank = static_cast<int>(keep.size());
  out.atlas = b.atlas;
  out.edges = b.edges;
  for (auto& e : out.edges) e.t = basis.adjoint() * e.t * basis;
  out.local_groups.assign(nc, {});
  out.proper = true;
  for (std::size_t i = 0; i < nc; ++i)
    for (const auto& la : b.local_groups[i]) {
      LocalAction nla{la.g, basis.adjoint() * la.t * basis, la.trivial_on_chart};
      if (la.trivial_on_chart &&
          (nla.t - CMat::Identity(out.rank, out.rank)).norm() > 1e-9)
        throw Error(Errc::NotAProperBundle, "kernel action does not restrict to the identity");
      out.local_groups[i].push_back(nla);
    }
  return out;
}

namespace detail {

inline std::vector<CMat> generator_images(const CheckedPresentation& cp, const HolonomyRep& r) {
  std::vector<CMat> out;
  if (cp.p.kind == PresentationKind::RankOne) {
    out.push_back(r.g1);
    for (std::size_t j = 1; j < r.h.size(); ++j) out.push_back(r.h[j]);
    return out;
  }
  for (const auto& m : r.lattice) out.push_back(m);
  for (std::size_t i = 0; i < r.coset.size(); ++i)
    if (!cp.p.elements[i].is_identity()) out.push_back(r.coset[i]);
  return out;
}

}  // namespace detail

/// Search for an invertible intertwiner A with A r1 = r2 A over the
/// generators, then validate on all words up to the budget; unitary inputs are
/// also cross-checked through character equality.
inline bool reps_equivalent(const CheckedPresentation& cp, const HolonomyRep& r1,
                            const HolonomyRep& r2, int word_budget = 8) {
  if (r1.rank != r2.rank) return false;
  int r = r1.rank;
  auto g1 = detail::generator_images(cp, r1);
  auto g2 = detail::generator_images(cp, r2);
  if (g1.size() != g2.size()) return false;
  std::size_t ng = g1.size();
  if (ng == 0) return true;

  // Stack (g1^T (x) I - I (x) g2) over the generators; vec is column-major.
  Eigen::Index rr = static_cast<Eigen::Index>(r) * r;
  CMat sys(static_cast<Eigen::Index>(ng) * rr, rr);
  for (std::size_t k = 0; k < ng; ++k) {
    CMat blockm = CMat::Zero(rr, rr);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        for (int a = 0; a < r; ++a)
          for (int bcol = 0; bcol < r; ++bcol) {
            Cplx val = 0.0;
            if (i == a) val += g1[k](bcol, j);  // (g1^T (x) I)
            if (j == bcol) val -= g2[k](i, a);  // (I (x) g2)
            blockm(i + r * j, a + r * bcol) = val;
          }
    sys.block(static_cast<Eigen::Index>(k) * rr, 0, rr, rr) = blockm;
  }
  Eigen::FullPivLU<CMat> lu(sys);
  lu.setThreshold(1e-9);
  CMat ker = lu.kernel();
  if (lu.dimensionOfKernel() == 0) return false;

  auto unvec = [&](const Eigen::VectorXcd& v) {
    CMat a(r, r);
    for (int j = 0; j < r; ++j)
      for (int i = 0; i < r; ++i) a(i, j) = v(i + r * j);
    return a;
  };
  CMat inter;
  bool have = false;
  std::mt19937 rng(12345);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int attempt = 0; attempt < 32 && !have; ++attempt) {
    Eigen::VectorXcd v;
    if (attempt < ker.cols()) {
      v = ker.col(attempt);
    } else {
      v = Eigen::VectorXcd::Zero(rr);
      for (Eigen::Index j = 0; j < ker.cols(); ++j) v += Cplx(nd(rng), nd(rng)) * ker.col(j);
    }
    CMat a = unvec(v);
    Eigen::JacobiSVD<CMat> svd(a);
    if (svd.singularValues()(svd.singularValues().size() - 1) > 1e-7 * svd.singularValues()(0)) {
      inter = a;
      have = true;
    }
  }
  if (!have) return false;

  // Word validation, breadth-first over generator products.
  struct Node { CMat w1, w2; };
  std::vector<Node> frontier = {{CMat::Identity(r, r), CMat::Identity(r, r)}};
  long total = 0;
  for (int depth = 0; depth < word_budget; ++depth) {
    std::vector<Node> next;
    for (const auto& nd2 : frontier) {
      for (std::size_t k = 0; k < ng; ++k) {
        Node m{g1[k] * nd2.w1, g2[k] * nd2.w2};
        double scale = std::max(1.0, m.w1.norm());
        if ((inter * m.w1 - m.w2 * inter).norm() > 1e-6 * scale * std::max(1.0, inter.norm()))
          return false;
        if (std::abs(m.w1.trace() - m.w2.trace()) > 1e-6 * scale) return false;
        next.push_back(std::move(m));
        if (++total > 20000) return true;  // budget exhausted without a violation
      }
    }
    frontier = std::move(next);
  }
  return true;
}

}  // namespace orbt
