#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "orbt/error.hpp"
#include "orbt/heat.hpp"
#include "orbt/presentation.hpp"
#include "orbt/rep.hpp"
#include "orbt/spectrum.hpp"

namespace orbt {

/// One conjugacy class of the fundamental group, recorded with the data that
/// enters the geometric side of the trace formula and the dynamical zeta
/// function.  `weight_euler` is the orbifold Euler characteristic of the point
/// quotient of the closed orbit; `weight_orbital` is the normalized orbit
/// integral vol(Z(gamma)\X(gamma)) [e]^max / (|a_gamma| |delta(gamma)|).  The
/// two are computed through independent enumerations and must agree exactly.
struct ConjugacyClassRecord {
  std::string label;
  bool elliptic = false;   // zero displacement
  double length = 0.0;     // displacement norm
  long winding = 0;        // power of the generating translation along the axis
  Int centralizer_count = 1;  // |Z(gamma)/<gamma>| when finite, 0 when infinite
  Int delta_order = 1;     // order of the kernel of Z(gamma) acting on the axis
  Int s_gamma = 1;         // index of the translation image of Z(gamma)
  Cplx rho_trace{0.0, 0.0};
  Rat weight_euler = 0;
  Rat weight_orbital = 0;
};

struct ClassTable {
  int global_delta = 1;    // rank of the split part: dimension for tori, 1 for circles
  double axis_length = 0.0;  // primitive translation length along the axis (rank one)
  std::vector<ConjugacyClassRecord> classes;
};

namespace detail {

inline Int vec_gcd(const IntVec& w) {
  Int g = 0;
  for (const auto& x : w) g = boost::multiprecision::gcd(g, boost::multiprecision::abs(x));
  return g;
}

inline Cplx lattice_char_trace(const CheckedRep& cr, const IntVec& w) {
  Cplx s{0.0, 0.0};
  for (const auto& blk : cr.blocks) {
    double ph = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      ph += 2 * M_PI * blk.mu_d[i] * w[i].convert_to<double>();
    s += std::polar(static_cast<double>(blk.basis.cols()), ph);
  }
  return s;
}

inline std::string int_vec_label(const IntVec& w) {
  std::string s = "t(";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ",";
    s += w[i].str();
  }
  s += ")";
  return s;
}

}  // namespace detail

/// Conjugacy classes of a lattice quotient with displacement norm at most
/// l_max.  Elliptic content is the identity alone; closed geodesics are the
/// nonzero lattice vectors.
inline ClassTable lattice_class_table(const CheckedPresentation& cp, const CheckedRep& cr,
                                      const Rat& l_max, bool include_elliptic = false) {
  if (cp.p.kind != PresentationKind::FlatCrystallographic)
    throw Error(Errc::BadInput, "lattice class table needs a flat presentation");
  for (const auto& g : cp.p.elements)
    if (!g.is_identity())
      throw Error(Errc::BadInput, "class tables cover translation lattices and rank-one circles");
  std::size_t n = static_cast<std::size_t>(cp.p.dimension);
  ClassTable out;
  out.global_delta = cp.p.dimension;

  if (include_elliptic) {
    ConjugacyClassRecord id;
    id.label = "e";
    id.elliptic = true;
    id.rho_trace = Cplx(static_cast<double>(cr.rep.rank), 0.0);
    out.classes.push_back(id);
  }

  Rat l2 = l_max * l_max;
  Eigen::MatrixXd minv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) minv(i, j) = to_double(cp.gram_inv[i][j]);
  std::vector<long> radius(n);
  for (std::size_t i = 0; i < n; ++i)
    radius[i] = static_cast<long>(std::floor(to_double(l_max) * std::sqrt(minv(i, i)) + 1e-9)) + 1;

  IntVec w(n, 0);
  std::vector<long> idx(n, 0);
  std::function<void(std::size_t)> walk = [&](std::size_t pos) {
    if (pos == n) {
      Rat q = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q += Rat(w[i]) * cp.gram[i][j] * Rat(w[j]);
      if (q == 0 || q > l2) return;
      ConjugacyClassRecord rec;
      rec.label = detail::int_vec_label(w);
      rec.length = std::sqrt(to_double(q));
      Int k = detail::vec_gcd(w);
      rec.rho_trace = detail::lattice_char_trace(cr, w);
      if (n == 1) {
        rec.winding = w[0].convert_to<long>();
        rec.centralizer_count = k;
        rec.delta_order = 1;
        rec.s_gamma = 1;
        rec.weight_euler = Rat(1, k);
        // vol(Z\X)^2 / |a|^2 is det M / (w^T M w), an exact rational square.
        Rat ratio2 = rat_det(cp.gram) / q;
        auto root = rat_sqrt(ratio2);
        if (!root) throw Error(Errc::BadInput, "orbital volume ratio is not a rational square");
        rec.weight_orbital = *root;
      } else {
        // The cross-section of the centralizer quotient is a torus of positive
        // dimension, so both the Euler weight and the Euler form vanish.
        rec.centralizer_count = 0;
        rec.delta_order = 1;
        rec.s_gamma = k;
        rec.weight_euler = 0;
        rec.weight_orbital = 0;
      }
      out.classes.push_back(rec);
      return;
    }
    for (long v = -radius[pos]; v <= radius[pos]; ++v) {
      w[pos] = v;
      walk(pos + 1);
    }
  };
  walk(0);

  std::sort(out.classes.begin(), out.classes.end(),
            [](const ConjugacyClassRecord& a, const ConjugacyClassRecord& b) {
              if (a.elliptic != b.elliptic) return a.elliptic;
              if (std::abs(a.length - b.length) > 1e-12) return a.length < b.length;
              return a.label < b.label;
            });
  return out;
}

namespace detail {

struct RankOneOrbitData {
  int rep_index = 0;       // index into h_closure
  Int s_gamma = 1;
  Int delta_order = 1;
  Int centralizer_count = 1;
};

/// Conjugation in H \rtimes Z: (k, f) gamma (k, f)^{-1} with gamma = (n, h)
/// sends h to alpha^k(alpha^{-n}(f) h f^{-1}), where alpha is conjugation by
/// the hyperbolic generator.
inline std::vector<RankOneOrbitData> rank_one_orbits(const CheckedPresentation& cp, long n) {
  std::size_t m = cp.h_closure.size();
  std::vector<int> alpha = cp.u0_conj;
  std::vector<int> alpha_inv(m);
  for (std::size_t i = 0; i < m; ++i) alpha_inv[static_cast<std::size_t>(alpha[i])] = static_cast<int>(i);
  long order = 1;
  {
    std::vector<int> p(m);
    for (std::size_t i = 0; i < m; ++i) p[i] = static_cast<int>(i);
    for (;;) {
      bool ident = true;
      std::vector<int> q(m);
      for (std::size_t i = 0; i < m; ++i) q[i] = alpha[static_cast<std::size_t>(p[i])];
      p = q;
      for (std::size_t i = 0; i < m; ++i)
        if (p[i] != static_cast<int>(i)) ident = false;
      if (ident) break;
      ++order;
      if (order > static_cast<long>(m) + 2)
        throw Error(Errc::NonClosedGroup, "conjugation permutation does not close");
    }
  }
  auto alpha_pow = [&](int h, long k) {
    int x = h;
    long r = ((k % order) + order) % order;
    for (long i = 0; i < r; ++i) x = alpha[static_cast<std::size_t>(x)];
    return x;
  };
  auto conj_move = [&](int h, long k, int f) {
    int a = alpha_pow(f, -n);
    int fh = cp.h_table[static_cast<std::size_t>(a)][static_cast<std::size_t>(h)];
    int fhf = cp.h_table[static_cast<std::size_t>(fh)]
                        [static_cast<std::size_t>(cp.h_inv[static_cast<std::size_t>(f)])];
    return alpha_pow(fhf, k);
  };

  std::vector<char> seen(m, 0);
  std::vector<RankOneOrbitData> orbits;
  for (std::size_t h0 = 0; h0 < m; ++h0) {
    if (seen[h0]) continue;
    std::vector<int> stack = {static_cast<int>(h0)};
    seen[h0] = 1;
    while (!stack.empty()) {
      int h = stack.back();
      stack.pop_back();
      for (std::size_t f = 0; f < m; ++f) {
        int h1 = conj_move(h, 0, static_cast<int>(f));
        if (!seen[static_cast<std::size_t>(h1)]) { seen[static_cast<std::size_t>(h1)] = 1; stack.push_back(h1); }
      }
      int h2 = alpha_pow(h, 1);
      if (!seen[static_cast<std::size_t>(h2)]) { seen[static_cast<std::size_t>(h2)] = 1; stack.push_back(h2); }
    }

    RankOneOrbitData od;
    od.rep_index = static_cast<int>(h0);
    Int delta = 0;
    for (std::size_t f = 0; f < m; ++f)
      if (conj_move(static_cast<int>(h0), 0, static_cast<int>(f)) == static_cast<int>(h0)) ++delta;
    od.delta_order = delta;

    long s = 0;
    long smax = (n == 0) ? order : std::max<long>(order, std::labs(n));
    for (long k = 1; k <= smax; ++k) {
      bool hit = false;
      for (std::size_t f = 0; f < m && !hit; ++f)
        if (conj_move(static_cast<int>(h0), k, static_cast<int>(f)) == static_cast<int>(h0)) hit = true;
      if (hit) { s = k; break; }
    }
    if (s == 0) s = order;
    od.s_gamma = s;

    if (n != 0) {
      Int count = 0;
      for (long k = 0; k < std::labs(n); ++k)
        for (std::size_t f = 0; f < m; ++f)
          if (conj_move(static_cast<int>(h0), k, static_cast<int>(f)) == static_cast<int>(h0)) ++count;
      od.centralizer_count = count;
    } else {
      od.centralizer_count = delta;
    }
    orbits.push_back(od);
  }
  return orbits;
}

}  // namespace detail

/// Conjugacy classes of a rank-one circle quotient out to displacement l_max.
/// Classes are labelled by the winding of the hyperbolic generator together
/// with a twisted conjugation orbit in the compact isotropy.
inline ClassTable rank_one_class_table(const CheckedPresentation& cp, const CheckedRep& cr,
                                       const Rat& l_max, bool include_elliptic = false) {
  if (cp.p.kind != PresentationKind::RankOne)
    throw Error(Errc::BadInput, "rank-one class table needs a rank-one presentation");
  ClassTable out;
  out.global_delta = 1;
  double ell = to_double(cp.p.rank_one.ell);
  out.axis_length = ell;

  long n_max = static_cast<long>(std::floor(to_double(l_max / cp.p.rank_one.ell) + 1e-12));
  std::vector<long> windings;
  if (include_elliptic) windings.push_back(0);
  for (long n = 1; n <= n_max; ++n) { windings.push_back(n); windings.push_back(-n); }

  for (long n : windings) {
    auto orbits = detail::rank_one_orbits(cp, n);
    CMat gpow = detail::mat_int_power(cr.rep.g1, Int(n));
    for (const auto& od : orbits) {
      if (n == 0 && od.rep_index == 0 && !include_elliptic) continue;
      ConjugacyClassRecord rec;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "g^%ld.h%d", n, od.rep_index);
      rec.label = buf;
      rec.elliptic = (n == 0);
      rec.winding = n;
      rec.length = std::labs(n) * ell;
      rec.delta_order = od.delta_order;
      rec.s_gamma = od.s_gamma;
      rec.centralizer_count = od.centralizer_count;
      rec.rho_trace = (gpow * cr.rep.h[static_cast<std::size_t>(od.rep_index)]).trace();
      if (n != 0) {
        rec.weight_euler = Rat(1) / Rat(od.centralizer_count);
        // vol = s ell, |a| = |n| ell; the axis length cancels exactly.
        rec.weight_orbital = Rat(od.s_gamma) / (Rat(std::labs(n)) * Rat(od.delta_order));
      }
      out.classes.push_back(rec);
    }
  }

  std::sort(out.classes.begin(), out.classes.end(),
            [](const ConjugacyClassRecord& a, const ConjugacyClassRecord& b) {
              if (a.elliptic != b.elliptic) return a.elliptic;
              if (std::abs(a.length - b.length) > 1e-12) return a.length < b.length;
              return a.label < b.label;
            });
  return out;
}

inline ClassTable class_table(const CheckedPresentation& cp, const CheckedRep& cr,
                              const Rat& l_max, bool include_elliptic = false) {
  if (cp.p.kind == PresentationKind::RankOne)
    return rank_one_class_table(cp, cr, l_max, include_elliptic);
  return lattice_class_table(cp, cr, l_max, include_elliptic);
}

/// Per-winding class sum Sum_O tr rho(gamma_O) s_O / |delta_O|.  Collapses to
/// the n-th power trace of the generator action on the isotropy invariants.
inline Cplx rank_one_class_side(const CheckedPresentation& cp, const CheckedRep& cr, long n) {
  auto orbits = detail::rank_one_orbits(cp, n);
  CMat gpow = detail::mat_int_power(cr.rep.g1, Int(n));
  Cplx s{0.0, 0.0};
  for (const auto& od : orbits) {
    Cplx tr = (gpow * cr.rep.h[static_cast<std::size_t>(od.rep_index)]).trace();
    s += tr * (od.s_gamma.convert_to<double>() / od.delta_order.convert_to<double>());
  }
  return s;
}

/// Invariant-side power trace tr[Q^n] for the same winding.
inline Cplx rank_one_q_power_trace(const CheckedRep& cr, long n) {
  Cplx s{0.0, 0.0};
  for (double th : cr.theta) s += std::polar(1.0, n * th);
  return s;
}

/// Geometric heat trace of a rank-one circle quotient, assembled from the
/// conjugacy class table.
inline double rank_one_heat_geometric(const CheckedPresentation& cp, const CheckedRep& cr,
                                      double t, double tol = 1e-16) {
  double ell = to_double(cp.p.rank_one.ell);
  double pref = 1.0 / std::sqrt(4 * M_PI * t);
  long n_max = static_cast<long>(std::ceil(std::sqrt(std::max(0.0, 4 * t * std::log(1 / tol))) / ell)) + 2;
  double sum = 0.0;
  for (long n = -n_max; n <= n_max; ++n) {
    double gauss = std::exp(-(n * ell) * (n * ell) / (4 * t));
    sum += (rank_one_class_side(cp, cr, n)).real() * ell * pref * gauss;
  }
  return sum;
}

struct SelbergRow {
  int degree = 0;
  double t = 0.0;
  double spectral = 0.0;
  double geometric = 0.0;
};

struct SelbergResult {
  double max_deviation = 0.0;
  std::vector<SelbergRow> rows;
};

/// Spectral heat trace against the geometric class expansion, all form
/// degrees, over a grid of times.
inline SelbergResult selberg_check(const CheckedPresentation& cp, CheckedRep& cr,
                                   const std::vector<double>& t_grid, double tol = 1e-14) {
  SelbergResult res;
  double t_min = *std::min_element(t_grid.begin(), t_grid.end());
  if (cp.p.kind == PresentationKind::RankOne) {
    double cutoff = heat_cutoff(1, cr.rep.rank, t_min, tol);
    SpectrumTable st = rank_one_spectrum(cp, cr, cutoff);
    for (double t : t_grid) {
      SelbergRow row;
      row.degree = 0;
      row.t = t;
      row.spectral = heat_trace_spectral(st, 0, t);
      row.geometric = rank_one_heat_geometric(cp, cr, t);
      res.rows.push_back(row);
      res.max_deviation = std::max(res.max_deviation, std::abs(row.spectral - row.geometric));
    }
    return res;
  }
  double cutoff = heat_cutoff(cp.p.dimension, cr.rep.rank, t_min, tol);
  SpectrumTable st = flat_spectrum(cp, cr, cutoff);
  FlatHeatEvaluator ev(cp, cr);
  for (int q = 0; q <= cp.p.dimension; ++q) {
    for (double t : t_grid) {
      SelbergRow row;
      row.degree = q;
      row.t = t;
      row.spectral = heat_trace_spectral(st, q, t);
      row.geometric = ev.evaluate(q, t);
      res.rows.push_back(row);
      res.max_deviation = std::max(res.max_deviation, std::abs(row.spectral - row.geometric));
    }
  }
  return res;
}

struct OrbitalIdentityRow {
  std::string label;
  Rat lhs;   // Euler weight of the closed orbit
  Rat rhs;   // normalized orbit integral
  bool equal = false;
};

struct OrbitalIdentityResult {
  bool all_equal = true;
  std::size_t checked = 0;
  std::vector<OrbitalIdentityRow> rows;
};

/// Exact identity between the Euler weight and the orbital volume ratio over
/// every non-elliptic class with displacement at most l_max.
inline OrbitalIdentityResult orbital_identity_check(const CheckedPresentation& cp, const CheckedRep& cr,
                                                    const Rat& l_max) {
  OrbitalIdentityResult res;
  ClassTable tab = class_table(cp, cr, l_max, false);
  for (const auto& c : tab.classes) {
    if (c.elliptic) continue;
    OrbitalIdentityRow row;
    row.label = c.label;
    row.lhs = c.weight_euler;
    row.rhs = c.weight_orbital;
    row.equal = (row.lhs == row.rhs);
    if (!row.equal) res.all_equal = false;
    ++res.checked;
    res.rows.push_back(row);
  }
  return res;
}

}  // namespace orbt
