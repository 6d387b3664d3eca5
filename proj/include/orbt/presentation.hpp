#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orbt/error.hpp"
#include "orbt/group.hpp"
#include "orbt/rational.hpp"

namespace orbt {

enum class PresentationKind { FlatCrystallographic, RankOne };

/// Rank-one data: Γ ⊂ R × U generated by (ell, u0) and {0} × H,
/// H a finite subgroup of U(k) given by an explicit element list (closed,
/// identity first after normalization), u0 normalizing H.
struct RankOneData {
  Rat ell = 1;
  Eigen::MatrixXcd u0;
  std::vector<Eigen::MatrixXcd> h;  // the elements of H
};

struct QuotientPresentation {
  PresentationKind kind = PresentationKind::FlatCrystallographic;
  int dimension = 0;               // flat: 1..3; rank-one: 1
  RatMat lattice_basis;            // columns span the lattice (flat)
  RatMat metric_gram;              // ambient flat metric (flat)
  std::vector<AffineElement> elements;  // point-group coset reps, identity included
  RankOneData rank_one;            // rank-one only
  std::string name;                // optional label from the input file
};

/// Validated, normalized presentation plus cached exact derived data.
struct CheckedPresentation {
  QuotientPresentation p;
  RatMat gram;       // flat: Gram in lattice coordinates, M = B^T G B
  RatMat gram_inv;
  bool effective = true;
  std::string hash;  // canonical content hash (cache key component)

  // rank-one cached structure
  std::vector<Eigen::MatrixXcd> h_closure;       // = p.rank_one.h, normalized order
  std::vector<std::vector<int>> h_table;         // h_i h_j = h_{table[i][j]}
  std::vector<int> h_inv;                        // index of h_i^{-1}
  std::vector<int> u0_conj;                      // u0 h_i u0^{-1} = h_{u0_conj[i]}

  int dim() const { return p.dimension; }
  std::size_t point_group_order() const { return p.elements.size(); }
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* d = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = d[v & 0xf];
    v >>= 4;
  }
  return s;
}

inline bool mat_close(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double tol = 1e-10) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

inline int find_in_list(const std::vector<Eigen::MatrixXcd>& list, const Eigen::MatrixXcd& m,
                        double tol = 1e-8) {
  for (std::size_t i = 0; i < list.size(); ++i)
    if (mat_close(list[i], m, tol)) return static_cast<int>(i);
  return -1;
}

inline std::string cplx_key(const Eigen::MatrixXcd& m) {
  std::string s;
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g;", m(i, j).real(), m(i, j).imag());
      s += buf;
    }
  return s;
}

}  // namespace detail

/// Checks the flat presentation: lattice nondegenerate, gram SPD, coset reps a
/// closed group mod the lattice with metric-orthogonal linear parts; normalizes
/// (v mod 1, canonical order, dedup) and caches the lattice-coordinate Gram.
inline CheckedPresentation validate_presentation(const QuotientPresentation& input) {
  CheckedPresentation cp;
  cp.p = input;
  QuotientPresentation& p = cp.p;

  if (p.kind == PresentationKind::FlatCrystallographic) {
    const std::size_t n = static_cast<std::size_t>(p.dimension);
    if (p.dimension < 1 || p.dimension > 3)
      throw Error(Errc::UnsupportedDimension, "flat dimension must be 1..3, got " + std::to_string(p.dimension));
    if (p.lattice_basis.size() != n || p.metric_gram.size() != n)
      throw Error(Errc::BadInput, "lattice/gram size does not match dimension");
    if (rat_det(p.lattice_basis) == 0)
      throw Error(Errc::DegenerateLattice, "lattice basis is singular");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (p.metric_gram[i][j] != p.metric_gram[j][i])
          throw Error(Errc::DegenerateLattice, "metric gram not symmetric");
    // SPD via leading principal minors
    for (std::size_t k = 1; k <= n; ++k) {
      RatMat minor(k, RatVec(k));
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) minor[i][j] = p.metric_gram[i][j];
      if (rat_det(minor) <= 0)
        throw Error(Errc::DegenerateLattice, "metric gram not positive definite");
    }
    // Gram in lattice coordinates
    RatMat bt = rat_transpose(p.lattice_basis);
    cp.gram = rat_mul(bt, rat_mul(p.metric_gram, p.lattice_basis));
    cp.gram_inv = rat_inverse(cp.gram);

    if (p.elements.empty()) p.elements.push_back(affine_identity(n));
    for (auto& g : p.elements) {
      if (g.A.size() != n || g.v.size() != n)
        throw Error(Errc::BadInput, "element size does not match dimension");
      Int d = int_det(g.A);
      if (d != 1 && d != -1)
        throw Error(Errc::NonClosedGroup, "linear part does not preserve the lattice (|det| != 1)");
      g = reduce_mod_lattice(g);
    }
    // dedup, require identity coset
    {
      std::map<std::string, AffineElement> uniq;
      for (const auto& g : p.elements) uniq[affine_key(g)] = g;
      p.elements.clear();
      for (auto& [k, g] : uniq) p.elements.push_back(g);
    }
    bool has_id = false;
    for (const auto& g : p.elements)
      if (g.is_identity()) has_id = true;
    if (!has_id)
      throw Error(Errc::NonClosedGroup, "identity coset missing");
    if (p.elements.size() > 48)
      throw Error(Errc::PointGroupTooLarge, "point group order " + std::to_string(p.elements.size()) + " exceeds 48");

    // orthogonality wrt lattice Gram: A^T M A = M
    for (const auto& g : p.elements) {
      RatMat ar(n, RatVec(n));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) ar[i][j] = Rat(g.A[i][j]);
      RatMat lhs = rat_mul(rat_transpose(ar), rat_mul(cp.gram, ar));
      if (lhs != cp.gram)
        throw Error(Errc::NonOrthogonalAction, "linear part is not an isometry of the metric");
    }
    // closure mod lattice (products and inverses land in the listed cosets)
    for (const auto& a : p.elements)
      for (const auto& b : p.elements) {
        AffineElement ab = reduce_mod_lattice(affine_compose(a, b));
        bool found = false;
        for (const auto& c : p.elements)
          if (same_mod_lattice(ab, c)) found = true;
        if (!found)
          throw Error(Errc::NonClosedGroup, "product of cosets leaves the listed set");
      }
    for (const auto& a : p.elements) {
      AffineElement ai = reduce_mod_lattice(affine_inverse(a));
      bool found = false;
      for (const auto& c : p.elements)
        if (same_mod_lattice(ai, c)) found = true;
      if (!found)
        throw Error(Errc::NonClosedGroup, "inverse of a coset leaves the listed set");
    }
    cp.effective = true;  // affine action of a crystallographic group is effective after dedup

    std::string ser = "flat;" + std::to_string(n) + ";";
    for (const auto& row : cp.gram)
      for (const auto& x : row) ser += rat_str(x) + ",";
    for (const auto& g : p.elements) ser += affine_key(g) + ";";
    cp.hash = detail::hex64(detail::fnv1a(ser));
    return cp;
  }

  // ---- rank-one circle ----
  p.dimension = 1;
  RankOneData& r1 = cp.p.rank_one;
  if (r1.ell <= 0) throw Error(Errc::BadInput, "translation length must be positive");
  const Eigen::Index k = r1.u0.rows();
  if (k == 0 || r1.u0.cols() != k) throw Error(Errc::BadInput, "u0 must be square and nonempty");
  Eigen::MatrixXcd idk = Eigen::MatrixXcd::Identity(k, k);
  if (!detail::mat_close(r1.u0.adjoint() * r1.u0, idk, 1e-9))
    throw Error(Errc::NonOrthogonalAction, "u0 is not unitary");
  if (r1.h.empty()) r1.h.push_back(idk);
  for (const auto& h : r1.h) {
    if (h.rows() != k || h.cols() != k)
      throw Error(Errc::BadInput, "H element size mismatch");
    if (!detail::mat_close(h.adjoint() * h, idk, 1e-9))
      throw Error(Errc::NonOrthogonalAction, "H element is not unitary");
  }
  // normalize: identity first, stable order by serialized key
  {
    std::vector<Eigen::MatrixXcd> hs = r1.h;
    std::sort(hs.begin(), hs.end(), [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
      return detail::cplx_key(a) < detail::cplx_key(b);
    });
    std::vector<Eigen::MatrixXcd> uniq;
    for (const auto& h : hs)
      if (detail::find_in_list(uniq, h) < 0) uniq.push_back(h);
    int id_at = detail::find_in_list(uniq, idk);
    if (id_at < 0)
      throw Error(Errc::NonClosedGroup, "H does not contain the identity");
    std::swap(uniq[0], uniq[static_cast<std::size_t>(id_at)]);
    r1.h = uniq;
  }
  const std::size_t m = r1.h.size();
  cp.h_closure = r1.h;
  cp.h_table.assign(m, std::vector<int>(m, -1));
  cp.h_inv.assign(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      int at = detail::find_in_list(r1.h, r1.h[i] * r1.h[j]);
      if (at < 0) throw Error(Errc::NonClosedGroup, "H is not closed under multiplication");
      cp.h_table[i][j] = at;
      if (at == 0) cp.h_inv[i] = static_cast<int>(j);
    }
    if (cp.h_inv[i] < 0) throw Error(Errc::NonClosedGroup, "H element has no inverse in the list");
  }
  cp.u0_conj.assign(m, -1);
  Eigen::MatrixXcd u0inv = r1.u0.adjoint();
  for (std::size_t i = 0; i < m; ++i) {
    int at = detail::find_in_list(r1.h, r1.u0 * r1.h[i] * u0inv);
    if (at < 0)
      throw Error(Errc::NonClosedGroup, "u0 does not normalize H");
    cp.u0_conj[i] = at;
  }
  cp.effective = (m == 1);

  std::string ser = "rankone;" + rat_str(r1.ell) + ";" + detail::cplx_key(r1.u0) + "#";
  for (const auto& h : r1.h) ser += detail::cplx_key(h) + "#";
  cp.hash = detail::hex64(detail::fnv1a(ser));
  return cp;
}

}  // namespace orbt
