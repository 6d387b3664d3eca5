#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbt {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

using RatVec = std::vector<Rat>;
using RatMat = std::vector<std::vector<Rat>>;
using IntVec = std::vector<Int>;
using IntMat = std::vector<std::vector<Int>>;

inline double to_double(const Rat& q) { return q.convert_to<double>(); }

/// Parse "3", "-7/2", "0.25" into an exact rational.
inline Rat parse_rat(const std::string& tok) {
  auto slash = tok.find('/');
  if (slash != std::string::npos) {
    Int num(tok.substr(0, slash)), den(tok.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rational with zero denominator: " + tok);
    return Rat(num, den);
  }
  auto dot = tok.find('.');
  if (dot != std::string::npos) {
    std::string head = tok.substr(0, dot), frac = tok.substr(dot + 1);
    bool neg = !head.empty() && head[0] == '-';
    if (head == "-" || head.empty()) head = "0";
    Int ip(head), scale = 1;
    for (char c : frac) {
      if (c < '0' || c > '9') throw std::invalid_argument("bad rational token: " + tok);
      scale *= 10;
    }
    Rat r = Rat(ip) + (neg ? -1 : 1) * Rat(Int(frac.empty() ? "0" : frac), scale);
    return r;
  }
  return Rat(Int(tok));
}

inline std::string rat_str(const Rat& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

// ---- small dense rational linear algebra (n is tiny; clarity over speed) ----

inline RatMat rat_identity(std::size_t n) {
  RatMat m(n, RatVec(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline RatMat rat_mul(const RatMat& a, const RatMat& b) {
  std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  RatMat c(n, RatVec(m, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
    }
  return c;
}

inline RatVec rat_apply(const RatMat& a, const RatVec& x) {
  RatVec y(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  return y;
}

inline RatMat rat_transpose(const RatMat& a) {
  if (a.empty()) return a;
  RatMat t(a[0].size(), RatVec(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

inline Rat rat_dot(const RatVec& x, const RatVec& y) {
  Rat s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

/// Gaussian-elimination determinant.
inline Rat rat_det(RatMat a) {
  std::size_t n = a.size();
  Rat det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a[r][c] == 0) continue;
      Rat f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return det;
}

/// Inverse; throws if singular.
inline RatMat rat_inverse(RatMat a) {
  std::size_t n = a.size();
  RatMat inv = rat_identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) throw std::domain_error("singular matrix");
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    Rat piv = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= piv;
      inv[c][j] /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Rat f = a[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

/// Solve a x = b allowing a singular square a: returns any solution, or nullopt
/// if inconsistent.  Used for fixed-point equations (I−A)x = v.
inline std::optional<RatVec> rat_solve_any(RatMat a, RatVec b) {
  std::size_t n = a.size();
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t c = 0; c < n && row < n; ++c) {
    std::size_t p = row;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) continue;
    std::swap(a[p], a[row]);
    std::swap(b[p], b[row]);
    Rat piv = a[row][c];
    for (std::size_t j = 0; j < n; ++j) a[row][j] /= piv;
    b[row] /= piv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == row || a[r][c] == 0) continue;
      Rat f = a[r][c];
      for (std::size_t j = 0; j < n; ++j) a[r][j] -= f * a[row][j];
      b[r] -= f * b[row];
    }
    pivot_col.push_back(c);
    ++row;
  }
  for (std::size_t r = row; r < n; ++r)
    if (b[r] != 0) return std::nullopt;
  RatVec x(n, 0);
  for (std::size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = b[i];
  return x;
}

/// Rational kernel basis of a (as columns).
inline std::vector<RatVec> rat_kernel(RatMat a) {
  std::size_t rows = a.size(), n = rows ? a[0].size() : 0;
  std::vector<int> pivot_of_col(n, -1);
  std::size_t row = 0;
  for (std::size_t c = 0; c < n && row < rows; ++c) {
    std::size_t p = row;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[row]);
    Rat piv = a[row][c];
    for (std::size_t j = 0; j < n; ++j) a[row][j] /= piv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == row || a[r][c] == 0) continue;
      Rat f = a[r][c];
      for (std::size_t j = 0; j < n; ++j) a[r][j] -= f * a[row][j];
    }
    pivot_of_col[c] = static_cast<int>(row);
    ++row;
  }
  std::vector<RatVec> basis;
  for (std::size_t c = 0; c < n; ++c) {
    if (pivot_of_col[c] >= 0) continue;
    RatVec v(n, 0);
    v[c] = 1;
    for (std::size_t cc = 0; cc < n; ++cc)
      if (pivot_of_col[cc] >= 0) v[cc] = -a[static_cast<std::size_t>(pivot_of_col[cc])][c];
    basis.push_back(std::move(v));
  }
  return basis;
}

// ---- Smith normal form over Z ----

struct Smith {
  IntMat u, d, v;  // u*a*v = d, u,v unimodular, d diagonal with divisibility chain
};

inline Smith smith_normal_form(IntMat a) {
  std::size_t n = a.size(), m = n ? a[0].size() : 0;
  IntMat u(n, IntVec(n, 0)), v(m, IntVec(m, 0));
  for (std::size_t i = 0; i < n; ++i) u[i][i] = 1;
  for (std::size_t j = 0; j < m; ++j) v[j][j] = 1;

  auto swap_rows = [&](std::size_t i, std::size_t j) { std::swap(a[i], a[j]); std::swap(u[i], u[j]); };
  auto swap_cols = [&](std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < n; ++r) std::swap(a[r][i], a[r][j]);
    for (std::size_t r = 0; r < m; ++r) std::swap(v[r][i], v[r][j]);
  };
  auto addmul_row = [&](std::size_t dst, std::size_t src, const Int& f) {
    for (std::size_t j = 0; j < m; ++j) a[dst][j] += f * a[src][j];
    for (std::size_t j = 0; j < n; ++j) u[dst][j] += f * u[src][j];
  };
  auto addmul_col = [&](std::size_t dst, std::size_t src, const Int& f) {
    for (std::size_t r = 0; r < n; ++r) a[r][dst] += f * a[r][src];
    for (std::size_t r = 0; r < m; ++r) v[r][dst] += f * v[r][src];
  };

  std::size_t t = 0;
  while (t < n && t < m) {
    // find a nonzero pivot with minimal absolute value
    std::size_t pi = t, pj = t;
    bool found = false;
    Int best = 0;
    for (std::size_t i = t; i < n; ++i)
      for (std::size_t j = t; j < m; ++j)
        if (a[i][j] != 0 && (!found || abs(a[i][j]) < best)) {
          best = abs(a[i][j]);
          pi = i; pj = j; found = true;
        }
    if (!found) break;
    swap_rows(t, pi);
    swap_cols(t, pj);
    bool clean = true;
    for (std::size_t i = t + 1; i < n; ++i)
      if (a[i][t] != 0) {
        addmul_row(i, t, -(a[i][t] / a[t][t]));
        if (a[i][t] != 0) clean = false;
      }
    for (std::size_t j = t + 1; j < m; ++j)
      if (a[t][j] != 0) {
        addmul_col(j, t, -(a[t][j] / a[t][t]));
        if (a[t][j] != 0) clean = false;
      }
    if (!clean) continue;  // remainder left somewhere, repeat with smaller pivot
    // enforce divisibility d_t | a_ij for the trailing block
    bool redo = false;
    for (std::size_t i = t + 1; i < n && !redo; ++i)
      for (std::size_t j = t + 1; j < m && !redo; ++j)
        if (a[i][j] % a[t][t] != 0) {
          addmul_row(t, i, 1);
          redo = true;
        }
    if (redo) continue;
    if (a[t][t] < 0) {
      for (std::size_t j = 0; j < m; ++j) a[t][j] = -a[t][j];
      for (std::size_t j = 0; j < n; ++j) u[t][j] = -u[t][j];
    }
    ++t;
  }
  return {std::move(u), std::move(a), std::move(v)};
}

/// Is d (integer vector) in the column span over Z of a?  Uses u*a*v = s:
/// a x = d  <=>  s (v^{-1} x) = u d, solvable iff s_ii | (u d)_i and zero rows match.
inline bool in_integer_image(const Smith& s, const IntVec& d) {
  std::size_t n = s.d.size();
  IntVec ud(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) ud[i] += s.u[i][j] * d[j];
  std::size_t m = s.d.empty() ? 0 : s.d[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    Int dii = (i < m) ? s.d[i][i] : Int(0);
    if (dii == 0) {
      if (ud[i] != 0) return false;
    } else if (ud[i] % dii != 0) {
      return false;
    }
  }
  return true;
}

// ---- misc ----

/// Continued-fraction rationalization: nearest p/q with q <= maxden if within tol.
inline std::optional<Rat> rationalize(double x, long maxden = 100000, double tol = 1e-9) {
  if (!std::isfinite(x)) return std::nullopt;
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = x;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(v);
    if (fl > 9e17 || fl < -9e17) break;
    long a = static_cast<long>(fl);
    long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > maxden) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double rem = v - static_cast<double>(a);
    if (std::abs(static_cast<double>(p1) / q1 - x) < tol / 4 || rem < 1e-15) break;
    v = 1.0 / rem;
  }
  if (q1 == 0) return std::nullopt;
  if (std::abs(static_cast<double>(p1) / q1 - x) <= tol) return Rat(p1, q1);
  return std::nullopt;
}

/// Exact square root when the value is a perfect rational square.
inline std::optional<Rat> rat_sqrt(const Rat& x) {
  if (x < 0) return std::nullopt;
  if (x == 0) return Rat(0);
  Int n = numerator(x), d = denominator(x);
  Int sn = boost::multiprecision::sqrt(n), sd = boost::multiprecision::sqrt(d);
  if (sn * sn != n || sd * sd != d) return std::nullopt;
  return Rat(sn, sd);
}

/// Fractional part in [0,1).
inline Rat rat_mod1(const Rat& q) {
  Int n = numerator(q), d = denominator(q);
  Int r = n % d;
  if (r < 0) r += d;
  return Rat(r, d);
}

}  // namespace orbt
