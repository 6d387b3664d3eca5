#pragma once

#include <cmath>
#include <vector>

#include "orbt/spectrum.hpp"

namespace orbt {

inline double heat_trace_spectral(const SpectrumTable& st, int degree, double t) {
  if (degree < 0 || degree >= st.degrees) throw Error(Errc::BadInput, "degree out of range");
  double s = 0.0;
  for (const auto& sh : st.shells) s += static_cast<double>(sh.mult[degree]) * std::exp(-sh.lambda * t);
  return s;
}

inline double supertrace_spectral(const SpectrumTable& st, double t) {
  double s = 0.0;
  for (int p = 0; p < st.degrees; ++p) {
    double w = (p % 2 == 0) ? 1.0 : -1.0;
    s += w * heat_trace_spectral(st, p, t);
  }
  return s;
}

/// Class-unfolded geometric heat trace for a flat quotient: one Gaussian term
/// per translation class of each coset, summed to a radius set by the target
/// accuracy.  Twist traces enter through the character blocks.
class FlatHeatEvaluator {
 public:
  FlatHeatEvaluator(const CheckedPresentation& cp, CheckedRep& cr) : cp_(cp), cr_(cr) {
    if (cp.p.kind != PresentationKind::FlatCrystallographic)
      throw Error(Errc::UnsupportedGroup, "flat heat evaluator expects a flat presentation");
    merge_equal_blocks(cr_);
    const std::size_t n = static_cast<std::size_t>(cp.dim());
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = to_double(cp.gram[i][j]);
    for (std::size_t ci = 0; ci < cp.p.elements.size(); ++ci) {
      const auto& g = cp.p.elements[ci];
      Coset c;
      c.index = ci;
      c.ainv = int_inverse_unimodular(g.A);
      for (std::size_t p = 0; p <= n; ++p) c.wedge.push_back(static_cast<double>(Rat(trace_wedge(c.ainv, p)).convert_to<long>()));
      IntMat ima(n, IntVec(n));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) ima[i][j] = ((i == j) ? Int(1) : Int(0)) - g.A[i][j];
      Smith sm = smith_normal_form(ima);
      IntMat uinv = int_inverse_unimodular(sm.u);
      std::size_t mm = sm.d.empty() ? 0 : sm.d[0].size();
      std::vector<std::size_t> free_rows, torsion_rows;
      for (std::size_t i = 0; i < n; ++i) {
        Int d = (i < mm) ? sm.d[i][i] : Int(0);
        (d == 0 ? free_rows : torsion_rows).push_back(i);
      }
      // integer basis of the kernel of I-A: columns of V at zero divisors
      for (std::size_t i : free_rows) {
        IntVec col(n);
        for (std::size_t j = 0; j < n; ++j) col[j] = sm.v[j][i];
        c.kernel.push_back(col);
      }
      std::size_t d = c.kernel.size();
      c.fix_dim = static_cast<int>(d);
      Eigen::MatrixXd b(n, d);
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < n; ++i) b(i, j) = static_cast<double>(c.kernel[j][i].convert_to<long>());
      if (d > 0) {
        Eigen::MatrixXd gv = b.transpose() * m * b;
        c.covol = std::sqrt(gv.determinant());
        c.proj = b * gv.inverse() * b.transpose() * m;
        c.gram_v = gv;
      } else {
        c.covol = 1.0;
        c.proj = Eigen::MatrixXd::Zero(n, n);
      }
      // |det of (I-A) off the kernel| in the metric sense
      Eigen::MatrixXd ia(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) ia(i, j) = static_cast<double>(ima[i][j].convert_to<long>());
      if (d < n) {
        // M-orthonormal frame of the orthocomplement of the kernel
        Eigen::LLT<Eigen::MatrixXd> llt(m);
        Eigen::MatrixXd l = llt.matrixL();
        Eigen::MatrixXd kv = l.transpose() * b;  // kernel in orthonormal coords
        Eigen::MatrixXd full(n, n);
        full.setZero();
        if (d > 0) {
          Eigen::HouseholderQR<Eigen::MatrixXd> qr(kv);
          full = qr.householderQ();
        } else {
          full.setIdentity();
        }
        Eigen::MatrixXd perp = full.rightCols(n - d);
        Eigen::MatrixXd ia_on = l.transpose() * ia * l.transpose().inverse();
        Eigen::MatrixXd t = perp.transpose() * ia_on * perp;
        c.det_perp = std::abs(t.determinant());
      } else {
        c.det_perp = 1.0;
      }
      // torsion representatives: w = U^{-1} y with free rows solved from v, torsion rows cycled
      RatVec uva(n, 0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) uva[i] += Rat(sm.u[i][j]) * g.v[j];
      std::vector<Int> divs;
      for (std::size_t i : torsion_rows) divs.push_back(sm.d[i][i]);
      std::vector<Int> idx(divs.size(), 0);
      while (true) {
        IntVec y(n, 0);
        for (std::size_t k = 0; k < divs.size(); ++k) y[torsion_rows[k]] = idx[k];
        IntVec w(n, 0);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) w[i] += uinv[i][j] * y[j];
        c.torsion_reps.push_back(w);
        std::size_t k = 0;
        for (; k < divs.size(); ++k) {
          idx[k] += 1;
          if (idx[k] < divs[k]) break;
          idx[k] = 0;
        }
        if (divs.empty() || k == divs.size()) break;
      }
      // block data: preserved blocks and their coset traces
      for (std::size_t bi = 0; bi < cr_.blocks.size(); ++bi) {
        const auto& blk = cr_.blocks[bi];
        RatVec mu2(n, 0);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) mu2[i] += Rat(c.ainv[j][i]) * blk.mu[j];
        bool fixed = true;
        for (std::size_t i = 0; i < n; ++i)
          if (rat_mod1(mu2[i] - blk.mu[i]) != 0) { fixed = false; break; }
        if (!fixed) continue;
        Cplx tr = (blk.basis.adjoint() * cr_.rep.coset[ci] * blk.basis).trace();
        c.block_ids.push_back(bi);
        c.block_tr.push_back(tr);
      }
      cosets_.push_back(std::move(c));
    }
    metric_ = m;
  }

  /// Coefficients alpha[d] of t^{-d/2} in the small-time expansion: the classes
  /// with vanishing displacement, one exact power each.
  std::vector<double> singular_alpha(int degree) const {
    const std::size_t n = static_cast<std::size_t>(cp_.dim());
    std::vector<double> alpha(n + 1, 0.0);
    const double inv_p = 1.0 / static_cast<double>(cp_.p.elements.size());
    for (const auto& c : cosets_) {
      double pref = inv_p * c.wedge[degree] * c.covol * std::pow(4 * M_PI, -0.5 * c.fix_dim) / c.det_perp;
      for (const auto& wt : c.torsion_reps) {
        Eigen::VectorXd vw(n);
        for (std::size_t i = 0; i < n; ++i) vw(i) = to_double(cp_.p.elements[c.index].v[i] + Rat(wt[i]));
        Eigen::VectorXd a0 = c.proj * vw;
        double an2 = (a0.transpose() * metric_ * a0)(0, 0);
        if (an2 < 1e-8) alpha[c.fix_dim] += pref * rep_trace(c, wt);
      }
    }
    return alpha;
  }

  /// Smallest nonzero squared displacement (a lower bound; sizes quadratures).
  double gap() const {
    double g = 1e30;
    const std::size_t n = static_cast<std::size_t>(cp_.dim());
    for (const auto& c : cosets_) {
      if (c.fix_dim > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.gram_v);
        g = std::min(g, es.eigenvalues().minCoeff());
      }
      for (const auto& wt : c.torsion_reps) {
        Eigen::VectorXd vw(n);
        for (std::size_t i = 0; i < n; ++i) vw(i) = to_double(cp_.p.elements[c.index].v[i] + Rat(wt[i]));
        Eigen::VectorXd a0 = c.proj * vw;
        double an2 = (a0.transpose() * metric_ * a0)(0, 0);
        if (an2 > 1e-8) g = std::min(g, an2);
      }
    }
    return g;
  }

  /// Geometric heat trace with the singular (zero-displacement) classes removed:
  /// the exponentially small remainder feeding the Mellin integrals.
  double evaluate_regular(int degree, double t, double tol = 1e-15) const {
    return evaluate_impl(degree, t, tol, true);
  }

  /// Geometric heat trace in the given form degree at time t, accurate to tol.
  double evaluate(int degree, double t, double tol = 1e-13) const {
    return evaluate_impl(degree, t, tol, false);
  }

  double evaluate_impl(int degree, double t, double tol, bool regular_only) const {
    const std::size_t n = static_cast<std::size_t>(cp_.dim());
    if (degree < 0 || degree > static_cast<int>(n)) throw Error(Errc::BadInput, "degree out of range");
    double total = 0.0;
    const double inv_p = 1.0 / static_cast<double>(cp_.p.elements.size());
    const double r2max = 4.0 * t * (std::log(1.0 / tol) + 12.0);
    for (const auto& c : cosets_) {
      const auto& g = cp_.p.elements[c.index];
      double pref = inv_p * c.wedge[degree] * c.covol * std::pow(4 * M_PI * t, -0.5 * c.fix_dim) / c.det_perp;
      if (pref == 0.0) continue;
      double coset_sum = 0.0;
      for (const auto& wt : c.torsion_reps) {
        Eigen::VectorXd vw(n);
        for (std::size_t i = 0; i < n; ++i) vw(i) = to_double(g.v[i] + Rat(wt[i]));
        Eigen::VectorXd a0 = c.proj * vw;
        if (c.fix_dim == 0) {
          if (!regular_only) coset_sum += rep_trace(c, wt);  // a = 0 on a point class
          continue;
        }
        // enumerate the free lattice a = a0 + B y within the radius
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.gram_v);
        double lmin = es.eigenvalues().minCoeff();
        double a0n = std::sqrt((a0.transpose() * metric_ * a0)(0, 0));
        long box = static_cast<long>(std::ceil((std::sqrt(r2max) + a0n) / std::sqrt(lmin))) + 1;
        std::size_t d = static_cast<std::size_t>(c.fix_dim);
        std::vector<long> y(d, -box);
        while (true) {
          IntVec w = wt;
          for (std::size_t j = 0; j < d; ++j)
            for (std::size_t i = 0; i < n; ++i) w[i] += Int(y[j]) * c.kernel[j][i];
          Eigen::VectorXd a = a0;
          for (std::size_t j = 0; j < d; ++j)
            for (std::size_t i = 0; i < n; ++i)
              a(i) += static_cast<double>(y[j]) * static_cast<double>(c.kernel[j][i].convert_to<long>());
          double an2 = (a.transpose() * metric_ * a)(0, 0);
          if (an2 <= r2max && !(regular_only && an2 < 1e-8))
            coset_sum += rep_trace(c, w) * std::exp(-an2 / (4 * t));
          std::size_t j = 0;
          for (; j < d; ++j) {
            y[j] += 1;
            if (y[j] <= box) break;
            y[j] = -box;
          }
          if (j == d) break;
        }
      }
      total += pref * coset_sum;
    }
    return total;
  }

  double supertrace(double t, double tol = 1e-13) const {
    double s = 0.0;
    for (int p = 0; p <= cp_.dim(); ++p) s += ((p % 2 == 0) ? 1.0 : -1.0) * evaluate(p, t, tol);
    return s;
  }

 private:
  struct Coset {
    std::size_t index = 0;
    IntMat ainv;
    std::vector<double> wedge;
    std::vector<IntVec> kernel;
    int fix_dim = 0;
    double covol = 1.0;
    double det_perp = 1.0;
    Eigen::MatrixXd proj;
    Eigen::MatrixXd gram_v;
    std::vector<IntVec> torsion_reps;
    std::vector<std::size_t> block_ids;
    std::vector<Cplx> block_tr;
  };

  double rep_trace(const Coset& c, const IntVec& w) const {
    Cplx s = 0.0;
    for (std::size_t k = 0; k < c.block_ids.size(); ++k) {
      const auto& blk = cr_.blocks[c.block_ids[k]];
      double ph = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i)
        ph += 2 * M_PI * blk.mu_d[i] * static_cast<double>(w[i].convert_to<long>());
      s += std::polar(1.0, ph) * c.block_tr[k];
    }
    return s.real();
  }

  const CheckedPresentation& cp_;
  CheckedRep& cr_;
  std::vector<Coset> cosets_;
  Eigen::MatrixXd metric_;
};

struct McKeanSingerResult {
  long euler = 0;             // alternating Betti sum from the kernel
  double max_deviation = 0.0; // sup over the grid of |supertrace - euler|
  std::vector<double> grid;
};

inline McKeanSingerResult mckean_singer_check(const SpectrumTable& st, const std::vector<double>& t_grid) {
  McKeanSingerResult r;
  r.grid = t_grid;
  for (int p = 0; p < st.degrees; ++p) r.euler += ((p % 2 == 0) ? 1 : -1) * st.betti[p];
  for (double t : t_grid) {
    double s = supertrace_spectral(st, t);
    r.max_deviation = std::max(r.max_deviation, std::abs(s - static_cast<double>(r.euler)));
  }
  return r;
}

}  // namespace orbt
