#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "orbt/error.hpp"

namespace orbt {

/// A conformal metric profile on the parameter circle R/Z: g = phi(x)^2 dx^2.
struct CircleProfile {
  std::function<double(double)> phi;
  std::string name;
};

namespace detail {

/// Fourier coefficients f_hat[m+mmax] = int_0^1 f(x) e^{-2 pi i m x} dx
inline std::vector<std::complex<double>> fourier_coeffs(const std::function<double(double)>& f,
                                                        int mmax, int grid = 4096) {
  std::vector<std::complex<double>> out(2 * mmax + 1);
  std::vector<double> vals(grid);
  for (int j = 0; j < grid; ++j) {
    vals[j] = f(static_cast<double>(j) / grid);
    if (!(vals[j] > 0) || !std::isfinite(vals[j]))
      throw Error(Errc::NonPositiveMetric, "profile must be positive and finite");
  }
  for (int m = -mmax; m <= mmax; ++m) {
    std::complex<double> acc = 0.0;
    double w = -2.0 * M_PI * m / grid;
    for (int j = 0; j < grid; ++j) acc += vals[j] * std::polar(1.0, w * j);
    out[m + mmax] = acc / static_cast<double>(grid);
  }
  return out;
}

inline Eigen::MatrixXcd toeplitz_of(const std::vector<std::complex<double>>& coeffs, int k) {
  int mmax = (static_cast<int>(coeffs.size()) - 1) / 2;
  int n = 2 * k + 1;
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int d = i - j;
      m(i, j) = (std::abs(d) <= mmax) ? coeffs[d + mmax] : 0.0;
    }
  return m;
}

}  // namespace detail

/// Fourier-Galerkin discretization of the twisted Laplacian on the curved
/// circle.  The degree-0 operator is realized in its symmetrized form
/// -M_a D M_b D M_a with a = phi^{-1/2}, b = 1/phi, which is Hermitian; the
/// degree-1 operator -D M_b D M_b is kept for the duality cross-check.
struct CircleDiscretization {
  double mu = 0.0;      // twist angle over 2 pi
  double length = 0.0;  // int_0^1 phi
  Eigen::VectorXd eigenvalues;  // ascending
};

inline CircleDiscretization circle_spectrum_numeric(const CircleProfile& prof, double mu, int k) {
  if (k < 8) throw Error(Errc::TooFewModes, "need at least 8 Fourier modes");
  auto a_coef = detail::fourier_coeffs([&](double x) { return 1.0 / std::sqrt(prof.phi(x)); }, 2 * k);
  auto b_coef = detail::fourier_coeffs([&](double x) { return 1.0 / prof.phi(x); }, 2 * k);
  auto p_coef = detail::fourier_coeffs(prof.phi, 2 * k);
  int n = 2 * k + 1;
  Eigen::MatrixXcd ma = detail::toeplitz_of(a_coef, k);
  Eigen::MatrixXcd mb = detail::toeplitz_of(b_coef, k);
  Eigen::VectorXcd d(n);
  for (int i = 0; i < n; ++i) d(i) = std::complex<double>(0.0, 2.0 * M_PI * (i - k + mu));
  Eigen::MatrixXcd da = d.asDiagonal() * ma;
  Eigen::MatrixXcd op = da.adjoint() * mb * da;  // equals -M_a D M_b D M_a, positive
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op);
  if (es.info() != Eigen::Success) throw Error(Errc::BadInput, "eigensolver failed");
  CircleDiscretization out;
  out.mu = mu;
  out.length = p_coef[2 * k].real();
  out.eigenvalues = es.eigenvalues();
  return out;
}

/// Lowest eigenvalues of the degree-1 realization (non-Hermitian form), for
/// checking Hodge duality of the discretizations.
inline std::vector<double> circle_one_form_spectrum(const CircleProfile& prof, double mu, int k,
                                                    int count) {
  auto b_coef = detail::fourier_coeffs([&](double x) { return 1.0 / prof.phi(x); }, 2 * k);
  int n = 2 * k + 1;
  Eigen::MatrixXcd mb = detail::toeplitz_of(b_coef, k);
  Eigen::VectorXcd d(n);
  for (int i = 0; i < n; ++i) d(i) = std::complex<double>(0.0, 2.0 * M_PI * (i - k + mu));
  Eigen::MatrixXcd op = -(d.asDiagonal() * Eigen::MatrixXcd(mb * d.asDiagonal() * mb));
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op);
  if (es.info() != Eigen::Success) throw Error(Errc::BadInput, "eigensolver failed");
  std::vector<double> re;
  for (int i = 0; i < n; ++i) {
    auto z = es.eigenvalues()(i);
    if (std::abs(z.imag()) > 1e-6 * (1.0 + std::abs(z.real())))
      throw Error(Errc::KernelMismatch, "one-form spectrum is not real");
    re.push_back(z.real());
  }
  std::sort(re.begin(), re.end());
  if (count < static_cast<int>(re.size())) re.resize(count);
  return re;
}

struct NumericTorsionResult {
  double log_t = 0.0;
  double t = 1.0;
  double length = 0.0;
  double tail_correction = 0.0;  // discretization part: sum of log-ratio to the isometric reference
  double error_estimate = 0.0;   // difference against the half-resolution run
};

/// Torsion of the twisted curved circle from the numeric spectrum.  The
/// eigenvalue ladder is completed by the exact ladder of the isometric round
/// circle of the same length, so only discretization error enters the tail.
inline NumericTorsionResult circle_numeric_torsion(const CircleProfile& prof, double theta,
                                                   int k = 400, int keep = 240) {
  double mu = theta / (2.0 * M_PI);
  mu -= std::floor(mu);
  if (std::min(mu, 1.0 - mu) < 1e-9)
    throw Error(Errc::KernelMismatch, "torsion ladder needs an acyclic twist");
  double phi_max = 0.0;
  for (int j = 0; j < 2048; ++j) phi_max = std::max(phi_max, prof.phi(j / 2048.0));
  auto run = [&](int kk, int kp) {
    CircleDiscretization cd = circle_spectrum_numeric(prof, mu, kk);
    double el = cd.length;
    // Ladder entries whose modes reach the truncation window are unreliable;
    // the Fourier support of entry i spreads to about (i/2) max(phi) / length.
    kp = std::min(kp, static_cast<int>(std::floor(1.4 * kk * el / phi_max)));
    if (kp < 8) throw Error(Errc::TooFewModes, "profile needs a larger mode window");
    std::vector<double> ref;
    for (int j = -kk; j <= kk; ++j) {
      double base = 2.0 * M_PI * (j + mu) / el;
      ref.push_back(base * base);
    }
    std::sort(ref.begin(), ref.end());
    double corr = 0.0;
    for (int i = 0; i < kp; ++i) corr += std::log(cd.eigenvalues(i)) - std::log(ref[i]);
    double closed = std::log(4.0 * std::sin(M_PI * mu) * std::sin(M_PI * mu));
    return std::pair<double, double>(0.5 * (closed + corr), corr);
  };
  auto [log_t, corr] = run(k, keep);
  auto [log_t_half, corr_half] = run(k / 2, keep / 2);
  NumericTorsionResult out;
  out.log_t = log_t;
  out.t = std::exp(log_t);
  out.length = circle_spectrum_numeric(prof, mu, 16).length;
  out.tail_correction = corr;
  out.error_estimate = std::abs(log_t - log_t_half);
  return out;
}

struct ProfileInvarianceResult {
  std::vector<double> log_t;
  std::vector<std::string> names;
  double max_deviation = 0.0;   // pairwise spread of log T across the profiles
  double closed_form_dev = 0.0; // worst distance to log|2 sin(theta/2)|
};

/// Metric invariance of the torsion over conformal profiles of the circle.
inline ProfileInvarianceResult profile_invariance_check(const std::vector<CircleProfile>& profiles,
                                                        double theta, int k = 400) {
  ProfileInvarianceResult r;
  double target = std::log(std::abs(2.0 * std::sin(theta / 2.0)));
  for (const auto& p : profiles) {
    NumericTorsionResult t = circle_numeric_torsion(p, theta, k);
    r.log_t.push_back(t.log_t);
    r.names.push_back(p.name);
    r.closed_form_dev = std::max(r.closed_form_dev, std::abs(t.log_t - target));
  }
  for (double a : r.log_t)
    for (double b : r.log_t) r.max_deviation = std::max(r.max_deviation, std::abs(a - b));
  return r;
}

}  // namespace orbt
