// Test-only oracles, written independently of the library's internal
// evaluation paths: adaptive Simpson quadrature, gamma sampling through
// the standard library, and simple goodness-of-fit statistics.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

// --- adaptive Simpson -------------------------------------------------------

inline double simpson_step(const std::function<double(double)>& f, double a,
                           double b, double fa, double fm, double fb, double whole,
                           double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int depth = 40) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

/// \int_a^inf f, via t = a + u/(1-u) over u in (0,1)
inline double integrate_to_inf(const std::function<double(double)>& f, double a,
                               double tol = 1e-10) {
  return integrate(
      [&](double u) {
        if (u >= 1.0) return 0.0;
        const double t = a + u / (1.0 - u);
        const double jac = 1.0 / ((1.0 - u) * (1.0 - u));
        const double v = f(t);
        return v == 0.0 ? 0.0 : v * jac;
      },
      0.0, 1.0, tol);
}

inline std::complex<double> integrate_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    double tol = 1e-10) {
  const double re = integrate([&](double t) { return f(t).real(); }, a, b, tol);
  const double im = integrate([&](double t) { return f(t).imag(); }, a, b, tol);
  return {re, im};
}

// --- sampling ---------------------------------------------------------------

/// Gamma(shape, scale) draws through the standard library (independent of
/// the library's own stream machinery).
inline std::vector<double> gamma_draws(int shape, double scale, size_t n,
                                       unsigned seed) {
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> dist(static_cast<double>(shape), scale);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

// --- statistics -------------------------------------------------------------

/// Kolmogorov-Smirnov statistic against a callable CDF (sorts a copy).
inline double ks_statistic(std::vector<double> xs,
                           const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(xs[i]);
    d = std::max(d, std::abs(F - static_cast<double>(i) / n));
    d = std::max(d, std::abs(F - static_cast<double>(i + 1) / n));
  }
  return d;
}

/// KS critical value at significance alpha (asymptotic).
inline double ks_critical(size_t n, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

/// chi^2 critical value via the Wilson-Hilferty approximation.
inline double chi2_critical(int df, double alpha_upper) {
  // alpha_upper = 0.01 -> z = 2.3263
  const double z = alpha_upper == 0.01 ? 2.3263478740408408 : 1.6448536269514722;
  const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
  return df * t * t * t;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, sa = 0.0, sb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    sa += (a[i] - ma) * (a[i] - ma);
    sb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(sa * sb);
}

}  // namespace oracles
