// CDF of A = prod_k (1 + R_k) with independent R_k ~ Gamma(m_k, Omega_k),
// integer shapes. Three independent numerical routes:
//   * log-domain grid convolution via FFT over the full support (cdf_product_fft),
//   * windowed direct convolution on [0, ln x] (cdf_product_window) --
//     all-positive arithmetic, keeps relative accuracy arbitrarily deep in
//     the lower tail,
//   * Mellin-Barnes contour quadrature (cdf_product_mellin).
// Plus the high-SNR leading term (cdf_product_asymptotic).
#pragma once

#include <vector>

#include "harqir/special_fn.hpp"

namespace harqir {

struct ProductDistSpec {
  std::vector<int> shapes;     ///< m_k = 1 + l_k, integers >= 1
  std::vector<double> scales;  ///< Omega_k > 0

  ProductDistSpec(std::vector<int> shapes_, std::vector<double> scales_);
  int K() const { return static_cast<int>(shapes.size()); }
};

/// Uniform grid over the support [0, y_max] of ln A.
struct LogGrid {
  double y_max = 0.0;
  int n = 1 << 14;  ///< power of two

  double step() const { return y_max / n; }
};

/// Grid whose per-factor tail mass beyond its share of y_max is below
/// tail_tol (inverse-CDF bound on the Gamma tail).
LogGrid make_default_grid(const ProductDistSpec& spec, int n = 1 << 14,
                          double tail_tol = 1e-13);

/// Density of Y = ln(1+R), R ~ Gamma(m, omega):
///   f(y) = (e^y - 1)^{m-1} e^{-(e^y - 1)/omega} e^y / (Gamma(m) omega^m), y >= 0.
double log_factor_pdf(int m, double omega, double y);

/// CDF of Y = ln(1+R) (regularized incomplete gamma of integer shape).
double log_factor_cdf(int m, double omega, double y);

/// F(x) by K-fold FFT convolution of the discretized factor densities on
/// the grid, integrating the resulting density of ln A up to ln x.
/// Throws GridError when some factor keeps mass > 1e-12 beyond y_max.
double cdf_product_fft(const ProductDistSpec& spec, double x, const LogGrid& grid);

struct CdfEstimate {
  double value = 0.0;
  double error = 0.0;  ///< estimated absolute (fft) or relative (window/mellin)
  int refinement = 0;  ///< grid n, window n, or contour points used
};

/// FFT route with the grid doubled until successive results differ by
/// less than tol (error = last difference).
CdfEstimate cdf_product_fft_auto(const ProductDistSpec& spec, double x,
                                 double tol = 1e-8, int n0 = 1 << 14,
                                 int n_max = 1 << 20);

/// Direct trapezoid convolution restricted to [0, ln x], with one
/// Richardson extrapolation; n is the node count of the finer grid.
double cdf_product_window(const ProductDistSpec& spec, double x, int n = 1024);

/// Window route with n doubled until the extrapolated value is stable to
/// rel_tol (error = last relative change).
CdfEstimate cdf_product(const ProductDistSpec& spec, double x,
                        double rel_tol = 1e-9);

struct ContourParams {
  double c = -1.0;        ///< contour abscissa Re(s); <= 0 selects the
                          ///< Chernoff saddle automatically
  double step = 0.2;      ///< trapezoid step in Im(s)
  double tol = 1e-8;      ///< relative tail tolerance
  double tau_max = 5e6;   ///< contour truncation guard
};

/// F(x) = (1/2*pi*i) \int_{c-i inf}^{c+i inf} (x^s / s) prod_k E[A_k^{-s}] ds,
/// E[A_k^{-s}] = Omega_k^{-m_k} Psi(m_k, m_k+1-s; 1/Omega_k), evaluated by
/// trapezoid quadrature along the vertical contour. Throws
/// ConvergenceError with the residual when tau_max is hit first.
CdfEstimate cdf_product_mellin(const ProductDistSpec& spec, double x,
                               const ContourParams& params = {});

/// Mellin-Barnes constant M(x; l) of the leading term:
///   M = (1/2*pi*i) \int (x^s / s) prod_k Gamma(s-1-l_k)/Gamma(s) ds,
/// equal to (prod_k 1/l_k!) * Vol{t >= 0 : prod(1+t_k) <= x}. Reduces to
/// G_K(x) when l = 0.
double asymptotic_constant(const std::vector<int>& l, double x);

/// Leading-order F(x) ~ prod_k (gamma zeta_k)^{-(1+l_k)} * M(x; l) with
/// scales Omega_k = gamma * zeta_k; shapes of spec give l_k = m_k - 1.
double cdf_product_asymptotic(const ProductDistSpec& spec, double x,
                              double gamma, const std::vector<double>& zeta);

/// P(R > r) for R ~ Gamma(m, omega), integer m (Erlang survival).
double erlang_survival(int m, double omega, double r);

/// Smallest r with erlang survival <= tail_tol.
double erlang_tail_quantile(int m, double omega, double tail_tol);

namespace detail {
/// E[(1+R)^{-v}] for R ~ Gamma(m, omega), complex v (the per-factor
/// Mellin transform along the contour).
ComplexPoint mellin_factor(int m, double omega, ComplexPoint v);
}  // namespace detail

}  // namespace harqir
