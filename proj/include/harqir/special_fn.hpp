// Scalar numerical kernels used by the analytical outage machinery:
// log-gamma (real and complex), the confluent hypergeometric limit
// function 0F1, Tricomi's Psi, the polynomial-logarithmic G_K family and
// a scaled upper incomplete gamma for complex order.
#pragma once

#include <complex>

namespace harqir {

using ComplexPoint = std::complex<double>;

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// Principal-branch ln Gamma(z) for complex z (Lanczos approximation,
/// reflection for Re z < 0.5). Relative accuracy ~1e-13.
ComplexPoint log_gamma(ComplexPoint z);

/// 0F1(;b;z) for b > 0, z >= 0. Power series with term-ratio stopping;
/// switches to the modified-Bessel asymptotic form for z > 400.
double hyp0f1(double b, double z);

/// ln 0F1(;b;z); usable where the value itself overflows.
double log_hyp0f1(double b, double z);

/// Tricomi's confluent hypergeometric function Psi(a, b; z) for a > 0,
/// z > 0 and complex b, evaluated by adaptive quadrature of
///   Psi(a,b;z) = (1/Gamma(a)) \int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt
/// (tanh-sinh on (0,1], shifted Gauss-Laguerre on (1,inf)).
/// Throws ConvergenceError with the achieved residual when the two
/// refinement ladders disagree beyond tolerance.
ComplexPoint tricomi_psi(double a, ComplexPoint b, double z);
double tricomi_psi(double a, double b, double z);

/// G_K(x) = (-1)^K + x sum_{k=0}^{K-1} (-1)^k (ln x)^{K-k-1}/(K-k-1)!
/// for K >= 1, x >= 1. Equals the volume of {t >= 0 : prod(1+t_k) <= x}.
/// Evaluated through the equivalent tail series
///   G_K(x) = x sum_{j>=0} (-1)^j (ln x)^{K+j}/(K+j)!
/// when ln x is small relative to K (kills the cancellation of the
/// closed form near x = 1).
double g_k(int K, double x);

/// d/dR and d^2/dR^2 of G_K(2^R); order is 1 or 2. Both are >= 0.
double g_k_deriv(int K, double rate, int order);

/// Scaled upper incomplete gamma g(w,z) = z^{-w} e^{z} Gamma(w, z) for
/// complex order w and real z > 0; entire in w. Equivalently
/// g(w,z) = \int_0^inf e^{-zt} (1+t)^{w-1} dt. Series route for small z,
/// modified Lentz continued fraction for z >= 1.5.
ComplexPoint scaled_upper_gamma(ComplexPoint w, double z);

}  // namespace harqir
