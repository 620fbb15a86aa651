// Exponentially time-correlated Rayleigh fading:
//   h_k = sigma_k ( sqrt(1 - rho^{2(k+delta-1)}) a_k + rho^{k+delta-1} a_0 ),
//   gamma_k = P_k |h_k|^2,
// with a_0, a_1..a_K independent CN(0,1). Sampling plus the conditional
// SNR density given the common component T = |a_0|^2.
#pragma once

#include <cstdint>
#include <vector>

#include "harqir/random_stream.hpp"

namespace harqir {

struct ChannelSpec {
  double rho = 0.0;    ///< time correlation, |rho| < 1
  double delta = 1.0;  ///< feedback delay in rounds, >= 0
  std::vector<double> sigma2;  ///< per-round mean squared channel magnitude
  int K = 0;                   ///< maximum number of transmissions

  ChannelSpec(double rho_, double delta_, std::vector<double> sigma2_, int K_);

  /// Convenience: sigma_k^2 identical across rounds.
  static ChannelSpec uniform(double rho, double delta, double sigma2, int K);

  /// rho^{2(k+delta-1)} for round k in 1..K (always >= 0).
  double rho2k(int k) const;

  /// Throws DegenerateCorrelationError if rho^{2(k+delta-1)} >= 1 for
  /// some round (only possible when delta < 1 and rho != 0).
  void require_nondegenerate() const;
};

struct PowerProfile {
  std::vector<double> powers;  ///< linear per-round transmit powers P_k

  explicit PowerProfile(std::vector<double> powers_);

  static PowerProfile equal(double p, int K);
  /// P_k = gamma * theta_k (power split used by the asymptotic analysis).
  static PowerProfile scaled(double gamma, const std::vector<double>& theta);
};

struct SnrSample {
  std::vector<double> snr;  ///< gamma_k, linear SNR per round
};

/// Omega_k = P_k sigma_k^2 (1 - rho^{2(k+delta-1)}), k in 1..K.
double omega(const ChannelSpec& spec, const PowerProfile& power, int k);

/// rho^{k+delta-1}, sign-aware. Throws for rho < 0 with a fractional
/// exponent (no real value; use integer delta with negative rho).
double rho_coupling(const ChannelSpec& spec, int k);

/// One SNR vector draw. Draw order is fixed (a_0 first, then a_1..a_K) so
/// that identical seeds give identical sequences.
SnrSample sample_snr(const ChannelSpec& spec, const PowerProfile& power,
                     RandomStream& rng);

/// Same draw, also reporting the common component T = |a_0|^2 that the
/// conditional density conditions on (used by validation tests).
SnrSample sample_snr_traced(const ChannelSpec& spec, const PowerProfile& power,
                            RandomStream& rng, double& t_out);

/// Conditional PDF of gamma_k given T = t (noncentral-chi-squared shape):
///   f(x|t) = (1/Omega_k) exp(-(x + P_k sigma_k^2 rho^{2(k+delta-1)} t)/Omega_k)
///            * 0F1(;1; rho^{2(k+delta-1)} t x / ((1-rho^{2(k+delta-1)}) Omega_k))
double cond_snr_pdf(const ChannelSpec& spec, const PowerProfile& power, int k,
                    double t, double x);

}  // namespace harqir
