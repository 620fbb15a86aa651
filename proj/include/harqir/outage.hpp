// The three outage evaluators: exact negative-multinomial mixture,
// antithetic Monte Carlo, and the high-SNR asymptotic closed form, plus
// the correlation penalty ell(rho,K) and diversity-order estimation.
#pragma once

#include <cstdint>
#include <vector>

#include "harqir/channel.hpp"
#include "harqir/negmult.hpp"
#include "harqir/product_dist.hpp"

namespace harqir {

enum class Method { exact, mc, asymptotic };

const char* method_name(Method m);

struct OutageQuery {
  ChannelSpec channel;
  PowerProfile power;
  double rate = 2.0;  ///< R, bits per channel use
  Method method = Method::exact;
  int truncation = 3;                ///< N (exact only)
  long long samples = 1'000'000;     ///< n (mc only)
  std::uint64_t seed = 1;            ///< (mc only)
  int workers = 1;                   ///< (mc only)

  OutageQuery(ChannelSpec ch, PowerProfile pw, double rate_, Method method_);
};

struct OutageResult {
  double p = 0.0;
  Method method = Method::exact;
  /// exact: certified truncation bound (1-mass)*F_{A_0}(2^R);
  /// mc: 95% Wilson CI half-width; asymptotic: 0.
  double error = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;  ///< mc only: Wilson interval
  double mass = 1.0;                ///< exact only: included weight mass
  bool clamped = false;             ///< asymptotic only: formula gave p > 1
  // query echo
  int K = 0;
  double rho = 0.0;
  double rate = 0.0;
  std::vector<double> powers;
};

/// Accumulated mutual information sum_k log2(1 + gamma_k).
double accumulated_info(const SnrSample& sample);

/// P(prod (1+gamma_k) < 2^R) over `samples` seeded draws, antithetic in
/// the common component; 95% Wilson CI. The per-sample counter streams
/// make the estimate identical for any worker count.
OutageResult outage_mc(const OutageQuery& q);

/// Theorem-1 mixture sum_{|l| <= N} W_l F_{A_l}(2^R); each term evaluated
/// by the windowed log-domain convolution (relative accuracy at any
/// probability depth). error carries the certified truncation bound.
OutageResult outage_exact(const OutageQuery& q);

/// ell(rho, K) = (1 + sum_k u_k) prod_k (1 - rho^{2(k+delta-1)}).
double ell(const ChannelSpec& spec);

/// G_K(2^R) / (ell(rho,K) * prod P_k * prod sigma_k^2), clamped to [0,1]
/// with the clamped flag set when the formula exceeds 1 (low-SNR regime
/// where the asymptote is meaningless).
OutageResult outage_asymptotic(const OutageQuery& q);

struct SlopeEstimate {
  double slope = 0.0;
  bool reliable = true;  ///< false when MC resolution was insufficient
};

/// Least-squares slope of -log10 p versus log10 gamma over the given
/// gamma grid with powers P_k = gamma * theta_k; expected to approach K.
SlopeEstimate diversity_slope(const ChannelSpec& spec,
                              const std::vector<double>& theta,
                              const std::vector<double>& gammas, double rate,
                              Method method, int truncation = 3,
                              long long samples = 1'000'000,
                              std::uint64_t seed = 1);

}  // namespace harqir
