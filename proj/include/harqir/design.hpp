// Design routines built on the asymptotic outage form: minimum power
// product for a target outage (the asymptote depends on powers only
// through prod P_k) and outage-constrained maximum-rate selection using
// the monotonicity/convexity of G_K(2^R).
#pragma once

#include "harqir/channel.hpp"
#include "harqir/outage.hpp"

namespace harqir {

struct DesignTarget {
  double epsilon = 1e-3;  ///< target outage in (0,1)
  ChannelSpec channel;
  double rate = 2.0;  ///< fixed R for power design

  DesignTarget(double epsilon_, ChannelSpec channel_, double rate_);
};

struct PowerDesign {
  double p_product = 0.0;     ///< P_Pi* meeting p_asy = epsilon
  bool asymptotic_ok = true;  ///< false when per-round power < 20 dB
};

/// P_Pi* = G_K(2^R) / (ell(rho,K) * epsilon * prod sigma_k^2).
PowerDesign required_power_product(const DesignTarget& target);

/// Equal split P_k = p_product^{1/K}: minimizes sum P_k subject to
/// prod P_k >= p_product (AM-GM).
PowerProfile allocate_equal_powers(double p_product, int K);

struct RateOptions {
  enum class Solver { newton, bisection };
  Solver solver = Solver::newton;
  double rel_tol = 1e-12;  ///< on G_K(2^R) vs its target value
};

/// Unique R* with G_K(2^{R*}) = epsilon * ell * prod P_k * prod sigma_k^2
/// (safeguarded Newton using the closed-form derivative, bisection
/// fallback). |p_asy(R*) - epsilon| < 1e-10 * epsilon.
double max_rate(const PowerProfile& budget, const ChannelSpec& spec, double epsilon,
                const RateOptions& options = {});

}  // namespace harqir
