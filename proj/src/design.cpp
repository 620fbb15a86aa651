#include "harqir/design.hpp"

#include <cmath>
#include <string>

#include "harqir/errors.hpp"
#include "harqir/special_fn.hpp"

namespace harqir {

DesignTarget::DesignTarget(double epsilon_, ChannelSpec channel_, double rate_)
    : epsilon(epsilon_), channel(std::move(channel_)), rate(rate_) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw DomainError("DesignTarget: epsilon must be in (0,1)");
  if (!(rate > 0.0)) throw DomainError("DesignTarget: rate must be positive");
}

PowerDesign required_power_product(const DesignTarget& target) {
  const ChannelSpec& spec = target.channel;
  spec.require_nondegenerate();
  double sig = 1.0;
  for (double s : spec.sigma2) sig *= s;
  PowerDesign out;
  out.p_product =
      g_k(spec.K, std::exp2(target.rate)) / (ell(spec) * target.epsilon * sig);
  const double per_round = std::pow(out.p_product, 1.0 / spec.K);
  out.asymptotic_ok = per_round >= 100.0;  // 20 dB
  return out;
}

PowerProfile allocate_equal_powers(double p_product, int K) {
  if (!(p_product > 0.0))
    throw DomainError("allocate_equal_powers: product must be positive");
  if (K < 1) throw DomainError("allocate_equal_powers: requires K >= 1");
  return PowerProfile::equal(std::pow(p_product, 1.0 / K), K);
}

double max_rate(const PowerProfile& budget, const ChannelSpec& spec, double epsilon,
                const RateOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw DomainError("max_rate: epsilon must be in (0,1)");
  if (static_cast<int>(budget.powers.size()) != spec.K)
    throw DomainError("max_rate: power profile length mismatch");
  spec.require_nondegenerate();

  double target = epsilon * ell(spec);
  for (int k = 0; k < spec.K; ++k)
    target *= budget.powers[static_cast<size_t>(k)] * spec.sigma2[static_cast<size_t>(k)];
  if (!(target > 0.0) || !std::isfinite(target))
    throw InfeasibleTargetError("max_rate: no positive rate satisfies the target");

  auto residual = [&](double rate) { return g_k(spec.K, std::exp2(rate)) - target; };

  // G_K(2^R) increases from 0 at R -> 0+, so the root is unique; bracket by
  // doubling, then verify the sign change before iterating.
  double lo = 1e-9, hi = 1.0;
  while (residual(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e6)
      throw InfeasibleTargetError("max_rate: bracketing failed (target too large)");
  }
  if (residual(lo) > 0.0) lo = 1e-300;
  if (!(residual(lo) < 0.0 && residual(hi) >= 0.0))
    throw InfeasibleTargetError("max_rate: no sign change in bracket");

  const double tol = options.rel_tol * target;
  if (options.solver == RateOptions::Solver::bisection) {
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (residual(mid) < 0.0)
        lo = mid;
      else
        hi = mid;
      if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
  }

  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = residual(r);
    if (std::abs(f) <= tol) return r;
    if (f < 0.0)
      lo = r;
    else
      hi = r;
    const double fp = g_k_deriv(spec.K, r, 1);
    double next = r - f / fp;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // safeguard
    r = next;
  }
  const double achieved = std::abs(residual(r)) / target;
  throw ConvergenceError("max_rate: Newton did not reach tolerance", achieved);
}

}  // namespace harqir
