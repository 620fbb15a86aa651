#include "harqir/channel.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "harqir/errors.hpp"
#include "harqir/special_fn.hpp"

namespace harqir {

ChannelSpec::ChannelSpec(double rho_, double delta_, std::vector<double> sigma2_,
                         int K_)
    : rho(rho_), delta(delta_), sigma2(std::move(sigma2_)), K(K_) {
  if (!std::isfinite(rho) || std::abs(rho) >= 1.0)
    throw DomainError("ChannelSpec: requires |rho| < 1, got " + std::to_string(rho));
  if (!std::isfinite(delta) || delta < 0.0)
    throw DomainError("ChannelSpec: requires delta >= 0, got " + std::to_string(delta));
  if (K < 1) throw DomainError("ChannelSpec: requires K >= 1, got " + std::to_string(K));
  if (static_cast<int>(sigma2.size()) != K)
    throw DomainError("ChannelSpec: sigma2 must have K entries");
  for (double s : sigma2)
    if (!std::isfinite(s) || s <= 0.0)
      throw DomainError("ChannelSpec: sigma2 entries must be positive");
}

ChannelSpec ChannelSpec::uniform(double rho, double delta, double sigma2, int K) {
  return ChannelSpec(rho, delta, std::vector<double>(static_cast<size_t>(K), sigma2), K);
}

double ChannelSpec::rho2k(int k) const {
  if (k < 1 || k > K) throw DomainError("rho2k: round index out of range");
  if (rho == 0.0) return 0.0;
  return std::pow(rho * rho, k + delta - 1.0);
}

void ChannelSpec::require_nondegenerate() const {
  for (int k = 1; k <= K; ++k)
    if (rho2k(k) >= 1.0)
      throw DegenerateCorrelationError(
          "correlation degenerate: rho^{2(k+delta-1)} >= 1 at round " +
          std::to_string(k));
}

PowerProfile::PowerProfile(std::vector<double> powers_) : powers(std::move(powers_)) {
  if (powers.empty()) throw DomainError("PowerProfile: needs at least one round");
  for (double p : powers)
    if (!std::isfinite(p) || p <= 0.0)
      throw DomainError("PowerProfile: powers must be positive");
}

PowerProfile PowerProfile::equal(double p, int K) {
  return PowerProfile(std::vector<double>(static_cast<size_t>(K), p));
}

PowerProfile PowerProfile::scaled(double gamma, const std::vector<double>& theta) {
  std::vector<double> p(theta.size());
  for (size_t i = 0; i < theta.size(); ++i) p[i] = gamma * theta[i];
  return PowerProfile(std::move(p));
}

double omega(const ChannelSpec& spec, const PowerProfile& power, int k) {
  if (static_cast<int>(power.powers.size()) != spec.K)
    throw DomainError("omega: power profile length mismatch");
  return power.powers[k - 1] * spec.sigma2[k - 1] * (1.0 - spec.rho2k(k));
}

double rho_coupling(const ChannelSpec& spec, int k) {
  if (k < 1 || k > spec.K) throw DomainError("rho_coupling: round index out of range");
  if (spec.rho == 0.0) return 0.0;
  const double e = k + spec.delta - 1.0;
  if (spec.rho < 0.0 && e != std::floor(e))
    throw DomainError(
        "rho_coupling: negative rho requires integer k+delta-1 exponents "
        "(use integer delta)");
  return std::pow(spec.rho, e);
}

SnrSample sample_snr_traced(const ChannelSpec& spec, const PowerProfile& power,
                            RandomStream& rng, double& t_out) {
  if (static_cast<int>(power.powers.size()) != spec.K)
    throw DomainError("sample_snr: power profile length mismatch");
  const std::complex<double> a0 = rng.cnormal();
  t_out = std::norm(a0);
  SnrSample out;
  out.snr.resize(static_cast<size_t>(spec.K));
  for (int k = 1; k <= spec.K; ++k) {
    const std::complex<double> ak = rng.cnormal();
    const double r = rho_coupling(spec, k);
    const std::complex<double> h = std::sqrt(1.0 - r * r) * ak + r * a0;
    out.snr[k - 1] = power.powers[k - 1] * spec.sigma2[k - 1] * std::norm(h);
  }
  return out;
}

SnrSample sample_snr(const ChannelSpec& spec, const PowerProfile& power,
                     RandomStream& rng) {
  double t = 0.0;
  return sample_snr_traced(spec, power, rng, t);
}

double cond_snr_pdf(const ChannelSpec& spec, const PowerProfile& power, int k,
                    double t, double x) {
  if (k < 1 || k > spec.K) throw DomainError("cond_snr_pdf: round index out of range");
  if (t < 0.0 || x < 0.0) throw DomainError("cond_snr_pdf: requires t, x >= 0");
  spec.require_nondegenerate();
  const double r2 = spec.rho2k(k);
  const double om = omega(spec, power, k);
  const double lam = power.powers[k - 1] * spec.sigma2[k - 1] * r2 * t;
  const double log_f01 =
      r2 == 0.0 ? 0.0 : log_hyp0f1(1.0, r2 * t * x / ((1.0 - r2) * om));
  const double le = -(x + lam) / om - std::log(om) + log_f01;
  return std::exp(le);
}

}  // namespace harqir
