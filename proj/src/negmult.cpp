#include "harqir/negmult.hpp"

#include <cmath>
#include <string>

#include "harqir/errors.hpp"

namespace harqir {

NmParams nm_params(const ChannelSpec& spec) {
  spec.require_nondegenerate();
  NmParams out;
  out.w.resize(static_cast<size_t>(spec.K));
  double usum = 0.0;
  for (int k = 1; k <= spec.K; ++k) {
    const double r2 = spec.rho2k(k);
    out.w[k - 1] = r2 / (1.0 - r2);  // u_k for now
    usum += out.w[k - 1];
  }
  out.W0 = 1.0 / (1.0 + usum);
  for (double& wk : out.w) wk *= out.W0;
  return out;
}

double weight(const ChannelSpec& spec, const MultiIndex& l) {
  if (static_cast<int>(l.size()) != spec.K)
    throw DomainError("weight: multi-index must have K entries");
  const NmParams nm = nm_params(spec);
  int total = 0;
  double logw = std::log(nm.W0);
  for (int k = 0; k < spec.K; ++k) {
    if (l[k] < 0) throw DomainError("weight: multi-index entries must be >= 0");
    if (l[k] == 0) continue;
    if (nm.w[k] == 0.0) return 0.0;
    total += l[k];
    logw += l[k] * std::log(nm.w[k]) - std::lgamma(l[k] + 1.0);
  }
  logw += std::lgamma(total + 1.0);
  return std::exp(logw);
}

namespace {

// graded lexicographic enumeration of {l : sum(l) = shell}
void enumerate_shell(int K, int shell, MultiIndex& prefix,
                     std::vector<MultiIndex>& out) {
  if (static_cast<int>(prefix.size()) == K - 1) {
    prefix.push_back(shell);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int v = 0; v <= shell; ++v) {
    prefix.push_back(v);
    enumerate_shell(K, shell - v, prefix, out);
    prefix.pop_back();
  }
}

double binom(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                  std::lgamma(n - k + 1.0));
}

}  // namespace

WeightTable build_table(const ChannelSpec& spec, int N, std::size_t max_entries) {
  if (N < 0) throw DomainError("build_table: requires N >= 0");
  const double count = binom(N + spec.K, spec.K);
  if (count > static_cast<double>(max_entries))
    throw ResourceError("build_table: C(N+K,K) = " + std::to_string(count) +
                        " exceeds cap " + std::to_string(max_entries));

  const NmParams nm = nm_params(spec);
  const double logW0 = std::log(nm.W0);
  std::vector<double> logw(nm.w.size());
  for (size_t k = 0; k < nm.w.size(); ++k)
    logw[k] = nm.w[k] > 0.0 ? std::log(nm.w[k]) : -1.0;

  WeightTable table;
  table.truncation = N;
  MultiIndex prefix;
  for (int shell = 0; shell <= N; ++shell)
    enumerate_shell(spec.K, shell, prefix, table.indices);

  table.weights.resize(table.indices.size());
  double mass = 0.0, comp = 0.0;  // Neumaier summation
  for (size_t i = 0; i < table.indices.size(); ++i) {
    const MultiIndex& l = table.indices[i];
    double lw = logW0;
    int total = 0;
    bool zero = false;
    for (int k = 0; k < spec.K; ++k) {
      if (l[k] == 0) continue;
      if (nm.w[k] == 0.0) {
        zero = true;
        break;
      }
      total += l[k];
      lw += l[k] * logw[k] - std::lgamma(l[k] + 1.0);
    }
    const double w = zero ? 0.0 : std::exp(lw + std::lgamma(total + 1.0));
    table.weights[i] = w;
    const double t = mass + w;
    comp += std::abs(mass) >= std::abs(w) ? (mass - t) + w : (w - t) + mass;
    mass = t;
  }
  table.mass = mass + comp;
  return table;
}

int required_truncation(const ChannelSpec& spec, double target_mass, int n_cap) {
  if (!(target_mass > 0.0 && target_mass < 1.0))
    throw DomainError("required_truncation: target mass must be in (0,1)");
  const NmParams nm = nm_params(spec);
  if (nm.W0 >= 1.0) return 0;
  // mass(N) = 1 - (1-W0)^{N+1}
  const double n = std::log1p(-target_mass) / std::log1p(-nm.W0) - 1.0;
  const int N = std::max(0, static_cast<int>(std::ceil(n - 1e-12)));
  if (N > n_cap)
    throw ResourceError("required_truncation: N = " + std::to_string(N) +
                        " exceeds cap " + std::to_string(n_cap));
  return N;
}

}  // namespace harqir
