// Negative-multinomial mixture weights: the correlated-channel outage is a
// W_l-weighted mixture over multi-indices l of independent-channel outages,
// with l ~ NM(1, w) and
//   W_l = W0 * (sum_k l_k)! * prod_k w_k^{l_k} / l_k!,
//   w_k = u_k * W0,  u_k = rho^{2(k+delta-1)} / (1 - rho^{2(k+delta-1)}),
//   W0  = (1 + sum_k u_k)^{-1}.
#pragma once

#include <cstddef>
#include <vector>

#include "harqir/channel.hpp"

namespace harqir {

using MultiIndex = std::vector<int>;  ///< l = (l_1, ..., l_K), entries >= 0

struct NmParams {
  double W0 = 1.0;
  std::vector<double> w;
};

struct WeightTable {
  std::vector<MultiIndex> indices;  ///< graded lexicographic order
  std::vector<double> weights;      ///< W_l, aligned with indices
  int truncation = 0;               ///< N: included indices satisfy sum(l) <= N
  double mass = 1.0;                ///< sum of included weights

  double deficit() const { return mass >= 1.0 ? 0.0 : 1.0 - mass; }
  std::size_t size() const { return indices.size(); }
};

/// W0 and the NM success probabilities w_k. Throws
/// DegenerateCorrelationError when some rho^{2(k+delta-1)} reaches 1.
NmParams nm_params(const ChannelSpec& spec);

/// W_l for one multi-index, computed in log space.
double weight(const ChannelSpec& spec, const MultiIndex& l);

/// Enumerates all l with sum(l) <= N (count C(N+K, K)); throws
/// ResourceError when the count exceeds max_entries.
WeightTable build_table(const ChannelSpec& spec, int N,
                        std::size_t max_entries = 5'000'000);

/// Smallest N with mass(N) >= target_mass. sum_k l_k is geometric with
/// success W0, so mass(N) = 1 - (1-W0)^{N+1} in closed form.
int required_truncation(const ChannelSpec& spec, double target_mass,
                        int n_cap = 10'000);

}  // namespace harqir
