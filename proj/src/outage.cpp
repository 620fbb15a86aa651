#include "harqir/outage.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "harqir/errors.hpp"
#include "harqir/special_fn.hpp"

namespace harqir {

const char* method_name(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::mc: return "mc";
    case Method::asymptotic: return "asymptotic";
  }
  return "?";
}

OutageQuery::OutageQuery(ChannelSpec ch, PowerProfile pw, double rate_, Method method_)
    : channel(std::move(ch)), power(std::move(pw)), rate(rate_), method(method_) {
  if (!(rate > 0.0 && rate < 512.0))
    throw DomainError("OutageQuery: requires 0 < rate < 512");
  if (static_cast<int>(power.powers.size()) != channel.K)
    throw DomainError("OutageQuery: power profile length mismatch");
}

double accumulated_info(const SnrSample& sample) {
  double bits = 0.0;
  for (double g : sample.snr) bits += std::log1p(g);
  return bits / 0.69314718055994530941723212145817657;
}

namespace {

OutageResult make_result(const OutageQuery& q, Method m) {
  OutageResult r;
  r.method = m;
  r.K = q.channel.K;
  r.rho = q.channel.rho;
  r.rate = q.rate;
  r.powers = q.power.powers;
  return r;
}

// per-round constants hoisted out of the sample loop
struct McSetup {
  std::vector<double> coupling;   ///< rho^{k+delta-1}
  std::vector<double> diffuse;    ///< sqrt(1 - rho^{2(k+delta-1)})
  std::vector<double> mean_snr;   ///< P_k sigma_k^2
  double threshold = 0.0;         ///< R ln 2

  McSetup(const ChannelSpec& spec, const PowerProfile& power, double rate) {
    const int K = spec.K;
    coupling.resize(static_cast<size_t>(K));
    diffuse.resize(static_cast<size_t>(K));
    mean_snr.resize(static_cast<size_t>(K));
    for (int k = 1; k <= K; ++k) {
      coupling[k - 1] = rho_coupling(spec, k);
      diffuse[k - 1] = std::sqrt(1.0 - spec.rho2k(k));
      mean_snr[k - 1] = power.powers[k - 1] * spec.sigma2[k - 1];
    }
    threshold = rate * 0.69314718055994530941723212145817657;
  }
};

// one antithetic pair indexed by `idx`: the two halves share the round
// coefficients and phase and use (u, 1-u) for the common component power
long long mc_pair_hits(const McSetup& s, std::uint64_t seed, long long idx,
                       std::vector<std::complex<double>>& alpha) {
  RandomStream rng(seed, static_cast<std::uint64_t>(idx));
  const double u = rng.u01();
  const double phase = 6.283185307179586476925286766559 * rng.u01();
  const size_t K = s.coupling.size();
  for (size_t k = 0; k < K; ++k) alpha[k] = rng.cnormal();

  long long hits = 0;
  for (double t : {-std::log1p(-u), -std::log(u)}) {
    const std::complex<double> a0 =
        std::sqrt(t) * std::complex<double>(std::cos(phase), std::sin(phase));
    double info = 0.0;
    for (size_t k = 0; k < K; ++k) {
      const std::complex<double> h = s.diffuse[k] * alpha[k] + s.coupling[k] * a0;
      info += std::log1p(s.mean_snr[k] * std::norm(h));
    }
    if (info < s.threshold) ++hits;
  }
  return hits;
}

}  // namespace

OutageResult outage_mc(const OutageQuery& q) {
  if (q.method != Method::mc) throw DomainError("outage_mc: query method must be mc");
  if (q.samples < 2) throw DomainError("outage_mc: needs at least 2 samples");
  q.channel.require_nondegenerate();
  const long long npairs = (q.samples + 1) / 2;
  const int workers = std::max(1, q.workers);
  const McSetup setup(q.channel, q.power, q.rate);

  std::vector<long long> partial(static_cast<size_t>(workers), 0);
  auto run_chunk = [&](int w) {
    const long long lo = npairs * w / workers;
    const long long hi = npairs * (w + 1) / workers;
    std::vector<std::complex<double>> alpha(setup.coupling.size());
    long long hits = 0;
    for (long long i = lo; i < hi; ++i)
      hits += mc_pair_hits(setup, q.seed, i, alpha);
    partial[static_cast<size_t>(w)] = hits;
  };
  if (workers == 1) {
    run_chunk(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_chunk, w);
    for (auto& th : pool) th.join();
  }
  long long hits = 0;
  for (long long h : partial) hits += h;  // fixed order: worker-count invariant

  const double n = 2.0 * static_cast<double>(npairs);
  const double phat = static_cast<double>(hits) / n;
  // Wilson 95% interval over all antithetic halves; conservative since the
  // pair correlation is nonpositive.
  const double z = 1.959963984540054;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;

  OutageResult r = make_result(q, Method::mc);
  r.p = phat;
  r.ci_lo = std::max(0.0, center - half);
  r.ci_hi = std::min(1.0, center + half);
  r.error = half;
  return r;
}

OutageResult outage_exact(const OutageQuery& q) {
  if (q.method != Method::exact)
    throw DomainError("outage_exact: query method must be exact");
  q.channel.require_nondegenerate();
  const WeightTable table = build_table(q.channel, q.truncation);
  const double x = std::exp2(q.rate);

  std::vector<double> scales(static_cast<size_t>(q.channel.K));
  for (int k = 1; k <= q.channel.K; ++k) scales[k - 1] = omega(q.channel, q.power, k);

  double total = 0.0;
  double f0 = 0.0;
  std::vector<int> shapes(static_cast<size_t>(q.channel.K));
  for (size_t i = 0; i < table.size(); ++i) {
    const double w = table.weights[i];
    const MultiIndex& l = table.indices[i];
    bool is_zero = true;
    for (int k = 0; k < q.channel.K; ++k) {
      shapes[static_cast<size_t>(k)] = 1 + l[static_cast<size_t>(k)];
      is_zero = is_zero && l[static_cast<size_t>(k)] == 0;
    }
    if (w == 0.0 && !is_zero) continue;
    const ProductDistSpec comp(shapes, scales);
    const double f = cdf_product(comp, x).value;
    if (is_zero) f0 = f;
    total += w * f;
  }

  OutageResult r = make_result(q, Method::exact);
  r.p = std::clamp(total, 0.0, 1.0);
  r.mass = table.mass;
  // discarded indices have stochastically larger A_l, so F <= F_{A_0}
  r.error = table.deficit() * f0;
  return r;
}

double ell(const ChannelSpec& spec) {
  const NmParams nm = nm_params(spec);
  double prod = 1.0;
  for (int k = 1; k <= spec.K; ++k) prod *= 1.0 - spec.rho2k(k);
  return prod / nm.W0;
}

OutageResult outage_asymptotic(const OutageQuery& q) {
  if (q.method != Method::asymptotic)
    throw DomainError("outage_asymptotic: query method must be asymptotic");
  q.channel.require_nondegenerate();
  double log_denom = std::log(ell(q.channel));
  for (int k = 0; k < q.channel.K; ++k)
    log_denom += std::log(q.power.powers[static_cast<size_t>(k)]) +
                 std::log(q.channel.sigma2[static_cast<size_t>(k)]);
  const double p = g_k(q.channel.K, std::exp2(q.rate)) * std::exp(-log_denom);

  OutageResult r = make_result(q, Method::asymptotic);
  r.clamped = p > 1.0;
  r.p = std::min(p, 1.0);
  return r;
}

SlopeEstimate diversity_slope(const ChannelSpec& spec, const std::vector<double>& theta,
                              const std::vector<double>& gammas, double rate,
                              Method method, int truncation, long long samples,
                              std::uint64_t seed) {
  if (gammas.size() < 2)
    throw DomainError("diversity_slope: needs at least two gamma points");
  if (static_cast<int>(theta.size()) != spec.K)
    throw DomainError("diversity_slope: theta length mismatch");

  SlopeEstimate est;
  std::vector<double> lx, ly;
  for (double g : gammas) {
    OutageQuery q(spec, PowerProfile::scaled(g, theta), rate, method);
    q.truncation = truncation;
    q.samples = samples;
    q.seed = seed;
    OutageResult r;
    switch (method) {
      case Method::exact: r = outage_exact(q); break;
      case Method::mc: r = outage_mc(q); break;
      case Method::asymptotic: r = outage_asymptotic(q); break;
    }
    if (r.p <= 0.0 || (method == Method::mc &&
                       r.p * static_cast<double>(samples) < 100.0)) {
      est.reliable = false;
      if (r.p <= 0.0) continue;
    }
    lx.push_back(std::log10(g));
    ly.push_back(std::log10(r.p));
  }
  if (lx.size() < 2) throw DomainError("diversity_slope: all points unresolvable");

  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(lx.size());
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  est.slope = -num / den;
  return est;
}

}  // namespace harqir
