#include "harqir/channel.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

#include "harqir/errors.hpp"
#include "oracles.hpp"

using namespace harqir;

TEST_CASE("ChannelSpec validation") {
  CHECK_THROWS_AS(ChannelSpec::uniform(1.0, 1.0, 1.0, 2), DomainError);
  CHECK_THROWS_AS(ChannelSpec::uniform(-1.0, 1.0, 1.0, 2), DomainError);
  CHECK_THROWS_AS(ChannelSpec::uniform(0.5, -0.1, 1.0, 2), DomainError);
  CHECK_THROWS_AS(ChannelSpec::uniform(0.5, 1.0, 0.0, 2), DomainError);
  CHECK_THROWS_AS(ChannelSpec::uniform(0.5, 1.0, 1.0, 0), DomainError);
  CHECK_THROWS_AS(ChannelSpec(0.5, 1.0, {1.0, 1.0}, 3), DomainError);
  CHECK_NOTHROW(ChannelSpec::uniform(-0.5, 1.0, 1.0, 2));

  // delta = 0 makes round 1 fully coupled: degenerate unless rho = 0
  ChannelSpec d0 = ChannelSpec::uniform(0.5, 0.0, 1.0, 2);
  CHECK_THROWS_AS(d0.require_nondegenerate(), DegenerateCorrelationError);
  CHECK_NOTHROW(ChannelSpec::uniform(0.0, 0.0, 1.0, 2).require_nondegenerate());
}

TEST_CASE("PowerProfile validation and forms") {
  CHECK_THROWS_AS(PowerProfile({1.0, -2.0}), DomainError);
  CHECK_THROWS_AS(PowerProfile(std::vector<double>{}), DomainError);
  const PowerProfile split = PowerProfile::scaled(10.0, {1.0, 2.0});
  CHECK(split.powers[0] == 10.0);
  CHECK(split.powers[1] == 20.0);
}

TEST_CASE("sampling determinism") {
  const ChannelSpec spec = ChannelSpec::uniform(0.7, 1.0, 2.0, 3);
  const PowerProfile power = PowerProfile::equal(5.0, 3);
  RandomStream a(1234, 7), b(1234, 7);
  for (int i = 0; i < 200; ++i) {
    const SnrSample sa = sample_snr(spec, power, a);
    const SnrSample sb = sample_snr(spec, power, b);
    for (int k = 0; k < 3; ++k) CHECK(sa.snr[k] == sb.snr[k]);
  }
  RandomStream c(1234, 8);
  CHECK(sample_snr(spec, power, c).snr[0] != sample_snr(spec, power, a).snr[0]);
}

TEST_CASE("rho = 0 gives independent exponentials with mean P sigma^2") {
  const int K = 2;
  const ChannelSpec spec = ChannelSpec::uniform(0.0, 1.0, 1.5, K);
  const PowerProfile power = PowerProfile({2.0, 4.0});
  RandomStream rng(99, 0);
  const size_t n = 1'000'000;
  std::vector<double> sum(K, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const SnrSample s = sample_snr(spec, power, rng);
    for (int k = 0; k < K; ++k) sum[k] += s.snr[k];
  }
  for (int k = 0; k < K; ++k) {
    const double want = power.powers[k] * 1.5;
    const double se = want / std::sqrt(static_cast<double>(n));  // exp variance
    CHECK(std::abs(sum[k] / n - want) < 3.0 * se);
  }
}

TEST_CASE("marginals stay exponential for every rho") {
  const size_t n = 100'000;
  for (double rho : {0.0, 0.3, 0.7, 0.95}) {
    const ChannelSpec spec = ChannelSpec::uniform(rho, 1.0, 1.0, 2);
    const PowerProfile power = PowerProfile::equal(3.0, 2);
    RandomStream rng(2024, 1);
    std::vector<double> g1(n);
    for (size_t i = 0; i < n; ++i) g1[i] = sample_snr(spec, power, rng).snr[0];
    const double mean_snr = 3.0;
    const double d = oracles::ks_statistic(
        std::move(g1), [&](double x) { return 1.0 - std::exp(-x / mean_snr); });
    CHECK(d < oracles::ks_critical(n, 0.01));
    CHECK(d < 0.005);
  }
}

TEST_CASE("pairwise correlation matches the closed form") {
  // Cov(|h1|^2, |h2|^2) = |E h1 conj(h2)|^2 for circular Gaussians, so
  // corr(g1,g2) = rho^{2(1+delta-1)} * rho^{2(2+delta-1)} = rho^6 at delta=1.
  const double rho = 0.9;
  const ChannelSpec spec = ChannelSpec::uniform(rho, 1.0, 1.0, 2);
  const PowerProfile power = PowerProfile::equal(1.0, 2);
  RandomStream rng(555, 0);
  const size_t n = 2'000'000;
  std::vector<double> a(n), b(n);
  for (size_t i = 0; i < n; ++i) {
    const SnrSample s = sample_snr(spec, power, rng);
    a[i] = s.snr[0];
    b[i] = s.snr[1];
  }
  CHECK(oracles::correlation(a, b) == doctest::Approx(std::pow(rho, 6)).epsilon(0.02));
}

TEST_CASE("cond_snr_pdf reduces to the exponential density at rho = 0") {
  const ChannelSpec spec = ChannelSpec::uniform(0.0, 1.0, 2.0, 1);
  const PowerProfile power = PowerProfile::equal(3.0, 1);
  for (double t : {0.0, 0.5, 4.0})
    for (double x : {0.0, 1.0, 7.0})
      CHECK(cond_snr_pdf(spec, power, 1, t, x) ==
            doctest::Approx(std::exp(-x / 6.0) / 6.0).epsilon(1e-13));
}

TEST_CASE("cond_snr_pdf normalizes to one") {
  const ChannelSpec spec = ChannelSpec::uniform(0.5, 1.0, 1.0, 1);
  const PowerProfile power = PowerProfile::equal(1.0, 1);
  const double mass = oracles::integrate_to_inf(
      [&](double x) { return cond_snr_pdf(spec, power, 1, 1.0, x); }, 0.0, 1e-10);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("cond_snr_pdf matches the conditional histogram") {
  const ChannelSpec spec = ChannelSpec::uniform(0.6, 1.0, 1.0, 2);
  const PowerProfile power = PowerProfile::equal(2.0, 2);
  RandomStream rng(77, 0);
  const size_t n = 2'000'000;
  const double t_lo = 0.98, t_hi = 1.02, t_mid = 1.0;

  // equal-probability-ish bin edges for gamma_1 | T ~ t_mid
  const int nbins = 12;
  std::vector<double> edges{0.0};
  const double total = oracles::integrate_to_inf(
      [&](double x) { return cond_snr_pdf(spec, power, 1, t_mid, x); }, 0.0, 1e-10);
  double acc = 0.0, x = 0.0;
  for (int bin = 1; bin < nbins; ++bin) {
    const double target = total * bin / nbins;
    while (acc < target && x < 60.0) {
      acc += oracles::integrate(
          [&](double u) { return cond_snr_pdf(spec, power, 1, t_mid, u); }, x,
          x + 0.01, 1e-12);
      x += 0.01;
    }
    edges.push_back(x);
  }
  edges.push_back(1e9);

  std::vector<double> counts(nbins, 0.0);
  std::vector<double> g1s, g2s;
  double t = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const SnrSample s = sample_snr_traced(spec, power, rng, t);
    if (t < t_lo || t > t_hi) continue;
    g1s.push_back(s.snr[0]);
    g2s.push_back(s.snr[1]);
    for (int bin = 0; bin < nbins; ++bin)
      if (s.snr[0] >= edges[bin] && s.snr[0] < edges[bin + 1]) {
        counts[bin] += 1.0;
        break;
      }
  }
  const double in_bin = static_cast<double>(g1s.size());
  REQUIRE(in_bin > 5000);

  double chi2 = 0.0;
  for (int bin = 0; bin < nbins; ++bin) {
    const double p = oracles::integrate(
                         [&](double u) { return cond_snr_pdf(spec, power, 1, t_mid, u); },
                         edges[bin], std::min(edges[bin + 1], 100.0), 1e-11) /
                     total;
    const double expect = in_bin * p;
    chi2 += (counts[bin] - expect) * (counts[bin] - expect) / expect;
  }
  CHECK(chi2 < oracles::chi2_critical(nbins - 1, 0.01));

  // conditional independence: correlation within the T-bin is noise level
  CHECK(std::abs(oracles::correlation(g1s, g2s)) < 3.0 / std::sqrt(in_bin));
}

TEST_CASE("cond_snr_pdf argument checks") {
  const ChannelSpec spec = ChannelSpec::uniform(0.5, 1.0, 1.0, 2);
  const PowerProfile power = PowerProfile::equal(1.0, 2);
  CHECK_THROWS_AS(cond_snr_pdf(spec, power, 0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(cond_snr_pdf(spec, power, 3, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(cond_snr_pdf(spec, power, 1, -1.0, 1.0), DomainError);
  const ChannelSpec degen = ChannelSpec::uniform(0.5, 0.0, 1.0, 2);
  CHECK_THROWS_AS(cond_snr_pdf(degen, power, 1, 1.0, 1.0),
                  DegenerateCorrelationError);
}

TEST_CASE("negative rho sampling") {
  const ChannelSpec spec = ChannelSpec::uniform(-0.6, 1.0, 1.0, 2);
  const PowerProfile power = PowerProfile::equal(1.0, 2);
  RandomStream rng(3, 0);
  CHECK_NOTHROW(sample_snr(spec, power, rng));
  const ChannelSpec frac = ChannelSpec::uniform(-0.6, 0.5, 1.0, 2);
  CHECK_THROWS_AS(sample_snr(frac, power, rng), DomainError);
}
