#include "harqir/negmult.hpp"

#include <doctest.h>

#include <cmath>

#include "harqir/errors.hpp"

using namespace harqir;

namespace {

// direct-space weight (naive factorials), for the log-space cross-check
double weight_direct(const NmParams& nm, const MultiIndex& l) {
  int total = 0;
  double prod = 1.0;
  for (size_t k = 0; k < l.size(); ++k) {
    total += l[k];
    double fact = 1.0;
    for (int j = 2; j <= l[k]; ++j) fact *= j;
    prod *= std::pow(nm.w[k], l[k]) / fact;
  }
  double tfact = 1.0;
  for (int j = 2; j <= total; ++j) tfact *= j;
  return nm.W0 * tfact * prod;
}

}  // namespace

TEST_CASE("nm_params hand-checked values") {
  const ChannelSpec spec = ChannelSpec::uniform(0.5, 1.0, 1.0, 2);
  const NmParams nm = nm_params(spec);
  CHECK(nm.W0 == doctest::Approx(5.0 / 7.0).epsilon(1e-14));
  CHECK(nm.w[0] == doctest::Approx(5.0 / 21.0).epsilon(1e-14));
  CHECK(nm.w[1] == doctest::Approx(1.0 / 21.0).epsilon(1e-14));

  const NmParams id = nm_params(ChannelSpec::uniform(0.0, 1.0, 1.0, 3));
  CHECK(id.W0 == 1.0);
  for (double w : id.w) CHECK(w == 0.0);
}

TEST_CASE("nm_params normalization identity") {
  for (double rho : {0.1, 0.5, 0.9, -0.8}) {
    for (int K : {1, 3, 6}) {
      const NmParams nm = nm_params(ChannelSpec::uniform(rho, 1.0, 1.0, K));
      double s = nm.W0;
      for (double w : nm.w) s += w;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(nm_params(ChannelSpec::uniform(0.5, 0.0, 1.0, 2)),
                  DegenerateCorrelationError);
}

TEST_CASE("weight hand-checked values") {
  const ChannelSpec spec = ChannelSpec::uniform(0.5, 1.0, 1.0, 2);
  CHECK(weight(spec, {0, 0}) == doctest::Approx(5.0 / 7.0).epsilon(1e-14));
  CHECK(weight(spec, {1, 0}) == doctest::Approx(25.0 / 147.0).epsilon(1e-13));
  CHECK(weight(spec, {1, 1}) == doctest::Approx(50.0 / 3087.0).epsilon(1e-13));
  CHECK_THROWS_AS(weight(spec, {1}), DomainError);
  CHECK_THROWS_AS(weight(spec, {-1, 0}), DomainError);
}

TEST_CASE("log-space weights equal direct-space weights") {
  const ChannelSpec spec = ChannelSpec::uniform(0.7, 1.0, 1.0, 3);
  const NmParams nm = nm_params(spec);
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 3; ++b)
      for (int c = 0; c <= 3; ++c) {
        const MultiIndex l{a, b, c};
        CHECK(weight(spec, l) ==
              doctest::Approx(weight_direct(nm, l)).epsilon(1e-10));
      }
}

TEST_CASE("build_table basics") {
  const ChannelSpec spec = ChannelSpec::uniform(0.5, 1.0, 1.0, 2);
  const WeightTable t0 = build_table(spec, 0);
  CHECK(t0.size() == 1);
  CHECK(t0.mass == doctest::Approx(5.0 / 7.0).epsilon(1e-14));

  const WeightTable t3 = build_table(spec, 3);
  CHECK(t3.size() == 10);  // C(3+2,2)
  for (double w : t3.weights) CHECK(w >= 0.0);

  // extended-summation oracle: direct pmf sum over sum(l) <= 50
  const WeightTable big = build_table(spec, 50);
  double direct = 0.0;
  for (double w : big.weights) direct += w;
  const double missing = direct - t3.mass;
  double tail_direct = 0.0;
  for (size_t i = 0; i < big.size(); ++i) {
    int s = 0;
    for (int v : big.indices[i]) s += v;
    if (s > 3) tail_direct += big.weights[i];
  }
  CHECK(missing == doctest::Approx(tail_direct).epsilon(1e-12));
  CHECK(t3.mass == doctest::Approx(1.0 - tail_direct - (1.0 - direct)).epsilon(1e-12));

  // geometric closed form for the shell mass
  const NmParams nm = nm_params(spec);
  CHECK(t3.mass == doctest::Approx(1.0 - std::pow(1.0 - nm.W0, 4)).epsilon(1e-12));
}

TEST_CASE("build_table at rho = 0 is a point mass") {
  const ChannelSpec spec = ChannelSpec::uniform(0.0, 1.0, 1.0, 4);
  for (int N : {0, 2, 5}) {
    const WeightTable t = build_table(spec, N);
    CHECK(t.mass == 1.0);
    CHECK(t.weights[0] == 1.0);
    for (size_t i = 1; i < t.size(); ++i) CHECK(t.weights[i] == 0.0);
  }
}

TEST_CASE("mass is monotone in N and bounded by one") {
  const ChannelSpec spec = ChannelSpec::uniform(0.8, 1.0, 1.0, 3);
  double prev = 0.0;
  for (int N = 0; N <= 12; ++N) {
    const double mass = build_table(spec, N).mass;
    CHECK(mass >= prev);
    CHECK(mass <= 1.0 + 1e-12);
    prev = mass;
  }
}

TEST_CASE("build_table enumeration cap") {
  const ChannelSpec spec = ChannelSpec::uniform(0.5, 1.0, 1.0, 6);
  CHECK_THROWS_AS(build_table(spec, 40), ResourceError);  // C(46,6) > 5e6
}

TEST_CASE("required_truncation reaches the requested mass") {
  for (double rho : {0.3, 0.6, 0.9}) {
    const ChannelSpec spec = ChannelSpec::uniform(rho, 1.0, 1.0, 4);
    const int N = required_truncation(spec, 0.999);
    const NmParams nm = nm_params(spec);
    const double mass_n = 1.0 - std::pow(1.0 - nm.W0, N + 1);
    CHECK(mass_n >= 0.999);
    if (N > 0) {
      const double mass_prev = 1.0 - std::pow(1.0 - nm.W0, N);
      CHECK(mass_prev < 0.999);
    }
    MESSAGE("rho = ", rho, ": mass >= 0.999 needs N = ", N);
    // enumerated table agrees with the closed form when small enough
    if (N <= 20)
      CHECK(build_table(spec, N).mass == doctest::Approx(mass_n).epsilon(1e-12));
  }
}
