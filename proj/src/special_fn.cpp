#include "harqir/special_fn.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "harqir/errors.hpp"

namespace harqir {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kLn2 = 0.69314718055994530941723212145817657;

// Lanczos g=7, n=9 coefficients (Godfrey's set).
constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

ComplexPoint lanczos_log_gamma(ComplexPoint z) {
  // valid for Re z > 0.5
  z -= 1.0;
  ComplexPoint x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const ComplexPoint t = z + 7.5;
  return 0.918938533204672741780329736406 /* ln sqrt(2 pi) */
         + (z + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: requires x > 0");
  return std::lgamma(x);
}

ComplexPoint log_gamma(ComplexPoint z) {
  if (z.real() >= 0.5) return lanczos_log_gamma(z);
  // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
  const ComplexPoint lg1mz = lanczos_log_gamma(1.0 - z);
  const ComplexPoint s = std::sin(kPi * z);
  if (s == ComplexPoint(0.0, 0.0))
    throw DomainError("log_gamma: pole at nonpositive integer");
  return std::log(kPi) - std::log(s) - lg1mz;
}

double hyp0f1(double b, double z) {
  if (!(b > 0.0)) throw DomainError("hyp0f1: requires b > 0");
  if (!(z >= 0.0)) throw DomainError("hyp0f1: requires z >= 0");
  if (z > 400.0) return std::exp(log_hyp0f1(b, z));
  double term = 1.0, sum = 1.0;
  for (int n = 0; n < 10000; ++n) {
    term *= z / ((b + n) * (n + 1.0));
    sum += term;
    if (term < 1e-15 * sum) return sum;
  }
  return sum;
}

double log_hyp0f1(double b, double z) {
  if (!(b > 0.0)) throw DomainError("log_hyp0f1: requires b > 0");
  if (!(z >= 0.0)) throw DomainError("log_hyp0f1: requires z >= 0");
  if (z <= 400.0) return std::log(hyp0f1(b, z));
  // 0F1(;b;z) = Gamma(b) z^{(1-b)/2} I_{b-1}(2 sqrt z); uniform asymptotic
  // expansion of I_nu for large argument.
  const double nu = b - 1.0;
  const double w = 2.0 * std::sqrt(z);
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 14; ++k) {
    const double f = mu - (2.0 * k - 1.0) * (2.0 * k - 1.0);
    term *= -f / (8.0 * k * w);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
  }
  return std::lgamma(b) + 0.5 * (1.0 - b) * std::log(z) + w -
         0.5 * std::log(2.0 * kPi * w) + std::log(sum);
}

namespace {

// integrand of the Psi integral at t > 0, without the 1/Gamma(a) factor
ComplexPoint psi_integrand(double a, ComplexPoint b, double z, double t) {
  const ComplexPoint expo =
      -z * t + (a - 1.0) * std::log(t) + (b - a - 1.0) * std::log1p(t);
  if (expo.real() < -745.0) return {0.0, 0.0};
  return std::exp(expo);
}

// tanh-sinh quadrature of the Psi integrand over (0,1]
ComplexPoint psi_tanh_sinh(double a, ComplexPoint b, double z, int level) {
  // map (0,1]: t = (1 + tanh((pi/2) sinh u)) / 2 over u in [-U, U]
  const double h = 1.0 / (1 << level);
  const double U = 3.8;
  ComplexPoint sum{0.0, 0.0};
  const int nmax = static_cast<int>(U / h);
  for (int i = -nmax; i <= nmax; ++i) {
    const double u = i * h;
    const double su = std::sinh(u);
    const double t = 0.5 * (1.0 + std::tanh(0.5 * kPi * su));
    if (t <= 0.0 || t >= 1.0) continue;
    const double dt = 0.25 * kPi * std::cosh(u) /
                      std::pow(std::cosh(0.5 * kPi * su), 2);
    sum += psi_integrand(a, b, z, t) * dt;
  }
  return sum * h;
}

struct GaussLaguerre {
  std::vector<double> x, w;
};

// L_n(x) and L_{n-1}(x) by upward recurrence.
void laguerre_pair(int n, double x, double& ln, double& lnm1) {
  double p1 = 1.0, p2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p3 = p2;
    p2 = p1;
    p1 = ((2.0 * j + 1.0 - x) * p2 - j * p3) / (j + 1.0);
  }
  ln = p1;
  lnm1 = p2;
}

// Nodes/weights of n-point Gauss-Laguerre (weight e^{-x}); Newton on the
// Laguerre recurrence, standard starting guesses.
GaussLaguerre gauss_laguerre(int n) {
  GaussLaguerre gl;
  gl.x.resize(n);
  gl.w.resize(n);
  double x = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0)
      x = 3.0 / (1.0 + 2.4 * n);
    else if (i == 1)
      x += 15.0 / (1.0 + 2.5 * n);
    else
      x += ((1.0 + 2.55 * (i - 1)) / (1.9 * (i - 1))) * (x - gl.x[i - 2]);
    double ln = 0.0, lnm1 = 0.0, pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      laguerre_pair(n, x, ln, lnm1);
      pp = n * (ln - lnm1) / x;
      const double dx = ln / pp;
      x -= dx;
      if (std::abs(dx) < 1e-14 * std::max(1.0, std::abs(x))) break;
    }
    laguerre_pair(n, x, ln, lnm1);
    pp = n * (ln - lnm1) / x;
    gl.x[i] = x;
    gl.w[i] = -1.0 / (pp * n * lnm1);
  }
  return gl;
}

const GaussLaguerre& cached_gauss_laguerre(int n) {
  static thread_local std::map<int, GaussLaguerre> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_laguerre(n)).first;
  return it->second;
}

// \int_1^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt via t = 1 + u/z
ComplexPoint psi_laguerre(double a, ComplexPoint b, double z, int n) {
  const GaussLaguerre& gl = cached_gauss_laguerre(n);
  ComplexPoint sum{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const double t = 1.0 + gl.x[i] / z;
    const ComplexPoint f =
        std::exp((a - 1.0) * std::log(t) + (b - a - 1.0) * std::log1p(t));
    sum += gl.w[i] * f;
  }
  return sum * (std::exp(-z) / z);
}

}  // namespace

ComplexPoint tricomi_psi(double a, ComplexPoint b, double z) {
  if (!(a > 0.0)) throw DomainError("tricomi_psi: requires a > 0");
  if (!(z > 0.0)) throw DomainError("tricomi_psi: requires z > 0");
  const double tol = 1e-10;
  ComplexPoint low_prev = psi_tanh_sinh(a, b, z, 6);
  ComplexPoint low = psi_tanh_sinh(a, b, z, 7);
  for (int level = 8; level <= 11; ++level) {
    if (std::abs(low - low_prev) <= tol * std::max(1.0, std::abs(low))) break;
    low_prev = low;
    low = psi_tanh_sinh(a, b, z, level);
  }
  ComplexPoint high_prev = psi_laguerre(a, b, z, 48);
  ComplexPoint high = psi_laguerre(a, b, z, 96);
  for (int n = 192; n <= 384; n *= 2) {
    if (std::abs(high - high_prev) <= tol * std::max(1.0, std::abs(high))) break;
    high_prev = high;
    high = psi_laguerre(a, b, z, n);
  }
  const double scale = std::max(1e-300, std::abs(low + high));
  const double resid =
      (std::abs(low - low_prev) + std::abs(high - high_prev)) / scale;
  if (resid > 1e-7)
    throw ConvergenceError("tricomi_psi: quadrature did not converge", resid);
  return std::exp(-std::lgamma(a)) * (low + high);
}

double tricomi_psi(double a, double b, double z) {
  return tricomi_psi(a, ComplexPoint(b, 0.0), z).real();
}

double g_k(int K, double x) {
  if (K < 1) throw DomainError("g_k: requires K >= 1");
  if (!(x >= 1.0)) throw DomainError("g_k: requires x >= 1");
  const double lx = std::log(x);
  if (lx < K + 2.0) {
    // tail series: x sum_{j>=0} (-1)^j lx^{K+j}/(K+j)!
    double term = std::pow(lx, K) / std::tgamma(K + 1.0);
    double sum = 0.0;
    for (int j = 0; j < 400; ++j) {
      sum += term;
      term *= -lx / (K + j + 1.0);
      if (std::abs(term) < 1e-17 * std::max(std::abs(sum), 1e-300) &&
          lx < K + j + 1.0)
        break;
    }
    return x * sum;
  }
  double sum = 0.0;
  for (int k = 0; k < K; ++k) {
    const int m = K - k - 1;
    sum += ((k & 1) ? -1.0 : 1.0) * std::pow(lx, m) / std::tgamma(m + 1.0);
  }
  return ((K & 1) ? -1.0 : 1.0) + x * sum;
}

double g_k_deriv(int K, double rate, int order) {
  if (K < 1) throw DomainError("g_k_deriv: requires K >= 1");
  if (rate < 0.0) throw DomainError("g_k_deriv: requires rate >= 0");
  if (order != 1 && order != 2) throw DomainError("g_k_deriv: order must be 1 or 2");
  const double rl = rate * kLn2;
  const double p = std::exp2(rate);
  const double invfact = std::exp(-std::lgamma(static_cast<double>(K)));
  if (order == 1) return kLn2 * std::pow(rl, K - 1) * p * invfact;
  double second = 0.0;
  if (K >= 2) second = (K - 1.0) * p * std::pow(rl, K - 2);
  return kLn2 * kLn2 * invfact * (p * std::pow(rl, K - 1) + second);
}

ComplexPoint scaled_upper_gamma(ComplexPoint w, double z) {
  if (!(z > 0.0)) throw DomainError("scaled_upper_gamma: requires z > 0");
  if (z >= 1.5) {
    // modified Lentz on Gamma(w,z) = e^{-z} z^w / (z+1-w - 1(1-w)/(z+3-w - ...))
    const double tiny = 1e-300;
    ComplexPoint bb = z + 1.0 - w;
    ComplexPoint c = 1.0 / tiny;
    ComplexPoint d = (bb == ComplexPoint{} ? ComplexPoint(1e300, 0) : 1.0 / bb);
    ComplexPoint f = d;
    for (int i = 1; i < 4000; ++i) {
      const ComplexPoint an = -static_cast<double>(i) * (static_cast<double>(i) - w);
      bb += 2.0;
      d = an * d + bb;
      if (std::abs(d) < tiny) d = tiny;
      c = bb + an / c;
      if (std::abs(c) < tiny) c = tiny;
      d = 1.0 / d;
      const ComplexPoint delta = c * d;
      f *= delta;
      if (std::abs(delta - 1.0) < 1e-16) return f;
    }
    throw ConvergenceError("scaled_upper_gamma: continued fraction stalled",
                           std::abs(f));
  }
  // series route: g = z^{-w} Gamma(w) e^z - sum_n z^n / (w (w+1) ... (w+n))
  ComplexPoint sum{0.0, 0.0};
  ComplexPoint term = 1.0 / w;
  const int zint = static_cast<int>(z);
  for (int n = 0; n < 600; ++n) {
    sum += term;
    term *= z / (w + static_cast<double>(n + 1));
    if (std::abs(term) < 1e-18 * std::max(std::abs(sum), 1e-300) && n > zint + 3)
      break;
  }
  ComplexPoint head{0.0, 0.0};
  if (std::abs(w.imag()) < 600.0) {
    // |Gamma(w)| underflows far up the imaginary axis; skip it there.
    const ComplexPoint lg = log_gamma(w);
    const ComplexPoint expo = lg - w * std::log(z) + z;
    if (expo.real() > -745.0 && expo.real() < 700.0) head = std::exp(expo);
  }
  return head - sum;
}

}  // namespace harqir
