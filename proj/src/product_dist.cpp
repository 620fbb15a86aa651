#include "harqir/product_dist.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "harqir/errors.hpp"

namespace harqir {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
std::mutex fftw_mutex;  // FFTW planning is not thread safe; execution is.
}  // namespace

ProductDistSpec::ProductDistSpec(std::vector<int> shapes_, std::vector<double> scales_)
    : shapes(std::move(shapes_)), scales(std::move(scales_)) {
  if (shapes.empty() || shapes.size() != scales.size())
    throw DomainError("ProductDistSpec: shapes/scales must be nonempty and aligned");
  for (int m : shapes)
    if (m < 1) throw DomainError("ProductDistSpec: shapes must be integers >= 1");
  for (double s : scales)
    if (!std::isfinite(s) || s <= 0.0)
      throw DomainError("ProductDistSpec: scales must be positive");
}

double erlang_survival(int m, double omega, double r) {
  if (m < 1 || omega <= 0.0) throw DomainError("erlang_survival: bad parameters");
  if (r <= 0.0) return 1.0;
  const double z = r / omega;
  // e^{-z} sum_{j<m} z^j/j!, evaluated in log space for large z
  double maxlog = -z;  // j = 0 term
  std::vector<double> logs(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    logs[j] = -z + j * std::log(z) - std::lgamma(j + 1.0);
    maxlog = std::max(maxlog, logs[j]);
  }
  if (maxlog < -745.0) return 0.0;
  double s = 0.0;
  for (int j = 0; j < m; ++j) s += std::exp(logs[j] - maxlog);
  return std::exp(maxlog) * s;
}

double erlang_tail_quantile(int m, double omega, double tail_tol) {
  double lo = omega, hi = omega;
  while (erlang_survival(m, omega, hi) > tail_tol) hi *= 2.0;
  while (erlang_survival(m, omega, lo) < tail_tol && lo > 1e-300) lo *= 0.5;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (erlang_survival(m, omega, mid) > tail_tol)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-10 * hi) break;
  }
  return hi;
}

LogGrid make_default_grid(const ProductDistSpec& spec, int n, double tail_tol) {
  LogGrid grid;
  grid.n = n;
  double y = 0.0;
  for (int k = 0; k < spec.K(); ++k)
    y += std::log1p(erlang_tail_quantile(spec.shapes[k], spec.scales[k], tail_tol));
  grid.y_max = y;
  return grid;
}

double log_factor_pdf(int m, double omega, double y) {
  if (m < 1 || omega <= 0.0) throw DomainError("log_factor_pdf: bad parameters");
  if (y < 0.0) return 0.0;
  const double t = std::expm1(y);
  if (t <= 0.0) return m == 1 ? 1.0 / omega : 0.0;
  const double logf = (m - 1) * std::log(t) - t / omega + y -
                      std::lgamma(static_cast<double>(m)) - m * std::log(omega);
  return logf < -745.0 ? 0.0 : std::exp(logf);
}

double log_factor_cdf(int m, double omega, double y) {
  if (y <= 0.0) return 0.0;
  return 1.0 - erlang_survival(m, omega, std::expm1(y));
}

// ---------------------------------------------------------------------------
// FFT route

double cdf_product_fft(const ProductDistSpec& spec, double x, const LogGrid& grid) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("cdf_product_fft: bad x");
  if (grid.n < 4 || (grid.n & (grid.n - 1)) != 0 || !(grid.y_max > 0.0))
    throw DomainError("cdf_product_fft: grid needs power-of-two n and y_max > 0");
  const int K = spec.K();
  for (int k = 0; k < K; ++k) {
    const double tail =
        erlang_survival(spec.shapes[k], spec.scales[k], std::expm1(grid.y_max));
    if (tail > 1e-12)
      throw GridError("cdf_product_fft: factor " + std::to_string(k + 1) +
                      " keeps mass " + std::to_string(tail) + " beyond y_max");
  }
  if (x <= 1.0) return 0.0;
  const double y = std::log(x);
  if (y >= grid.y_max) return 1.0;

  const int n = grid.n;
  const double h = grid.step();
  const int nc = n / 2 + 1;

  double* in = fftw_alloc_real(n);
  fftw_complex* spec_k = fftw_alloc_complex(nc);
  fftw_complex* prod = fftw_alloc_complex(nc);
  double* out = fftw_alloc_real(n);

  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    fwd = fftw_plan_dft_r2c_1d(n, in, spec_k, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(n, prod, out, FFTW_ESTIMATE);
  }

  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < n; ++j)
      in[j] = log_factor_pdf(spec.shapes[k], spec.scales[k], (j + 0.5) * h);
    fftw_execute(fwd);
    if (k == 0) {
      for (int j = 0; j < nc; ++j) {
        prod[j][0] = spec_k[j][0];
        prod[j][1] = spec_k[j][1];
      }
    } else {
      for (int j = 0; j < nc; ++j) {
        const double re = prod[j][0] * spec_k[j][0] - prod[j][1] * spec_k[j][1];
        const double im = prod[j][0] * spec_k[j][1] + prod[j][1] * spec_k[j][0];
        prod[j][0] = re;
        prod[j][1] = im;
      }
    }
  }
  fftw_execute(bwd);

  // out[j]/n * h^{K-1} approximates the density of ln A at (j + K/2) h;
  // integrate bin-wise up to y.
  const double scale = std::pow(h, K - 1) / n;
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const double lo = (j + 0.5 * (K - 1)) * h;
    if (lo >= y) break;
    const double hi = lo + h;
    const double density = std::max(0.0, out[j] * scale);
    acc += density * (std::min(hi, y) - lo);
  }

  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  fftw_free(in);
  fftw_free(spec_k);
  fftw_free(prod);
  fftw_free(out);

  return std::clamp(acc, 0.0, 1.0);
}

CdfEstimate cdf_product_fft_auto(const ProductDistSpec& spec, double x, double tol,
                                 int n0, int n_max) {
  LogGrid grid = make_default_grid(spec, n0);
  double prev = cdf_product_fft(spec, x, grid);
  CdfEstimate est{prev, 1.0, grid.n};
  while (grid.n < n_max) {
    grid.n *= 2;
    const double cur = cdf_product_fft(spec, x, grid);
    est = CdfEstimate{cur, std::abs(cur - prev), grid.n};
    if (est.error < tol) return est;
    prev = cur;
  }
  return est;
}

// ---------------------------------------------------------------------------
// windowed direct convolution on [0, ln x]

namespace {

// trapezoid-sampled factor densities and their iterated convolution on
// the node grid y_i = i*h, i = 0..n; returns F = int_0^{nh} c_K
double window_pass(const ProductDistSpec& spec, double L, int n) {
  const int K = spec.K();
  const double h = L / n;
  std::vector<double> cur(static_cast<size_t>(n + 1));
  for (int i = 0; i <= n; ++i)
    cur[i] = log_factor_pdf(spec.shapes[0], spec.scales[0], i * h);
  std::vector<double> fac(static_cast<size_t>(n + 1)), next(static_cast<size_t>(n + 1));
  for (int k = 1; k < K; ++k) {
    for (int i = 0; i <= n; ++i)
      fac[i] = log_factor_pdf(spec.shapes[k], spec.scales[k], i * h);
    next[0] = 0.0;
    for (int j = 1; j <= n; ++j) {
      double s = 0.5 * (cur[0] * fac[j] + cur[j] * fac[0]);
      for (int i = 1; i < j; ++i) s += cur[i] * fac[j - i];
      next[j] = s * h;
    }
    std::swap(cur, next);
  }
  double s = 0.5 * (cur[0] + cur[n]);
  for (int i = 1; i < n; ++i) s += cur[i];
  return s * h;
}

}  // namespace

double cdf_product_window(const ProductDistSpec& spec, double x, int n) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("cdf_product_window: bad x");
  if (x <= 1.0) return 0.0;
  const double L = std::log(x);
  const double coarse = window_pass(spec, L, n / 2);
  const double fine = window_pass(spec, L, n);
  // trapezoid error is O(h^2); one Richardson step
  return std::clamp((4.0 * fine - coarse) / 3.0, 0.0, 1.0);
}

CdfEstimate cdf_product(const ProductDistSpec& spec, double x, double rel_tol) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("cdf_product: bad x");
  if (x <= 1.0) return {0.0, 0.0, 0};
  int n = 256;
  double prev = cdf_product_window(spec, x, n);
  CdfEstimate est{prev, 1.0, n};
  while (n < 32768) {
    n *= 2;
    const double cur = cdf_product_window(spec, x, n);
    const double rel = std::abs(cur - prev) / std::max(cur, 1e-300);
    est = CdfEstimate{cur, rel, n};
    if (rel < rel_tol) return est;
    prev = cur;
  }
  return est;
}

// ---------------------------------------------------------------------------
// Mellin-Barnes contour

namespace detail {

ComplexPoint mellin_factor(int m, double omega, ComplexPoint v) {
  // E[(1+R)^{-v}] = omega^{-m}/Gamma(m) sum_j C(m-1,j)(-1)^{m-1-j} g(1+j-v, 1/omega)
  // with g the scaled upper incomplete gamma; from expanding t^{m-1} in
  // powers of (1+t).
  const double z = 1.0 / omega;
  ComplexPoint sum{0.0, 0.0};
  double coef = (m & 1) ? 1.0 : -1.0;  // (-1)^{m-1-j} C(m-1,j) at j=0
  for (int j = 0; j < m; ++j) {
    sum += coef * scaled_upper_gamma(ComplexPoint(1.0 + j, 0.0) - v, z);
    coef *= -static_cast<double>(m - 1 - j) / (j + 1.0);
  }
  const double norm =
      std::exp(-m * std::log(omega) - std::lgamma(static_cast<double>(m)));
  return norm * sum;
}

}  // namespace detail

namespace {

// keep the contour away from integer abscissae where Gamma-function poles
// align with the factor evaluations
double depole(double c) {
  const double frac = c - std::floor(c);
  if (frac < 0.2) return std::floor(c) + 0.37;
  if (frac > 0.8) return std::floor(c) + 0.63;
  return c;
}

// Chernoff-style saddle: minimize ln(x^c prod_k E[A_k^{-c}] / c)
double select_contour(const ProductDistSpec& spec, double lx) {
  auto objective = [&](double c) {
    double val = c * lx - std::log(c);
    for (int k = 0; k < spec.K(); ++k) {
      const double f =
          detail::mellin_factor(spec.shapes[k], spec.scales[k], ComplexPoint(c, 0.0))
              .real();
      if (!(f > 0.0)) return 1e30;
      val += std::log(f);
    }
    return val;
  };
  double best_c = 0.63, best = 1e30;
  for (double c = 0.33; c < 45.0; c += 0.3) {
    const double h = objective(c);
    if (h < best) {
      best = h;
      best_c = c;
    }
  }
  // golden-section refinement around the coarse minimum
  double a = std::max(0.05, best_c - 0.3), b = best_c + 0.3;
  const double gr = 0.61803398874989485;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = objective(c1), f2 = objective(c2);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = objective(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = objective(c2);
    }
  }
  return depole(0.5 * (a + b));
}

// trapezoid along Re(v) = c of (1/pi) Re \int_0^inf x^v/v * prod(v) dtau;
// `factors` must return prod_k of the per-factor transforms at v.
template <typename F>
double contour_integral(double lx, double c, double step, double tol,
                        double tau_max, int decay_q, const F& factors,
                        double* tail_out) {
  auto integrand = [&](double tau) {
    const ComplexPoint v(c, tau);
    return (std::exp(v * lx) / v * factors(v)).real();
  };
  double total = 0.5 * integrand(0.0);
  double tau = step;
  double wmax = 0.0;
  const double tmin = 8.0 * (1.0 + std::abs(lx));
  int i = 1;
  for (; tau < tau_max; ++i, tau = i * step) {
    const double val = integrand(tau);
    total += val;
    wmax = std::max(wmax, std::abs(val));
    if ((i & 1023) == 0) {
      const double tail = wmax * tau / (decay_q - 1) / step;
      if (tau > tmin && tail < tol * std::max(std::abs(total), 1e-300)) {
        if (tail_out) *tail_out = tail * step / kPi;
        return total * step / kPi;
      }
      wmax = 0.0;
    }
  }
  const double resid = wmax * tau / (decay_q - 1) / std::max(std::abs(total), 1e-300);
  throw ConvergenceError("contour integral: truncation limit reached", resid);
}

}  // namespace

CdfEstimate cdf_product_mellin(const ProductDistSpec& spec, double x,
                               const ContourParams& params) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("cdf_product_mellin: bad x");
  if (x <= 1.0) return {0.0, 0.0, 0};
  const double lx = std::log(x);
  const double c = params.c > 0.0 ? depole(params.c) : select_contour(spec, lx);
  int q = 1;
  for (int m : spec.shapes) q += m;
  auto factors = [&](ComplexPoint v) {
    ComplexPoint f{1.0, 0.0};
    for (int k = 0; k < spec.K(); ++k)
      f *= detail::mellin_factor(spec.shapes[k], spec.scales[k], v);
    return f;
  };
  // discretization error decays like exp(-2 pi c / step); pick the step
  // from the requested tolerance, then verify by halving
  double step = std::min(params.step, 2.0 * kPi * c / std::log(100.0 / params.tol));
  double tail = 0.0;
  double prev = contour_integral(lx, c, step, 0.1 * params.tol, params.tau_max, q,
                                 factors, &tail);
  double cur = prev, err = 0.0;
  int halvings = 0;
  do {
    step *= 0.5;
    prev = cur;
    cur = contour_integral(lx, c, step, 0.1 * params.tol, params.tau_max, q,
                           factors, &tail);
    err = std::abs(cur - prev) / std::max(std::abs(cur), 1e-300);
  } while (err > params.tol && ++halvings < 3);
  if (err > 100 * params.tol)
    throw ConvergenceError("cdf_product_mellin: step refinement stalled", err);
  return {std::clamp(cur, 0.0, 1.0), err + tail,
          static_cast<int>(2.0 * params.tau_max / step)};
}

double asymptotic_constant(const std::vector<int>& l, double x) {
  if (!(x >= 1.0)) throw DomainError("asymptotic_constant: requires x >= 1");
  const int K = static_cast<int>(l.size());
  if (K < 1) throw DomainError("asymptotic_constant: empty multi-index");
  int lmax = 0, lsum = 0;
  for (int li : l) {
    if (li < 0) throw DomainError("asymptotic_constant: negative index");
    lmax = std::max(lmax, li);
    lsum += li;
  }
  if (lsum == 0) return g_k(K, x);
  if (x == 1.0) return 0.0;
  const double lx = std::log(x);
  const double c = lmax + 2.37;
  auto factors = [&](ComplexPoint v) {
    // prod_k Gamma(v - 1 - l_k) / Gamma(v)
    ComplexPoint lg{0.0, 0.0};
    for (int li : l)
      lg += log_gamma(v - ComplexPoint(1.0 + li, 0.0)) - log_gamma(v);
    return std::exp(lg);
  };
  const int q = K + lsum + 1;
  double step = std::min(0.2, 2.0 * kPi * c / std::log(100.0 / 1e-9));
  double tail = 0.0;
  const double first = contour_integral(lx, c, step, 1e-10, 5e6, q, factors, &tail);
  const double second =
      contour_integral(lx, c, 0.5 * step, 1e-10, 5e6, q, factors, &tail);
  if (std::abs(second - first) > 1e-6 * std::max(std::abs(second), 1e-300))
    throw ConvergenceError("asymptotic_constant: contour not converged",
                           std::abs(second - first));
  return second;
}

double cdf_product_asymptotic(const ProductDistSpec& spec, double x, double gamma,
                              const std::vector<double>& zeta) {
  if (zeta.size() != spec.scales.size())
    throw DomainError("cdf_product_asymptotic: zeta length mismatch");
  if (!(gamma > 0.0)) throw DomainError("cdf_product_asymptotic: requires gamma > 0");
  std::vector<int> l(spec.shapes.size());
  double logpref = 0.0;
  for (size_t k = 0; k < zeta.size(); ++k) {
    if (!(zeta[k] > 0.0))
      throw DomainError("cdf_product_asymptotic: zeta must be positive");
    if (std::abs(spec.scales[k] - gamma * zeta[k]) > 1e-9 * spec.scales[k])
      throw DomainError("cdf_product_asymptotic: scales must equal gamma*zeta");
    l[k] = spec.shapes[k] - 1;
    logpref -= (1.0 + l[k]) * std::log(gamma * zeta[k]);
  }
  return std::exp(logpref) * asymptotic_constant(l, x);
}

}  // namespace harqir
