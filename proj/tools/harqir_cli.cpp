// harqir: outage probability of HARQ with incremental redundancy over
// time-correlated Rayleigh fading, plus power/rate design utilities.
//
// Exit codes: 0 success, 1 numerical/validation failure, 2 bad usage or
// configuration, 3 I/O failure.
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harqir/design.hpp"
#include "harqir/errors.hpp"
#include "harqir/outage.hpp"
#include "harqir/sweep.hpp"

namespace {

using namespace harqir;

struct CommonOpts {
  std::string config_path;
  std::optional<int> K;
  std::optional<double> rho, delta, rate, sigma2;
  std::optional<int> truncation;
  std::optional<long long> samples;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> power_db;
  std::vector<double> powers;
};

void add_common(CLI::App* app, CommonOpts& o) {
  app->add_option("--config", o.config_path, "JSON config file");
  app->add_option("--K", o.K, "number of transmissions");
  app->add_option("--rho", o.rho, "time correlation, |rho| < 1");
  app->add_option("--delta", o.delta, "feedback delay in rounds");
  app->add_option("--rate", o.rate, "rate R in bits per channel use");
  app->add_option("--sigma2", o.sigma2, "common per-round sigma^2");
  app->add_option("--N", o.truncation, "mixture truncation order");
  app->add_option("--samples", o.samples, "Monte Carlo sample count");
  app->add_option("--seed", o.seed, "random seed");
  app->add_option("--workers", o.workers, "Monte Carlo worker threads");
  app->add_option("--power-db", o.power_db, "equal per-round power P_T in dB");
  app->add_option("--power", o.powers, "per-round linear powers")->expected(-1);
}

SweepConfig resolve(const CommonOpts& o) {
  SweepConfig cfg;
  if (!o.config_path.empty()) cfg = load_config_file(o.config_path);
  if (o.K) cfg.K = *o.K;
  if (o.rho) cfg.rho = *o.rho;
  if (o.delta) cfg.delta = *o.delta;
  if (o.rate) cfg.rate_bits = *o.rate;
  if (o.sigma2) cfg.sigma2 = {*o.sigma2};
  if (o.truncation) cfg.truncation_n = *o.truncation;
  if (o.samples) cfg.mc_samples = *o.samples;
  if (o.seed) cfg.seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
  if (o.power_db) cfg.powers = {db_to_linear(*o.power_db)};
  if (!o.powers.empty()) cfg.powers = o.powers;
  return cfg;
}

int cmd_outage(const CommonOpts& o, const std::string& method_name_str) {
  SweepConfig cfg = resolve(o);
  cfg.sweep = SweepVariable::none;
  cfg.methods = {Method::exact};
  if (method_name_str == "mc") cfg.methods = {Method::mc};
  else if (method_name_str == "asymptotic") cfg.methods = {Method::asymptotic};
  else if (method_name_str != "exact")
    throw ConfigError("unknown method '" + method_name_str + "'");
  cfg.validate();

  OutageQuery q = make_query(cfg, cfg.methods[0], 0.0);
  q.workers = cfg.workers;
  OutageResult r;
  switch (q.method) {
    case Method::exact: r = outage_exact(q); break;
    case Method::mc: r = outage_mc(q); break;
    case Method::asymptotic: r = outage_asymptotic(q); break;
  }
  std::printf("p_out = %.12g\n", r.p);
  switch (r.method) {
    case Method::exact:
      std::printf("truncation_bound = %.12g (mass %.12g at N=%d)\n", r.error, r.mass,
                  q.truncation);
      break;
    case Method::mc:
      std::printf("ci95 = [%.12g, %.12g] (n=%lld)\n", r.ci_lo, r.ci_hi,
                  static_cast<long long>(q.samples));
      break;
    case Method::asymptotic:
      if (r.clamped) std::printf("warning: clamped to 1 (outside asymptotic regime)\n");
      break;
  }
  return 0;
}

int cmd_weights(const CommonOpts& o, const std::string& out_path) {
  SweepConfig cfg = resolve(o);
  ChannelSpec spec = make_query(cfg, Method::exact, 0.0).channel;
  WeightTable table = build_table(spec, cfg.truncation_n);
  if (out_path.empty()) {
    emit_weights_csv(table, spec.K, std::cout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + out_path + "'");
    emit_weights_csv(table, spec.K, out);
  }
  std::fprintf(stderr, "mass = %.12g (deficit %.3g) over %zu indices\n", table.mass,
               table.deficit(), table.size());
  return 0;
}

int cmd_optimize_power(const CommonOpts& o, double epsilon, bool verify_exact) {
  SweepConfig cfg = resolve(o);
  OutageQuery base = make_query(cfg, Method::asymptotic, 0.0);
  DesignTarget target(epsilon, base.channel, base.rate);
  PowerDesign d = required_power_product(target);
  PowerProfile alloc = allocate_equal_powers(d.p_product, base.channel.K);
  std::printf("P_product = %.12g\n", d.p_product);
  std::printf("P_equal = %.12g (%.6g dB)\n", alloc.powers[0],
              linear_to_db(alloc.powers[0]));
  if (!d.asymptotic_ok)
    std::printf("warning: per-round power below 20 dB, asymptote may be loose\n");
  OutageQuery q(base.channel, alloc, base.rate, Method::asymptotic);
  std::printf("p_asymptotic = %.12g (target %.12g)\n", outage_asymptotic(q).p, epsilon);
  if (verify_exact) {
    OutageQuery qe(base.channel, alloc, base.rate, Method::exact);
    qe.truncation = cfg.truncation_n;
    std::printf("p_exact = %.12g\n", outage_exact(qe).p);
  }
  return 0;
}

int cmd_optimize_rate(const CommonOpts& o, double epsilon, bool bisect) {
  SweepConfig cfg = resolve(o);
  OutageQuery base = make_query(cfg, Method::asymptotic, 0.0);
  RateOptions opts;
  if (bisect) opts.solver = RateOptions::Solver::bisection;
  const double r = max_rate(base.power, base.channel, epsilon, opts);
  std::printf("R_max = %.12g bits/channel-use\n", r);
  OutageQuery q(base.channel, base.power, r, Method::asymptotic);
  std::printf("p_asymptotic = %.12g (target %.12g)\n", outage_asymptotic(q).p, epsilon);
  return 0;
}

int selftest_check(const char* name, bool ok, double got, double want) {
  std::printf("[%s] %-52s got %.8g want %.8g\n", ok ? "PASS" : "FAIL", name, got, want);
  return ok ? 0 : 1;
}

// quick oracle cross-checks of the numerical routes against closed forms
int cmd_selftest() {
  int fails = 0;
  {
    const double got = hyp0f1(1.0, 1.0);
    fails += selftest_check("hyp0f1(1,1) = I0(2)", std::abs(got - 2.2795853023360673) < 1e-12,
                            got, 2.2795853023360673);
  }
  {
    const double got = tricomi_psi(1.0, 1.0, 1.0);
    fails += selftest_check("psi(1,1;1) = e*E1(1)", std::abs(got - 0.59634736232319407) < 1e-8,
                            got, 0.59634736232319407);
  }
  {
    const double got = g_k(2, 4.0);
    const double want = 1.0 + 4.0 * (std::log(4.0) - 1.0);
    fails += selftest_check("G_2(4)", std::abs(got - want) < 1e-12, got, want);
  }
  {
    ProductDistSpec spec({1}, {10.0});
    const double want = 1.0 - std::exp(-0.3);
    const double fft = cdf_product_fft(spec, 4.0, make_default_grid(spec));
    fails += selftest_check("fft K=1 vs closed form", std::abs(fft - want) < 1e-6, fft, want);
    const double win = cdf_product(spec, 4.0).value;
    fails += selftest_check("window K=1 vs closed form", std::abs(win - want) < 1e-8, win, want);
    const double mel = cdf_product_mellin(spec, 4.0).value;
    fails += selftest_check("mellin K=1 vs closed form", std::abs(mel - want) < 1e-6, mel, want);
  }
  {
    ProductDistSpec spec({1, 2, 1}, {0.5, 3.0, 20.0});
    const double win = cdf_product(spec, 4.0).value;
    const double fft = cdf_product_fft_auto(spec, 4.0).value;
    const double mel = cdf_product_mellin(spec, 4.0).value;
    fails += selftest_check("K=3 fft vs window", std::abs(fft - win) < 2e-6, fft, win);
    fails += selftest_check("K=3 mellin vs window", std::abs(mel - win) < 1e-5, mel, win);
  }
  {
    ChannelSpec spec = ChannelSpec::uniform(0.5, 1.0, 1.0, 1);
    OutageQuery q(spec, PowerProfile::equal(10.0, 1), 2.0, Method::exact);
    const double want = 1.0 - std::exp(-0.3);
    const double got = outage_exact(q).p;
    fails += selftest_check("exact K=1 anchor", std::abs(got - want) < 1e-6, got, want);
  }
  {
    ChannelSpec spec = ChannelSpec::uniform(0.5, 1.0, 1.0, 2);
    const double got = ell(spec);
    fails += selftest_check("ell(0.5, K=2)", std::abs(got - 0.984375) < 1e-12, got, 0.984375);
  }
  std::printf("%s (%d failure%s)\n", fails ? "SELFTEST FAILED" : "selftest ok", fails,
              fails == 1 ? "" : "s");
  return fails ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HARQ-IR outage analysis over time-correlated Rayleigh fading"};
  app.require_subcommand(1);

  CommonOpts outage_opts;
  std::string outage_method = "exact";
  CLI::App* outage_cmd = app.add_subcommand("outage", "evaluate a single outage query");
  add_common(outage_cmd, outage_opts);
  outage_cmd->add_option("--method", outage_method, "exact|mc|asymptotic");

  CommonOpts sweep_opts;
  std::string sweep_out, sweep_format, sweep_var_str;
  std::vector<double> sweep_values;
  std::vector<std::string> sweep_methods;
  bool sweep_timing = false, sweep_mc_auto = false;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--out", sweep_out, "output path (default stdout)");
  sweep_cmd->add_option("--format", sweep_format, "csv|json");
  sweep_cmd->add_option("--sweep-var", sweep_var_str, "P_T_dB|rho|R|K");
  sweep_cmd->add_option("--sweep-values", sweep_values, "sweep points")->expected(-1);
  sweep_cmd->add_option("--methods", sweep_methods, "methods to run")->expected(-1);
  sweep_cmd->add_flag("--timing", sweep_timing, "append wall_ms column");
  sweep_cmd->add_flag("--mc-auto", sweep_mc_auto,
                      "escalate MC samples until CI < 10% of estimate");

  CommonOpts weights_opts;
  std::string weights_out;
  CLI::App* weights_cmd =
      app.add_subcommand("weights", "dump the mixture weight table as CSV");
  add_common(weights_cmd, weights_opts);
  weights_cmd->add_option("--out", weights_out, "output path (default stdout)");

  CLI::App* optimize_cmd = app.add_subcommand("optimize", "design utilities");
  optimize_cmd->require_subcommand(1);
  CommonOpts optp_opts, optr_opts;
  double optp_eps = 1e-3, optr_eps = 1e-3;
  bool optp_verify = false, optr_bisect = false;
  CLI::App* optp = optimize_cmd->add_subcommand("power", "minimum power product for a target outage");
  add_common(optp, optp_opts);
  optp->add_option("--epsilon", optp_eps, "target outage")->required();
  optp->add_flag("--verify-exact", optp_verify, "also evaluate the exact outage");
  CLI::App* optr = optimize_cmd->add_subcommand("rate", "maximum rate for a target outage");
  add_common(optr, optr_opts);
  optr->add_option("--epsilon", optr_eps, "target outage")->required();
  optr->add_flag("--bisection", optr_bisect, "use pure bisection instead of Newton");

  CLI::App* selftest_cmd = app.add_subcommand("selftest", "run oracle cross-checks");
  (void)selftest_cmd;

  CLI11_PARSE(app, argc, argv);

  try {
    if (outage_cmd->parsed()) return cmd_outage(outage_opts, outage_method);
    if (sweep_cmd->parsed()) {
      SweepConfig cfg = resolve(sweep_opts);
      if (!sweep_out.empty()) cfg.output_path = sweep_out;
      if (!sweep_format.empty()) cfg.format = sweep_format;
      if (!sweep_var_str.empty()) {
        if (sweep_var_str == "P_T_dB") cfg.sweep = SweepVariable::p_total_db;
        else if (sweep_var_str == "rho") cfg.sweep = SweepVariable::rho;
        else if (sweep_var_str == "R") cfg.sweep = SweepVariable::rate;
        else if (sweep_var_str == "K") cfg.sweep = SweepVariable::K;
        else throw ConfigError("unknown sweep variable '" + sweep_var_str + "'");
      }
      if (!sweep_values.empty()) cfg.sweep_values = sweep_values;
      if (!sweep_methods.empty()) {
        cfg.methods.clear();
        for (const std::string& m : sweep_methods) {
          if (m == "exact") cfg.methods.push_back(Method::exact);
          else if (m == "mc") cfg.methods.push_back(Method::mc);
          else if (m == "asymptotic") cfg.methods.push_back(Method::asymptotic);
          else throw ConfigError("unknown method '" + m + "'");
        }
      }
      if (sweep_timing) cfg.timing = true;
      if (sweep_mc_auto) cfg.mc_auto = true;
      cfg.validate();
      emit(run_sweep(cfg), cfg);
      return 0;
    }
    if (weights_cmd->parsed()) return cmd_weights(weights_opts, weights_out);
    if (optimize_cmd->parsed()) {
      if (optp->parsed()) return cmd_optimize_power(optp_opts, optp_eps, optp_verify);
      if (optr->parsed()) return cmd_optimize_rate(optr_opts, optr_eps, optr_bisect);
    }
    if (selftest_cmd->parsed()) return cmd_selftest();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
