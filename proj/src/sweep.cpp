#include "harqir/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "harqir/errors.hpp"

namespace harqir {

using nlohmann::json;

const char* sweep_variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::none: return "none";
    case SweepVariable::p_total_db: return "P_T_dB";
    case SweepVariable::rho: return "rho";
    case SweepVariable::rate: return "R";
    case SweepVariable::K: return "K";
  }
  return "?";
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

namespace {

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string join12(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += fmt12(v[i]);
  }
  return out;
}

Method parse_method(const std::string& s) {
  if (s == "exact") return Method::exact;
  if (s == "mc") return Method::mc;
  if (s == "asymptotic") return Method::asymptotic;
  throw ConfigError("unknown method '" + s + "' (expected exact|mc|asymptotic)");
}

SweepVariable parse_sweep_variable(const std::string& s) {
  if (s == "P_T_dB") return SweepVariable::p_total_db;
  if (s == "rho") return SweepVariable::rho;
  if (s == "R") return SweepVariable::rate;
  if (s == "K") return SweepVariable::K;
  throw ConfigError("unknown sweep variable '" + s + "' (expected P_T_dB|rho|R|K)");
}

std::vector<double> as_double_list(const json& j, const std::string& key) {
  std::vector<double> out;
  if (j.is_number()) {
    out.push_back(j.get<double>());
  } else if (j.is_array()) {
    for (const auto& e : j) {
      if (!e.is_number()) throw ConfigError("'" + key + "' entries must be numbers");
      out.push_back(e.get<double>());
    }
  } else {
    throw ConfigError("'" + key + "' must be a number or an array of numbers");
  }
  return out;
}

std::vector<double> broadcast(std::vector<double> v, int K, const std::string& key) {
  if (v.empty()) return v;
  if (static_cast<int>(v.size()) == 1)
    return std::vector<double>(static_cast<size_t>(K), v[0]);
  if (static_cast<int>(v.size()) != K)
    throw ConfigError("'" + key + "' must have 1 or K entries (K = " +
                      std::to_string(K) + ", got " + std::to_string(v.size()) + ")");
  return v;
}

}  // namespace

void SweepConfig::validate() const {
  if (K < 1) throw ConfigError("K must be >= 1, got " + std::to_string(K));
  if (!(std::abs(rho) < 1.0))
    throw ConfigError("rho must satisfy |rho| < 1, got " + std::to_string(rho));
  if (!(delta >= 0.0))
    throw ConfigError("delta must be >= 0, got " + std::to_string(delta));
  if (!(rate_bits > 0.0))
    throw ConfigError("rate_bits must be > 0, got " + std::to_string(rate_bits));
  if (truncation_n < 0) throw ConfigError("truncation_N must be >= 0");
  if (mc_samples < 2) throw ConfigError("mc_samples must be >= 2");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  for (double s : sigma2)
    if (!(s > 0.0)) throw ConfigError("sigma2 entries must be positive");
  for (double p : powers)
    if (!(p > 0.0)) throw ConfigError("powers entries must be positive");
  for (double t : theta)
    if (!(t > 0.0)) throw ConfigError("theta entries must be positive");
  if (gamma && !(*gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (gamma && theta.empty())
    throw ConfigError("gamma requires a theta allocation vector");
  if (!theta.empty() && !gamma && sweep != SweepVariable::p_total_db)
    throw ConfigError("theta without gamma only makes sense when sweeping P_T_dB");
  if (!powers.empty() && (gamma || !theta.empty()))
    throw ConfigError("give either powers or gamma+theta, not both");
  if (gamma && sweep == SweepVariable::p_total_db)
    throw ConfigError("sweeping P_T_dB conflicts with a fixed gamma");
  if (methods.empty()) throw ConfigError("methods must not be empty");
  if (sweep != SweepVariable::none && sweep_values.empty())
    throw ConfigError("sweep.values must not be empty");
  if (sweep == SweepVariable::rho)
    for (double v : sweep_values)
      if (!(std::abs(v) < 1.0))
        throw ConfigError("swept rho values must satisfy |rho| < 1");
  if (sweep == SweepVariable::rate)
    for (double v : sweep_values)
      if (!(v > 0.0)) throw ConfigError("swept R values must be positive");
  if (sweep == SweepVariable::K)
    for (double v : sweep_values)
      if (v < 1.0 || v != std::floor(v))
        throw ConfigError("swept K values must be positive integers");
  if (sweep == SweepVariable::K &&
      (sigma2.size() > 1 || powers.size() > 1 || theta.size() > 1))
    throw ConfigError("sweeping K requires scalar sigma2/powers/theta");
  if (sweep == SweepVariable::rho && rho != 0.0)
    throw ConfigError("sweeping rho conflicts with a fixed rho value");
  if (format != "csv" && format != "json")
    throw ConfigError("format must be csv or json, got '" + format + "'");
}

SweepConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  SweepConfig cfg;
  for (const auto& [key, val] : j.items()) {
    if (key == "K") cfg.K = val.get<int>();
    else if (key == "rho") cfg.rho = val.get<double>();
    else if (key == "delta") cfg.delta = val.get<double>();
    else if (key == "sigma2") cfg.sigma2 = as_double_list(val, key);
    else if (key == "powers") cfg.powers = as_double_list(val, key);
    else if (key == "gamma") cfg.gamma = val.get<double>();
    else if (key == "theta") cfg.theta = as_double_list(val, key);
    else if (key == "rate_bits") cfg.rate_bits = val.get<double>();
    else if (key == "truncation_N") cfg.truncation_n = val.get<int>();
    else if (key == "mc_samples") cfg.mc_samples = val.get<long long>();
    else if (key == "seed") cfg.seed = val.get<std::uint64_t>();
    else if (key == "workers") cfg.workers = val.get<int>();
    else if (key == "mc_auto") cfg.mc_auto = val.get<bool>();
    else if (key == "timing") cfg.timing = val.get<bool>();
    else if (key == "format") cfg.format = val.get<std::string>();
    else if (key == "output") cfg.output_path = val.get<std::string>();
    else if (key == "methods") {
      cfg.methods.clear();
      if (!val.is_array()) throw ConfigError("'methods' must be an array");
      for (const auto& m : val) cfg.methods.push_back(parse_method(m.get<std::string>()));
    } else if (key == "sweep") {
      if (!val.is_object() || !val.contains("variable") || !val.contains("values"))
        throw ConfigError("'sweep' must be {variable, values}");
      cfg.sweep = parse_sweep_variable(val["variable"].get<std::string>());
      cfg.sweep_values = as_double_list(val["values"], "sweep.values");
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

SweepConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

OutageQuery make_query(const SweepConfig& cfg, Method method, double sweep_value) {
  int K = cfg.K;
  double rho = cfg.rho;
  double rate = cfg.rate_bits;
  std::optional<double> p_db;
  switch (cfg.sweep) {
    case SweepVariable::none: break;
    case SweepVariable::p_total_db: p_db = sweep_value; break;
    case SweepVariable::rho: rho = sweep_value; break;
    case SweepVariable::rate: rate = sweep_value; break;
    case SweepVariable::K: K = static_cast<int>(sweep_value); break;
  }

  std::vector<double> sigma2 = broadcast(cfg.sigma2, K, "sigma2");
  if (sigma2.empty()) sigma2.assign(static_cast<size_t>(K), 1.0);

  std::vector<double> powers;
  if (p_db) {
    const double lin = db_to_linear(*p_db);
    if (!cfg.theta.empty()) {
      powers = broadcast(cfg.theta, K, "theta");
      for (double& p : powers) p *= lin;
    } else {
      powers.assign(static_cast<size_t>(K), lin);
    }
  } else if (cfg.gamma) {
    powers = broadcast(cfg.theta, K, "theta");
    for (double& p : powers) p *= *cfg.gamma;
  } else if (!cfg.powers.empty()) {
    powers = broadcast(cfg.powers, K, "powers");
  } else {
    powers.assign(static_cast<size_t>(K), 1.0);
  }

  OutageQuery q(ChannelSpec(rho, cfg.delta, std::move(sigma2), K),
                PowerProfile(std::move(powers)), rate, method);
  q.truncation = cfg.truncation_n;
  q.samples = cfg.mc_samples;
  q.seed = cfg.seed;
  q.workers = 1;  // points parallelize at the sweep level
  return q;
}

namespace {

OutageResult evaluate(const OutageQuery& q) {
  switch (q.method) {
    case Method::exact: return outage_exact(q);
    case Method::mc: return outage_mc(q);
    case Method::asymptotic: return outage_asymptotic(q);
  }
  throw DomainError("evaluate: bad method");
}

OutageResult evaluate_mc_auto(OutageQuery q, long long cap) {
  OutageResult r = outage_mc(q);
  while (q.samples < cap && (r.p <= 0.0 || r.error > 0.1 * r.p)) {
    q.samples *= 4;
    r = outage_mc(q);
  }
  return r;
}

}  // namespace

std::vector<ResultRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<double> values = cfg.sweep == SweepVariable::none
                                   ? std::vector<double>{0.0}
                                   : cfg.sweep_values;
  std::vector<ResultRow> rows(values.size());

  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= values.size()) return;
      const auto t0 = std::chrono::steady_clock::now();
      ResultRow row;
      row.sweep_value = values[i];
      for (Method m : cfg.methods) {
        MethodOutcome out;
        try {
          OutageQuery q = make_query(cfg, m, values[i]);
          if (row.K == 0) {
            row.K = q.channel.K;
            row.rho = q.channel.rho;
            row.delta = q.channel.delta;
            row.rate = q.rate;
            row.sigma2 = q.channel.sigma2;
            row.powers = q.power.powers;
            row.truncation_n = q.truncation;
            row.mc_samples = q.samples;
            row.seed = q.seed;
          }
          const OutageResult res = (m == Method::mc && cfg.mc_auto)
                                       ? evaluate_mc_auto(q, cfg.mc_samples * 256)
                                       : evaluate(q);
          out.ok = true;
          out.p = res.p;
          out.error = res.error;
        } catch (const std::exception& e) {
          out.ok = false;
          out.failure = e.what();
        }
        row.outcomes.emplace_back(m, out);
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      rows[i] = std::move(row);
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const size_t nthreads = std::min<size_t>(values.size(), hw);
  if (nthreads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < nthreads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return rows;
}

namespace {

void header_columns(const SweepConfig& cfg, std::vector<std::string>& cols) {
  if (cfg.sweep != SweepVariable::none) cols.push_back(sweep_variable_name(cfg.sweep));
  for (const char* c : {"K", "rho", "delta", "R", "sigma2", "powers",
                        "truncation_N", "mc_samples", "seed"})
    cols.push_back(c);
  for (Method m : cfg.methods) {
    cols.push_back(std::string("p_") + method_name(m));
    cols.push_back(std::string("err_") + method_name(m));
  }
  cols.push_back("status");
  if (cfg.timing) cols.push_back("wall_ms");
}

std::string row_status(const ResultRow& row) {
  std::string status = "ok";
  for (const auto& [m, out] : row.outcomes)
    if (!out.ok) {
      if (status == "ok") status.clear();
      if (!status.empty()) status += '|';
      status += std::string(method_name(m)) + ":" + out.failure;
    }
  return status;
}

}  // namespace

void emit_csv(const std::vector<ResultRow>& rows, const SweepConfig& cfg,
              std::ostream& os) {
  std::vector<std::string> cols;
  header_columns(cfg, cols);
  for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const ResultRow& row : rows) {
    std::vector<std::string> cells;
    if (cfg.sweep != SweepVariable::none) cells.push_back(fmt12(row.sweep_value));
    cells.push_back(std::to_string(row.K));
    cells.push_back(fmt12(row.rho));
    cells.push_back(fmt12(row.delta));
    cells.push_back(fmt12(row.rate));
    cells.push_back(join12(row.sigma2));
    cells.push_back(join12(row.powers));
    cells.push_back(std::to_string(row.truncation_n));
    cells.push_back(std::to_string(row.mc_samples));
    cells.push_back(std::to_string(row.seed));
    for (const auto& [m, out] : row.outcomes) {
      cells.push_back(out.ok ? fmt12(out.p) : "nan");
      cells.push_back(out.ok ? fmt12(out.error) : "nan");
    }
    cells.push_back(row_status(row));
    if (cfg.timing) cells.push_back(fmt12(row.wall_ms));
    for (size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  }
}

void emit_json(const std::vector<ResultRow>& rows, const SweepConfig& cfg,
               std::ostream& os) {
  // hand-rolled so numbers keep exactly 12 significant digits
  os << "[\n";
  for (size_t r = 0; r < rows.size(); ++r) {
    const ResultRow& row = rows[r];
    os << "  {";
    bool first = true;
    auto field = [&](const std::string& k, const std::string& raw) {
      os << (first ? "" : ", ") << '"' << k << "\": " << raw;
      first = false;
    };
    if (cfg.sweep != SweepVariable::none)
      field(sweep_variable_name(cfg.sweep), fmt12(row.sweep_value));
    field("K", std::to_string(row.K));
    field("rho", fmt12(row.rho));
    field("delta", fmt12(row.delta));
    field("R", fmt12(row.rate));
    field("sigma2", "\"" + join12(row.sigma2) + "\"");
    field("powers", "\"" + join12(row.powers) + "\"");
    field("truncation_N", std::to_string(row.truncation_n));
    field("mc_samples", std::to_string(row.mc_samples));
    field("seed", std::to_string(row.seed));
    for (const auto& [m, out] : row.outcomes) {
      field(std::string("p_") + method_name(m), out.ok ? fmt12(out.p) : "null");
      field(std::string("err_") + method_name(m), out.ok ? fmt12(out.error) : "null");
    }
    field("status", "\"" + row_status(row) + "\"");
    if (cfg.timing) field("wall_ms", fmt12(row.wall_ms));
    os << "}" << (r + 1 < rows.size() ? "," : "") << "\n";
  }
  os << "]\n";
}

void emit(const std::vector<ResultRow>& rows, const SweepConfig& cfg) {
  auto write = [&](std::ostream& os) {
    if (cfg.format == "json")
      emit_json(rows, cfg, os);
    else
      emit_csv(rows, cfg, os);
  };
  if (cfg.output_path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + cfg.output_path + "'");
  write(out);
  out.flush();
  if (!out) throw ConfigError("write failed for '" + cfg.output_path + "'");
}

void emit_weights_csv(const WeightTable& table, int K, std::ostream& os) {
  for (int k = 1; k <= K; ++k) os << "l_" << k << ",";
  os << "W_l,cumulative_mass\n";
  double cum = 0.0;
  for (size_t i = 0; i < table.size(); ++i) {
    cum += table.weights[i];
    for (int v : table.indices[i]) os << v << ",";
    os << fmt12(table.weights[i]) << "," << fmt12(cum) << "\n";
  }
}

}  // namespace harqir
