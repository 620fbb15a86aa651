// Structured sweep configuration, deterministic sweep execution and
// CSV/JSON result persistence.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "harqir/outage.hpp"

namespace harqir {

enum class SweepVariable { none, p_total_db, rho, rate, K };

const char* sweep_variable_name(SweepVariable v);

struct SweepConfig {
  // channel / query parameters (scalars broadcast to K rounds)
  int K = 4;
  double rho = 0.0;
  double delta = 1.0;
  std::vector<double> sigma2;  ///< empty = all ones
  std::vector<double> powers;  ///< per-round linear powers; empty with theta unset = 1.0 each
  std::optional<double> gamma;            ///< P_k = gamma * theta_k form
  std::vector<double> theta;
  double rate_bits = 2.0;
  int truncation_n = 3;
  long long mc_samples = 1'000'000;
  std::uint64_t seed = 1;
  int workers = 1;
  bool mc_auto = false;  ///< escalate samples until CI half-width < 10% of p

  std::vector<Method> methods = {Method::exact};

  SweepVariable sweep = SweepVariable::none;
  std::vector<double> sweep_values;  ///< required unless sweep == none

  std::string output_path;     ///< empty = stdout
  std::string format = "csv";  ///< csv | json
  bool timing = false;         ///< adds wall_ms column (breaks byte-identity)

  /// Throws ConfigError with an actionable message on any bad field.
  void validate() const;
};

/// Parse the structured key-value config (JSON text). Unknown keys are
/// rejected. See README for the key list.
SweepConfig parse_config(const std::string& json_text);
SweepConfig load_config_file(const std::string& path);

struct MethodOutcome {
  bool ok = false;
  double p = 0.0;
  double error = 0.0;
  std::string failure;  ///< nonempty when !ok
};

struct ResultRow {
  double sweep_value = 0.0;  ///< meaningless when sweep == none
  int K = 0;
  double rho = 0.0, delta = 0.0, rate = 0.0;
  std::vector<double> sigma2, powers;
  int truncation_n = 0;
  long long mc_samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<Method, MethodOutcome>> outcomes;  ///< config order
  double wall_ms = 0.0;
};

/// Build the outage query for one sweep point (sweep value ignored when
/// sweep == none). Exposed so single evaluations share the exact same
/// parameter resolution as sweeps.
OutageQuery make_query(const SweepConfig& cfg, Method method, double sweep_value);

/// Evaluate every requested method at every sweep point. Points run in
/// parallel; rows come back in sweep order; per-point failures are
/// recorded in the row. Fully deterministic for a fixed config.
std::vector<ResultRow> run_sweep(const SweepConfig& cfg);

/// CSV with one header row; columns: sweep variable, fixed parameters,
/// one (p, error) pair per method, status [, wall_ms with cfg.timing].
/// Numbers carry 12 significant digits.
void emit_csv(const std::vector<ResultRow>& rows, const SweepConfig& cfg,
              std::ostream& os);

/// Same rows as a JSON array of row objects.
void emit_json(const std::vector<ResultRow>& rows, const SweepConfig& cfg,
               std::ostream& os);

/// Writes in cfg.format to cfg.output_path (stdout when empty). I/O
/// failures surface with the path in the message.
void emit(const std::vector<ResultRow>& rows, const SweepConfig& cfg);

/// `weights` subcommand payload: columns l_1..l_K, W_l, cumulative mass.
void emit_weights_csv(const WeightTable& table, int K, std::ostream& os);

/// linear <-> dB helpers (P_linear = 10^{dB/10})
double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace harqir
