#pragma once

// Declarative experiments: configuration, execution, reporting.

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "coupling_lab/bernstein.hpp"
#include "coupling_lab/bounds.hpp"
#include "coupling_lab/densities.hpp"
#include "coupling_lab/random.hpp"
#include "coupling_lab/stats.hpp"

namespace coupling_lab {

enum class ExperimentKind {
  BoundCurve,
  CouplingSurvival,
  TvSharpness,
  ProductCoupling,
  DecompositionDomination,
  TruncatedStableSlope,
  LaplaceValidation,
};

std::string kind_name(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

/// {"family": "stable-pow", "alpha": 1} and friends; unknown keys rejected.
BernsteinSpec parse_spec(const nlohmann::json& j);
nlohmann::json spec_to_json(const BernsteinSpec& spec);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::BoundCurve;
  std::string name;
  std::vector<BernsteinSpec> specs;
  std::string strategy = "auto";
  std::string method = "identity";  // coupling-survival: "identity" or "first-passage"
  std::vector<double> t_grid;
  std::vector<double> x{0.0};
  std::vector<double> y{1.0};
  std::uint64_t n = 10000;
  std::uint64_t seed = 42;
  double tol = 0.01;
  PrefactorMode prefactor_mode = PrefactorMode::Corrected;
  double envelope_constant = 1.0;
  double epsilon = 1e-3;
  double c_alpha = 1.0;
  double alpha = 1.0;
  double bin_width = 0.0;  // 0: chosen per kind
  std::vector<double> lambda_grid{0.5, 1.0, 4.0};
  double jump_rate = 1.0;
  double jump_size = 1.0;
  std::optional<double> expect_slope;
  double slope_tolerance = 0.05;
  std::string csv_path;
  std::string json_path;
  nlohmann::json source;  // the config as given
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct Row {
  double t = 0.0;
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
};

struct Criterion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentReport {
  nlohmann::json config;
  std::string prefactor_mode;
  std::vector<Row> rows;
  std::optional<SlopeFit> slope;
  std::vector<Criterion> criteria;
  nlohmann::json details = nlohmann::json::object();  // kind-specific per-row extras
  std::string status = "ok";                          // "ok", "criteria-failed", "error"
  std::string error;
  double wall_seconds = 0.0;
  nlohmann::json environment;

  bool passed() const;
};

/// Runs the experiment; module errors are captured in the report. Results
/// are bit-identical for a given (config, seed) whatever the worker count.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// "t,value,stderr,n" with shortest round-trip numbers.
std::string rows_to_csv(const std::vector<Row>& rows);
/// Header `z,p`, full symmetric grid from -L to L.
std::string density_to_csv(const DensityGrid& grid);
nlohmann::json report_to_json(const ExperimentReport& report);
/// Writes CSV / JSON to the configured paths (when set).
void write_outputs(const ExperimentConfig& config, const ExperimentReport& report);

RngStream make_rng_stream(std::uint64_t seed, std::uint64_t experiment_id,
                          std::uint64_t replicate);

/// Stable 64-bit id of a label (FNV-1a), used as the experiment id of streams.
std::uint64_t experiment_id(const std::string& label);

}  // namespace coupling_lab
