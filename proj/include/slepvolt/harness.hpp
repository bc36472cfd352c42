#pragma once

// End-to-end experiment driver: sweeps input class x system label x energy x
// higher-order scale x bandwidth x repetition, scores each record with the
// class's detection statistic, z-normalizes alternate records against the
// matched null ensembles, and aggregates cross-product orthogonality
// diagnostics. Everything is reproducible from (config, master seed); every
// record carries its own derived seed.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slepvolt/geometry.hpp"
#include "slepvolt/laguerre.hpp"

namespace slepvolt {

struct ExperimentConfig {
  Geometry geometry;
  std::vector<double> energies = {4e3, 4e4, 4e6};
  std::vector<double> ho_scales = {2e-6, 4e-6, 6e-6};
  std::vector<double> w_hz = {0.5, 0.75, 1.0};
  int repetitions = 10;
  std::uint64_t master_seed = 12345;
  int analysis_grid = 1920;          // identification / band-statistic grid
  double noise_variance = 1.0;
  std::vector<std::string> input_classes = {"gaussian_white", "m_sequence", "ssr",
                                            "modulated_dpss"};
  std::vector<std::string> system_labels = {"null", "alternate"};

  // System construction.
  int num_basis_functions = 50;
  SystemLevels levels;               // order-1 gain and flat higher-order levels
  AlternateOptions alternate;

  // Higher-order scaling: "energy" sweeps ho_scales literally; "sd-target"
  // solves per record for the scale that brings the noiseless output sample
  // standard deviation to sd_target.
  std::string scaling_mode = "energy";
  double sd_target = 140.0;

  // Cell measured for cross-product orthogonality.
  double cross_energy = 4e4;
  double cross_scale = 4e-6;

  void check() const;
};

ExperimentConfig load_experiment_config(const std::string& path);

struct DetectionRecord {
  std::string input_class;
  std::string system_label;
  std::string statistic;     // inner_product | kernel_band_mean
  double energy = 0.0;
  double ho_scale = 0.0;
  double w_hz = 0.0;
  int repetition = 0;
  int dpss_order = -1;       // -1 when not a DPSS probe record
  double raw_response = 0.0;
  std::optional<double> normalized_response;
  std::uint64_t seed = 0;    // derived seed of this record's noise stream
  double snri = 0.0;         // input energy / output-noise variance
};

struct CrossRow {
  std::string system_label;
  double w_hz = 0.0;
  double mean_offdiagonal = 0.0;
  int repetitions = 0;
};

struct CellFailure {
  std::string cell;
  std::string message;
};

struct ExperimentResult {
  std::vector<DetectionRecord> records;
  std::vector<CrossRow> cross;
  std::vector<CellFailure> failures;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// Median |z| over alternate-label records matching the filters (unset filter
// = pooled). Throws if nothing matches.
double median_abs_z(const std::vector<DetectionRecord>& records,
                    const std::string& input_class, std::optional<double> energy,
                    std::optional<double> w_hz);

double cross_mean(const ExperimentResult& result, const std::string& label,
                  double w_hz);

// records.csv, detection-ip.csv, detection-kernel.csv, cross-products.csv,
// failures.csv (only when nonempty) and summary.json under out_dir.
void emit_plot_data(const ExperimentResult& result, const ExperimentConfig& config,
                    const std::string& out_dir);

}  // namespace slepvolt
