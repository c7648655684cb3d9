#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nmrsim/circuit.hpp"
#include "nmrsim/pulse.hpp"
#include "nmrsim/readout.hpp"
#include "nmrsim/spin_system.hpp"

namespace nmrsim {

// Event durations of the default sequence. The settle delay pads the total
// to roughly 0.3 s; it sits between the network and the gradient, where the
// fidelity information is already in the populations.
struct Durations {
  double selective_pulse_s = 0.005;
  double transition_pulse_s = 0.02;
  double gradient_s = 0.001;
  double settle_delay_s = 0.214;
  double readout_pulse_s = 0.005;
};

struct RunConfig {
  SpinSystem sys;
  Durations durations;
  AcquisitionParams acquisition;
  GradientPolicy gradient_policy = GradientPolicy::crush_all;
  double flip_angle_error = 0.0;
  double noise_rms = 0.0;  // additive detection noise, off by default
  bool fredkin_phase_corrected = false;

  void validate() const;
};

struct ExperimentSpec {
  double theta1 = 0.0, phi1 = 0.0;  // psi1, held on qubit 2
  double theta2 = 0.0, phi2 = 0.0;  // psi2, held on qubit 3
  bool noise_on = false;
  double flip_angle_error = 0.0;  // in [-0.2, 0.2]
  std::uint64_t seed = 0;

  void validate() const;
};

struct ExperimentResult {
  double f_exp = 0.0;
  double f_theory = 0.0;
  double err = 0.0;  // |f_exp - f_theory|
  double f_ideal_circuit = 0.0;
  double f_exp_raw = 0.0;
  bool clamped = false;
  double sequence_duration_s = 0.0;
};

struct Calibration {
  std::array<double, 3> per_experiment_area{};
  double area_sum = 0.0;
};

/// State preparation, network and settle delay of the main sequence
/// (reading is applied separately).
PulseSequence main_sequence(const ExperimentSpec& spec, const RunConfig& config);

/// Reference run: the temporal-averaged |000> preparation through the
/// reading sequence alone; its summed assistant-spin area calibrates F = 1.
Calibration calibrate(const RunConfig& config, bool noise_on);

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunConfig& config);
ExperimentResult run_experiment(const ExperimentSpec& spec, const RunConfig& config,
                                const Calibration& calibration);

struct ExperimentOutput {
  ExperimentResult result;
  Spectrum summed_spectrum;  // sum of the three temporal-averaging spectra
};

ExperimentOutput run_experiment_detailed(const ExperimentSpec& spec,
                                         const RunConfig& config,
                                         const Calibration& calibration);

enum class SweepMode { fig3a, fig3b, both_vary };

SweepMode sweep_mode_from(const std::string& name);
std::string to_string(SweepMode mode);

struct SweepRow {
  ExperimentSpec spec;
  ExperimentResult result;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by (theta, phi)
  double mean_err = 0.0;
  double max_err = 0.0;
};

/// 20-point grid: theta in {0,45,90,135,180} x phi in {0,90,180,270}.
/// fig3a holds psi2 = |0> and sweeps psi1; fig3b swaps the roles. both_vary
/// sweeps psi1 = (theta, phi) against psi2 = (theta, 0) and goes beyond the
/// two reported scans.
SweepResult run_sweep(SweepMode mode, bool noise_on, const RunConfig& config,
                      std::uint64_t seed = 0);

// Error statistics reported by the original laboratory demonstration,
// printed next to the simulated ones for comparison.
inline constexpr double kLabReportedMeanErr = 0.05;
inline constexpr double kLabReportedMaxErr = 0.11;

struct Report {
  std::size_t n_rows = 0;
  double mean_err = 0.0;
  double max_err = 0.0;
  std::size_t n_clamped = 0;
};

/// Throws on an empty table.
Report summarize(const std::vector<SweepRow>& rows);
std::string format_report(const std::vector<SweepRow>& rows);

/// CSV schema: theta1,phi1,theta2,phi2,f_theory,f_exp,err,clamped
std::string results_csv(const std::vector<SweepRow>& rows);

}  // namespace nmrsim
