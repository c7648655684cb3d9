// Command-line driver for the three-spin overlap-measurement simulator.
//
// Subcommands: run (single experiment), sweep (20-point grids), calibrate
// (reference areas) and export-spectrum (assistant-spin spectrum CSV).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nmrsim/config.hpp"
#include "nmrsim/experiment.hpp"

using namespace nmrsim;

namespace {

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << contents;
}

struct StateFlags {
  double theta1 = 0, phi1 = 0, theta2 = 0, phi2 = 0;
  bool noise = false;
  double flip_err = 0.0;
  std::uint64_t seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--theta1", theta1, "polar angle of psi1 in degrees [0,180]");
    cmd->add_option("--phi1", phi1, "azimuthal angle of psi1 in degrees [0,360)");
    cmd->add_option("--theta2", theta2, "polar angle of psi2 in degrees [0,180]");
    cmd->add_option("--phi2", phi2, "azimuthal angle of psi2 in degrees [0,360)");
    cmd->add_flag("--noise", noise, "enable relaxation during the sequence");
    cmd->add_option("--flip-err", flip_err, "fractional flip-angle error [-0.2,0.2]");
    cmd->add_option("--seed", seed, "seed for optional additive detection noise");
  }

  ExperimentSpec spec() const {
    ExperimentSpec s;
    s.theta1 = theta1; s.phi1 = phi1;
    s.theta2 = theta2; s.phi2 = phi2;
    s.noise_on = noise;
    s.flip_angle_error = flip_err;
    s.seed = seed;
    return s;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NMR overlap network simulator: estimates the fidelity of two "
               "single-qubit states from the assistant spin's multiplet area"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "key/value configuration file");

  auto* run_cmd = app.add_subcommand("run", "run a single experiment");
  StateFlags run_flags;
  run_flags.attach(run_cmd);
  std::string run_csv;
  run_cmd->add_option("--csv", run_csv, "also write the result row as CSV");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a 20-point sweep");
  std::string mode_name = "fig3a";
  bool sweep_noise = false;
  std::uint64_t sweep_seed = 0;
  std::string sweep_out;
  sweep_cmd->add_option("--mode", mode_name, "fig3a, fig3b or both-vary");
  sweep_cmd->add_flag("--noise", sweep_noise, "enable relaxation");
  sweep_cmd->add_option("--seed", sweep_seed, "seed for optional additive noise");
  sweep_cmd->add_option("--out", sweep_out, "CSV output path (default sweep_<mode>.csv)");

  auto* cal_cmd = app.add_subcommand("calibrate", "print the reference areas");
  bool cal_noise = false;
  cal_cmd->add_flag("--noise", cal_noise, "enable relaxation");

  auto* spec_cmd = app.add_subcommand("export-spectrum",
                                      "write the summed assistant-spin spectrum");
  StateFlags spec_flags;
  spec_flags.attach(spec_cmd);
  std::string spec_out = "spectrum.csv";
  spec_cmd->add_option("--out", spec_out, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    config.validate();

    if (*run_cmd) {
      ExperimentSpec spec = run_flags.spec();
      if (run_cmd->count("--flip-err") == 0) spec.flip_angle_error = config.flip_angle_error;
      const ExperimentResult result = run_experiment(spec, config);
      std::printf("f_theory        %.6f\n", result.f_theory);
      std::printf("f_ideal_circuit %.6f\n", result.f_ideal_circuit);
      std::printf("f_exp           %.6f%s\n", result.f_exp,
                  result.clamped ? "  (clamped)" : "");
      std::printf("err             %.6f\n", result.err);
      std::printf("sequence_s      %.4f\n", result.sequence_duration_s);
      if (!run_csv.empty()) {
        std::vector<SweepRow> rows{{spec, result}};
        write_file(run_csv, results_csv(rows));
      }
    } else if (*sweep_cmd) {
      const SweepMode mode = sweep_mode_from(mode_name);
      const SweepResult result = run_sweep(mode, sweep_noise, config, sweep_seed);
      const std::string path =
          sweep_out.empty() ? "sweep_" + to_string(mode) + ".csv" : sweep_out;
      write_file(path, results_csv(result.rows));
      std::cout << format_report(result.rows);
      std::cout << "wrote " << path << "\n";
    } else if (*cal_cmd) {
      const Calibration cal = calibrate(config, cal_noise);
      std::printf("reference areas from the temporal-averaged |000> preparation "
                  "through the reading sequence:\n");
      for (int k = 0; k < 3; ++k)
        std::printf("  experiment %d: %.10g\n", k + 1, cal.per_experiment_area[k]);
      std::printf("  sum:          %.10g\n", cal.area_sum);
      std::printf("normalization: f_exp = summed multiplet area / %.10g\n",
                  cal.area_sum);
    } else if (*spec_cmd) {
      ExperimentSpec spec = spec_flags.spec();
      if (spec_cmd->count("--flip-err") == 0) spec.flip_angle_error = config.flip_angle_error;
      const Calibration cal = calibrate(config, spec.noise_on);
      const ExperimentOutput output = run_experiment_detailed(spec, config, cal);
      std::ofstream out(spec_out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open output file: " + spec_out);
      write_spectrum_csv(output.summed_spectrum, out);
      std::printf("f_exp %.6f (f_theory %.6f), spectrum written to %s\n",
                  output.result.f_exp, output.result.f_theory, spec_out.c_str());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
