#include "nmrsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nmrsim {

namespace {

const std::set<std::string> kSpinKeys = {
    "offsets_hz", "j_hz_row1", "j_hz_row2", "j_hz_row3",
    "t1_s", "t2_s", "thermal_weights"};

double parse_double(const std::string& value, const std::string& key) {
  std::istringstream in(value);
  double v;
  if (!(in >> v))
    throw std::invalid_argument("config: key '" + key + "' needs a number, got '" +
                                value + "'");
  return v;
}

bool parse_bool(const std::string& value, const std::string& key) {
  std::istringstream in(value);
  std::string word;
  in >> word;
  if (word == "1" || word == "true" || word == "yes" || word == "on") return true;
  if (word == "0" || word == "false" || word == "no" || word == "off") return false;
  throw std::invalid_argument("config: key '" + key + "' needs a boolean, got '" +
                              value + "'");
}

}  // namespace

RunConfig run_config_from_text(const std::string& text) {
  RunConfig config;
  config.sys = spin_system_from_text(text);

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected `key = value`");
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    std::string value = line.substr(eq + 1);

    if (kSpinKeys.count(key)) continue;  // already consumed
    if (key == "selective_pulse_s") config.durations.selective_pulse_s = parse_double(value, key);
    else if (key == "transition_pulse_s") config.durations.transition_pulse_s = parse_double(value, key);
    else if (key == "gradient_s") config.durations.gradient_s = parse_double(value, key);
    else if (key == "settle_delay_s") config.durations.settle_delay_s = parse_double(value, key);
    else if (key == "readout_pulse_s") config.durations.readout_pulse_s = parse_double(value, key);
    else if (key == "flip_angle_error") config.flip_angle_error = parse_double(value, key);
    else if (key == "noise_rms") config.noise_rms = parse_double(value, key);
    else if (key == "n_points") config.acquisition.n_points = static_cast<int>(parse_double(value, key));
    else if (key == "spectral_width_hz") config.acquisition.spectral_width_hz = parse_double(value, key);
    else if (key == "spectral_width_factor") config.acquisition.spectral_width_factor = parse_double(value, key);
    else if (key == "window_linewidths") config.acquisition.window_linewidths = parse_double(value, key);
    else if (key == "window_margin_hz") config.acquisition.window_margin_hz = parse_double(value, key);
    else if (key == "fredkin_phase_corrected") config.fredkin_phase_corrected = parse_bool(value, key);
    else if (key == "gradient_policy") {
      std::istringstream v(value);
      std::string word;
      v >> word;
      if (word == "crush_all") config.gradient_policy = GradientPolicy::crush_all;
      else if (word == "preserve_zero_quantum")
        config.gradient_policy = GradientPolicy::preserve_zero_quantum;
      else
        throw std::invalid_argument("config: gradient_policy must be crush_all or "
                                    "preserve_zero_quantum, got '" + word + "'");
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }

  config.validate();
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return run_config_from_text(buffer.str());
}

}  // namespace nmrsim
