#pragma once

#include <string>

#include "nmrsim/experiment.hpp"

namespace nmrsim {

/// Plain-text key/value run configuration. Spin-system keys: offsets_hz,
/// j_hz_row1..3, t1_s, t2_s, thermal_weights. Run keys: selective_pulse_s,
/// transition_pulse_s, gradient_s, settle_delay_s, readout_pulse_s,
/// gradient_policy, flip_angle_error, noise_rms, n_points, spectral_width_hz,
/// spectral_width_factor, window_linewidths, window_margin_hz,
/// fredkin_phase_corrected. Unknown keys are an error.
RunConfig run_config_from_text(const std::string& text);
RunConfig load_run_config(const std::string& path);

}  // namespace nmrsim
