#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "nmrsim/linalg.hpp"
#include "nmrsim/pulse.hpp"
#include "nmrsim/spin_system.hpp"

namespace nmrsim {

// Time-domain detection record for the assistant spin.
struct Fid {
  std::vector<Complex> samples;
  double dwell_time_s = 0.0;
  int n_points() const { return static_cast<int>(samples.size()); }
};

struct FrequencyWindow {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
};

struct Spectrum {
  std::vector<double> frequencies_hz;  // strictly increasing
  std::vector<Complex> intensities;
  std::array<FrequencyWindow, 3> multiplet_windows{};
  bool has_windows = false;
};

struct AcquisitionParams {
  int n_points = 1048576;  // long enough for the FID to decay away fully
  double spectral_width_hz = 0.0;     // 0 = derive from spectral_width_factor
  double spectral_width_factor = 4.0; // times the offset spread
  double window_linewidths = 5.0;
  double window_margin_hz = 50.0;     // extra halfwidth beyond couplings+linewidths
};

struct ReadoutTiming {
  double gradient_s = 0.001;
  double pulse_s = 0.005;
};

double spectral_width_hz(const SpinSystem& sys, const AcquisitionParams& acq);

/// Integration window per spin: offset ± (sum of |J| to the spin
/// + window_linewidths line widths + window_margin_hz).
std::array<FrequencyWindow, 3> multiplet_windows(const SpinSystem& sys,
                                                 const AcquisitionParams& acq);

/// Gradient crusher followed by a 90 degree y pulse on the assistant spin.
/// Turns the population difference of the assistant spin into in-phase
/// transverse magnetization without touching the identity component.
Matrix reading_sequence(const Matrix& rho, const SpinSystem& sys, bool noise_on,
                        const ReadoutTiming& timing = {},
                        GradientPolicy policy = GradientPolicy::crush_all,
                        double flip_angle_error = 0.0);

/// samples[k] = Tr((Ix1 + i Iy1) rho(k*dwell)) with rho evolving under the
/// weak-coupling Hamiltonian and the detected spin's T2 decay. Throws when
/// any detectable frequency or multiplet falls outside the spectral width,
/// or when n_points < 256.
Fid synthesize_fid(const Matrix& rho, const SpinSystem& sys, int n_points,
                   double dwell_s);

/// Discrete Fourier transform with a Hz axis from the dwell time
/// (n_points must be a power of two).
Spectrum spectrum_of(const Fid& fid);
Spectrum spectrum_of(const Fid& fid, const SpinSystem& sys,
                     const AcquisitionParams& acq);

/// Real-part trapezoidal integral over the spin's multiplet window.
double integrate_multiplet(const Spectrum& spec, int spin);

struct FidelityEstimate {
  double value = 0.0;  // clamped to [-0.05, 1.05]
  double raw = 0.0;
  bool clamped = false;
};

/// F_exp = area / area_ref; throws on non-positive reference.
FidelityEstimate estimate_fidelity(double area, double area_ref);

void write_spectrum_csv(const Spectrum& spec, std::ostream& out);
void write_fid_csv(const Fid& fid, std::ostream& out);

}  // namespace nmrsim
