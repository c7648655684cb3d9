#include "nmrsim/readout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace nmrsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double linewidth_hz(const SpinSystem& sys, int spin) {
  return 1.0 / (std::numbers::pi * sys.t2_s[spin]);
}

double coupling_sum(const SpinSystem& sys, int spin) {
  double sum = 0.0;
  for (int j = 0; j < kNumSpins; ++j)
    if (j != spin) sum += std::abs(sys.j_hz[spin][j]);
  return sum;
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT, forward sign convention e^{-2pi i km/n}.
// Twiddles come from a table shared across calls of the same length.
void fft(std::vector<Complex>& data) {
  const size_t n = data.size();
  thread_local std::vector<Complex> twiddles;
  thread_local size_t twiddle_n = 0;
  if (twiddle_n != n) {
    twiddles.resize(n / 2);
    for (size_t k = 0; k < n / 2; ++k) {
      const double angle = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
      twiddles[k] = Complex(std::cos(angle), std::sin(angle));
    }
    twiddle_n = n;
  }

  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const size_t stride = n / len;
    for (size_t i = 0; i < n; i += len) {
      for (size_t k = 0; k < len / 2; ++k) {
        const Complex u = data[i + k];
        const Complex v = data[i + k + len / 2] * twiddles[k * stride];
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
      }
    }
  }
}

}  // namespace

double spectral_width_hz(const SpinSystem& sys, const AcquisitionParams& acq) {
  if (acq.spectral_width_hz > 0.0) return acq.spectral_width_hz;
  const auto [lo, hi] =
      std::minmax_element(sys.offsets_hz.begin(), sys.offsets_hz.end());
  double sw = acq.spectral_width_factor * (*hi - *lo);
  // Every multiplet must fit even when offsets are close together.
  for (int i = 0; i < kNumSpins; ++i) {
    const double edge = std::abs(sys.offsets_hz[i]) + coupling_sum(sys, i) +
                        acq.window_linewidths * linewidth_hz(sys, i) +
                        acq.window_margin_hz;
    sw = std::max(sw, 2.5 * edge);
  }
  return sw;
}

std::array<FrequencyWindow, 3> multiplet_windows(const SpinSystem& sys,
                                                 const AcquisitionParams& acq) {
  std::array<FrequencyWindow, 3> windows;
  for (int i = 0; i < kNumSpins; ++i) {
    const double half = coupling_sum(sys, i) +
                        acq.window_linewidths * linewidth_hz(sys, i) +
                        acq.window_margin_hz;
    windows[i] = {sys.offsets_hz[i] - half, sys.offsets_hz[i] + half};
  }
  return windows;
}

Matrix reading_sequence(const Matrix& rho, const SpinSystem& sys, bool noise_on,
                        const ReadoutTiming& timing, GradientPolicy policy,
                        double flip_angle_error) {
  if (rho.rows() != kRegisterDim || rho.cols() != kRegisterDim)
    throw std::invalid_argument("reading_sequence: state must be 8x8");
  Matrix state = gradient_crush(rho, policy);
  if (noise_on) state = relax(state, timing.gradient_s, sys);
  state = apply_rf(state, 0, 90.0 * (1.0 + flip_angle_error), 90.0, sys);
  if (noise_on) state = relax(state, timing.pulse_s, sys);
  return state;
}

Fid synthesize_fid(const Matrix& rho, const SpinSystem& sys, int n_points,
                   double dwell_s) {
  if (rho.rows() != kRegisterDim || rho.cols() != kRegisterDim)
    throw std::invalid_argument("synthesize_fid: state must be 8x8");
  if (n_points < 256)
    throw std::invalid_argument("synthesize_fid: n_points must be >= 256, got " +
                                std::to_string(n_points));
  if (!(dwell_s > 0.0))
    throw std::invalid_argument("synthesize_fid: dwell time must be positive");

  const double sw = 1.0 / dwell_s;

  // The detected signal lives in the assistant-spin single-quantum sector:
  // the four elements <1 q2 q3| rho |0 q2 q3>. Free evolution is diagonal on
  // them and acquisition decay is the detected spin's T2, so each multiplet
  // component is an independent damped complex exponential.
  Eigen::Vector4cd v;
  for (int q = 0; q < 4; ++q) v(q) = rho(4 + q, q);

  std::array<double, 4> freq_hz{};
  for (int q = 0; q < 4; ++q) {
    const double m1 = (q & 2) ? -0.5 : 0.5;  // spin 1 of the passive pair
    const double m2 = (q & 1) ? -0.5 : 0.5;  // spin 2 of the passive pair
    freq_hz[q] = sys.offsets_hz[0] + sys.j_hz[0][1] * m1 + sys.j_hz[0][2] * m2;
  }

  // Alias checks: detectable content, then the stated all-multiplets bound.
  const double content_scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
  for (int q = 0; q < 4; ++q)
    if (std::abs(v(q)) > 1e-12 * content_scale && std::abs(freq_hz[q]) >= 0.5 * sw)
      throw std::invalid_argument("synthesize_fid: line at " +
                                  std::to_string(freq_hz[q]) +
                                  " Hz outside spectral width " + std::to_string(sw));
  for (int i = 0; i < kNumSpins; ++i) {
    const double edge = std::abs(sys.offsets_hz[i]) + coupling_sum(sys, i) +
                        linewidth_hz(sys, i);
    if (edge >= 0.5 * sw)
      throw std::invalid_argument(
          "synthesize_fid: multiplet of spin " + std::to_string(i) + " reaching " +
          std::to_string(edge) + " Hz not covered by spectral width " +
          std::to_string(sw));
  }

  Eigen::Vector4cd step;
  for (int q = 0; q < 4; ++q)
    step(q) = std::exp(Complex(-1.0 / sys.t2_s[0], kTwoPi * freq_hz[q]) * dwell_s);

  Fid fid;
  fid.dwell_time_s = dwell_s;
  fid.samples.resize(static_cast<size_t>(n_points));
  for (int k = 0; k < n_points; ++k) {
    fid.samples[static_cast<size_t>(k)] = v.sum();
    v = v.cwiseProduct(step);
  }
  return fid;
}

Spectrum spectrum_of(const Fid& fid) {
  const int n = fid.n_points();
  if (n == 0) throw std::invalid_argument("spectrum_of: empty FID");
  if (!power_of_two(n))
    throw std::invalid_argument("spectrum_of: n_points must be a power of two, got " +
                                std::to_string(n));
  std::vector<Complex> data = fid.samples;
  // Trapezoidal half-line transform: halving the first point removes the
  // flat s(0)*dwell/2 baseline that would otherwise pollute every window.
  data[0] *= 0.5;
  fft(data);

  Spectrum spec;
  spec.frequencies_hz.resize(static_cast<size_t>(n));
  spec.intensities.resize(static_cast<size_t>(n));
  const double df = 1.0 / (n * fid.dwell_time_s);
  for (int k = 0; k < n; ++k) {
    spec.frequencies_hz[static_cast<size_t>(k)] = (k - n / 2) * df;
    spec.intensities[static_cast<size_t>(k)] =
        fid.dwell_time_s * data[static_cast<size_t>((k + n / 2) % n)];
  }
  return spec;
}

Spectrum spectrum_of(const Fid& fid, const SpinSystem& sys,
                     const AcquisitionParams& acq) {
  Spectrum spec = spectrum_of(fid);
  spec.multiplet_windows = multiplet_windows(sys, acq);
  spec.has_windows = true;
  return spec;
}

double integrate_multiplet(const Spectrum& spec, int spin) {
  if (spin < 0 || spin >= kNumSpins)
    throw std::invalid_argument("integrate_multiplet: spin index out of range");
  if (!spec.has_windows)
    throw std::invalid_argument("integrate_multiplet: no multiplet window defined for spin " +
                                std::to_string(spin));
  const auto& w = spec.multiplet_windows[static_cast<size_t>(spin)];
  if (spec.frequencies_hz.empty() || w.lo_hz < spec.frequencies_hz.front() ||
      w.hi_hz > spec.frequencies_hz.back())
    throw std::invalid_argument(
        "integrate_multiplet: window [" + std::to_string(w.lo_hz) + ", " +
        std::to_string(w.hi_hz) + "] Hz not covered by the spectrum axis");

  double area = 0.0;
  for (size_t k = 0; k + 1 < spec.frequencies_hz.size(); ++k) {
    const double f0 = spec.frequencies_hz[k];
    const double f1 = spec.frequencies_hz[k + 1];
    if (f0 < w.lo_hz || f1 > w.hi_hz) continue;
    area += 0.5 * (spec.intensities[k].real() + spec.intensities[k + 1].real()) *
            (f1 - f0);
  }
  return area;
}

FidelityEstimate estimate_fidelity(double area, double area_ref) {
  if (!(area_ref > 0.0))
    throw std::invalid_argument("estimate_fidelity: reference area must be positive, got " +
                                std::to_string(area_ref));
  FidelityEstimate est;
  est.raw = area / area_ref;
  est.value = std::clamp(est.raw, -0.05, 1.05);
  est.clamped = est.value != est.raw;
  return est;
}

void write_spectrum_csv(const Spectrum& spec, std::ostream& out) {
  out << "frequency_hz,real,imag\n";
  char buf[96];
  for (size_t k = 0; k < spec.frequencies_hz.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", spec.frequencies_hz[k],
                  spec.intensities[k].real(), spec.intensities[k].imag());
    out << buf;
  }
}

void write_fid_csv(const Fid& fid, std::ostream& out) {
  out << "time_s,real,imag\n";
  char buf[96];
  for (int k = 0; k < fid.n_points(); ++k) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", k * fid.dwell_time_s,
                  fid.samples[static_cast<size_t>(k)].real(),
                  fid.samples[static_cast<size_t>(k)].imag());
    out << buf;
  }
}

}  // namespace nmrsim
