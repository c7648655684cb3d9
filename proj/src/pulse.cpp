#include "nmrsim/pulse.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace nmrsim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

Matrix rotation2(double angle_deg, double phase_deg) {
  const double half = 0.5 * angle_deg * kDegToRad;
  const double phase = phase_deg * kDegToRad;
  const double c = std::cos(half), s = std::sin(half);
  Matrix u(2, 2);
  u << Complex(c, 0.0), Complex(0.0, -s) * std::exp(Complex(0.0, -phase)),
      Complex(0.0, -s) * std::exp(Complex(0.0, phase)), Complex(c, 0.0);
  return u;
}

int popcount8(int s) { return std::popcount(static_cast<unsigned>(s)); }

}  // namespace

double PulseSequence::total_duration() const {
  double total = 0.0;
  for (const auto& e : events) total += e.duration_s;
  return total;
}

Matrix rf_unitary(int spin, double angle_deg, double phase_deg) {
  if (spin < 0 || spin >= kNumSpins)
    throw std::invalid_argument("rf_unitary: spin index " + std::to_string(spin) +
                                " out of range");
  Matrix u = identity(1);
  for (int i = 0; i < kNumSpins; ++i)
    u = kron(u, i == spin ? rotation2(angle_deg, phase_deg) : identity(2));
  return u;
}

Matrix apply_rf(const Matrix& rho, int spin, double angle_deg, double phase_deg,
                const SpinSystem&) {
  const Matrix u = rf_unitary(spin, angle_deg, phase_deg);
  return u * rho * u.adjoint();
}

Matrix transition_unitary(const Transition& t, double angle_deg, double phase_deg) {
  if (t.a < 0 || t.a >= kRegisterDim || t.b < 0 || t.b >= kRegisterDim || t.a == t.b)
    throw std::invalid_argument("transition_unitary: invalid basis-state pair " +
                                std::to_string(t.a) + ":" + std::to_string(t.b));
  if (popcount8(t.a ^ t.b) != 1)
    throw std::invalid_argument("transition_unitary: states " + std::to_string(t.a) +
                                " and " + std::to_string(t.b) +
                                " must differ in exactly one spin");
  const Matrix block = rotation2(angle_deg, phase_deg);
  Matrix u = identity(kRegisterDim);
  u(t.a, t.a) = block(0, 0);
  u(t.a, t.b) = block(0, 1);
  u(t.b, t.a) = block(1, 0);
  u(t.b, t.b) = block(1, 1);
  return u;
}

Matrix apply_transition_pulse(const Matrix& rho, const Transition& t,
                              double angle_deg, double phase_deg) {
  const Matrix u = transition_unitary(t, angle_deg, phase_deg);
  return u * rho * u.adjoint();
}

Matrix free_evolution(const Matrix& rho, double t_s, const SpinSystem& sys) {
  if (t_s < 0.0)
    throw std::invalid_argument("free_evolution: negative time " + std::to_string(t_s));
  const auto energies = hamiltonian_diagonal(sys);
  Matrix out(kRegisterDim, kRegisterDim);
  for (int a = 0; a < kRegisterDim; ++a)
    for (int b = 0; b < kRegisterDim; ++b)
      out(a, b) = rho(a, b) * std::exp(Complex(0.0, -(energies[a] - energies[b]) * t_s));
  return out;
}

Matrix gradient_crush(const Matrix& rho, GradientPolicy policy) {
  Matrix out = rho;
  for (int a = 0; a < kRegisterDim; ++a)
    for (int b = 0; b < kRegisterDim; ++b) {
      if (a == b) continue;
      if (policy == GradientPolicy::crush_all || popcount8(a) != popcount8(b))
        out(a, b) = 0.0;
    }
  return out;
}

Matrix relax(const Matrix& rho, double t_s, const SpinSystem& sys) {
  if (t_s < 0.0)
    throw std::invalid_argument("relax: negative time " + std::to_string(t_s));
  if (t_s == 0.0) return rho;
  auto coeffs = pauli_coefficients(rho);
  for (size_t label = 0; label < coeffs.size(); ++label) {
    double factor = 1.0;
    for (int spin = 0; spin < kNumSpins; ++spin) {
      const int axis = (static_cast<int>(label) >> (2 * (kNumSpins - 1 - spin))) & 3;
      if (axis == 1 || axis == 2) factor *= std::exp(-t_s / sys.t2_s[spin]);
      else if (axis == 3) factor *= std::exp(-t_s / sys.t1_s[spin]);
    }
    coeffs[label] *= factor;
  }
  return from_pauli_coefficients(coeffs);
}

Matrix run_sequence(const Matrix& rho, const PulseSequence& seq,
                    const SpinSystem& sys, const SequenceOptions& options) {
  if (rho.rows() != kRegisterDim || rho.cols() != kRegisterDim)
    throw std::invalid_argument("run_sequence: state must be 8x8");
  const double scale = 1.0 + options.flip_angle_error;
  Matrix state = rho;
  for (const auto& e : seq.events) {
    switch (e.kind) {
      case EventKind::rf_pulse:
        state = apply_rf(state, e.spin, e.angle_deg * scale, e.phase_deg, sys);
        break;
      case EventKind::transition_pulse:
        state = apply_transition_pulse(state, e.transition, e.angle_deg * scale,
                                       e.phase_deg);
        break;
      case EventKind::delay:
        state = free_evolution(state, e.duration_s, sys);
        break;
      case EventKind::gradient:
        state = gradient_crush(state, options.gradient_policy);
        break;
    }
    if (options.noise_on && e.duration_s > 0.0)
      state = relax(state, e.duration_s, sys);
  }
  return state;
}

PulseSequence fredkin_sequence(double tp_duration_s, bool phase_corrected) {
  PulseSequence seq;
  const auto tp = [&](int a, int b, double phase) {
    PulseEvent e;
    e.kind = EventKind::transition_pulse;
    e.transition = {a, b};
    e.angle_deg = 180.0;
    e.phase_deg = phase;
    e.duration_s = tp_duration_s;
    return e;
  };
  seq.events.push_back(tp(5, 7, 0.0));    // |101> <-> |111>
  seq.events.push_back(tp(6, 7, 180.0));  // |110> <-> |111>
  seq.events.push_back(tp(5, 7, 0.0));
  if (phase_corrected) {
    // Composite z-rotation on the (011,111) pair placing equal +i phases on
    // |011> and |111>, which restores the diagonal readout for general inputs.
    seq.events.push_back(tp(3, 7, 0.0));
    seq.events.push_back(tp(3, 7, 90.0));
  }
  return seq;
}

Matrix sequence_unitary(const PulseSequence& seq, double flip_angle_error) {
  const double scale = 1.0 + flip_angle_error;
  Matrix u = identity(kRegisterDim);
  for (const auto& e : seq.events) {
    switch (e.kind) {
      case EventKind::rf_pulse:
        u = rf_unitary(e.spin, e.angle_deg * scale, e.phase_deg) * u;
        break;
      case EventKind::transition_pulse:
        u = transition_unitary(e.transition, e.angle_deg * scale, e.phase_deg) * u;
        break;
      default:
        throw std::invalid_argument(
            "sequence_unitary: sequence contains non-unitary events");
    }
  }
  return u;
}

namespace {

std::string kind_name(EventKind k) {
  switch (k) {
    case EventKind::rf_pulse: return "rf_pulse";
    case EventKind::transition_pulse: return "transition_pulse";
    case EventKind::delay: return "delay";
    case EventKind::gradient: return "gradient";
  }
  return "?";
}

EventKind kind_from(const std::string& s) {
  if (s == "rf_pulse") return EventKind::rf_pulse;
  if (s == "transition_pulse") return EventKind::transition_pulse;
  if (s == "delay") return EventKind::delay;
  if (s == "gradient") return EventKind::gradient;
  throw std::invalid_argument("unknown pulse event kind '" + s + "'");
}

}  // namespace

std::string to_text(const PulseSequence& seq) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& e : seq.events) {
    out << kind_name(e.kind) << ' ';
    if (e.kind == EventKind::rf_pulse) out << e.spin;
    else if (e.kind == EventKind::transition_pulse)
      out << e.transition.a << ':' << e.transition.b;
    else out << '-';
    out << ' ' << e.angle_deg << ' ' << e.phase_deg << ' ' << e.duration_s << '\n';
  }
  return out.str();
}

PulseSequence sequence_from_text(const std::string& text) {
  PulseSequence seq;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string kind, target;
    PulseEvent e;
    if (!(fields >> kind >> target >> e.angle_deg >> e.phase_deg >> e.duration_s))
      throw std::invalid_argument("pulse sequence line " + std::to_string(line_no) +
                                  ": expected `kind target angle phase duration`");
    e.kind = kind_from(kind);
    try {
      if (e.kind == EventKind::rf_pulse) {
        e.spin = std::stoi(target);
      } else if (e.kind == EventKind::transition_pulse) {
        const auto colon = target.find(':');
        if (colon == std::string::npos)
          throw std::invalid_argument("transition target must be a:b");
        e.transition.a = std::stoi(target.substr(0, colon));
        e.transition.b = std::stoi(target.substr(colon + 1));
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("pulse sequence line " + std::to_string(line_no) +
                                  ": bad target '" + target + "'");
    }
    seq.events.push_back(e);
  }
  return seq;
}

}  // namespace nmrsim
