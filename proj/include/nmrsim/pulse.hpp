#pragma once

#include <string>
#include <vector>

#include "nmrsim/linalg.hpp"
#include "nmrsim/spin_system.hpp"

namespace nmrsim {

enum class EventKind { rf_pulse, transition_pulse, delay, gradient };

// Pair of Zeeman basis states differing in exactly one spin.
struct Transition {
  int a = -1;
  int b = -1;
};

struct PulseEvent {
  EventKind kind = EventKind::delay;
  int spin = -1;             // rf_pulse target
  Transition transition;     // transition_pulse target
  double angle_deg = 0.0;
  double phase_deg = 0.0;    // axis in the xy-plane, 0 = x, 90 = y
  double duration_s = 0.0;
};

struct PulseSequence {
  std::vector<PulseEvent> events;
  double total_duration() const;
};

enum class GradientPolicy {
  crush_all,             // zero every off-diagonal element
  preserve_zero_quantum  // zero only elements of nonzero total coherence order
};

struct SequenceOptions {
  bool noise_on = false;
  double flip_angle_error = 0.0;  // fractional, every angle becomes angle*(1+e)
  GradientPolicy gradient_policy = GradientPolicy::crush_all;
};

/// Ideal selective rotation on one spin:
/// U = exp(-i * angle * (cos(phase) Ix + sin(phase) Iy)) embedded in 8x8.
Matrix rf_unitary(int spin, double angle_deg, double phase_deg);
Matrix apply_rf(const Matrix& rho, int spin, double angle_deg, double phase_deg,
                const SpinSystem& sys);

/// Rotation confined to the 2x2 subspace of a single-spin-flip transition,
/// identity elsewhere. Throws if the pair differs in more than one spin.
Matrix transition_unitary(const Transition& t, double angle_deg, double phase_deg);
Matrix apply_transition_pulse(const Matrix& rho, const Transition& t,
                              double angle_deg, double phase_deg);

/// rho -> exp(-iHt) rho exp(+iHt) with the weak-coupling Hamiltonian.
/// Populations are unchanged (H is diagonal).
Matrix free_evolution(const Matrix& rho, double t_s, const SpinSystem& sys);

/// Field-gradient crusher. Idempotent; the diagonal part is untouched.
Matrix gradient_crush(const Matrix& rho,
                      GradientPolicy policy = GradientPolicy::crush_all);

/// Relaxation channel, diagonal in the product-operator basis: transverse
/// factors decay with exp(-t/T2_i) per participating spin (multiplied for
/// multi-spin coherences), longitudinal deviation factors with exp(-t/T1_i).
/// The identity component, hence the trace, is preserved.
Matrix relax(const Matrix& rho, double t_s, const SpinSystem& sys);

/// Fold the events left to right; with options.noise_on, relax(duration)
/// follows every event. Pulses are instantaneous rotations whose durations
/// matter only for relaxation; delays evolve under the Hamiltonian.
Matrix run_sequence(const Matrix& rho, const PulseSequence& seq,
                    const SpinSystem& sys, const SequenceOptions& options = {});

/// Controlled-swap block as transition-selective pi rotations within the
/// control-on manifold: pi_x(101,111), pi_{-x}(110,111), pi_x(101,111).
/// The composition equals the controlled-swap up to a -1 phase on |111>,
/// which cancels from the diagonal readout whenever either input state is
/// |0>. With phase_corrected, two additional pi pulses on (011,111) make the
/// network readout exact for arbitrary input pairs.
PulseSequence fredkin_sequence(double tp_duration_s = 0.02,
                               bool phase_corrected = false);

/// Unitary composition of the sequence's pulses (flip-angle error optional).
/// Throws if the sequence contains delays or gradients.
Matrix sequence_unitary(const PulseSequence& seq, double flip_angle_error = 0.0);

/// One event per line: `kind target angle_deg phase_deg duration_s`, where
/// target is a spin index, `a:b` for transitions, or `-`.
std::string to_text(const PulseSequence& seq);
PulseSequence sequence_from_text(const std::string& text);

}  // namespace nmrsim
