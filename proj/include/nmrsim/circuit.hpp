#pragma once

#include "nmrsim/linalg.hpp"

namespace nmrsim {

// Single-qubit pure state parameterized by polar/azimuthal angles in degrees.
// Amplitude convention: (cos(theta/2), -e^{i phi} sin(theta/2)).
struct QubitState {
  double theta_deg = 0.0;  // [0, 180]
  double phi_deg = 0.0;    // [0, 360)
};

/// Amplitude 2-vector for the given angles. Throws on out-of-range input.
Eigen::Vector2cd make_state(double theta_deg, double phi_deg);
Eigen::Vector2cd make_state(const QubitState& q);

/// |<a|b>|^2 for unit vectors.
double fidelity_exact(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b);
double fidelity_exact(const QubitState& a, const QubitState& b);

Matrix hadamard();                  // |b> -> (|0> + (-1)^b |1>)/sqrt2
Matrix pseudo_hadamard();           // R_y(90)
Matrix pseudo_hadamard_inverse();   // R_{-y}(90)

/// 8x8 controlled-swap: exchanges qubits 2,3 iff qubit 1 is |1>.
Matrix fredkin_unitary();

enum class HadamardKind { exact, pseudo };

struct CircuitResult {
  Vector final_state;       // 8 amplitudes, qubit 1 = most significant
  Matrix reduced_q1;        // 2x2, diagonal with entries (1±F)/2
  double fidelity_circuit;  // reduced_q1(0,0) - reduced_q1(1,1)
};

/// Exact execution of the three-qubit overlap network
/// (H ⊗ I)(controlled-swap)(H ⊗ I) on |0>|psi1>|psi2>.
/// With HadamardKind::pseudo the two Hadamards are replaced by
/// R_y(90)/R_{-y}(90); the reduced diagonal is unchanged.
CircuitResult run_network(const QubitState& psi1, const QubitState& psi2,
                          HadamardKind kind = HadamardKind::exact);

}  // namespace nmrsim
