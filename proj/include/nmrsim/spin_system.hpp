#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "nmrsim/linalg.hpp"

namespace nmrsim {

inline constexpr int kNumSpins = 3;
inline constexpr int kRegisterDim = 8;

// Three-spin register: rotating-frame offsets, scalar couplings, relaxation
// constants and the thermal polarization weights of the deviation state.
// Spin 0 is the assistant (detected) spin.
struct SpinSystem {
  std::array<double, 3> offsets_hz{0.0, 15000.0, -4000.0};
  std::array<std::array<double, 3>, 3> j_hz{{{0.0, 35.0, 1.3},
                                             {35.0, 0.0, 35.0},
                                             {1.3, 35.0, 0.0}}};
  std::array<double, 3> t1_s{5.0, 5.0, 5.0};
  std::array<double, 3> t2_s{0.893, 0.893, 0.893};
  std::array<double, 3> thermal_weights{1.0, 1.0, 1.0};

  /// Throws std::invalid_argument on asymmetric J, nonzero J diagonal,
  /// non-positive T2 or T1 < T2.
  void validate() const;
};

/// Weak-coupling rotating-frame Hamiltonian in rad/s, diagonal in the Zeeman
/// basis: H = sum_i 2pi*offset_i*Iz_i + sum_{i<j} 2pi*J_ij*Iz_i*Iz_j.
Matrix hamiltonian(const SpinSystem& sys);

/// Diagonal of hamiltonian(sys) as a real vector (it is always diagonal here).
std::array<double, kRegisterDim> hamiltonian_diagonal(const SpinSystem& sys);

// --- product-operator basis -------------------------------------------------

// Pauli-string labels are base-4 integers, one digit per spin (spin 0 most
// significant): 0 = E, 1 = x, 2 = y, 3 = z.
const Matrix& pauli_string(int n_spins, int label);

/// Coefficients c_L with rho = sum_L c_L * P_L, c_L = Tr(P_L rho) / 2^n.
std::vector<Complex> pauli_coefficients(const Matrix& rho);
Matrix from_pauli_coefficients(const std::vector<Complex>& coeffs);

struct ProductOperatorDecomposition {
  int n_spins = 1;
  // Keyed by product-operator label ("E", "Iz1", "2Ix1Iz2", "4Ix1Iy2Iz3", ...).
  // Basis normalization is 2^{q-1} times the product of the I_a = sigma_a/2
  // factors, q being the number of non-identity factors; "E" is the full
  // identity with coefficient Tr(rho)/2^n.
  std::map<std::string, Complex> coefficients;
};

/// Single-qubit decomposition rho = c_z Iz + c_x Ix + c_y Iy + c_E E with
/// c_z = rho00 - rho11, c_x = rho01 + rho10, c_y = i(rho01 - rho10),
/// c_E = (rho00 + rho11)/2. Throws if the input is not Hermitian within tol.
ProductOperatorDecomposition decompose_single_qubit(const Matrix& rho_q1,
                                                    double tol = 1e-9);

/// Full register decomposition for 1-3 spins.
ProductOperatorDecomposition decompose_register(const Matrix& rho);

/// Rebuild the matrix from labeled coefficients; inverse of the above.
Matrix recompose(const ProductOperatorDecomposition& decomp);

// --- pseudo-pure preparation -------------------------------------------------

// Deviation density matrix plus the signal-scale factor relating it to the
// pure-state projector it stands in for.
struct DeviationState {
  Matrix matrix;
  double scale = 1.0;
};

/// Thermal deviation state sum_i w_i * Iz_i.
Matrix thermal_deviation(const SpinSystem& sys);

struct PseudoPurePreparation {
  std::array<DeviationState, 3> experiments;  // each a population permutation
                                              // of the thermal deviation state
  DeviationState sum;  // scale * |000><000| + offset * I
  double identity_offset = 0.0;
};

/// Temporal averaging: three diagonal permutation unitaries applied to the
/// thermal deviation state whose sum is exactly scale*|000><000| + offset*I.
/// Requires equal thermal weights; throws otherwise (no exact three-experiment
/// permutation scheme exists for unequal weights).
PseudoPurePreparation pseudo_pure_000(const SpinSystem& sys);

/// Parse a plain-text key/value description (keys offsets_hz, j_hz_row1..3,
/// t1_s, t2_s, thermal_weights). Unknown keys are ignored so the spin system
/// can be embedded in a larger config file.
SpinSystem spin_system_from_text(const std::string& text);
SpinSystem load_spin_system(const std::string& path);

}  // namespace nmrsim
