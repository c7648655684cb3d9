#include "nmrsim/circuit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nmrsim {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

Eigen::Vector2cd make_state(double theta_deg, double phi_deg) {
  if (!(theta_deg >= 0.0 && theta_deg <= 180.0))
    throw std::invalid_argument("make_state: theta " + std::to_string(theta_deg) +
                                " outside [0, 180]");
  if (!(phi_deg >= 0.0 && phi_deg < 360.0))
    throw std::invalid_argument("make_state: phi " + std::to_string(phi_deg) +
                                " outside [0, 360)");
  const double half = 0.5 * theta_deg * kDegToRad;
  const double phi = phi_deg * kDegToRad;
  Eigen::Vector2cd v;
  v << Complex(std::cos(half), 0.0),
      -std::exp(Complex(0.0, phi)) * std::sin(half);
  return v;
}

Eigen::Vector2cd make_state(const QubitState& q) {
  return make_state(q.theta_deg, q.phi_deg);
}

double fidelity_exact(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
  return std::norm(a.dot(b));  // Eigen's dot conjugates the left argument
}

double fidelity_exact(const QubitState& a, const QubitState& b) {
  return fidelity_exact(make_state(a), make_state(b));
}

Matrix hadamard() {
  Matrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

Matrix pseudo_hadamard() {
  Matrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, -s, s, s;
  return h;
}

Matrix pseudo_hadamard_inverse() {
  Matrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, -s, s;
  return h;
}

Matrix fredkin_unitary() {
  Matrix g = Matrix::Identity(8, 8);
  // |101> <-> |110>
  g(5, 5) = 0;
  g(6, 6) = 0;
  g(5, 6) = 1;
  g(6, 5) = 1;
  return g;
}

CircuitResult run_network(const QubitState& psi1, const QubitState& psi2,
                          HadamardKind kind) {
  const Eigen::Vector2cd a1 = make_state(psi1);
  const Eigen::Vector2cd a2 = make_state(psi2);

  Vector zero(2);
  zero << 1, 0;
  Vector in = kron(kron(Matrix(zero), Matrix(a1)), Matrix(a2)).col(0);

  const Matrix h_in = (kind == HadamardKind::exact) ? hadamard() : pseudo_hadamard();
  const Matrix h_out =
      (kind == HadamardKind::exact) ? hadamard() : pseudo_hadamard_inverse();
  const Matrix i4 = identity(4);

  Vector state = kron(h_in, i4) * in;
  state = fredkin_unitary() * state;
  state = kron(h_out, i4) * state;

  const Matrix rho = state * state.adjoint();
  const Matrix reduced = partial_trace(rho, {2, 2, 2}, {0});

  CircuitResult result;
  result.final_state = state;
  result.reduced_q1 = reduced;
  result.fidelity_circuit = (reduced(0, 0) - reduced(1, 1)).real();
  return result;
}

}  // namespace nmrsim
