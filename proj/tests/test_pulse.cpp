#include <doctest.h>

#include <string>
#include <cmath>
#include <numbers>

#include "nmrsim/circuit.hpp"
#include "nmrsim/pulse.hpp"
#include "test_helpers.hpp"

using namespace nmrsim;
using nmrsim::testing::random_hermitian;

namespace {

std::mt19937_64& rng() {
  static std::mt19937_64 gen(555);
  return gen;
}

SpinSystem quiet_system() {
  SpinSystem sys;
  sys.offsets_hz = {0, 0, 0};
  sys.j_hz = {{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}};
  return sys;
}

Matrix register_op(const char* which) {
  // labels in base 4 over (spin0, spin1, spin2)
  if (std::string(which) == "Ix1") return 0.5 * pauli_string(3, 1 << 4);
  if (std::string(which) == "Iy1") return 0.5 * pauli_string(3, 2 << 4);
  if (std::string(which) == "Iz1") return 0.5 * pauli_string(3, 3 << 4);
  throw std::logic_error("unknown operator");
}

double coefficient(const Matrix& rho, const std::string& label) {
  const auto d = decompose_register(rho);
  return d.coefficients.at(label).real();
}

// Population-difference readout of the pulse-level network on a pure
// product input |0, psi1, psi2>.
double network_population_readout(const QubitState& p1, const QubitState& p2,
                                  bool phase_corrected) {
  Vector zero(2);
  zero << 1, 0;
  Vector in = kron(kron(Matrix(zero), Matrix(make_state(p1))), Matrix(make_state(p2))).col(0);
  Matrix rho = in * in.adjoint();
  const SpinSystem sys = quiet_system();

  PulseSequence seq;
  PulseEvent h1;
  h1.kind = EventKind::rf_pulse;
  h1.spin = 0;
  h1.angle_deg = 90;
  h1.phase_deg = 90;
  seq.events.push_back(h1);
  const PulseSequence fredkin = fredkin_sequence(0.0, phase_corrected);
  seq.events.insert(seq.events.end(), fredkin.events.begin(), fredkin.events.end());
  PulseEvent h2 = h1;
  h2.phase_deg = 270;
  seq.events.push_back(h2);

  rho = run_sequence(rho, seq, sys);
  const Matrix reduced = partial_trace(rho, {2, 2, 2}, {0});
  return (reduced(0, 0) - reduced(1, 1)).real();
}

}  // namespace

TEST_CASE("apply_rf implements the product-operator rotation rules") {
  const SpinSystem sys = quiet_system();
  SUBCASE("R_y(90) turns Iz1 into Ix1") {
    const Matrix out = apply_rf(register_op("Iz1"), 0, 90, 90, sys);
    CHECK(coefficient(out, "Ix1") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(coefficient(out, "Iz1")) < 1e-12);
  }
  SUBCASE("zero angle is the identity") {
    std::mt19937_64 gen(1);
    const Matrix rho = random_hermitian(gen, 8);
    CHECK(max_abs_diff(apply_rf(rho, 1, 0, 123, sys), rho) < 1e-14);
  }
  SUBCASE("R_y(90) followed by R_{-y}(90) is the identity") {
    std::mt19937_64 gen(2);
    const Matrix rho = random_hermitian(gen, 8);
    const Matrix out = apply_rf(apply_rf(rho, 0, 90, 90, sys), 0, 90, 270, sys);
    CHECK(max_abs_diff(out, rho) < 1e-12);
  }
  SUBCASE("trace is preserved") {
    std::mt19937_64 gen(3);
    const Matrix rho = random_hermitian(gen, 8);
    const Matrix out = apply_rf(rho, 2, 37, 211, sys);
    CHECK(std::abs(out.trace() - rho.trace()) < 1e-12);
  }
  SUBCASE("bad spin index") {
    CHECK_THROWS_AS(apply_rf(identity(8), 3, 90, 0, sys), std::invalid_argument);
  }
}

TEST_CASE("rf and transition unitaries are unitary for arbitrary parameters") {
  std::uniform_real_distribution<double> angle(-360, 360);
  for (int trial = 0; trial < 100; ++trial) {
    CHECK(check_unitary(rf_unitary(trial % 3, angle(rng()), angle(rng())), 1e-12));
    CHECK(check_unitary(transition_unitary({5, 7}, angle(rng()), angle(rng())), 1e-12));
  }
}

TEST_CASE("transition pulses act only inside the selected two-level subspace") {
  SUBCASE("zero angle is the identity") {
    CHECK(approx_equal(transition_unitary({5, 7}, 0, 0), identity(8)));
  }
  SUBCASE("a pi pulse twice restores populations with a -1 phase on the pair") {
    const Matrix u = transition_unitary({5, 7}, 180, 0);
    Matrix expected = identity(8);
    expected(5, 5) = -1;
    expected(7, 7) = -1;
    CHECK(approx_equal(Matrix(u * u), expected, 1e-12));
  }
  SUBCASE("states outside the pair are untouched") {
    const Matrix u = transition_unitary({5, 7}, 180, 30);
    for (int s = 0; s < 8; ++s) {
      if (s == 5 || s == 7) continue;
      Vector basis = Vector::Zero(8);
      basis(s) = 1;
      CHECK((u * basis - basis).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
  SUBCASE("pairs differing in two spins are rejected") {
    CHECK_THROWS_AS(transition_unitary({5, 6}, 180, 0), std::invalid_argument);
    CHECK_THROWS_AS(apply_transition_pulse(identity(8), {0, 7}, 90, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(transition_unitary({2, 2}, 90, 0), std::invalid_argument);
  }
}

TEST_CASE("fredkin_sequence composes to the controlled swap up to phases") {
  const Matrix composed = sequence_unitary(fredkin_sequence());
  CHECK(check_unitary(composed, 1e-12));

  SUBCASE("populations permute exactly like the controlled swap") {
    const Matrix target = fredkin_unitary();
    CHECK(max_abs_diff(composed.cwiseAbs(), target.cwiseAbs()) < 1e-12);
  }
  SUBCASE("the residual phase sits on |111> alone") {
    Matrix d = identity(8);
    d(7, 7) = -1;
    CHECK(approx_equal(composed, Matrix(fredkin_unitary() * d), 1e-12));
  }
  SUBCASE("control off leaves populations alone, control on swaps them") {
    Matrix rho001 = Matrix::Zero(8, 8);
    rho001(1, 1) = 1;
    CHECK(max_abs_diff(Matrix(composed * rho001 * composed.adjoint()), rho001) < 1e-12);

    Matrix rho101 = Matrix::Zero(8, 8), rho110 = Matrix::Zero(8, 8);
    rho101(5, 5) = 1;
    rho110(6, 6) = 1;
    CHECK(max_abs_diff(Matrix(composed * rho101 * composed.adjoint()), rho110) < 1e-12);
    Matrix rho100 = Matrix::Zero(8, 8);
    rho100(4, 4) = 1;
    CHECK(max_abs_diff(Matrix(composed * rho100 * composed.adjoint()), rho100) < 1e-12);
  }
}

TEST_CASE("phase-corrected Fredkin sequence carries matched +i phases") {
  const Matrix composed = sequence_unitary(fredkin_sequence(0.0, true));
  Matrix d = identity(8);
  d(3, 3) = Complex(0, 1);
  d(7, 7) = Complex(0, 1);
  CHECK(approx_equal(composed, Matrix(fredkin_unitary() * d), 1e-12));
}

TEST_CASE("pulse-level network readout at the reported operating points") {
  // (theta=90, phi=0) against |0>: F = 1/2
  CHECK(network_population_readout({90, 0}, {0, 0}, false) ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(network_population_readout({0, 0}, {0, 0}, false) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(network_population_readout({180, 0}, {0, 0}, false) ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("three-pulse Fredkin deviates by exactly -2 sin^2 sin^2 on general pairs") {
  // The |111> phase shifts the readout by -2 sin^2(t1/2) sin^2(t2/2); the
  // two reported sweeps (either state |0>) are unaffected.
  std::uniform_real_distribution<double> theta(0.0, 180.0);
  std::uniform_real_distribution<double> phi(0.0, 359.0);
  for (int trial = 0; trial < 50; ++trial) {
    const QubitState p1{theta(rng()), phi(rng())};
    const QubitState p2{theta(rng()), phi(rng())};
    const double f = fidelity_exact(p1, p2);
    const double s1 = std::sin(0.5 * p1.theta_deg * std::numbers::pi / 180.0);
    const double s2 = std::sin(0.5 * p2.theta_deg * std::numbers::pi / 180.0);
    const double expected = f - 2.0 * s1 * s1 * s2 * s2;
    CHECK(network_population_readout(p1, p2, false) ==
          doctest::Approx(expected).epsilon(1e-9));
    CHECK(network_population_readout(p1, p2, true) ==
          doctest::Approx(f).epsilon(1e-9));
  }
}

TEST_CASE("pulse network matches the exact circuit on 10000 random pairs") {
  // The phase-corrected gate makes the population readout exact for
  // arbitrary pairs; the stock three-pulse gate is exact whenever either
  // state is |0> (the two reported sweep families).
  std::uniform_real_distribution<double> theta(0.0, 180.0);
  std::uniform_real_distribution<double> phi(0.0, 359.0);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const QubitState p1{theta(rng()), phi(rng())};
    const QubitState p2{theta(rng()), phi(rng())};
    const double readout = network_population_readout(p1, p2, true);
    worst = std::max(worst, std::abs(readout - fidelity_exact(p1, p2)));
  }
  CHECK(worst <= 1e-6);

  double worst_sweeps = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const QubitState varied{theta(rng()), phi(rng())};
    const QubitState zero{0, 0};
    worst_sweeps = std::max(
        worst_sweeps, std::abs(network_population_readout(varied, zero, false) -
                               fidelity_exact(varied, zero)));
    worst_sweeps = std::max(
        worst_sweeps, std::abs(network_population_readout(zero, varied, false) -
                               fidelity_exact(zero, varied)));
  }
  CHECK(worst_sweeps <= 1e-9);
}

TEST_CASE("free_evolution leaves populations alone and precesses coherences") {
  SpinSystem sys = quiet_system();
  sys.offsets_hz[0] = 25.0;
  SUBCASE("t = 0 is the identity") {
    std::mt19937_64 gen(4);
    const Matrix rho = random_hermitian(gen, 8);
    CHECK(max_abs_diff(free_evolution(rho, 0, sys), rho) == 0.0);
  }
  SUBCASE("a diagonal state never moves") {
    Matrix rho = Matrix::Zero(8, 8);
    for (int s = 0; s < 8; ++s) rho(s, s) = 0.1 * (s + 1);
    CHECK(max_abs_diff(free_evolution(rho, 0.123, sys), rho) < 1e-14);
  }
  SUBCASE("Ix1 precesses into Iy1 at the offset frequency") {
    const double t = 0.004;
    const Matrix out = free_evolution(register_op("Ix1"), t, sys);
    const double angle = 2 * std::numbers::pi * 25.0 * t;
    CHECK(coefficient(out, "Ix1") == doctest::Approx(std::cos(angle)).epsilon(1e-12));
    CHECK(coefficient(out, "Iy1") == doctest::Approx(std::sin(angle)).epsilon(1e-12));
  }
  SUBCASE("negative time is rejected") {
    CHECK_THROWS_AS(free_evolution(identity(8), -1e-9, sys), std::invalid_argument);
  }
}

TEST_CASE("gradient_crush") {
  std::mt19937_64 gen(5);
  const Matrix rho = random_hermitian(gen, 8);
  const Matrix crushed = gradient_crush(rho);
  SUBCASE("diagonal part is unchanged, off-diagonals vanish") {
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) {
        if (a == b) CHECK(crushed(a, a) == rho(a, a));
        else CHECK(std::abs(crushed(a, b)) == 0.0);
      }
  }
  SUBCASE("idempotent") {
    CHECK(max_abs_diff(gradient_crush(crushed), crushed) == 0.0);
  }
  SUBCASE("a diagonal state is a fixed point") {
    Matrix diag = Matrix::Zero(8, 8);
    for (int s = 0; s < 8; ++s) diag(s, s) = s;
    CHECK(max_abs_diff(gradient_crush(diag), diag) == 0.0);
  }
  SUBCASE("zero-quantum policy keeps equal-coherence-order elements") {
    const Matrix kept = gradient_crush(rho, GradientPolicy::preserve_zero_quantum);
    CHECK(kept(1, 2) == rho(1, 2));  // |001><010| is zero quantum
    CHECK(std::abs(kept(0, 1)) == 0.0);
    CHECK(max_abs_diff(gradient_crush(kept, GradientPolicy::preserve_zero_quantum),
                       kept) == 0.0);
  }
}

TEST_CASE("relax damps product-operator coefficients with the right constants") {
  SpinSystem sys;
  SUBCASE("t = 0 is the identity") {
    std::mt19937_64 gen(6);
    const Matrix rho = random_hermitian(gen, 8);
    CHECK(max_abs_diff(relax(rho, 0, sys), rho) == 0.0);
  }
  SUBCASE("a transverse term held for T2 loses a factor e") {
    const Matrix out = relax(register_op("Ix1"), sys.t2_s[0], sys);
    CHECK(coefficient(out, "Ix1") == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  }
  SUBCASE("0.3 s against T2 = 0.893 s attenuates by about 0.715") {
    const Matrix out = relax(register_op("Ix1"), 0.3, sys);
    const double factor = coefficient(out, "Ix1");
    CHECK(factor == doctest::Approx(std::exp(-0.3 / 0.893)).epsilon(1e-12));
    CHECK(factor == doctest::Approx(0.715).epsilon(2e-3));
  }
  SUBCASE("multi-spin coherences damp multiplicatively") {
    SpinSystem uneven = sys;
    uneven.t2_s = {0.5, 0.25, 0.8};
    // 2 Ix1 Iy2 via the basis table
    const Matrix two_spin = 0.5 * pauli_string(3, (1 << 4) | (2 << 2));
    const double t = 0.1;
    const Matrix out = relax(two_spin, t, uneven);
    const auto d = decompose_register(out);
    CHECK(d.coefficients.at("2Ix1Iy2").real() ==
          doctest::Approx(std::exp(-t / 0.5) * std::exp(-t / 0.25)).epsilon(1e-12));
  }
  SUBCASE("longitudinal deviation decays toward zero with T1") {
    const Matrix out = relax(register_op("Iz1"), 2.0, sys);
    CHECK(coefficient(out, "Iz1") ==
          doctest::Approx(std::exp(-2.0 / sys.t1_s[0])).epsilon(1e-12));
  }
  SUBCASE("trace is preserved and the deviation norm contracts") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix rho = random_hermitian(gen, 8);
      const Matrix out = relax(rho, 0.05 * (trial + 1), sys);
      CHECK(std::abs(out.trace() - rho.trace()) < 1e-12);
      const Matrix dev_in = rho - (rho.trace() / 8.0) * identity(8);
      const Matrix dev_out = out - (out.trace() / 8.0) * identity(8);
      CHECK(dev_out.norm() <= dev_in.norm() + 1e-12);
    }
  }
  SUBCASE("relax commutes with gradient_crush") {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix rho = random_hermitian(gen, 8);
      const double t = 0.02 * (trial + 1);
      const Matrix a = gradient_crush(relax(rho, t, sys));
      const Matrix b = relax(gradient_crush(rho), t, sys);
      CHECK(max_abs_diff(a, b) < 1e-12);
    }
  }
  SUBCASE("negative time is rejected") {
    CHECK_THROWS_AS(relax(identity(8), -0.1, sys), std::invalid_argument);
  }
}

TEST_CASE("run_sequence folds events and keeps the state physical") {
  SpinSystem sys;
  std::mt19937_64 gen(9);
  SUBCASE("empty sequence returns the input") {
    const Matrix rho = random_hermitian(gen, 8);
    CHECK(max_abs_diff(run_sequence(rho, PulseSequence{}, sys), rho) == 0.0);
  }
  SUBCASE("trace and Hermiticity survive a noisy mixed sequence") {
    PulseSequence seq;
    PulseEvent rf;
    rf.kind = EventKind::rf_pulse;
    rf.spin = 0;
    rf.angle_deg = 90;
    rf.phase_deg = 90;
    rf.duration_s = 0.005;
    seq.events.push_back(rf);
    PulseEvent tp;
    tp.kind = EventKind::transition_pulse;
    tp.transition = {5, 7};
    tp.angle_deg = 180;
    tp.duration_s = 0.02;
    seq.events.push_back(tp);
    PulseEvent delay;
    delay.kind = EventKind::delay;
    delay.duration_s = 0.05;
    seq.events.push_back(delay);
    PulseEvent grad;
    grad.kind = EventKind::gradient;
    grad.duration_s = 0.001;
    seq.events.push_back(grad);

    SequenceOptions options;
    options.noise_on = true;
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix rho = random_hermitian(gen, 8);
      const Matrix out = run_sequence(rho, seq, sys, options);
      CHECK(std::abs(out.trace() - rho.trace()) < 1e-10);
      CHECK(is_hermitian(out, 1e-10));
    }
  }
  SUBCASE("flip-angle error scales every pulse angle") {
    Matrix rho = Matrix::Zero(8, 8);
    rho(0, 0) = 1;
    PulseSequence seq;
    PulseEvent rf;
    rf.kind = EventKind::rf_pulse;
    rf.spin = 0;
    rf.angle_deg = 180;
    rf.phase_deg = 0;
    seq.events.push_back(rf);
    SequenceOptions options;
    options.flip_angle_error = 0.1;
    const Matrix out = run_sequence(rho, seq, sys, options);
    // 198 deg instead of 180: |0> population cos^2(99 deg)
    const double c = std::cos(99.0 * std::numbers::pi / 180.0);
    CHECK(out(0, 0).real() == doctest::Approx(c * c).epsilon(1e-12));
  }
}

TEST_CASE("pulse sequences round-trip through the text format") {
  PulseSequence seq;
  PulseEvent rf;
  rf.kind = EventKind::rf_pulse;
  rf.spin = 1;
  rf.angle_deg = 45.5;
  rf.phase_deg = 271.25;
  rf.duration_s = 0.0052;
  seq.events.push_back(rf);
  PulseEvent tp;
  tp.kind = EventKind::transition_pulse;
  tp.transition = {6, 7};
  tp.angle_deg = 180;
  tp.phase_deg = 180;
  tp.duration_s = 0.02;
  seq.events.push_back(tp);
  PulseEvent delay;
  delay.kind = EventKind::delay;
  delay.duration_s = 0.214;
  seq.events.push_back(delay);
  PulseEvent grad;
  grad.kind = EventKind::gradient;
  grad.duration_s = 0.001;
  seq.events.push_back(grad);

  const PulseSequence back = sequence_from_text(to_text(seq));
  REQUIRE(back.events.size() == seq.events.size());
  for (size_t i = 0; i < seq.events.size(); ++i) {
    CHECK(back.events[i].kind == seq.events[i].kind);
    CHECK(back.events[i].spin == seq.events[i].spin);
    CHECK(back.events[i].transition.a == seq.events[i].transition.a);
    CHECK(back.events[i].transition.b == seq.events[i].transition.b);
    CHECK(back.events[i].angle_deg == seq.events[i].angle_deg);
    CHECK(back.events[i].phase_deg == seq.events[i].phase_deg);
    CHECK(back.events[i].duration_s == seq.events[i].duration_s);
  }
  CHECK(back.total_duration() == doctest::Approx(seq.total_duration()).epsilon(1e-12));

  SUBCASE("line format is the documented five-field layout") {
    const PulseSequence one = sequence_from_text("rf_pulse 0 90 90 0.005\n");
    REQUIRE(one.events.size() == 1);
    CHECK(one.events[0].kind == EventKind::rf_pulse);
    CHECK(one.events[0].spin == 0);
    CHECK(one.events[0].angle_deg == 90);
  }
  SUBCASE("malformed lines are rejected") {
    CHECK_THROWS_AS(sequence_from_text("rf_pulse 0 90\n"), std::invalid_argument);
    CHECK_THROWS_AS(sequence_from_text("warp 0 90 90 0.1\n"), std::invalid_argument);
    CHECK_THROWS_AS(sequence_from_text("transition_pulse 57 180 0 0.1\n"),
                    std::invalid_argument);
  }
}
