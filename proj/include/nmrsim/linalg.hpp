#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace nmrsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Absolute entrywise tolerance used by default in equality comparisons.
inline constexpr double kDefaultTol = 1e-12;

Matrix identity(Eigen::Index dim);
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

/// Kronecker product: (a ⊗ b)[i*p+k, j*q+l] = a[i,j] * b[k,l] for b of size p×q.
Matrix kron(const Matrix& a, const Matrix& b);

/// Trace out the subsystems not listed in `keep` from a state on ⊗_i C^{dims[i]}.
/// Kept subsystems stay in their original order. The trace and Hermiticity of
/// the input carry over to the output.
Matrix partial_trace(const Matrix& rho, const std::vector<int>& dims,
                     const std::vector<int>& keep);

/// Tr(obs * rho). Real to ~1e-12 when both arguments are Hermitian.
Complex expectation(const Matrix& obs, const Matrix& rho);

/// True iff max entry of |u†u - I| is at most tol.
bool check_unitary(const Matrix& u, double tol = kDefaultTol);

bool approx_equal(const Matrix& a, const Matrix& b, double tol = kDefaultTol);
double max_abs_diff(const Matrix& a, const Matrix& b);
bool is_hermitian(const Matrix& m, double tol = kDefaultTol);

}  // namespace nmrsim
