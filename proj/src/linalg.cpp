#include "nmrsim/linalg.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace nmrsim {

Matrix identity(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix partial_trace(const Matrix& rho, const std::vector<int>& dims,
                     const std::vector<int>& keep) {
  if (rho.rows() != rho.cols())
    throw std::invalid_argument("partial_trace: input must be square, got " +
                                std::to_string(rho.rows()) + "x" +
                                std::to_string(rho.cols()));
  const long prod = std::accumulate(dims.begin(), dims.end(), 1L,
                                    std::multiplies<long>());
  if (prod != rho.rows())
    throw std::invalid_argument(
        "partial_trace: dimension mismatch, product of dims is " +
        std::to_string(prod) + " but matrix dimension is " +
        std::to_string(rho.rows()));
  if (keep.empty())
    throw std::invalid_argument("partial_trace: keep set must be non-empty");

  const int n = static_cast<int>(dims.size());
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n)
      throw std::invalid_argument("partial_trace: keep index " +
                                  std::to_string(k) + " out of range for " +
                                  std::to_string(n) + " subsystems");
    kept[k] = true;
  }

  long out_dim = 1;
  for (int k = 0; k < n; ++k)
    if (kept[k]) out_dim *= dims[k];

  // Strides of each subsystem index in the flat basis ordering.
  std::vector<long> stride(n, 1);
  for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];
  std::vector<long> kept_stride(n, 0);
  long acc = 1;
  for (int k = n - 1; k >= 0; --k) {
    if (kept[k]) {
      kept_stride[k] = acc;
      acc *= dims[k];
    }
  }

  Matrix out = Matrix::Zero(out_dim, out_dim);
  std::vector<int> ridx(n, 0), cidx(n, 0);
  for (long r = 0; r < rho.rows(); ++r) {
    for (int k = 0; k < n; ++k) ridx[k] = static_cast<int>(r / stride[k]) % dims[k];
    for (long c = 0; c < rho.cols(); ++c) {
      bool diag_on_traced = true;
      for (int k = 0; k < n && diag_on_traced; ++k) {
        cidx[k] = static_cast<int>(c / stride[k]) % dims[k];
        if (!kept[k] && cidx[k] != ridx[k]) diag_on_traced = false;
      }
      if (!diag_on_traced) continue;
      long ro = 0, co = 0;
      for (int k = 0; k < n; ++k) {
        if (kept[k]) {
          cidx[k] = static_cast<int>(c / stride[k]) % dims[k];
          ro += ridx[k] * kept_stride[k];
          co += cidx[k] * kept_stride[k];
        }
      }
      out(ro, co) += rho(r, c);
    }
  }
  return out;
}

Complex expectation(const Matrix& obs, const Matrix& rho) {
  if (obs.rows() != obs.cols() || rho.rows() != rho.cols() ||
      obs.rows() != rho.rows())
    throw std::invalid_argument(
        "expectation: dimension mismatch, obs is " + std::to_string(obs.rows()) +
        "x" + std::to_string(obs.cols()) + ", rho is " +
        std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()));
  return (obs * rho).trace();
}

bool check_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) throw std::invalid_argument("check_unitary: input must be square");
  Matrix d = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff() <= tol;
}

bool approx_equal(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return max_abs_diff(a, b) <= tol;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs_diff(m, Matrix(m.adjoint())) <= tol;
}

}  // namespace nmrsim
