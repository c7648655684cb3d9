#include "nmrsim/spin_system.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace nmrsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// m = +1/2 for |0>, -1/2 for |1>; spin 0 is the most significant bit.
double spin_m(int state, int spin) {
  return ((state >> (kNumSpins - 1 - spin)) & 1) ? -0.5 : 0.5;
}

std::vector<double> parse_numbers(const std::string& text) {
  std::string cleaned = text;
  for (char& c : cleaned)
    if (c == ',' || c == ';') c = ' ';
  std::istringstream in(cleaned);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  return out;
}

std::array<double, 3> require3(const std::vector<double>& v, const std::string& key) {
  if (v.size() != 3)
    throw std::invalid_argument("spin system config: key '" + key + "' needs 3 values, got " +
                                std::to_string(v.size()));
  return {v[0], v[1], v[2]};
}

}  // namespace

void SpinSystem::validate() const {
  for (int i = 0; i < kNumSpins; ++i) {
    if (std::abs(j_hz[i][i]) > 0.0)
      throw std::invalid_argument("SpinSystem: J diagonal must be zero (spin " +
                                  std::to_string(i) + ")");
    for (int j = 0; j < kNumSpins; ++j)
      if (j_hz[i][j] != j_hz[j][i])
        throw std::invalid_argument("SpinSystem: J matrix must be symmetric");
    if (!(t2_s[i] > 0.0))
      throw std::invalid_argument("SpinSystem: T2 must be positive (spin " +
                                  std::to_string(i) + ")");
    if (t1_s[i] < t2_s[i])
      throw std::invalid_argument("SpinSystem: T1 must be >= T2 (spin " +
                                  std::to_string(i) + ")");
    if (!(thermal_weights[i] > 0.0))
      throw std::invalid_argument("SpinSystem: thermal weights must be positive");
  }
}

std::array<double, kRegisterDim> hamiltonian_diagonal(const SpinSystem& sys) {
  std::array<double, kRegisterDim> diag{};
  for (int s = 0; s < kRegisterDim; ++s) {
    double e = 0.0;
    for (int i = 0; i < kNumSpins; ++i) {
      e += kTwoPi * sys.offsets_hz[i] * spin_m(s, i);
      for (int j = i + 1; j < kNumSpins; ++j)
        e += kTwoPi * sys.j_hz[i][j] * spin_m(s, i) * spin_m(s, j);
    }
    diag[s] = e;
  }
  return diag;
}

Matrix hamiltonian(const SpinSystem& sys) {
  Matrix h = Matrix::Zero(kRegisterDim, kRegisterDim);
  const auto diag = hamiltonian_diagonal(sys);
  for (int s = 0; s < kRegisterDim; ++s) h(s, s) = diag[s];
  return h;
}

// --- product-operator basis -------------------------------------------------

namespace {

Matrix single_pauli(int axis) {
  switch (axis) {
    case 0: return identity(2);
    case 1: return pauli_x();
    case 2: return pauli_y();
    case 3: return pauli_z();
    default: throw std::invalid_argument("pauli axis out of range");
  }
}

std::vector<Matrix> build_strings(int n_spins) {
  const int count = 1 << (2 * n_spins);  // 4^n
  std::vector<Matrix> strings;
  strings.reserve(count);
  for (int label = 0; label < count; ++label) {
    Matrix m = identity(1);
    for (int spin = 0; spin < n_spins; ++spin) {
      const int axis = (label >> (2 * (n_spins - 1 - spin))) & 3;
      m = kron(m, single_pauli(axis));
    }
    strings.push_back(std::move(m));
  }
  return strings;
}

const std::vector<Matrix>& strings_for(int n_spins) {
  static const std::vector<Matrix> one = build_strings(1);
  static const std::vector<Matrix> two = build_strings(2);
  static const std::vector<Matrix> three = build_strings(3);
  switch (n_spins) {
    case 1: return one;
    case 2: return two;
    case 3: return three;
    default: throw std::invalid_argument("pauli_string: supported register sizes are 1-3 spins");
  }
}

int spins_for_dim(Eigen::Index dim) {
  switch (dim) {
    case 2: return 1;
    case 4: return 2;
    case 8: return 3;
    default:
      throw std::invalid_argument("register dimension must be 2, 4 or 8, got " +
                                  std::to_string(dim));
  }
}

std::string po_label(int n_spins, int label) {
  if (label == 0) return "E";
  int q = 0;
  std::string name;
  for (int spin = 0; spin < n_spins; ++spin) {
    const int axis = (label >> (2 * (n_spins - 1 - spin))) & 3;
    if (axis == 0) continue;
    ++q;
    name += 'I';
    name += "exyz"[axis];
    name += static_cast<char>('1' + spin);
  }
  if (q == 2) name = "2" + name;
  if (q == 3) name = "4" + name;
  return name;
}

}  // namespace

const Matrix& pauli_string(int n_spins, int label) {
  const auto& strings = strings_for(n_spins);
  if (label < 0 || label >= static_cast<int>(strings.size()))
    throw std::invalid_argument("pauli_string: label out of range");
  return strings[static_cast<size_t>(label)];
}

std::vector<Complex> pauli_coefficients(const Matrix& rho) {
  const int n = spins_for_dim(rho.rows());
  const auto& strings = strings_for(n);
  const double dim = static_cast<double>(rho.rows());
  std::vector<Complex> coeffs(strings.size());
  for (size_t label = 0; label < strings.size(); ++label)
    coeffs[label] = (strings[label] * rho).trace() / dim;
  return coeffs;
}

Matrix from_pauli_coefficients(const std::vector<Complex>& coeffs) {
  int n = 0;
  switch (coeffs.size()) {
    case 4: n = 1; break;
    case 16: n = 2; break;
    case 64: n = 3; break;
    default: throw std::invalid_argument("coefficient count must be 4^n for n in 1-3");
  }
  const auto& strings = strings_for(n);
  Matrix out = Matrix::Zero(strings[0].rows(), strings[0].cols());
  for (size_t label = 0; label < coeffs.size(); ++label)
    out += coeffs[label] * strings[label];
  return out;
}

ProductOperatorDecomposition decompose_single_qubit(const Matrix& rho_q1, double tol) {
  if (rho_q1.rows() != 2 || rho_q1.cols() != 2)
    throw std::invalid_argument("decompose_single_qubit: expected a 2x2 matrix");
  if (!is_hermitian(rho_q1, tol))
    throw std::invalid_argument("decompose_single_qubit: input is not Hermitian within tolerance");
  ProductOperatorDecomposition d;
  d.n_spins = 1;
  const Complex r00 = rho_q1(0, 0), r01 = rho_q1(0, 1), r10 = rho_q1(1, 0), r11 = rho_q1(1, 1);
  d.coefficients["Iz"] = r00 - r11;
  d.coefficients["Ix"] = r01 + r10;
  d.coefficients["Iy"] = Complex(0, 1) * (r01 - r10);
  d.coefficients["E"] = 0.5 * (r00 + r11);
  return d;
}

ProductOperatorDecomposition decompose_register(const Matrix& rho) {
  const int n = spins_for_dim(rho.rows());
  const auto coeffs = pauli_coefficients(rho);
  ProductOperatorDecomposition d;
  d.n_spins = n;
  for (size_t label = 0; label < coeffs.size(); ++label) {
    // basis op is P_label / 2 for every non-identity label, identity otherwise
    const Complex c = (label == 0) ? coeffs[0] : 2.0 * coeffs[label];
    d.coefficients[po_label(n, static_cast<int>(label))] = c;
  }
  return d;
}

Matrix recompose(const ProductOperatorDecomposition& decomp) {
  const int n = decomp.n_spins;
  if (n == 1 && decomp.coefficients.count("Iz") + decomp.coefficients.count("Ix") +
                    decomp.coefficients.count("Iy") + decomp.coefficients.count("E") ==
                decomp.coefficients.size()) {
    // single-qubit labels without spin index (decompose_single_qubit form)
    Matrix out = Matrix::Zero(2, 2);
    const auto get = [&](const char* key) {
      auto it = decomp.coefficients.find(key);
      return it == decomp.coefficients.end() ? Complex(0) : it->second;
    };
    out += get("Ix") * 0.5 * pauli_x();
    out += get("Iy") * 0.5 * pauli_y();
    out += get("Iz") * 0.5 * pauli_z();
    out += get("E") * identity(2);
    return out;
  }

  const auto& strings = strings_for(n);
  std::map<std::string, int> label_index;
  for (size_t label = 0; label < strings.size(); ++label)
    label_index[po_label(n, static_cast<int>(label))] = static_cast<int>(label);

  Matrix out = Matrix::Zero(strings[0].rows(), strings[0].cols());
  for (const auto& [name, coeff] : decomp.coefficients) {
    auto it = label_index.find(name);
    if (it == label_index.end())
      throw std::invalid_argument("recompose: unknown product-operator label '" + name + "'");
    const int label = it->second;
    const Matrix basis_op = (label == 0) ? Matrix(identity(strings[0].rows()))
                                         : Matrix(0.5 * strings[label]);
    out += coeff * basis_op;
  }
  return out;
}

// --- pseudo-pure preparation -------------------------------------------------

Matrix thermal_deviation(const SpinSystem& sys) {
  Matrix out = Matrix::Zero(kRegisterDim, kRegisterDim);
  for (int spin = 0; spin < kNumSpins; ++spin) {
    const int label = 3 << (2 * (kNumSpins - 1 - spin));  // z on this spin
    out += sys.thermal_weights[spin] * 0.5 * pauli_string(kNumSpins, label);
  }
  return out;
}

PseudoPurePreparation pseudo_pure_000(const SpinSystem& sys) {
  sys.validate();
  const double w = sys.thermal_weights[0];
  for (double wi : sys.thermal_weights)
    if (std::abs(wi - w) > 1e-9 * std::abs(w))
      throw std::invalid_argument(
          "pseudo_pure_000: exact three-experiment temporal averaging requires "
          "equal thermal weights");

  // Population permutations whose sum over the three experiments equals
  // 4w|000><000| - (w/2) I. Found by solving the equal-column-sum assignment
  // for the thermal population multiset (3,1,1,-1,1,-1,-1,-3)*w/2.
  static constexpr std::array<std::array<int, 8>, 3> kPerms = {{
      {0, 3, 7, 1, 2, 4, 5, 6},
      {0, 7, 1, 2, 3, 5, 4, 6},
      {1, 0, 2, 7, 3, 5, 6, 4},
  }};

  const Matrix thermal = thermal_deviation(sys);

  PseudoPurePreparation prep;
  Matrix sum = Matrix::Zero(kRegisterDim, kRegisterDim);
  for (int k = 0; k < 3; ++k) {
    Matrix p = Matrix::Zero(kRegisterDim, kRegisterDim);
    for (int s = 0; s < kRegisterDim; ++s) p(s, kPerms[k][s]) = 1.0;
    Matrix permuted = p * thermal * p.adjoint();
    sum += permuted;
    prep.experiments[k] = DeviationState{std::move(permuted), 1.0};
  }
  prep.sum = DeviationState{sum, 4.0 * w};
  prep.identity_offset = -0.5 * w;
  return prep;
}

SpinSystem spin_system_from_text(const std::string& text) {
  SpinSystem sys;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    const std::string value = line.substr(eq + 1);
    if (key == "offsets_hz") sys.offsets_hz = require3(parse_numbers(value), key);
    else if (key == "t1_s") sys.t1_s = require3(parse_numbers(value), key);
    else if (key == "t2_s") sys.t2_s = require3(parse_numbers(value), key);
    else if (key == "thermal_weights") sys.thermal_weights = require3(parse_numbers(value), key);
    else if (key == "j_hz_row1") sys.j_hz[0] = require3(parse_numbers(value), key);
    else if (key == "j_hz_row2") sys.j_hz[1] = require3(parse_numbers(value), key);
    else if (key == "j_hz_row3") sys.j_hz[2] = require3(parse_numbers(value), key);
    // other keys belong to the run config and are ignored here
  }
  sys.validate();
  return sys;
}

SpinSystem load_spin_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spin system config: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return spin_system_from_text(buffer.str());
}

}  // namespace nmrsim
