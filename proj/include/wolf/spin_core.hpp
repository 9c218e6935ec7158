#pragma once

// Spin-1/2 operator algebra on the three-spin product space, the coupled
// singlet/triplet product basis and the rotated W-block basis.
//
// Zeeman product ordering is spin-1 (x) spin-2 (x) spin-3 with alpha before
// beta, so index bit 2 is spin 1, bit 1 is spin 2 and bit 0 is spin 3
// (0 = alpha, 1 = beta).

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wolf {

using cplx = std::complex<double>;

inline constexpr int kSpins = 3;
inline constexpr int kDim = 8;

/// Dense complex operator on the three-spin space.
using Operator = Eigen::Matrix<cplx, kDim, kDim>;
using StateVector = Eigen::Matrix<cplx, kDim, 1>;
using Block3 = Eigen::Matrix<cplx, 3, 3>;

enum class Component { x, y, z, plus, minus };

namespace detail {

inline Eigen::Matrix2cd single_spin(Component c) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  switch (c) {
    case Component::x:
      m(0, 1) = m(1, 0) = 0.5;
      break;
    case Component::y:
      m(0, 1) = cplx(0.0, -0.5);
      m(1, 0) = cplx(0.0, 0.5);
      break;
    case Component::z:
      m(0, 0) = 0.5;
      m(1, 1) = -0.5;
      break;
    case Component::plus:
      m(0, 1) = 1.0;
      break;
    case Component::minus:
      m(1, 0) = 1.0;
      break;
  }
  return m;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace detail

/// Single-spin operator for spin `index` (1-based) embedded in an
/// `n_spins`-fold tensor product by identity factors.
inline Eigen::MatrixXcd spin_operator(int n_spins, int index, Component c) {
  if (n_spins < 1 || n_spins > 16)
    throw std::invalid_argument("spin_operator: n_spins must be in 1..16");
  if (index < 1 || index > n_spins)
    throw std::out_of_range("spin_operator: spin index " + std::to_string(index) +
                            " outside 1.." + std::to_string(n_spins));
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int k = 1; k <= n_spins; ++k) {
    const Eigen::MatrixXcd f =
        (k == index) ? Eigen::MatrixXcd(detail::single_spin(c)) : Eigen::MatrixXcd::Identity(2, 2);
    out = detail::kron(out, f);
  }
  return out;
}

/// Three-spin shorthand returning the fixed-size operator.
inline Operator op(int index, Component c) { return spin_operator(kSpins, index, c); }

/// Sum of the z components of all three spins (total Mz).
inline Operator total_mz() {
  return op(1, Component::z) + op(2, Component::z) + op(3, Component::z);
}

/// I1 . I2 scalar product.
inline Operator i1_dot_i2() {
  Operator s = Operator::Zero();
  for (auto c : {Component::x, Component::y, Component::z}) s += op(1, c) * op(2, c);
  return s;
}

/// Permutation of spins 1 and 2 on the product space.
inline Operator swap12() {
  Operator p = Operator::Zero();
  for (int i = 0; i < kDim; ++i) {
    const int b1 = (i >> 2) & 1;
    const int b2 = (i >> 1) & 1;
    const int j = (i & 1) | (b1 << 1) | (b2 << 2);
    p(j, i) = 1.0;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Coupled basis

enum class PairState { Tp1, T0, Tm1, S0 };
enum class SState { alpha, beta };

struct BasisState {
  PairState pair;
  SState s;
  StateVector vector;

  std::string label() const {
    static constexpr std::array<std::string_view, 4> names{"T+1", "T0", "T-1", "S0"};
    return std::string(names[static_cast<int>(pair)]) + (s == SState::alpha ? "alpha" : "beta");
  }
  /// M quantum number of the I-spin pair.
  int pair_m() const {
    switch (pair) {
      case PairState::Tp1: return 1;
      case PairState::Tm1: return -1;
      default: return 0;
    }
  }
  double s_m() const { return s == SState::alpha ? 0.5 : -0.5; }
};

/// Product-basis vector for the given I-pair state and S-spin state
/// (Condon-Shortley phases for the triplets).
inline StateVector product_state(PairState pair, SState s) {
  StateVector v = StateVector::Zero();
  const int sb = (s == SState::alpha) ? 0 : 1;
  auto idx = [sb](int b1, int b2) { return (b1 << 2) | (b2 << 1) | sb; };
  const double r = 1.0 / std::sqrt(2.0);
  switch (pair) {
    case PairState::Tp1: v(idx(0, 0)) = 1.0; break;
    case PairState::Tm1: v(idx(1, 1)) = 1.0; break;
    case PairState::T0:
      v(idx(0, 1)) = r;
      v(idx(1, 0)) = r;
      break;
    case PairState::S0:
      v(idx(0, 1)) = r;
      v(idx(1, 0)) = -r;
      break;
  }
  return v;
}

inline BasisState basis_state(PairState pair, SState s) { return {pair, s, product_state(pair, s)}; }

/// {T+1a, T+1b, T0a, T0b, T-1a, T-1b, S0a, S0b}
inline std::array<BasisState, kDim> coupled_basis() {
  std::array<BasisState, kDim> out;
  int k = 0;
  for (auto p : {PairState::Tp1, PairState::T0, PairState::Tm1, PairState::S0})
    for (auto s : {SState::alpha, SState::beta}) out[k++] = basis_state(p, s);
  return out;
}

/// Ordered block bases of the two 3x3 Mz sectors.
enum class Block { V, W };

inline std::array<StateVector, 3> block_basis(Block b) {
  if (b == Block::V)
    return {product_state(PairState::S0, SState::alpha), product_state(PairState::T0, SState::alpha),
            product_state(PairState::Tp1, SState::beta)};
  return {product_state(PairState::S0, SState::beta), product_state(PairState::T0, SState::beta),
          product_state(PairState::Tm1, SState::alpha)};
}

struct RotatedBasis {
  double theta = 0.0;
  /// {S'0 beta, T'0 beta, T'-1 alpha}
  std::array<StateVector, 3> states;
};

inline RotatedBasis rotated_basis(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("rotated_basis: theta must be finite");
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const StateVector s0b = product_state(PairState::S0, SState::beta);
  const StateVector t0b = product_state(PairState::T0, SState::beta);
  RotatedBasis rb;
  rb.theta = theta;
  rb.states = {StateVector(c * s0b + s * t0b), StateVector(c * t0b - s * s0b),
               product_state(PairState::Tm1, SState::alpha)};
  return rb;
}

/// 3x3 orthogonal rotation taking W-block coordinates to W_theta coordinates:
/// column k holds the W-block components of rotated state k.
inline Block3 rotation_in_w(double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Block3 r = Block3::Zero();
  r(0, 0) = c;
  r(1, 0) = s;
  r(0, 1) = -s;
  r(1, 1) = c;
  r(2, 2) = 1.0;
  return r;
}

// ---------------------------------------------------------------------------
// Expectation values

template <typename DerivedA, typename DerivedB>
cplx expectation(const Eigen::MatrixBase<DerivedA>& rho, const Eigen::MatrixBase<DerivedB>& obs) {
  if (rho.rows() != obs.rows() || rho.cols() != obs.cols() || rho.rows() != rho.cols())
    throw std::invalid_argument("expectation: dimension mismatch");
  return (rho * obs).trace();
}

/// <v|A|w>
inline cplx matrix_element(const StateVector& v, const Operator& a, const StateVector& w) {
  return v.adjoint() * a * w;
}

}  // namespace wolf
