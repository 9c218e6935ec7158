#include "wolf/spin_core.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace wolf;

namespace {

StateVector zeeman(int b1, int b2, int b3) {
  StateVector v = StateVector::Zero();
  v((b1 << 2) | (b2 << 1) | b3) = 1.0;
  return v;
}

}  // namespace

TEST(SpinOperator, ZEigenvalueOnAllAlpha) {
  const StateVector aaa = zeeman(0, 0, 0);
  const StateVector r = op(1, Component::z) * aaa;
  EXPECT_NEAR((r - 0.5 * aaa).norm(), 0.0, 1e-15);
}

TEST(SpinOperator, CommutationRelationsEverySpin) {
  const cplx i(0.0, 1.0);
  for (int k = 1; k <= 3; ++k) {
    const Operator x = op(k, Component::x), y = op(k, Component::y), z = op(k, Component::z);
    EXPECT_LT(oracle::max_abs(x * y - y * x - i * z), 1e-15);
    EXPECT_LT(oracle::max_abs(y * z - z * y - i * x), 1e-15);
    EXPECT_LT(oracle::max_abs(z * x - x * z - i * y), 1e-15);
    // different spins commute
    const int other = k % 3 + 1;
    EXPECT_LT(oracle::max_abs(x * op(other, Component::y) - op(other, Component::y) * x), 1e-15);
  }
}

TEST(SpinOperator, HermitianWithHalfEigenvalues) {
  for (int k = 1; k <= 3; ++k)
    for (auto c : {Component::x, Component::y, Component::z}) {
      const Operator m = op(k, c);
      EXPECT_LT(oracle::max_abs(m - m.adjoint()), 1e-15);
      Eigen::SelfAdjointEigenSolver<Operator> es(m);
      for (int j = 0; j < kDim; ++j) EXPECT_NEAR(std::abs(es.eigenvalues()(j)), 0.5, 1e-14);
    }
}

TEST(SpinOperator, RaisingLoweringMatchCartesian) {
  const cplx i(0.0, 1.0);
  for (int k = 1; k <= 3; ++k) {
    EXPECT_LT(oracle::max_abs(op(k, Component::plus) - op(k, Component::x) - i * op(k, Component::y)), 1e-15);
    EXPECT_LT(oracle::max_abs(op(k, Component::minus) - op(k, Component::x) + i * op(k, Component::y)), 1e-15);
  }
}

TEST(SpinOperator, RaisingSSpinOnT0Beta) {
  // Explicit matrix-product oracle: S+ flips the last bit beta -> alpha.
  const StateVector t0b = product_state(PairState::T0, SState::beta);
  const StateVector got = op(3, Component::plus) * t0b;
  const StateVector want = (zeeman(0, 1, 0) + zeeman(1, 0, 0)) / std::sqrt(2.0);
  EXPECT_LT((got - want).norm(), 1e-15);
  EXPECT_LT((got - product_state(PairState::T0, SState::alpha)).norm(), 1e-15);
}

TEST(SpinOperator, IndexOutOfRange) {
  EXPECT_THROW(spin_operator(3, 0, Component::z), std::out_of_range);
  EXPECT_THROW(spin_operator(3, 4, Component::z), std::out_of_range);
  EXPECT_EQ(spin_operator(2, 2, Component::z).rows(), 4);
}

TEST(CoupledBasis, OrderingAndGramMatrix) {
  const auto basis = coupled_basis();
  const char* labels[] = {"T+1alpha", "T+1beta", "T0alpha", "T0beta", "T-1alpha", "T-1beta", "S0alpha", "S0beta"};
  Eigen::Matrix<cplx, kDim, kDim> vecs;
  for (int k = 0; k < kDim; ++k) {
    EXPECT_EQ(basis[k].label(), labels[k]);
    vecs.col(k) = basis[k].vector;
  }
  EXPECT_LT(oracle::max_abs(vecs.adjoint() * vecs - Operator::Identity()), 1e-12);
}

TEST(CoupledBasis, SwapSymmetryAndZeemanEigenvalues) {
  const Operator p = swap12();
  const Operator iz = op(1, Component::z) + op(2, Component::z);
  const Operator sz = op(3, Component::z);
  for (const auto& b : coupled_basis()) {
    const double sign = b.pair == PairState::S0 ? -1.0 : 1.0;
    EXPECT_LT((p * b.vector - sign * b.vector).norm(), 1e-14) << b.label();
    EXPECT_LT((iz * b.vector - double(b.pair_m()) * b.vector).norm(), 1e-14) << b.label();
    EXPECT_LT((sz * b.vector - b.s_m() * b.vector).norm(), 1e-14) << b.label();
  }
}

TEST(CoupledBasis, NamedExamples) {
  const auto s0a = product_state(PairState::S0, SState::alpha);
  EXPECT_NEAR(std::real(matrix_element(s0a, swap12(), s0a)), -1.0, 1e-15);
  const auto tm1a = product_state(PairState::Tm1, SState::alpha);
  EXPECT_LT((total_mz() * tm1a + 0.5 * tm1a).norm(), 1e-15);
  EXPECT_NEAR(std::abs(product_state(PairState::S0, SState::beta).dot(product_state(PairState::T0, SState::beta))),
              0.0, 1e-16);
}

TEST(RotatedBasis, ThetaZeroIsWBlock) {
  const RotatedBasis rb = rotated_basis(0.0);
  const auto w = block_basis(Block::W);
  for (int k = 0; k < 3; ++k) EXPECT_LT((rb.states[k] - w[k]).norm(), 1e-16);
}

TEST(RotatedBasis, ThetaPiSwapsSingletIntoTriplet) {
  const RotatedBasis rb = rotated_basis(std::numbers::pi);
  EXPECT_LT((rb.states[0] - product_state(PairState::T0, SState::beta)).norm(), 1e-15);
  EXPECT_LT((rb.states[1] + product_state(PairState::S0, SState::beta)).norm(), 1e-15);
}

TEST(RotatedBasis, OrthonormalForRandomAngles) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int n = 0; n < 1000; ++n) {
    const RotatedBasis rb = rotated_basis(u(rng));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        ASSERT_NEAR(std::abs(rb.states[i].dot(rb.states[j])), i == j ? 1.0 : 0.0, 1e-12);
  }
  // fumarate mixing angle, tangent (J13 - J23) / (2 J12)
  const RotatedBasis f = rotated_basis(std::atan2(3.3 - 5.8, 2 * 15.9));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(f.states[i].dot(f.states[j])), i == j ? 1.0 : 0.0, 1e-12);
  EXPECT_THROW(rotated_basis(INFINITY), std::invalid_argument);
}

TEST(Expectation, Examples) {
  const Operator mixed = Operator::Identity() / 8.0;
  EXPECT_NEAR(std::abs(expectation(mixed, op(3, Component::z))), 0.0, 1e-16);
  const auto tm1a = product_state(PairState::Tm1, SState::alpha);
  const Operator pure = tm1a * tm1a.adjoint();
  EXPECT_NEAR(std::real(expectation(pure, op(3, Component::z))), 0.5, 1e-16);
  // singlet eigenvalue of I1.I2 is -3/4 for both S-spin states
  const auto s0a = product_state(PairState::S0, SState::alpha);
  const auto s0b = product_state(PairState::S0, SState::beta);
  const Operator phip = 0.5 * (s0a * s0a.adjoint() + s0b * s0b.adjoint());
  EXPECT_NEAR(std::real(expectation(phip, i1_dot_i2())), -0.75, 1e-15);
  EXPECT_THROW(expectation(Eigen::MatrixXcd::Identity(4, 4), Eigen::MatrixXcd::Identity(8, 8)),
               std::invalid_argument);
}
