// Copyright 2026 The rffdq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rffdq/qsim.hpp"

using namespace rffdq;
using namespace rffdq::qsim;
using oracle::pi;

namespace {

EncodingCircuit one_gate(GateSpec g, int n = 1, int d = 1) {
    EncodingCircuit c;
    c.n_qubits = n;
    c.dim = d;
    c.layers = {{g}};
    return c;
}

}  // namespace

TEST(ApplyCircuit, EmptyCircuitGivesZeroState) {
    EncodingCircuit c;
    c.n_qubits = 3;
    c.dim = 2;
    const auto psi = apply_circuit(c, Eigen::Vector2d(0.3, 1.7));
    EXPECT_EQ(psi[0], oracle::cplx(1.0));
    for (std::size_t i = 1; i < psi.size(); ++i) EXPECT_EQ(std::abs(psi[i]), 0.0);
}

TEST(ApplyCircuit, HadamardMakesPlusState) {
    const auto psi = apply_circuit(one_gate(GateSpec::hadamard(0)), Eigen::VectorXd::Constant(1, 0.4));
    EXPECT_NEAR(psi[0].real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(psi[1].real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(psi[0].imag(), 0.0, 1e-15);
}

TEST(ApplyCircuit, XRotationAtPi) {
    const auto c = single_rotation(GateKind::RotX);
    const auto psi = apply_circuit(c, Eigen::VectorXd::Constant(1, pi));
    const Eigen::Vector2cd expect = oracle::gate_matrix(GateKind::RotX, pi).col(0);
    EXPECT_NEAR(std::abs(psi[0] - expect[0]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(psi[1] - expect[1]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(psi[1] - oracle::cplx(0, -1)), 0.0, 1e-15);
}

TEST(ApplyCircuit, DimensionMismatchIsInputError) {
    EXPECT_THROW(apply_circuit(single_rotation(), Eigen::Vector2d(1, 2)), InputError);
}

TEST(ApplyCircuit, MatchesDenseSimulatorAndPreservesNorm) {
    Rng rng(17);
    for (int n : {1, 2, 3}) {
        for (int L : {1, 2}) {
            const auto c = ring_encoding(n, L);
            for (int t = 0; t < 5; ++t) {
                const Eigen::VectorXd x = oracle::random_point(c.dim, rng);
                StateVector psi(c.n_qubits);
                for (const auto& layer : c.layers)
                    for (const auto& g : layer) {
                        psi.apply(g, x);
                        EXPECT_LT(std::abs(psi.norm_squared() - 1.0), 1e-10);
                    }
                const Eigen::VectorXcd ref = oracle::unitary(c, x).col(0);
                for (std::size_t i = 0; i < psi.size(); ++i)
                    EXPECT_NEAR(std::abs(psi[i] - ref[static_cast<Eigen::Index>(i)]), 0.0, 1e-12);
            }
        }
    }
}

TEST(ApplyCircuit, ScaledBindingMultipliesAngle) {
    auto g = GateSpec::bound(GateKind::RotY, 0, 0, Rational(3, 2));
    const auto c = one_gate(g);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.7);
    const Eigen::Vector2cd expect = oracle::gate_matrix(GateKind::RotY, 1.05).col(0);
    const auto psi = apply_circuit(c, x);
    EXPECT_NEAR(std::abs(psi[0] - expect[0]), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(psi[1] - expect[1]), 0.0, 1e-14);
}

TEST(Circuit, ValidateRejectsBadWiring) {
    EXPECT_THROW(one_gate(GateSpec::cnot(0, 0), 2).validate(), InputError);
    EXPECT_THROW(one_gate(GateSpec::bound(GateKind::RotX, 2, 0), 2).validate(), InputError);
    EXPECT_THROW(one_gate(GateSpec::bound(GateKind::RotX, 0, 3), 1, 2).validate(), InputError);
    EncodingCircuit big;
    big.n_qubits = 25;
    EXPECT_THROW(big.validate(), ResourceError);
}

TEST(Circuit, ValidateWarnsOnUnboundDimension) {
    const auto w = one_gate(GateSpec::bound(GateKind::RotX, 0, 0), 1, 2).validate();
    ASSERT_EQ(w.size(), 1u);
    EXPECT_NE(w[0].find("1"), std::string::npos);
    EXPECT_TRUE(ring_encoding(2, 2).validate().empty());
}

TEST(FidelityKernel, EqualInputsGiveOne) {
    Rng rng(2);
    for (int n : {1, 2, 3}) {
        const auto c = ring_encoding(n, 2);
        const Eigen::VectorXd x = oracle::random_point(c.dim, rng);
        EXPECT_NEAR(fidelity_kernel(c, x, x), 1.0, 1e-12);
    }
}

TEST(FidelityKernel, XRotationClosedForm) {
    Rng rng(3);
    const auto c = single_rotation(GateKind::RotX);
    for (int t = 0; t < 200; ++t) {
        const double x = uniform(rng, -10, 10), y = uniform(rng, -10, 10);
        const double k = fidelity_kernel(c, Eigen::VectorXd::Constant(1, x), Eigen::VectorXd::Constant(1, y));
        EXPECT_NEAR(k, std::pow(std::cos((x - y) / 2), 2), 1e-12);
    }
}

TEST(FidelityKernel, RingEncodingMatchesDenseOracle) {
    Rng rng(4);
    const auto c = ring_encoding(2, 1);
    for (int t = 0; t < 20; ++t) {
        const Eigen::VectorXd x = oracle::random_point(4, rng), y = oracle::random_point(4, rng);
        const double k = fidelity_kernel(c, x, y);
        EXPECT_GE(k, 0.0);
        EXPECT_LE(k, 1.0 + 1e-12);
        EXPECT_NEAR(k, oracle::kernel(c, x, y), 1e-12);
    }
}

TEST(FidelityKernel, SymmetricAndBounded) {
    Rng rng(5);
    const auto c = ring_encoding(3, 2, 5);
    for (int t = 0; t < 100; ++t) {
        const Eigen::VectorXd x = oracle::random_point(5, rng), y = oracle::random_point(5, rng);
        const double a = fidelity_kernel(c, x, y), b = fidelity_kernel(c, y, x);
        EXPECT_LT(std::abs(a - b), 1e-12);
        EXPECT_GE(a, 0.0);
        EXPECT_LE(a, 1.0 + 1e-12);
    }
}

TEST(GramMatrix, SinglePoint) {
    const Eigen::MatrixXd X = Eigen::MatrixXd::Constant(1, 1, 0.3);
    const auto K = gram_matrix(single_rotation(), X);
    ASSERT_EQ(K.rows(), 1);
    EXPECT_EQ(K(0, 0), 1.0);
}

TEST(GramMatrix, XRotationEntries) {
    Rng rng(6);
    Eigen::MatrixXd X(4, 1);
    for (int i = 0; i < 4; ++i) X(i, 0) = uniform(rng, 0, 2 * pi);
    const auto K = gram_matrix(single_rotation(), X);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_NEAR(K(i, j), std::pow(std::cos((X(i, 0) - X(j, 0)) / 2), 2), 1e-12);
}

TEST(GramMatrix, ExactGramIsPsd) {
    Rng rng(7);
    const auto c = ring_encoding(2, 2);
    Eigen::MatrixXd X(64, 4);
    for (int i = 0; i < 64; ++i) X.row(i) = oracle::random_point(4, rng).transpose();
    const auto K = gram_matrix(c, X);
    EXPECT_LT((K - K.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8);
}

TEST(GramMatrix, ShotNoiseSymmetricWithUnitDiagonalAndReproducible) {
    Rng rng(8);
    Eigen::MatrixXd X(10, 1);
    for (int i = 0; i < 10; ++i) X(i, 0) = uniform(rng, 0, 2 * pi);
    const auto K1 = gram_matrix(single_rotation(), X, ShotModel::finite(20, 99));
    const auto K2 = gram_matrix(single_rotation(), X, ShotModel::finite(20, 99));
    const auto K3 = gram_matrix(single_rotation(), X, ShotModel::finite(20, 100));
    EXPECT_EQ(K1, K2);
    EXPECT_NE(K1, K3);
    for (int i = 0; i < 10; ++i) {
        EXPECT_EQ(K1(i, i), 1.0);
        for (int j = 0; j < 10; ++j) {
            EXPECT_EQ(K1(i, j), K1(j, i));
            EXPECT_DOUBLE_EQ(K1(i, j) * 20, std::round(K1(i, j) * 20));
        }
    }
    EXPECT_EQ(apply_shot_noise(gram_matrix(single_rotation(), X), ShotModel::finite(20, 99)), K1);
}

TEST(GramMatrix, ShotEstimatorAtHalf) {
    // Points pi/2 apart under the X rotation kernel give k = 1/2.
    const int reps = 4000;
    Eigen::MatrixXd X(2, 1);
    X << 0.0, pi / 2;
    std::vector<double> v;
    for (int r = 0; r < reps; ++r) v.push_back(gram_matrix(single_rotation(), X, ShotModel::finite(100, r))(0, 1));
    const auto [m, var] = oracle::mean_var(v);
    EXPECT_NEAR(m, 0.5, 4 * std::sqrt(0.0025 / reps));
    EXPECT_NEAR(var, 0.0025, 0.0025 * 0.1);
}

TEST(GramMatrix, RejectsEmpty) {
    EXPECT_THROW(gram_matrix(single_rotation(), Eigen::MatrixXd(0, 1)), InputError);
}

TEST(ShotEstimator, DegenerateValues) {
    Rng rng(9);
    for (std::uint64_t t : {1u, 7u, 100u}) {
        EXPECT_EQ(estimate_with_shots(1.0, t, rng), 1.0);
        EXPECT_EQ(estimate_with_shots(0.0, t, rng), 0.0);
    }
}

TEST(ShotEstimator, RejectsOutOfRange) {
    Rng rng(9);
    EXPECT_THROW(estimate_with_shots(1.5, 10, rng), InputError);
    EXPECT_THROW(estimate_with_shots(-0.1, 10, rng), InputError);
    EXPECT_THROW(estimate_with_shots(0.5, 0, rng), InputError);
}

TEST(ShotEstimator, StdAtHalfAndUnbiased) {
    Rng rng(10);
    const int n = 10000;
    for (double k : {0.5, 0.2, 0.9}) {
        std::vector<double> v;
        for (int i = 0; i < n; ++i) v.push_back(estimate_with_shots(k, 100, rng));
        const auto [m, var] = oracle::mean_var(v);
        const double sd = std::sqrt(k * (1 - k) / 100);
        EXPECT_LT(std::abs(m - k), 4 * sd / std::sqrt(n));
        // Standard error of a sample standard deviation is about sd / sqrt(2n).
        EXPECT_LT(std::abs(std::sqrt(var) - sd), 3 * sd / std::sqrt(2.0 * n));
    }
}

TEST(CrossGram, MatchesKernel) {
    Rng rng(12);
    const auto c = ring_encoding(2, 1, 3);
    Eigen::MatrixXd A(3, 3), B(4, 3);
    for (int i = 0; i < 3; ++i) A.row(i) = oracle::random_point(3, rng).transpose();
    for (int i = 0; i < 4; ++i) B.row(i) = oracle::random_point(3, rng).transpose();
    const auto K = cross_gram(c, A, B);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_NEAR(K(i, j), fidelity_kernel(c, A.row(i).transpose(), B.row(j).transpose()), 1e-14);
    EXPECT_EQ(noisy_cross_gram(c, A, B, ShotModel::exact()), K);
}

TEST(KernelVariance, ConstantKernelHasZeroVariance) {
    Rng rng(13);
    const auto konst = [](const Eigen::VectorXd&, const Eigen::VectorXd&) { return 1.0; };
    EXPECT_EQ(kernel_variance(konst, 2, 100, rng), 0.0);
    // cos^2((x-y)/2) = 1/2 + cos(x-y)/2 has variance 1/8 over uniform pairs.
    const FidelityKernel k{single_rotation()};
    EXPECT_NEAR(kernel_variance(k, 1, 40000, rng), 0.125, 0.005);
}

TEST(RingEncoding, GateCounts) {
    const auto c = ring_encoding(2, 2);
    EXPECT_EQ(c.dim, 4);
    EXPECT_EQ(c.layer_count(), 2);
    for (int j = 0; j < 4; ++j) EXPECT_EQ(c.gates_on_dimension(j).size(), 4u);
    const auto c3 = ring_encoding(2, 2, 2);
    EXPECT_EQ(c3.gates_on_dimension(0).size(), 4u);
    EXPECT_EQ(c3.gates_on_dimension(1).size(), 4u);
    EXPECT_THROW(ring_encoding(2, 1, 5), InputError);
}
