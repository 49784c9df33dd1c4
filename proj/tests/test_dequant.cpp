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
#include "rffdq/dequant.hpp"

using namespace rffdq;
using namespace rffdq::dequant;
using spectrum::DiagonalDistribution;
using spectrum::FourierTransform;

namespace {

FrequencySupport line(int k) {
    std::vector<int> f;
    for (int w = -k; w <= k; ++w) f.push_back(w);
    return FrequencySupport({f});
}

FourierTransform diagonal_ft(const FrequencySupport& s, const Eigen::VectorXd& q) {
    return {s, Eigen::MatrixXcd(q.cast<cplx>().asDiagonal())};
}

rff::SamplingDistribution custom(const FrequencySupport& s, const Eigen::VectorXd& w) {
    rff::DistributionParams p;
    p.weights = w;
    return rff::make_distribution(rff::Strategy::Custom, s, p);
}

Eigen::VectorXd random_simplex(Eigen::Index n, Rng& rng) {
    Eigen::VectorXd p(n);
    for (Eigen::Index i = 0; i < n; ++i) p[i] = -std::log(uniform01(rng) + 1e-300);
    return p / p.sum();
}

/// Random real function on a support: conjugate-symmetric coefficients.
FourierFunction random_function(const FrequencySupport& s, Rng& rng) {
    FourierFunction f{s, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.size()))};
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto j = s.negation(i);
        if (j < i) continue;
        const cplx v(standard_normal(rng), j == i ? 0.0 : standard_normal(rng));
        f.c[static_cast<Eigen::Index>(i)] = v;
        f.c[static_cast<Eigen::Index>(j)] = std::conj(v);
    }
    return f;
}

}  // namespace

TEST(PmaxInverse, Examples) {
    const auto s = line(1);
    EXPECT_DOUBLE_EQ(pmax_inverse(custom(s, Eigen::Vector3d(1, 0, 0))), 1.0);
    EXPECT_NEAR(pmax_inverse(custom(s, Eigen::Vector3d::Ones())), 3.0, 1e-12);
    rff::DistributionParams p;
    p.q = Eigen::Vector3d(0.5, 0.25, 0.25);
    const auto d = rff::make_distribution(rff::Strategy::SqrtDiagonal, s, p);
    const double sum = std::sqrt(0.5) + 2 * std::sqrt(0.25);
    EXPECT_NEAR(pmax_inverse(d), sum / std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(pmax_inverse(d), 2.414, 1e-3);
}

TEST(SqrtSumConcentration, Examples) {
    EXPECT_DOUBLE_EQ(sqrt_sum_concentration(Eigen::Vector3d(0, 1, 0)), 1.0);
    EXPECT_DOUBLE_EQ(renyi_half(Eigen::Vector3d(0, 1, 0)), 0.0);
    for (int n : {4, 25, 81}) {
        const Eigen::VectorXd q = Eigen::VectorXd::Constant(n, 1.0 / n);
        EXPECT_NEAR(sqrt_sum_concentration(q), std::sqrt(n), 1e-12);
        EXPECT_NEAR(renyi_half(q), std::log(n), 1e-12);
    }
    EXPECT_NEAR(sqrt_sum_concentration(Eigen::Vector2d(0.5, 0.5)), std::sqrt(2.0), 1e-15);
    EXPECT_THROW(sqrt_sum_concentration(Eigen::Vector2d(1.5, -0.5)), InputError);
}

TEST(SqrtSumConcentration, Bounds) {
    Rng rng = make_rng(1);
    for (int t = 0; t < 200; ++t) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(uniform01(rng) * 50);
        const Eigen::VectorXd q = random_simplex(n, rng);
        const double s = sqrt_sum_concentration(q);
        EXPECT_GE(s, 1.0 - 1e-12);
        EXPECT_LE(s, std::sqrt(static_cast<double>(n)) + 1e-12);
    }
}

TEST(SqrtSumConcentration, OnCircuitDiagonal) {
    const auto ft = spectrum::kernel_fourier_transform(qsim::ring_encoding(2, 1, 3));
    const auto q = spectrum::diagonal_distribution(ft);
    double s = 0.0;
    for (Eigen::Index i = 0; i < q.q.size(); ++i) s += std::sqrt(q.q[i]);
    EXPECT_NEAR(sqrt_sum_concentration(q), s, 1e-12);
}

TEST(AlignmentNorm, DiagonalExamples) {
    const auto s = line(1);
    const Eigen::Vector3d q(0.5, 0.3, 0.2);
    const auto ft = diagonal_ft(s, q);
    EXPECT_NEAR(alignment_norm(Eigen::VectorXd(q), ft.F), 1.0, 1e-10);
    const auto s2 = FrequencySupport({{-1, 0, 1}});
    const Eigen::Vector3d q2(0.0, 0.5, 0.5), p2(0.0, 0.9, 0.1);
    EXPECT_NEAR(alignment_norm(Eigen::VectorXd(p2), diagonal_ft(s2, q2).F), std::sqrt(5.0), 1e-10);
    EXPECT_EQ(alignment_norm(Eigen::VectorXd(Eigen::Vector3d(0.5, 0.5, 0.0)), ft.F), kInf);
}

TEST(AlignmentNorm, DiagonalIsMinimizer) {
    Rng rng = make_rng(2);
    const auto s = line(3);
    const Eigen::VectorXd q = random_simplex(7, rng);
    const auto ft = diagonal_ft(s, q);
    const double best = alignment_norm(q, ft.F);
    EXPECT_NEAR(best, 1.0, 1e-10);
    for (int t = 0; t < 200; ++t) EXPECT_LE(best, alignment_norm(random_simplex(7, rng), ft.F) + 1e-12);
}

TEST(AlignmentNorm, DenseMatchesDirectComputation) {
    Rng rng = make_rng(3);
    const Eigen::MatrixXcd F = oracle::random_psd(5, rng, 3);
    const Eigen::VectorXd p = random_simplex(5, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(F);
    const Eigen::MatrixXcd R = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    EXPECT_LT((R * R - F).cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::MatrixXcd M = p.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() * R;
    const double ref = std::sqrt((M.adjoint() * M).eval().selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff());
    EXPECT_NEAR(alignment_norm(p, F), ref, 1e-10);
}

TEST(RkhsNorm, KernelSectionOfShiftInvariantKernel) {
    const auto s = line(2);
    const Eigen::VectorXd q = (Eigen::VectorXd(5) << 0.4, 0.2, 0.2, 0.1, 0.1).finished();
    const auto ft = diagonal_ft(s, q);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 0.9);
    FourierFunction f{s, Eigen::VectorXcd(5)};
    for (std::size_t i = 0; i < 5; ++i) f.c[static_cast<Eigen::Index>(i)] = q[static_cast<Eigen::Index>(i)] * std::exp(cplx(0, -s.phase(s[i], x0)));
    EXPECT_NEAR(rkhs_norm(f, ft), 1.0, 1e-10);
    EXPECT_EQ(rkhs_norm(FourierFunction{s, Eigen::VectorXcd::Zero(5)}, ft), 0.0);
}

TEST(RkhsNorm, DiagonalFormula) {
    const auto s = line(1);
    const Eigen::Vector3d q(0.5, 0.25, 0.25);
    const auto ft = diagonal_ft(s, q);
    FourierFunction f{s, q.cast<cplx>()};
    EXPECT_NEAR(rkhs_norm(f, ft), 1.0, 1e-12);
    Rng rng = make_rng(4);
    const auto g = random_function(s, rng);
    double ref = 0.0;
    for (int i = 0; i < 3; ++i) ref += std::norm(g.c[i]) / q[i];
    EXPECT_NEAR(rkhs_norm(g, ft), std::sqrt(ref), 1e-10);
}

TEST(RkhsNorm, OutsideSpanIsInfinite) {
    const auto s = line(1);
    const auto ft = diagonal_ft(s, Eigen::Vector3d(1.0, 0.0, 0.0));
    EXPECT_EQ(rkhs_norm(cosine_function(s, {1}), ft), kInf);
    EXPECT_NEAR(rkhs_norm(cosine_function(s, {0}, 0.5), ft), 0.5, 1e-12);
}

TEST(RkhsNorm, MatchesPseudoInverseBruteForce) {
    Rng rng = make_rng(5);
    for (int k : {1, 2, 3}) {
        const auto s = line(k);
        const auto n = static_cast<int>(s.size());
        for (int rank : {n, std::max(1, n - 2)}) {
            const Eigen::MatrixXcd F = oracle::random_psd(n, rng, rank);
            const FourierTransform ft{s, F};
            // Coefficients of sum_j b_j k(., y_j) lie in the range of conj(F).
            const Eigen::MatrixXcd G = F.conjugate();
            Eigen::VectorXcd b(n);
            for (int i = 0; i < n; ++i) b[i] = cplx(standard_normal(rng), standard_normal(rng));
            FourierFunction f{s, G * b};
            // Minimum-norm a with G^{1/2} a = c, via the pseudo-inverse of G^{1/2}.
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
            Eigen::VectorXd inv(n);
            for (int i = 0; i < n; ++i) {
                const double ev = es.eigenvalues()[i];
                inv[i] = ev > 1e-12 ? 1.0 / std::sqrt(ev) : 0.0;
            }
            const Eigen::MatrixXcd Rpinv = es.eigenvectors() * inv.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
            const double ref = (Rpinv * f.c).norm();
            EXPECT_NEAR(rkhs_norm(f, ft), ref, 1e-8 * std::max(1.0, ref));
        }
    }
}

TEST(RkhsNorm, KernelSectionOfCircuitKernel) {
    const auto c = qsim::ring_encoding(2, 1, 3);
    const auto ft = spectrum::kernel_fourier_transform(c);
    Rng rng = make_rng(15);
    const Eigen::VectorXd x0 = oracle::random_point(3, rng);
    FourierFunction f{ft.support, ft.F.transpose() * ft.support.z(x0).conjugate()};
    const Eigen::VectorXd x = oracle::random_point(3, rng);
    EXPECT_NEAR(f.evaluate(x), oracle::kernel(c, x, x0), 1e-10);
    EXPECT_NEAR(rkhs_norm(f, ft), 1.0, 1e-8);
}

TEST(FourierSum, Examples) {
    const auto s = line(2);
    FourierFunction d{s, Eigen::VectorXcd::Zero(5)};
    d.c[0] = 0.7;
    EXPECT_DOUBLE_EQ(fourier_sum(d), 0.7);
    EXPECT_EQ(aligned_distribution(d).prob({0}), 1.0);
    const auto c = cosine_function(s, {1});
    EXPECT_DOUBLE_EQ(fourier_sum(c), 1.0);
    const auto p = aligned_distribution(c);
    EXPECT_DOUBLE_EQ(p.prob({1}), 0.5);
    EXPECT_DOUBLE_EQ(p.prob({-1}), 0.5);
    Rng rng = make_rng(6);
    const Eigen::VectorXd x = oracle::random_point(1, rng);
    EXPECT_NEAR(c.evaluate(x), std::cos(x[0]), 1e-14);
    EXPECT_THROW(aligned_distribution(FourierFunction{s, Eigen::VectorXcd::Zero(5)}), InputError);
}

TEST(FourierSum, NormOrderingAndRealValues) {
    Rng rng = make_rng(7);
    const auto s = spectrum::frequency_support(qsim::ring_encoding(1, 1, 2));
    for (int t = 0; t < 100; ++t) {
        const auto f = random_function(s, rng);
        EXPECT_LE(f.c.norm(), fourier_sum(f) + 1e-12);
        EXPECT_LE(f.conjugate_symmetry_error(), 1e-12);
        EXPECT_LT(std::abs(f.evaluate_complex(oracle::random_point(2, rng)).imag()), 1e-10);
    }
}

TEST(AlignedDistribution, MinimizesCoefficientEnergy) {
    Rng rng = make_rng(8);
    const auto s = line(3);
    const auto f = random_function(s, rng);
    const double best = weighted_coefficient_energy(f.c, aligned_distribution(f).probs_on(s));
    EXPECT_NEAR(best, std::pow(fourier_sum(f), 2), 1e-10);
    for (int t = 0; t < 1000; ++t) EXPECT_LE(best, weighted_coefficient_energy(f.c, random_simplex(7, rng)) + 1e-12);
}

TEST(OptimalSqrtDistribution, Examples) {
    const auto s = line(2);
    const DiagonalDistribution u{s, Eigen::VectorXd::Constant(5, 0.2), {}};
    const auto ou = optimal_sqrt_distribution(u);
    EXPECT_NEAR(ou.C1, std::sqrt(5.0), 1e-12);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(ou.distribution.prob(s[i]), 0.2, 1e-12);

    const auto s1 = FrequencySupport({{-2, -1, 0, 1, 2}});
    Eigen::VectorXd q = Eigen::VectorXd::Zero(5);
    q[0] = 0.81;
    q[1] = 0.09;
    q[2] = 0.09;
    q[3] = 0.01;
    const auto oq = optimal_sqrt_distribution(DiagonalDistribution{s1, q, {}});
    EXPECT_NEAR(oq.C1, 1.6, 1e-12);
    const std::vector<double> expect{0.9 / 1.6, 0.3 / 1.6, 0.3 / 1.6, 0.1 / 1.6, 0.0};
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(oq.distribution.prob(s1[i]), expect[i], 1e-12);
    const Eigen::VectorXd ps = oq.distribution.probs_on(s1);
    EXPECT_NEAR(sqrt_ratio_min(ps, q), 1.0 / oq.C1, 1e-12);
}

TEST(OptimalSqrtDistribution, KktAgainstRandomDistributions) {
    Rng rng = make_rng(9);
    const auto s = line(3);
    const Eigen::VectorXd q = random_simplex(7, rng);
    const auto opt = optimal_sqrt_distribution(DiagonalDistribution{s, q, {}});
    for (int t = 0; t < 1000; ++t) EXPECT_LE(sqrt_ratio_min(random_simplex(7, rng), q), 1.0 / opt.C1 + 1e-12);
}

TEST(SampleComplexity, FormulaReevaluation) {
    const double S1 = 1, S2 = 1, kappa = 1, b = 1, pmax = 1, delta = 0.1, eps = 0.1;
    const auto r = regression_sample_complexity(S1, S2, kappa, b, pmax, delta, eps);
    const double B = 2 * b + 2 * kappa * 1.0, sg = 2 * b + 2 * kappa * 1.0;
    const double m0 = std::max(4.0 * pmax * pmax, std::pow(264.0 * std::log(556.0 / delta), 2));
    const double c0 = 9 * (3 + 4 + 4 + 0.25);
    const double c1 = 8 * (B + sg + 1);
    const double m = std::max(m0, std::pow(c1 * std::pow(std::log(10.0), 2) / eps, 2));
    EXPECT_DOUBLE_EQ(r.B_bar, 4.0);
    EXPECT_DOUBLE_EQ(r.sigma_bar, 4.0);
    EXPECT_NEAR(r.m0, m0, 1e-9 * m0);
    EXPECT_NEAR(r.c0, c0, 1e-12);
    EXPECT_NEAR(r.c1, c1, 1e-12);
    EXPECT_NEAR(r.m_min, m, 1e-9 * m);
    EXPECT_NEAR(r.D_min, c0 * std::sqrt(m) * std::log(108 * std::sqrt(m) / delta), 1e-9 * r.D_min);
}

TEST(SampleComplexity, Structure) {
    const auto a = regression_sample_complexity(2, 3, 1, 1, 0.5, 0.05, 0.1);
    const auto h = regression_sample_complexity(2, 3, 1, 1, 0.5, 0.05, 0.05);
    ASSERT_GT(a.m_min, a.m0);
    EXPECT_NEAR(h.m_min / a.m_min, 4.0, 1e-9);
    double prev = 0.0;
    for (double s : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        const auto r = regression_sample_complexity(s, 1.0, 1, 1, 0.5, 0.05, 0.1);
        EXPECT_GE(r.m_min, prev);
        prev = r.m_min;
    }
    EXPECT_THROW(regression_sample_complexity(0, 1, 1, 1, 1, 0.1, 0.1), InputError);
    EXPECT_THROW(regression_sample_complexity(1, 1, 1, 1, 1, 1.5, 0.1), InputError);
    EXPECT_THROW(regression_sample_complexity(1, 1, 1, 1, 1, 0.1, 0.0), InputError);
}

TEST(ShotNoiseQuantity, Examples) {
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
    e1[0] = 1;
    const auto r = shot_noise_bound_quantity(Eigen::MatrixXd::Identity(3, 3), e1, 1.0, qsim::ShotModel::exact());
    EXPECT_DOUBLE_EQ(r.exact, 0.5);
    EXPECT_DOUBLE_EQ(r.noisy, 0.5);
    EXPECT_THROW(shot_noise_bound_quantity(Eigen::MatrixXd::Identity(3, 3), e1, 0.0, qsim::ShotModel::exact()), InputError);
}

TEST(ShotNoiseQuantity, FiniteShotsReproducible) {
    const auto c = qsim::ring_encoding(2, 1, 2);
    Rng rng = make_rng(10);
    Eigen::MatrixXd X(50, 2);
    for (int i = 0; i < 50; ++i) X.row(i) = oracle::random_point(2, rng).transpose();
    Eigen::VectorXd y(50);
    for (int i = 0; i < 50; ++i) y[i] = std::cos(X(i, 0)) >= 0 ? 1.0 : -1.0;
    const auto K = qsim::gram_matrix(c, X);
    std::vector<double> diffs;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        const auto a = shot_noise_bound_quantity(K, y, 0.1, qsim::ShotModel::finite(100, rep));
        const auto b = shot_noise_bound_quantity(K, y, 0.1, qsim::ShotModel::finite(100, rep));
        ASSERT_TRUE(std::isfinite(a.noisy));
        EXPECT_EQ(a.noisy, b.noisy);
        EXPECT_EQ(a.exact, b.exact);
        diffs.push_back(a.noisy - a.exact);
    }
    EXPECT_TRUE(std::any_of(diffs.begin(), diffs.end(), [](double v) { return v != 0.0; }));
}

TEST(ConditionReport, CollectsAvailableEntries) {
    const auto ft = spectrum::kernel_fourier_transform(qsim::ring_encoding(1, 1, 1));
    ReportInputs in;
    in.ft = ft;
    in.p = rff::make_distribution(rff::Strategy::Convolutional, ft.support);
    in.f = cosine_function(ft.support, {1});
    in.fourier_source = "ring:1,1,1";
    in.distribution_source = "convolutional";
    in.budget = 10.0;
    const auto r = condition_report(in);
    for (const char* n : {"pmax_inverse", "sqrt_sum_q", "renyi_half", "optimal_sqrt_C1", "alignment_norm", "rkhs_norm", "fourier_sum", "coefficient_energy"}) {
        const auto* e = r.find(n);
        ASSERT_NE(e, nullptr) << n;
        EXPECT_GE(e->value, 0.0) << n;
        ASSERT_TRUE(e->satisfied_at_budget.has_value());
        EXPECT_EQ(*e->satisfied_at_budget, e->value <= 10.0);
    }
    EXPECT_NEAR(r.find("pmax_inverse")->value, 16.0 / 6.0, 1e-12);
    EXPECT_NEAR(r.find("fourier_sum")->value, 1.0, 1e-12);
    ReportInputs only_p;
    only_p.p = in.p;
    const auto r2 = condition_report(only_p);
    EXPECT_EQ(r2.entries.size(), 1u);
    EXPECT_FALSE(r2.entries.front().satisfied_at_budget.has_value());
}
