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

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rffdq/errors.hpp"
#include "rffdq/learners.hpp"
#include "rffdq/qsim.hpp"
#include "rffdq/rff.hpp"
#include "rffdq/spectrum.hpp"

/// Sufficient-condition measures for replacing a quantum model with a
/// random Fourier feature model.
namespace rffdq::dequant {

using spectrum::cplx;
using spectrum::FrequencySupport;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// f(x) = sum_w c_w exp(i w.x) over an enumerated support.
struct FourierFunction {
    FrequencySupport support;
    Eigen::VectorXcd c;

    double conjugate_symmetry_error() const {
        double e = 0.0;
        for (std::size_t i = 0; i < support.size(); ++i)
            e = std::max(e, std::abs(c[static_cast<Eigen::Index>(i)] - std::conj(c[static_cast<Eigen::Index>(support.negation(i))])));
        return e;
    }

    void validate() const {
        if (static_cast<std::size_t>(c.size()) != support.size()) throw InputError("coefficient vector does not match support");
        if (conjugate_symmetry_error() > 1e-12) throw InputError("coefficients are not conjugate symmetric");
    }

    cplx evaluate_complex(const Eigen::Ref<const Eigen::VectorXd>& x) const { return c.cwiseProduct(support.z(x)).sum(); }

    double evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const { return evaluate_complex(x).real(); }
};

/// Real cosine a*cos(w.x) spread on +-w.
inline FourierFunction cosine_function(const FrequencySupport& support, const spectrum::Freq& w, double amplitude = 1.0) {
    FourierFunction f{support, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(support.size()))};
    const auto i = support.find(w);
    if (!i) throw InputError("frequency outside the support");
    const auto j = support.negation(*i);
    if (j == *i) f.c[static_cast<Eigen::Index>(*i)] = amplitude;
    else {
        f.c[static_cast<Eigen::Index>(*i)] = 0.5 * amplitude;
        f.c[static_cast<Eigen::Index>(j)] = 0.5 * amplitude;
    }
    return f;
}

// ---------------------------------------------------------------------------

inline double pmax_inverse(const rff::SamplingDistribution& p) { return 1.0 / p.max_prob(); }

namespace detail {
inline double kahan_sqrt_sum(const Eigen::VectorXd& q) {
    double s = 0.0, comp = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        if (q[i] < 0.0) throw InputError("q has negative entries");
        const double v = std::sqrt(q[i]);
        const double t = s + v;
        comp += std::abs(s) >= v ? (s - t) + v : (v - t) + s;
        s = t;
    }
    return s + comp;
}
}  // namespace detail

/// sum_w sqrt(q_w).
inline double sqrt_sum_concentration(const Eigen::VectorXd& q) { return detail::kahan_sqrt_sum(q); }
inline double sqrt_sum_concentration(const spectrum::DiagonalDistribution& q) { return sqrt_sum_concentration(q.q); }

/// 1/2-Renyi entropy 2 log sum sqrt(q).
inline double renyi_half(const Eigen::VectorXd& q) { return 2.0 * std::log(sqrt_sum_concentration(q)); }
inline double renyi_half(const spectrum::DiagonalDistribution& q) { return renyi_half(q.q); }

/// Principal square root of a Hermitian PSD matrix, eigenvalues clipped at 0.
inline Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& F) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (F + F.adjoint()));
    if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
    const Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * s.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

/// ||diag(p)^{-1/2} F^{1/2}||_2. Infinite when p vanishes where F has mass.
inline double alignment_norm(const Eigen::VectorXd& p, const Eigen::MatrixXcd& F) {
    const Eigen::Index n = F.rows();
    if (p.size() != n) throw InputError("distribution does not match Fourier transform size");
    const Eigen::MatrixXcd R = psd_sqrt(F);
    Eigen::MatrixXcd M = R;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mass = R.row(i).cwiseAbs().maxCoeff();
        if (p[i] <= 0.0) {
            if (mass > 1e-10) return kInf;
            M.row(i).setZero();
        } else {
            M.row(i) /= std::sqrt(p[i]);
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

inline double alignment_norm(const rff::SamplingDistribution& p, const spectrum::FourierTransform& ft) {
    return alignment_norm(p.probs_on(ft.support), ft.F);
}

/// Minimum ||a||_2 with L a = conj(c), L = U sqrt(P) from the reverse Cholesky
/// factorization. Infinite when the residual exceeds 1e-8.
inline double rkhs_norm(const FourierFunction& f, const spectrum::FourierTransform& ft) {
    if (static_cast<std::size_t>(f.c.size()) != ft.size()) throw InputError("function and Fourier transform supports differ");
    if (f.c.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    const auto fact = spectrum::reverse_cholesky(ft);
    const Eigen::MatrixXcd L = fact.U * fact.P.cwiseMax(0.0).cwiseSqrt().cast<cplx>().asDiagonal();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod;
    cod.setThreshold(1e-12);
    cod.compute(L);
    const Eigen::VectorXcd rhs = f.c.conjugate();
    const Eigen::VectorXcd a = cod.solve(rhs);
    if ((L * a - rhs).cwiseAbs().maxCoeff() > 1e-8) return kInf;
    return a.norm();
}

inline double fourier_sum(const FourierFunction& f) { return f.c.cwiseAbs().sum(); }

/// p proportional to |c|.
inline rff::SamplingDistribution aligned_distribution(const FourierFunction& f) {
    rff::DistributionParams params;
    params.c = f.c;
    return rff::make_distribution(rff::Strategy::CoefficientAligned, f.support, params);
}

/// sum_w c_w^2 / p_w, infinite when p misses a nonzero coefficient.
inline double weighted_coefficient_energy(const Eigen::VectorXcd& c, const Eigen::VectorXd& p) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const double a = std::norm(c[i]);
        if (a == 0.0) continue;
        if (p[i] <= 0.0) return kInf;
        s += a / p[i];
    }
    return s;
}

struct SqrtOptimum {
    rff::SamplingDistribution distribution;
    double C1 = 0.0;
};

/// p* proportional to sqrt(q) and C1 = sum sqrt(q).
inline SqrtOptimum optimal_sqrt_distribution(const spectrum::DiagonalDistribution& q) {
    rff::DistributionParams params;
    params.q = q.q;
    return {rff::make_distribution(rff::Strategy::SqrtDiagonal, q.support, params), sqrt_sum_concentration(q.q)};
}

/// min over q_i > 0 of p_i / sqrt(q_i).
inline double sqrt_ratio_min(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    double r = kInf;
    for (Eigen::Index i = 0; i < q.size(); ++i)
        if (q[i] > 0.0) r = std::min(r, p[i] / std::sqrt(q[i]));
    return r;
}

// ---------------------------------------------------------------------------

struct SampleComplexity {
    double B_bar = 0.0, sigma_bar = 0.0;
    double m0 = 0.0, c0 = 0.0, c1 = 0.0;
    double m_min = 0.0, D_min = 0.0;
};

/// Data and feature budgets for random-feature ridge regression against a
/// kernel model, with the integral-operator norm replaced by p_max.
inline SampleComplexity regression_sample_complexity(double S1, double S2, double kappa, double b, double p_max,
                                                     double delta, double eps) {
    if (!(S1 > 0 && S2 > 0 && kappa > 0 && b > 0 && p_max > 0)) throw InputError("sample complexity inputs must be positive");
    if (!(delta > 0 && delta < 1 && eps > 0 && eps < 1)) throw InputError("delta and epsilon must lie in (0, 1)");
    SampleComplexity r;
    const double s = std::max(1.0, S1 * S2);
    r.B_bar = 2.0 * b + 2.0 * kappa * s;
    r.sigma_bar = 2.0 * b + 2.0 * kappa * std::sqrt(s);
    const double k2 = kappa * kappa;
    r.m0 = std::max(4.0 * p_max * p_max, std::pow(264.0 * k2 * std::log(556.0 * k2 * kappa / delta), 2));
    r.c0 = 9.0 * (3.0 + 4.0 * k2 + 4.0 * k2 / p_max + k2 * k2 / 4.0);
    r.c1 = 8.0 * (r.B_bar * kappa + r.sigma_bar * kappa + s);
    const double ld = std::log(1.0 / delta);
    r.m_min = std::max(r.m0, std::pow(r.c1 * ld * ld / eps, 2));
    const double sm = std::sqrt(r.m_min);
    r.D_min = r.c0 * sm * std::log(108.0 * k2 * sm / delta);
    return r;
}

struct ShotNoiseQuantity {
    double exact = 0.0;
    double noisy = 0.0;
};

/// y^T (K + lambda I)^{-1} y for the exact Gram and for a PSD-repaired
/// shot-noise resample of it.
inline ShotNoiseQuantity shot_noise_bound_quantity(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double lambda,
                                                   const qsim::ShotModel& shots) {
    if (!(lambda > 0.0)) throw InputError("lambda must be positive");
    if (K.rows() != K.cols() || K.rows() != y.size()) throw InputError("Gram matrix shape does not match labels");
    const auto quad = [&](const Eigen::MatrixXd& G) {
        Eigen::MatrixXd A = G;
        A.diagonal().array() += lambda;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-15) throw NumericError("singular system in bound quantity");
        return y.dot(ldlt.solve(y));
    };
    ShotNoiseQuantity r;
    r.exact = quad(K);
    r.noisy = shots.is_exact() ? r.exact : quad(learners::repair_psd(qsim::apply_shot_noise(K, shots)));
    return r;
}

// ---------------------------------------------------------------------------

struct ConditionEntry {
    std::string name;
    double value = 0.0;
    std::string threshold_expression;
    std::optional<bool> satisfied_at_budget;
};

struct ConditionReport {
    std::string fourier_source;
    std::string distribution_source;
    std::vector<ConditionEntry> entries;

    const ConditionEntry* find(const std::string& name) const {
        for (const auto& e : entries)
            if (e.name == name) return &e;
        return nullptr;
    }
};

struct ReportInputs {
    std::optional<spectrum::FourierTransform> ft;
    /// Used for the q-based entries when no F is available.
    std::optional<spectrum::DiagonalDistribution> q;
    std::optional<rff::SamplingDistribution> p;
    std::optional<FourierFunction> f;
    std::string fourier_source, distribution_source;
    std::optional<double> budget;
};

/// Evaluates every condition computable from the given inputs. Entries are
/// compared against `budget` when one is supplied.
inline ConditionReport condition_report(const ReportInputs& in) {
    ConditionReport r{in.fourier_source, in.distribution_source, {}};
    const auto add = [&](std::string name, double v, std::string thr) {
        ConditionEntry e{std::move(name), v, std::move(thr), std::nullopt};
        if (in.budget) e.satisfied_at_budget = v <= *in.budget;
        r.entries.push_back(std::move(e));
    };
    if (in.p) add("pmax_inverse", pmax_inverse(*in.p), "O(poly(d))");
    if (in.ft || in.q) {
        const auto q = in.ft ? spectrum::diagonal_distribution(*in.ft) : *in.q;
        const double s = sqrt_sum_concentration(q);
        add("sqrt_sum_q", s, "O(poly(d))");
        add("renyi_half", renyi_half(q), "O(log(poly(d)))");
        add("optimal_sqrt_C1", s, "O(poly(d))");
    }
    if (in.ft) {
        if (in.p) add("alignment_norm", alignment_norm(*in.p, *in.ft), "O(poly(d))");
        if (in.f) add("rkhs_norm", rkhs_norm(*in.f, *in.ft), "O(poly(d))");
    }
    if (in.f) {
        add("fourier_sum", fourier_sum(*in.f), "O(poly(d))");
        if (in.p) add("coefficient_energy", weighted_coefficient_energy(in.f->c, in.p->probs_on(in.f->support)), "O(poly(d))");
    }
    return r;
}

}  // namespace rffdq::dequant
