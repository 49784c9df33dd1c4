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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rffdq/errors.hpp"
#include "rffdq/qsim.hpp"
#include "rffdq/random.hpp"

/// Frequency supports of discrete-spectrum kernels, their Fourier transform
/// matrices F with k(x, y) = z(y)^dagger F z(x), and factorizations of F.
namespace rffdq::spectrum {

using cplx = std::complex<double>;
using Freq = std::vector<int>;

inline constexpr std::size_t kMaxEnumeratedSupport = std::size_t{1} << 22;
inline constexpr std::size_t kMaxExactSupport = 4096;
inline constexpr double kMaxExactEvaluations = 1e7;
inline constexpr double kPsdTolerance = 1e-9;

/// Omega = Omega_1 x ... x Omega_d. Frequencies are stored as integers on a
/// per-dimension grid; the physical frequency along j is base[j] * w[j].
///
/// `full` (when enumerated) is sorted by physical 2-norm, ties broken
/// lexicographically. The positive half holds the frequencies whose first
/// nonzero coordinate is positive.
class FrequencySupport {
public:
    FrequencySupport() = default;

    FrequencySupport(std::vector<std::vector<int>> per_dim, std::vector<double> base = {},
                     std::vector<std::vector<std::uint64_t>> per_dim_counts = {})
        : per_dim_(std::move(per_dim)), base_(std::move(base)), counts_(std::move(per_dim_counts)) {
        if (per_dim_.empty()) throw InputError("frequency support needs at least one dimension");
        if (base_.empty()) base_.assign(per_dim_.size(), 1.0);
        if (base_.size() != per_dim_.size()) throw InputError("base size does not match dimension count");
        if (!counts_.empty() && counts_.size() != per_dim_.size()) throw InputError("count table size mismatch");
        for (std::size_t j = 0; j < per_dim_.size(); ++j) {
            auto& f = per_dim_[j];
            std::sort(f.begin(), f.end());
            f.erase(std::unique(f.begin(), f.end()), f.end());
            for (int w : f)
                if (std::find(f.begin(), f.end(), -w) == f.end())
                    throw InputError("per-dimension frequency set is not symmetric about zero");
            if (!std::binary_search(f.begin(), f.end(), 0)) throw InputError("per-dimension frequency set lacks zero");
            if (!counts_.empty() && counts_[j].size() != f.size()) throw InputError("count table length mismatch");
        }
        enumerate();
    }

    int dims() const { return static_cast<int>(per_dim_.size()); }
    const std::vector<std::vector<int>>& per_dim() const { return per_dim_; }
    const std::vector<int>& per_dim(int j) const { return per_dim_[static_cast<std::size_t>(j)]; }
    const std::vector<double>& base() const { return base_; }
    bool has_counts() const { return !counts_.empty(); }
    /// Multiplicity of each per-dimension frequency among all eigenvalue-choice
    /// pairs of the encoding gates (empty when the support was built by hand).
    const std::vector<std::uint64_t>& counts(int j) const { return counts_.at(static_cast<std::size_t>(j)); }

    /// Product of per-dimension sizes, possibly larger than what is enumerated.
    double cardinality() const {
        double n = 1.0;
        for (const auto& f : per_dim_) n *= static_cast<double>(f.size());
        return n;
    }

    bool enumerated() const { return !full_.empty(); }
    std::size_t size() const { require_enumerated(); return full_.size(); }
    const std::vector<Freq>& full() const { require_enumerated(); return full_; }
    const Freq& operator[](std::size_t i) const { return full_[i]; }
    const std::vector<std::size_t>& positive_half() const { require_enumerated(); return positive_; }
    /// Index of -omega_i.
    std::size_t negation(std::size_t i) const { return negation_[i]; }

    std::optional<std::size_t> find(const Freq& w) const {
        const auto it = index_.find(w);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    double physical_norm(const Freq& w) const {
        double s = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double v = base_[j] * w[j];
            s += v * v;
        }
        return std::sqrt(s);
    }
    double norm(std::size_t i) const { return physical_norm(full_[i]); }
    double max_norm() const { return full_.empty() ? 0.0 : norm(full_.size() - 1); }

    /// Length of one period along dimension j.
    double period(int j) const { return 2.0 * std::numbers::pi / base_[static_cast<std::size_t>(j)]; }

    /// Phase omega . x with physical frequencies.
    double phase(const Freq& w, const Eigen::Ref<const Eigen::VectorXd>& x) const {
        double s = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) s += base_[j] * w[j] * x[static_cast<Eigen::Index>(j)];
        return s;
    }

    /// z(x) = (e^{i omega_1 . x}, ..., e^{i omega_|Omega| . x}) in ascending order.
    Eigen::VectorXcd z(const Eigen::Ref<const Eigen::VectorXd>& x) const {
        require_enumerated();
        if (x.size() != dims()) throw InputError("point dimension does not match frequency support");
        Eigen::VectorXcd out(static_cast<Eigen::Index>(full_.size()));
        for (std::size_t i = 0; i < full_.size(); ++i) out[static_cast<Eigen::Index>(i)] = std::polar(1.0, phase(full_[i], x));
        return out;
    }

private:
    void require_enumerated() const {
        if (full_.empty())
            throw ResourceError("frequency support too large to enumerate; use per-dimension operations");
    }

    void enumerate() {
        if (cardinality() > static_cast<double>(kMaxEnumeratedSupport)) return;
        full_.clear();
        Freq cur(per_dim_.size());
        std::vector<std::size_t> idx(per_dim_.size(), 0);
        while (true) {
            for (std::size_t j = 0; j < per_dim_.size(); ++j) cur[j] = per_dim_[j][idx[j]];
            full_.push_back(cur);
            std::size_t j = 0;
            while (j < idx.size() && ++idx[j] == per_dim_[j].size()) idx[j++] = 0;
            if (j == idx.size()) break;
        }
        std::vector<double> norms(full_.size());
        for (std::size_t i = 0; i < full_.size(); ++i) norms[i] = physical_norm(full_[i]);
        std::vector<std::size_t> order(full_.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (norms[a] != norms[b]) return norms[a] < norms[b];
            return full_[a] < full_[b];
        });
        std::vector<Freq> sorted;
        sorted.reserve(full_.size());
        for (auto i : order) sorted.push_back(std::move(full_[i]));
        full_ = std::move(sorted);
        index_.clear();
        for (std::size_t i = 0; i < full_.size(); ++i) index_.emplace(full_[i], i);
        negation_.resize(full_.size());
        positive_.clear();
        for (std::size_t i = 0; i < full_.size(); ++i) {
            Freq neg = full_[i];
            for (auto& v : neg) v = -v;
            negation_[i] = index_.at(neg);
            const auto nz = std::find_if(full_[i].begin(), full_[i].end(), [](int v) { return v != 0; });
            if (nz != full_[i].end() && *nz > 0) positive_.push_back(i);
        }
    }

    std::vector<std::vector<int>> per_dim_;
    std::vector<double> base_;
    std::vector<std::vector<std::uint64_t>> counts_;
    std::vector<Freq> full_;
    std::map<Freq, std::size_t> index_;
    std::vector<std::size_t> negation_;
    std::vector<std::size_t> positive_;
};

namespace detail {

using Histogram = std::map<std::int64_t, std::uint64_t>;

inline Histogram convolve(const Histogram& a, const Histogram& b) {
    Histogram out;
    for (const auto& [ka, va] : a)
        for (const auto& [kb, vb] : b) out[ka + kb] += va * vb;
    return out;
}

inline std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
    const auto l = std::lcm(a, b);
    if (l <= 0 || l > 1'000'000'000) throw UnsupportedEncodingError("gate scales do not share a tractable common grid");
    return l;
}

}  // namespace detail

/// Generator eigenvalues of one data-bound gate, in units of 1/grid.
inline std::vector<std::int64_t> gate_eigen_units(const qsim::GateSpec& g, std::int64_t grid) {
    using qsim::GateKind;
    const auto& s = g.scale;
    switch (g.kind) {
        case GateKind::RotX:
        case GateKind::RotY:
        case GateKind::RotZ: {
            const auto half = s.num * (grid / (2 * s.den));
            return {-half, half};
        }
        case GateKind::Phase: return {0, s.num * (grid / s.den)};
        default: throw UnsupportedEncodingError("gate kind cannot encode data");
    }
}

/// Histogram of Lambda_s - Lambda_t over all eigenvalue choices s, t of the
/// gates (one copy for U(x), one for U^dagger(y)), in units of 1/grid.
inline detail::Histogram difference_histogram(const std::vector<qsim::GateSpec>& gates, std::int64_t grid) {
    if (gates.size() > 31) throw UnsupportedEncodingError("too many encoding gates on one dimension for exact counting");
    detail::Histogram sums{{0, 1}};
    for (const auto& g : gates) {
        detail::Histogram h;
        for (auto e : gate_eigen_units(g, grid)) h[e] += 1;
        sums = detail::convolve(sums, h);
    }
    detail::Histogram neg;
    for (const auto& [k, v] : sums) neg[-k] = v;
    return detail::convolve(sums, neg);
}

/// Common grid denominator of the eigenvalues of `gates`.
inline std::int64_t eigen_grid(const std::vector<qsim::GateSpec>& gates) {
    std::int64_t grid = 1;
    for (const auto& g : gates) {
        if (g.scale.den <= 0) throw UnsupportedEncodingError("scale denominator must be positive");
        const bool rotation = g.kind != qsim::GateKind::Phase;
        grid = detail::lcm_checked(grid, rotation ? 2 * g.scale.den : g.scale.den);
    }
    return grid;
}

/// Frequencies of a Hamiltonian-encoded fidelity kernel: along each
/// dimension all differences of sums of encoding-generator eigenvalues,
/// rescaled onto the coarsest integer grid.
inline FrequencySupport frequency_support(const qsim::EncodingCircuit& circuit) {
    circuit.validate();
    std::vector<std::vector<int>> per_dim;
    std::vector<double> base;
    std::vector<std::vector<std::uint64_t>> counts;
    for (int j = 0; j < circuit.dim; ++j) {
        const auto gates = circuit.gates_on_dimension(j);
        const auto grid = eigen_grid(gates);
        const auto hist = difference_histogram(gates, grid);
        std::int64_t g = 0;
        for (const auto& [k, v] : hist)
            if (k != 0) g = std::gcd(g, k < 0 ? -k : k);
        if (g == 0) g = grid;  // only the zero frequency
        std::vector<int> freqs;
        std::vector<std::uint64_t> mult;
        for (const auto& [k, v] : hist) {
            const auto w = k / g;
            if (w > 1'000'000 || w < -1'000'000) throw UnsupportedEncodingError("frequency grid too fine");
            freqs.push_back(static_cast<int>(w));
            mult.push_back(v);
        }
        per_dim.push_back(std::move(freqs));
        counts.push_back(std::move(mult));
        base.push_back(static_cast<double>(g) / static_cast<double>(grid));
    }
    return FrequencySupport(std::move(per_dim), std::move(base), std::move(counts));
}

/// Fourier transform of a discrete-spectrum kernel on its support.
struct FourierTransform {
    FrequencySupport support;
    Eigen::MatrixXcd F;

    std::size_t size() const { return static_cast<std::size_t>(F.rows()); }

    cplx evaluate(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) const {
        return support.z(y).dot(F * support.z(x));
    }

    Eigen::VectorXd diagonal() const { return F.diagonal().real(); }

    double hermitian_error() const { return (F - F.adjoint()).cwiseAbs().maxCoeff(); }
    double trace() const { return F.trace().real(); }
    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(F, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
    /// max |F[-w, -v] - conj(F[w, v])|
    double conjugate_symmetry_error() const {
        double err = 0.0;
        const auto n = size();
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                const auto na = static_cast<Eigen::Index>(support.negation(a));
                const auto nb = static_cast<Eigen::Index>(support.negation(b));
                err = std::max(err, std::abs(F(na, nb) - std::conj(F(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)))));
            }
        return err;
    }
    double max_off_diagonal() const {
        Eigen::MatrixXcd off = F;
        off.diagonal().setZero();
        return off.size() ? off.cwiseAbs().maxCoeff() : 0.0;
    }
};

/// q_w = F[w, w], a probability mass function over the support.
struct DiagonalDistribution {
    FrequencySupport support;
    Eigen::VectorXd q;
    Eigen::VectorXd stderr_;  // Monte Carlo standard errors; empty when exact

    double total() const { return q.sum(); }
};

inline DiagonalDistribution diagonal_distribution(const FourierTransform& ft) {
    Eigen::VectorXd q = ft.diagonal().cwiseMax(0.0);
    const double s = q.sum();
    if (!(s > 0.0)) throw NumericError("Fourier transform has zero trace");
    return {ft.support, q / s, {}};
}

/// Sample grid for exact extraction: along dimension j, N_j = 2 max|w_j| + 1
/// equispaced points over one period.
struct SampleGrid {
    std::vector<int> n_per_dim;
    Eigen::MatrixXd points;  // rows
    std::vector<std::vector<int>> indices;
};

inline SampleGrid sample_grid(const FrequencySupport& support) {
    SampleGrid g;
    std::size_t total = 1;
    for (int j = 0; j < support.dims(); ++j) {
        int mx = 0;
        for (int w : support.per_dim(j)) mx = std::max(mx, std::abs(w));
        g.n_per_dim.push_back(2 * mx + 1);
        total *= static_cast<std::size_t>(2 * mx + 1);
    }
    const double evals = static_cast<double>(total) * static_cast<double>(total);
    if (evals > kMaxExactEvaluations)
        throw ResourceError("exact Fourier transform needs " + std::to_string(evals) +
                            " kernel evaluations; use estimate_diagonal instead");
    g.points.resize(static_cast<Eigen::Index>(total), support.dims());
    std::vector<int> idx(static_cast<std::size_t>(support.dims()), 0);
    for (std::size_t r = 0; r < total; ++r) {
        for (int j = 0; j < support.dims(); ++j)
            g.points(static_cast<Eigen::Index>(r), j) = support.period(j) * idx[static_cast<std::size_t>(j)] / g.n_per_dim[static_cast<std::size_t>(j)];
        g.indices.push_back(idx);
        for (std::size_t j = 0; j < idx.size() && ++idx[j] == g.n_per_dim[j]; ++j) idx[j] = 0;
    }
    return g;
}

/// F from kernel values on the sample grid: Kgrid(a, b) = k(x_a, x_b).
inline FourierTransform fourier_transform_from_grid(const FrequencySupport& support, const SampleGrid& grid,
                                                    const Eigen::MatrixXd& Kgrid) {
    const auto G = grid.points.rows();
    const auto n = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXcd A(G, n);
    for (Eigen::Index a = 0; a < G; ++a)
        for (Eigen::Index w = 0; w < n; ++w) {
            // Integer phase arithmetic keeps the grid orthogonality exact.
            double turns = 0.0;
            const auto& f = support[static_cast<std::size_t>(w)];
            for (std::size_t j = 0; j < f.size(); ++j) {
                const long long N = grid.n_per_dim[j];
                const long long r = ((static_cast<long long>(f[j]) * grid.indices[static_cast<std::size_t>(a)][j]) % N + N) % N;
                turns += static_cast<double>(r) / static_cast<double>(N);
            }
            A(a, w) = std::polar(1.0, 2.0 * std::numbers::pi * turns);
        }
    const double g2 = static_cast<double>(G) * static_cast<double>(G);
    Eigen::MatrixXcd F = (A.adjoint() * Kgrid.transpose().cast<cplx>() * A).conjugate() / g2;
    return {support, F};
}

inline void check_exact_budget(const FrequencySupport& support) {
    if (support.cardinality() > static_cast<double>(kMaxExactSupport))
        throw ResourceError("support has " + std::to_string(static_cast<long long>(support.cardinality())) +
                            " frequencies; exact F is capped at " + std::to_string(kMaxExactSupport) +
                            ", use estimate_diagonal instead");
}

/// F[w, v] = N^{-2d} sum_{grid x, y} k(x, y) e^{-i(v.x - w.y)}, exact for a
/// kernel whose frequencies lie in `support`.
template <class Kernel>
FourierTransform kernel_fourier_transform(const Kernel& kernel, const FrequencySupport& support) {
    check_exact_budget(support);
    const auto grid = sample_grid(support);
    const auto G = grid.points.rows();
    Eigen::MatrixXd K(G, G);
    for (Eigen::Index a = 0; a < G; ++a)
        for (Eigen::Index b = 0; b < G; ++b) K(a, b) = kernel(grid.points.row(a).transpose(), grid.points.row(b).transpose());
    return fourier_transform_from_grid(support, grid, K);
}

/// Fidelity-kernel specialization: simulates each grid point once.
inline FourierTransform kernel_fourier_transform(const qsim::EncodingCircuit& circuit) {
    const auto support = frequency_support(circuit);
    check_exact_budget(support);
    const auto grid = sample_grid(support);
    return fourier_transform_from_grid(support, grid, qsim::gram_matrix(circuit, grid.points));
}

/// Monte Carlo estimate of the diagonal distribution from uniform pairs over
/// one period: q_w ~ mean Re[k(x, y) e^{-i w.(x - y)}], clipped at zero and
/// renormalized. Standard errors refer to the unclipped means.
template <class Kernel>
DiagonalDistribution estimate_diagonal(const Kernel& kernel, const FrequencySupport& support, std::size_t n_samples,
                                       Rng& rng) {
    if (n_samples < 2) throw InputError("estimate_diagonal needs at least two samples");
    const auto n = static_cast<Eigen::Index>(support.size());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n), m2 = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd x(support.dims()), y(support.dims());
    for (std::size_t s = 0; s < n_samples; ++s) {
        for (int j = 0; j < support.dims(); ++j) {
            x[j] = uniform(rng, 0.0, support.period(j));
            y[j] = uniform(rng, 0.0, support.period(j));
        }
        const double k = kernel(x, y);
        const Eigen::VectorXd d = x - y;
        for (Eigen::Index w = 0; w < n; ++w) {
            const double v = k * std::cos(support.phase(support[static_cast<std::size_t>(w)], d));
            const double delta = v - mean[w];
            mean[w] += delta / static_cast<double>(s + 1);
            m2[w] += delta * (v - mean[w]);
        }
    }
    const double ns = static_cast<double>(n_samples);
    Eigen::VectorXd se = (m2 / (ns - 1.0) / ns).cwiseSqrt();
    Eigen::VectorXd q = mean.cwiseMax(0.0);
    const double total = q.sum();
    if (!(total > 0.0)) throw NumericError("estimated diagonal is identically zero");
    return {support, q / total, se / total};
}

// ---------------------------------------------------------------------------
// Factorizations F = U diag(P) U^dagger.

enum class FactorKind { ReverseCholesky, Eigen };

struct SpectralFactorization {
    FactorKind kind = FactorKind::ReverseCholesky;
    Eigen::MatrixXcd U;  // unit 2-norm columns
    Eigen::VectorXd P;   // nonnegative, sums to Tr F

    Eigen::MatrixXcd reconstruct() const { return U * P.cast<cplx>().asDiagonal() * U.adjoint(); }
    Eigen::VectorXd probabilities() const { return P / P.sum(); }
    std::size_t size() const { return static_cast<std::size_t>(P.size()); }

    /// Unnormalized feature g(n, x) = u_n^dagger z(x), given z(x).
    cplx feature(std::size_t n, const Eigen::VectorXcd& z) const { return U.col(static_cast<Eigen::Index>(n)).dot(z); }
};

namespace detail {

/// Hermitian copy of F with eigenvalues in [-tol, 0) clipped to zero; throws
/// when the matrix is not PSD within tolerance.
inline Eigen::MatrixXcd psd_repaired(const Eigen::MatrixXcd& F, double tol) {
    Eigen::MatrixXcd H = 0.5 * (F + F.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
    const double mn = es.eigenvalues().minCoeff();
    if (mn < -tol) throw NumericError("matrix is not positive semidefinite (min eigenvalue " + std::to_string(mn) + ")");
    if (mn >= 0.0) return H;
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// F = U diag(p) U^dagger with U upper triangular and unit columns, obtained
/// by eliminating from the highest-norm frequency down. Columns whose weight
/// vanishes are set to the matching unit vector.
inline SpectralFactorization reverse_cholesky(const Eigen::MatrixXcd& F_in) {
    Eigen::MatrixXcd A = detail::psd_repaired(F_in, kPsdTolerance);
    const Eigen::Index n = A.rows();
    const double pivot_tol = 1e-14 * std::max(1.0, A.trace().real());
    SpectralFactorization out{FactorKind::ReverseCholesky, Eigen::MatrixXcd::Zero(n, n), Eigen::VectorXd::Zero(n)};
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        const double piv = A(k, k).real();
        if (piv <= pivot_tol) {
            out.U(k, k) = 1.0;
            continue;
        }
        const Eigen::VectorXcd v = A.col(k).head(k + 1) / std::sqrt(piv);
        A.topLeftCorner(k + 1, k + 1) -= v * v.adjoint();
        const double w = v.squaredNorm();
        out.P[k] = w;
        out.U.col(k).head(k + 1) = v / std::sqrt(w);
    }
    return out;
}

inline SpectralFactorization reverse_cholesky(const FourierTransform& ft) { return reverse_cholesky(ft.F); }

/// Unitary eigendecomposition F = U diag(v) U^dagger. Decoupled blocks of F
/// are diagonalized separately, and within a block eigenvector columns are
/// matched to frequency indices by largest |U_nn| so that a diagonal F yields
/// U = I. Columns are phased to make U_nn real and nonnegative.
inline SpectralFactorization eigen_factorization(const Eigen::MatrixXcd& F_in) {
    const Eigen::MatrixXcd A = detail::psd_repaired(F_in, kPsdTolerance);
    const Eigen::Index n = A.rows();
    const double trace = A.trace().real();
    const double link_tol = 1e-13 * std::max(1.0, A.cwiseAbs().maxCoeff());

    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    const auto root = [&](Eigen::Index i) {
        while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
        return i;
    };
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::abs(A(i, j)) > link_tol) parent[static_cast<std::size_t>(root(j))] = root(i);
    std::map<Eigen::Index, std::vector<Eigen::Index>> blocks;
    for (Eigen::Index i = 0; i < n; ++i) blocks[root(i)].push_back(i);

    SpectralFactorization out{FactorKind::Eigen, Eigen::MatrixXcd::Zero(n, n), Eigen::VectorXd::Zero(n)};
    for (const auto& [r, members] : blocks) {
        const auto b = static_cast<Eigen::Index>(members.size());
        Eigen::MatrixXcd sub(b, b);
        for (Eigen::Index i = 0; i < b; ++i)
            for (Eigen::Index j = 0; j < b; ++j) sub(i, j) = A(members[static_cast<std::size_t>(i)], members[static_cast<std::size_t>(j)]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub);
        if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
        const Eigen::MatrixXcd& V = es.eigenvectors();

        // Greedy assignment: eigenvector c -> row slot with the largest |V(slot, c)|.
        std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> cand;
        for (Eigen::Index i = 0; i < b; ++i)
            for (Eigen::Index c = 0; c < b; ++c) cand.emplace_back(-std::abs(V(i, c)), i, c);
        std::sort(cand.begin(), cand.end());
        std::vector<bool> row_used(static_cast<std::size_t>(b), false), col_used(static_cast<std::size_t>(b), false);
        for (const auto& [negmag, i, c] : cand) {
            if (row_used[static_cast<std::size_t>(i)] || col_used[static_cast<std::size_t>(c)]) continue;
            row_used[static_cast<std::size_t>(i)] = col_used[static_cast<std::size_t>(c)] = true;
            const Eigen::Index slot = members[static_cast<std::size_t>(i)];
            cplx phase = V(i, c);
            phase = std::abs(phase) > 0.0 ? std::conj(phase) / std::abs(phase) : cplx{1.0, 0.0};
            for (Eigen::Index k = 0; k < b; ++k) out.U(members[static_cast<std::size_t>(k)], slot) = V(k, c) * phase;
            out.P[slot] = std::max(0.0, es.eigenvalues()[c]);
        }
    }
    const double s = out.P.sum();
    if (s > 0.0) out.P *= trace / s;
    return out;
}

inline SpectralFactorization eigen_factorization(const FourierTransform& ft) { return eigen_factorization(ft.F); }

/// zeta_n = ||u_n||_1 [ |U_nn| ||w_n|| + B (||u_n||_1 - |U_nn|) ], B = max ||w||.
inline double nonstationarity_measure(const SpectralFactorization& eig, const FrequencySupport& support, std::size_t n) {
    if (n >= eig.size()) throw InputError("nonstationarity index out of range");
    const auto col = eig.U.col(static_cast<Eigen::Index>(n));
    const double l1 = col.cwiseAbs().sum();
    const double unn = std::abs(col[static_cast<Eigen::Index>(n)]);
    return l1 * (unn * support.norm(n) + support.max_norm() * (l1 - unn));
}

inline double nonstationarity_measure(const FourierTransform& ft, std::size_t n) {
    return nonstationarity_measure(eigen_factorization(ft), ft.support, n);
}

}  // namespace rffdq::spectrum
