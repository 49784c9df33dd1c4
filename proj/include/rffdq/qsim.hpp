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
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rffdq/errors.hpp"
#include "rffdq/random.hpp"

/// Dense statevector simulation of Hamiltonian-encoded circuits and the
/// fidelity kernels they induce.
///
/// Qubit q is bit q of the basis-state index (little endian). Rotations follow
/// exp(-i theta sigma / 2) and the phase shift is diag(1, e^{i theta}).
namespace rffdq::qsim {

using cplx = std::complex<double>;

inline constexpr int kMaxQubits = 24;

/// Exact rational multiplier applied to a bound input coordinate.
struct Rational {
    std::int64_t num = 1;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
        if (den == 0) throw InputError("rational scale with zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const auto g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

enum class GateKind { Hadamard, RotX, RotY, RotZ, Phase, CNOT };

inline std::string gate_name(GateKind k) {
    switch (k) {
        case GateKind::Hadamard: return "H";
        case GateKind::RotX: return "RX";
        case GateKind::RotY: return "RY";
        case GateKind::RotZ: return "RZ";
        case GateKind::Phase: return "P";
        case GateKind::CNOT: return "CNOT";
    }
    return "?";
}

inline bool is_parametric(GateKind k) {
    return k == GateKind::RotX || k == GateKind::RotY || k == GateKind::RotZ || k == GateKind::Phase;
}

struct GateSpec {
    GateKind kind = GateKind::Hadamard;
    int target = 0;
    int control = -1;                 // CNOT only
    std::optional<int> data_index;    // angle = scale * x[data_index]
    double angle = 0.0;               // used when data_index is empty
    Rational scale{1, 1};

    static GateSpec hadamard(int q) {
        GateSpec g;
        g.target = q;
        return g;
    }
    static GateSpec cnot(int control, int target) {
        GateSpec g;
        g.kind = GateKind::CNOT;
        g.target = target;
        g.control = control;
        return g;
    }
    static GateSpec bound(GateKind k, int q, int j, Rational s = {1, 1}) {
        GateSpec g;
        g.kind = k;
        g.target = q;
        g.data_index = j;
        g.scale = s;
        return g;
    }
    static GateSpec fixed(GateKind k, int q, double theta) {
        GateSpec g;
        g.kind = k;
        g.target = q;
        g.angle = theta;
        return g;
    }

    double resolved_angle(const Eigen::Ref<const Eigen::VectorXd>& x) const {
        return data_index ? scale.value() * x[*data_index] : angle;
    }
};

struct EncodingCircuit {
    int n_qubits = 1;
    int dim = 1;
    std::vector<std::vector<GateSpec>> layers;

    int layer_count() const { return static_cast<int>(layers.size()); }

    /// Throws InputError on structural violations; returns human-readable
    /// warnings (currently: input coordinates no gate reads).
    std::vector<std::string> validate() const {
        if (n_qubits < 1) throw InputError("circuit needs at least one qubit");
        if (n_qubits > kMaxQubits)
            throw ResourceError("statevector limited to " + std::to_string(kMaxQubits) + " qubits");
        if (dim < 1) throw InputError("input dimension must be positive");
        std::vector<bool> bound(static_cast<std::size_t>(dim), false);
        for (const auto& layer : layers) {
            for (const auto& g : layer) {
                if (g.target < 0 || g.target >= n_qubits) throw InputError("gate target qubit out of range");
                if (g.kind == GateKind::CNOT) {
                    if (g.control < 0 || g.control >= n_qubits) throw InputError("CNOT control out of range");
                    if (g.control == g.target) throw InputError("CNOT control equals target");
                    if (g.data_index) throw InputError("CNOT cannot bind data");
                }
                if (g.kind == GateKind::Hadamard && g.data_index) throw InputError("Hadamard cannot bind data");
                if (g.data_index) {
                    if (*g.data_index < 0 || *g.data_index >= dim) throw InputError("data binding index out of range");
                    if (g.scale.den <= 0) throw InputError("scale denominator must be positive");
                    bound[static_cast<std::size_t>(*g.data_index)] = true;
                }
            }
        }
        std::vector<std::string> warnings;
        for (int j = 0; j < dim; ++j)
            if (!bound[static_cast<std::size_t>(j)])
                warnings.push_back("input dimension " + std::to_string(j) + " is not bound by any gate");
        return warnings;
    }

    /// All data-bound gates reading coordinate j, in circuit order.
    std::vector<GateSpec> gates_on_dimension(int j) const {
        std::vector<GateSpec> out;
        for (const auto& layer : layers)
            for (const auto& g : layer)
                if (g.data_index && *g.data_index == j) out.push_back(g);
        return out;
    }
};

class StateVector {
public:
    explicit StateVector(int n_qubits) : n_(n_qubits) {
        if (n_qubits < 0 || n_qubits > kMaxQubits)
            throw ResourceError("statevector limited to " + std::to_string(kMaxQubits) + " qubits");
        amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
        amps_[0] = 1.0;
    }

    int qubits() const { return n_; }
    std::size_t size() const { return amps_.size(); }
    const std::vector<cplx>& amplitudes() const { return amps_; }
    cplx operator[](std::size_t i) const { return amps_[i]; }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return s;
    }

    /// Applies the 2x2 unitary [[m00, m01], [m10, m11]] to qubit q.
    void apply_single(int q, cplx m00, cplx m01, cplx m10, cplx m11) {
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & bit) continue;
            const cplx a0 = amps_[i], a1 = amps_[i | bit];
            amps_[i] = m00 * a0 + m01 * a1;
            amps_[i | bit] = m10 * a0 + m11 * a1;
        }
    }

    void apply_cnot(int control, int target) {
        const std::size_t cb = std::size_t{1} << control, tb = std::size_t{1} << target;
        for (std::size_t i = 0; i < amps_.size(); ++i)
            if ((i & cb) && !(i & tb)) std::swap(amps_[i], amps_[i | tb]);
    }

    void apply(const GateSpec& g, const Eigen::Ref<const Eigen::VectorXd>& x) {
        static const double r = 1.0 / std::sqrt(2.0);
        const cplx I{0.0, 1.0};
        switch (g.kind) {
            case GateKind::Hadamard: apply_single(g.target, r, r, r, -r); return;
            case GateKind::CNOT: apply_cnot(g.control, g.target); return;
            default: break;
        }
        const double th = g.resolved_angle(x);
        const double c = std::cos(th / 2), s = std::sin(th / 2);
        switch (g.kind) {
            case GateKind::RotX: apply_single(g.target, c, -I * s, -I * s, c); break;
            case GateKind::RotY: apply_single(g.target, c, -s, s, c); break;
            case GateKind::RotZ: apply_single(g.target, std::exp(-I * (th / 2)), 0.0, 0.0, std::exp(I * (th / 2))); break;
            case GateKind::Phase: apply_single(g.target, 1.0, 0.0, 0.0, std::exp(I * th)); break;
            default: break;
        }
    }

    /// <this|other>
    cplx inner(const StateVector& other) const {
        cplx s{0.0, 0.0};
        for (std::size_t i = 0; i < amps_.size(); ++i) s += std::conj(amps_[i]) * other.amps_[i];
        return s;
    }

private:
    int n_;
    std::vector<cplx> amps_;
};

/// U(x)|0...0>.
inline StateVector apply_circuit(const EncodingCircuit& circuit, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() != circuit.dim)
        throw InputError("input has dimension " + std::to_string(x.size()) + ", circuit expects " +
                         std::to_string(circuit.dim));
    StateVector psi(circuit.n_qubits);
    for (const auto& layer : circuit.layers)
        for (const auto& g : layer) psi.apply(g, x);
    return psi;
}

/// |<0|U^dagger(y) U(x)|0>|^2
inline double fidelity_kernel(const EncodingCircuit& circuit, const Eigen::Ref<const Eigen::VectorXd>& x,
                              const Eigen::Ref<const Eigen::VectorXd>& y) {
    if (x.size() != y.size()) throw InputError("kernel arguments differ in dimension");
    return std::norm(apply_circuit(circuit, y).inner(apply_circuit(circuit, x)));
}

/// Callable wrapper so a circuit can be passed wherever a kernel is expected.
struct FidelityKernel {
    EncodingCircuit circuit;
    double operator()(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) const {
        return fidelity_kernel(circuit, x, y);
    }
};

struct ShotModel {
    std::optional<std::uint64_t> shots;  // empty = infinite
    std::uint64_t rng_seed = 0;

    static ShotModel exact() { return {}; }
    static ShotModel finite(std::uint64_t t, std::uint64_t seed) {
        if (t < 1) throw InputError("shot count must be at least 1");
        return {t, seed};
    }
    bool is_exact() const { return !shots.has_value(); }
};

/// Mean of `shots` Bernoulli(k_true) outcomes.
inline double estimate_with_shots(double k_true, std::uint64_t shots, Rng& rng) {
    if (!(k_true >= 0.0 && k_true <= 1.0)) throw InputError("kernel value outside [0, 1]");
    if (shots < 1) throw InputError("shot count must be at least 1");
    return static_cast<double>(binomial(rng, shots, k_true)) / static_cast<double>(shots);
}

/// Simulates every point once and returns the statevectors.
inline std::vector<StateVector> encode_points(const EncodingCircuit& circuit, const Eigen::MatrixXd& X) {
    std::vector<StateVector> states;
    states.reserve(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) states.push_back(apply_circuit(circuit, X.row(i).transpose()));
    return states;
}

/// Resamples the off-diagonal entries of an exact Gram matrix with the same
/// per-pair streams `gram_matrix` uses.
inline Eigen::MatrixXd apply_shot_noise(const Eigen::MatrixXd& K, const ShotModel& shot_model) {
    if (K.rows() != K.cols()) throw InputError("Gram matrix must be square");
    if (shot_model.is_exact()) return K;
    Eigen::MatrixXd out = K;
    for (Eigen::Index i = 0; i < K.rows(); ++i)
        for (Eigen::Index j = 0; j < i; ++j) {
            auto rng = make_rng(shot_model.rng_seed, {static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(i)});
            out(i, j) = out(j, i) = estimate_with_shots(std::clamp(K(i, j), 0.0, 1.0), *shot_model.shots, rng);
        }
    return out;
}

/// Gram matrix over the rows of X. With finite shots, each unordered pair is
/// sampled once from its own stream derived from (seed, i, j); the diagonal is 1.
inline Eigen::MatrixXd gram_matrix(const EncodingCircuit& circuit, const Eigen::MatrixXd& X,
                                   const ShotModel& shot_model = ShotModel::exact()) {
    if (X.rows() < 1) throw InputError("gram matrix needs at least one point");
    const auto states = encode_points(circuit, X);
    const Eigen::Index m = X.rows();
    Eigen::MatrixXd K(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        K(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            double k = std::norm(states[static_cast<std::size_t>(j)].inner(states[static_cast<std::size_t>(i)]));
            k = std::clamp(k, 0.0, 1.0);
            if (!shot_model.is_exact()) {
                auto rng = make_rng(shot_model.rng_seed, {static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(i)});
                k = estimate_with_shots(k, *shot_model.shots, rng);
            }
            K(i, j) = K(j, i) = k;
        }
    }
    return K;
}

/// Exact kernel values k(a_i, b_j); rows index A, columns index B.
inline Eigen::MatrixXd cross_gram(const EncodingCircuit& circuit, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    const auto sa = encode_points(circuit, A);
    const auto sb = encode_points(circuit, B);
    Eigen::MatrixXd K(A.rows(), B.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < B.rows(); ++j)
            K(i, j) = std::norm(sb[static_cast<std::size_t>(j)].inner(sa[static_cast<std::size_t>(i)]));
    return K;
}

/// Same as cross_gram, then each entry replaced by a shot estimate drawn from
/// the stream (seed, i, j).
inline Eigen::MatrixXd noisy_cross_gram(const EncodingCircuit& circuit, const Eigen::MatrixXd& A,
                                        const Eigen::MatrixXd& B, const ShotModel& shot_model) {
    Eigen::MatrixXd K = cross_gram(circuit, A, B);
    if (shot_model.is_exact()) return K;
    for (Eigen::Index i = 0; i < K.rows(); ++i)
        for (Eigen::Index j = 0; j < K.cols(); ++j) {
            auto rng = make_rng(shot_model.rng_seed, {0xC0FFEEULL, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)});
            K(i, j) = estimate_with_shots(std::clamp(K(i, j), 0.0, 1.0), *shot_model.shots, rng);
        }
    return K;
}

// ---------------------------------------------------------------------------
// Builtin feature maps.

/// One qubit, one data-bound rotation about `axis` with unit scale.
inline EncodingCircuit single_rotation(GateKind axis = GateKind::RotX) {
    if (!is_parametric(axis)) throw InputError("single_rotation needs a parametric gate kind");
    EncodingCircuit c;
    c.n_qubits = 1;
    c.dim = 1;
    c.layers = {{GateSpec::bound(axis, 0, 0)}};
    return c;
}

/// The layered phase / Hadamard / ring-CNOT / RY feature map.
///
/// Per layer, qubit q reads slots 2q and 2q+1:
///   P(x[2q+1]) H P(x[2q])  -- CNOT ring --  RY(x[2q]) P(x[2q+1]).
/// With d < 2n, slots j >= d are left unbound (their gates are dropped), so
/// every bound coordinate still sees exactly two encoding gates per layer.
inline EncodingCircuit ring_encoding(int n_qubits, int n_layers, std::optional<int> dim = std::nullopt) {
    if (n_qubits < 1 || n_layers < 0) throw InputError("ring encoding needs n_qubits >= 1 and L >= 0");
    const int d = dim.value_or(2 * n_qubits);
    if (d < 1 || d > 2 * n_qubits) throw InputError("ring encoding dimension must lie in [1, 2 n_qubits]");
    EncodingCircuit c;
    c.n_qubits = n_qubits;
    c.dim = d;
    for (int l = 0; l < n_layers; ++l) {
        std::vector<GateSpec> layer;
        for (int q = 0; q < n_qubits; ++q) {
            if (2 * q + 1 < d) layer.push_back(GateSpec::bound(GateKind::Phase, q, 2 * q + 1));
            layer.push_back(GateSpec::hadamard(q));
            if (2 * q < d) layer.push_back(GateSpec::bound(GateKind::Phase, q, 2 * q));
        }
        if (n_qubits > 1) {
            for (int q = 0; q + 1 < n_qubits; ++q) layer.push_back(GateSpec::cnot(q, q + 1));
            layer.push_back(GateSpec::cnot(n_qubits - 1, 0));
        }
        for (int q = 0; q < n_qubits; ++q) {
            if (2 * q < d) layer.push_back(GateSpec::bound(GateKind::RotY, q, 2 * q));
            if (2 * q + 1 < d) layer.push_back(GateSpec::bound(GateKind::Phase, q, 2 * q + 1));
        }
        c.layers.push_back(std::move(layer));
    }
    return c;
}

/// Sample variance of k(x, y) over uniformly random input pairs in [0, period)^d;
/// a small value signals exponential concentration of the kernel.
template <class Kernel>
double kernel_variance(const Kernel& kernel, int dim, std::size_t n_pairs, Rng& rng,
                       double period = 2.0 * std::numbers::pi) {
    if (n_pairs < 2) throw InputError("kernel_variance needs at least two pairs");
    double mean = 0.0, m2 = 0.0;
    Eigen::VectorXd x(dim), y(dim);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        for (int j = 0; j < dim; ++j) { x[j] = uniform(rng, 0.0, period); y[j] = uniform(rng, 0.0, period); }
        const double k = kernel(x, y);
        const double delta = k - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (k - mean);
    }
    return m2 / static_cast<double>(n_pairs - 1);
}

}  // namespace rffdq::qsim
