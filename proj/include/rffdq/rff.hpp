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
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rffdq/errors.hpp"
#include "rffdq/random.hpp"
#include "rffdq/spectrum.hpp"

/// Frequency sampling distributions and random feature maps: trigonometric
/// pairs for shift-invariant surrogates and sampled columns of a factorized
/// Fourier transform for non-stationary kernels.
namespace rffdq::rff {

using spectrum::cplx;
using spectrum::Freq;
using spectrum::FrequencySupport;

enum class Strategy { Uniform, Convolutional, TruncatedConvolutional, Diagonal, SqrtDiagonal, CoefficientAligned, Custom };

inline std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Uniform: return "uniform";
        case Strategy::Convolutional: return "convolutional";
        case Strategy::TruncatedConvolutional: return "truncated";
        case Strategy::Diagonal: return "diagonal";
        case Strategy::SqrtDiagonal: return "sqrt-diagonal";
        case Strategy::CoefficientAligned: return "aligned";
        case Strategy::Custom: return "custom";
    }
    return "?";
}

inline Strategy parse_strategy(const std::string& s) {
    for (auto k : {Strategy::Uniform, Strategy::Convolutional, Strategy::TruncatedConvolutional, Strategy::Diagonal,
                   Strategy::SqrtDiagonal, Strategy::CoefficientAligned, Strategy::Custom})
        if (strategy_name(k) == s) return k;
    if (s == "truncated-convolutional") return Strategy::TruncatedConvolutional;
    throw ConfigError("unknown sampling strategy '" + s + "'");
}

/// Probability mass function over frequency vectors. Separable distributions
/// keep one factor per dimension and never materialize the joint table.
class SamplingDistribution {
public:
    static SamplingDistribution product(Strategy tag, std::vector<std::vector<int>> dim_freqs,
                                        std::vector<std::vector<double>> dim_weights, std::vector<double> base) {
        if (dim_freqs.size() != dim_weights.size() || dim_freqs.empty()) throw InputError("product distribution shape mismatch");
        SamplingDistribution d;
        d.tag_ = tag;
        d.separable_ = true;
        d.base_ = std::move(base);
        if (d.base_.empty()) d.base_.assign(dim_freqs.size(), 1.0);
        for (std::size_t j = 0; j < dim_freqs.size(); ++j) {
            auto w = normalized(dim_weights[j]);
            if (w.size() != dim_freqs[j].size()) throw InputError("product distribution factor length mismatch");
            d.samplers_.emplace_back(w);
            d.dim_probs_.push_back(std::move(w));
        }
        d.dim_freqs_ = std::move(dim_freqs);
        return d;
    }

    static SamplingDistribution joint(Strategy tag, FrequencySupport support, const Eigen::VectorXd& weights) {
        if (static_cast<std::size_t>(weights.size()) != support.size()) throw InputError("weights do not match support size");
        SamplingDistribution d;
        d.tag_ = tag;
        d.separable_ = false;
        d.base_ = support.base();
        d.probs_ = normalized(std::vector<double>(weights.data(), weights.data() + weights.size()));
        d.joint_sampler_ = DiscreteSampler(d.probs_);
        d.support_ = std::move(support);
        return d;
    }

    Strategy strategy() const { return tag_; }
    bool separable() const { return separable_; }
    int dims() const { return separable_ ? static_cast<int>(dim_freqs_.size()) : support_.dims(); }
    const std::vector<double>& base() const { return base_; }
    const std::vector<std::vector<int>>& dim_freqs() const { return dim_freqs_; }
    const std::vector<std::vector<double>>& dim_probs() const { return dim_probs_; }

    double prob(const Freq& w) const {
        if (static_cast<int>(w.size()) != dims()) throw InputError("frequency dimension mismatch");
        if (!separable_) {
            const auto i = support_.find(w);
            return i ? probs_[*i] : 0.0;
        }
        double p = 1.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            const auto& f = dim_freqs_[j];
            const auto it = std::find(f.begin(), f.end(), w[j]);
            if (it == f.end()) return 0.0;
            p *= dim_probs_[j][static_cast<std::size_t>(it - f.begin())];
        }
        return p;
    }

    double max_prob() const {
        if (!separable_) return *std::max_element(probs_.begin(), probs_.end());
        double p = 1.0;
        for (const auto& f : dim_probs_) p *= *std::max_element(f.begin(), f.end());
        return p;
    }

    /// Probabilities on every frequency of an enumerated support.
    Eigen::VectorXd probs_on(const FrequencySupport& sup) const {
        Eigen::VectorXd p(static_cast<Eigen::Index>(sup.size()));
        for (std::size_t i = 0; i < sup.size(); ++i) p[static_cast<Eigen::Index>(i)] = prob(sup[i]);
        return p;
    }

    Freq sample(Rng& rng) const {
        if (!separable_) return support_[joint_sampler_(rng)];
        Freq w(dim_freqs_.size());
        for (std::size_t j = 0; j < w.size(); ++j) w[j] = dim_freqs_[j][samplers_[j](rng)];
        return w;
    }

    /// Number of frequencies with nonzero mass along dimension j (separable only).
    std::size_t support_size(int j) const {
        std::size_t n = 0;
        for (double p : dim_probs_.at(static_cast<std::size_t>(j))) n += p > 0.0;
        return n;
    }

private:
    static std::vector<double> normalized(std::vector<double> w) {
        double s = 0.0;
        for (double v : w) {
            if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("distribution weights must be finite and nonnegative");
            s += v;
        }
        if (!(s > 0.0)) throw InputError("distribution weights are all zero");
        for (auto& v : w) v /= s;
        return w;
    }

    Strategy tag_ = Strategy::Custom;
    bool separable_ = false;
    std::vector<double> base_;
    std::vector<std::vector<int>> dim_freqs_;
    std::vector<std::vector<double>> dim_probs_;
    std::vector<DiscreteSampler> samplers_;
    FrequencySupport support_;
    std::vector<double> probs_;
    DiscreteSampler joint_sampler_;
};

/// Inputs some strategies need: q (Diagonal, SqrtDiagonal), Fourier
/// coefficients c (CoefficientAligned), raw weights (Custom). All indexed by
/// the ascending order of the support.
struct DistributionParams {
    std::optional<Eigen::VectorXd> q;
    std::optional<Eigen::VectorXcd> c;
    std::optional<Eigen::VectorXd> weights;
};

/// Per-dimension truncation rule: keep |w| <= floor(max |w| / 2).
inline int truncation_limit(const std::vector<int>& freqs) {
    int mx = 0;
    for (int w : freqs) mx = std::max(mx, std::abs(w));
    return mx / 2;
}

inline SamplingDistribution make_distribution(Strategy tag, const FrequencySupport& support,
                                              const DistributionParams& params = {}) {
    const auto need = [&](const auto& opt, const char* what) -> const auto& {
        if (!opt) throw InputError(std::string("strategy '") + strategy_name(tag) + "' needs " + what);
        if (static_cast<std::size_t>(opt->size()) != support.size()) throw InputError(std::string(what) + " does not match support size");
        return *opt;
    };
    switch (tag) {
        case Strategy::Uniform: {
            std::vector<std::vector<double>> w;
            for (const auto& f : support.per_dim()) w.emplace_back(f.size(), 1.0);
            return SamplingDistribution::product(tag, support.per_dim(), w, support.base());
        }
        case Strategy::Convolutional:
        case Strategy::TruncatedConvolutional: {
            if (!support.has_counts())
                throw InputError("convolutional sampling needs a support derived from an encoding circuit");
            std::vector<std::vector<double>> w;
            for (int j = 0; j < support.dims(); ++j) {
                const auto& f = support.per_dim(j);
                const auto& cnt = support.counts(j);
                const int lim = truncation_limit(f);
                std::vector<double> wj(f.size());
                for (std::size_t i = 0; i < f.size(); ++i) {
                    const bool keep = tag == Strategy::Convolutional || std::abs(f[i]) <= lim;
                    wj[i] = keep ? static_cast<double>(cnt[i]) : 0.0;
                }
                w.push_back(std::move(wj));
            }
            return SamplingDistribution::product(tag, support.per_dim(), w, support.base());
        }
        case Strategy::Diagonal: return SamplingDistribution::joint(tag, support, need(params.q, "q"));
        case Strategy::SqrtDiagonal: {
            const auto& q = need(params.q, "q");
            if ((q.array() < 0.0).any()) throw InputError("q has negative entries");
            return SamplingDistribution::joint(tag, support, q.cwiseSqrt());
        }
        case Strategy::CoefficientAligned:
            return SamplingDistribution::joint(tag, support, need(params.c, "Fourier coefficients").cwiseAbs());
        case Strategy::Custom: return SamplingDistribution::joint(tag, support, need(params.weights, "weights"));
    }
    throw InputError("unknown strategy");
}

inline std::vector<Freq> sample_frequencies(const SamplingDistribution& dist, std::size_t D, Rng& rng) {
    if (D < 1) throw InputError("need at least one frequency sample");
    std::vector<Freq> out;
    out.reserve(D);
    for (std::size_t i = 0; i < D; ++i) out.push_back(dist.sample(rng));
    return out;
}

// ---------------------------------------------------------------------------

enum class FeatureKind { TrigPairs, CholeskyFeatures, EigenFeatures };

inline std::string feature_kind_name(FeatureKind k) {
    switch (k) {
        case FeatureKind::TrigPairs: return "trig";
        case FeatureKind::CholeskyFeatures: return "cholesky";
        case FeatureKind::EigenFeatures: return "eigen";
    }
    return "?";
}

/// Finite random-feature embedding.
///
/// TrigPairs: phi(x) = (cos(w_1.x), ..., cos(w_D.x), sin(w_1.x), ..., sin(w_D.x)) / sqrt(D).
/// Cholesky/Eigen: phi(x)_i = g(n_i, x) / sqrt(D) with g(n, x) = u_n^dagger z(x);
/// `evaluate` returns the realification (Re phi, Im phi), whose dot product is
/// Re s(x, y).
class FeatureMap {
public:
    static FeatureMap trig(std::vector<Freq> freqs, std::vector<double> base = {}) {
        if (freqs.empty()) throw InputError("feature map needs at least one frequency");
        FeatureMap m;
        m.kind_ = FeatureKind::TrigPairs;
        m.dim_ = static_cast<int>(freqs.front().size());
        m.base_ = base.empty() ? std::vector<double>(static_cast<std::size_t>(m.dim_), 1.0) : std::move(base);
        for (const auto& w : freqs)
            if (static_cast<int>(w.size()) != m.dim_) throw InputError("frequencies differ in dimension");
        m.freqs_ = std::move(freqs);
        m.D_ = m.freqs_.size();
        return m;
    }

    /// Complex features from columns of a factorization. `weights` defaults to
    /// 1/sqrt(D) for every sampled column.
    static FeatureMap columns(FeatureKind kind, std::shared_ptr<const spectrum::SpectralFactorization> fact,
                              FrequencySupport support, std::vector<std::size_t> cols,
                              std::optional<Eigen::VectorXd> weights = std::nullopt) {
        if (cols.empty()) throw InputError("feature map needs at least one column");
        FeatureMap m;
        m.kind_ = kind;
        m.dim_ = support.dims();
        m.base_ = support.base();
        m.D_ = cols.size();
        m.weights_ = weights ? *weights
                             : Eigen::VectorXd::Constant(static_cast<Eigen::Index>(cols.size()),
                                                         1.0 / std::sqrt(static_cast<double>(cols.size())));
        if (static_cast<std::size_t>(m.weights_.size()) != cols.size()) throw InputError("weight count mismatch");
        // Unique columns, evaluated once per point.
        std::vector<std::size_t> uniq = cols;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        m.Usel_.resize(fact->U.rows(), static_cast<Eigen::Index>(uniq.size()));
        for (std::size_t k = 0; k < uniq.size(); ++k) {
            if (uniq[k] >= fact->size()) throw InputError("column index out of range");
            m.Usel_.col(static_cast<Eigen::Index>(k)) = fact->U.col(static_cast<Eigen::Index>(uniq[k]));
        }
        for (auto c : cols)
            m.slot_.push_back(static_cast<std::size_t>(std::lower_bound(uniq.begin(), uniq.end(), c) - uniq.begin()));
        m.cols_ = std::move(cols);
        m.fact_ = std::move(fact);
        m.support_ = std::move(support);
        return m;
    }

    FeatureKind kind() const { return kind_; }
    std::size_t D() const { return D_; }
    int input_dim() const { return dim_; }
    std::size_t output_dim() const { return 2 * D_; }
    const std::vector<Freq>& frequencies() const { return freqs_; }
    const std::vector<double>& base() const { return base_; }
    const std::vector<std::size_t>& sampled_columns() const { return cols_; }

    /// Complex features (Cholesky/Eigen kinds only).
    Eigen::VectorXcd evaluate_complex(const Eigen::Ref<const Eigen::VectorXd>& x) const {
        if (kind_ == FeatureKind::TrigPairs) throw InputError("trig feature map has no complex form");
        const Eigen::VectorXcd z = support_.z(x);
        const Eigen::VectorXcd g = Usel_.adjoint() * z;
        Eigen::VectorXcd out(static_cast<Eigen::Index>(D_));
        for (std::size_t i = 0; i < D_; ++i) out[static_cast<Eigen::Index>(i)] = weights_[static_cast<Eigen::Index>(i)] * g[static_cast<Eigen::Index>(slot_[i])];
        return out;
    }

    Eigen::VectorXd evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
        if (x.size() != dim_) throw InputError("point dimension does not match feature map");
        const auto D = static_cast<Eigen::Index>(D_);
        Eigen::VectorXd out(2 * D);
        if (kind_ == FeatureKind::TrigPairs) {
            const double s = 1.0 / std::sqrt(static_cast<double>(D_));
            for (Eigen::Index i = 0; i < D; ++i) {
                double ph = 0.0;
                const auto& w = freqs_[static_cast<std::size_t>(i)];
                for (int j = 0; j < dim_; ++j) ph += base_[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(j)] * x[j];
                out[i] = s * std::cos(ph);
                out[D + i] = s * std::sin(ph);
            }
            return out;
        }
        const Eigen::VectorXcd c = evaluate_complex(x);
        out.head(D) = c.real();
        out.tail(D) = c.imag();
        return out;
    }

    /// Rows of X mapped to feature rows, optionally scaled.
    Eigen::MatrixXd transform(const Eigen::MatrixXd& X, double scale = 1.0) const {
        Eigen::MatrixXd Z(X.rows(), static_cast<Eigen::Index>(output_dim()));
        for (Eigen::Index i = 0; i < X.rows(); ++i) Z.row(i) = scale * evaluate(X.row(i).transpose()).transpose();
        return Z;
    }

    /// s(x, y) = phi(y)^dagger phi(x) (real part for the realified maps).
    double approx(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) const {
        return evaluate(x).dot(evaluate(y));
    }

    cplx approx_complex(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) const {
        if (kind_ == FeatureKind::TrigPairs) return approx(x, y);
        return evaluate_complex(y).dot(evaluate_complex(x));
    }

private:
    FeatureKind kind_ = FeatureKind::TrigPairs;
    std::size_t D_ = 0;
    int dim_ = 0;
    std::vector<double> base_;
    std::vector<Freq> freqs_;
    std::shared_ptr<const spectrum::SpectralFactorization> fact_;
    FrequencySupport support_;
    std::vector<std::size_t> cols_;
    std::vector<std::size_t> slot_;
    Eigen::MatrixXcd Usel_;
    Eigen::VectorXd weights_;
};

inline FeatureMap trig_feature_map(std::vector<Freq> freqs, std::vector<double> base = {}) {
    return FeatureMap::trig(std::move(freqs), std::move(base));
}

/// Draws D column indices from the factorization weights and builds g-features.
inline FeatureMap sample_column_features(std::shared_ptr<const spectrum::SpectralFactorization> fact,
                                         const FrequencySupport& support, std::size_t D, Rng& rng) {
    if (D < 1) throw InputError("need at least one random feature");
    const Eigen::VectorXd p = fact->probabilities();
    DiscreteSampler sampler(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
    std::vector<std::size_t> cols(D);
    for (auto& c : cols) c = sampler(rng);
    const auto kind = fact->kind == spectrum::FactorKind::ReverseCholesky ? FeatureKind::CholeskyFeatures
                                                                          : FeatureKind::EigenFeatures;
    return FeatureMap::columns(kind, std::move(fact), support, std::move(cols));
}

/// Random features from the reverse-Cholesky (upper triangular) factorization.
inline FeatureMap approx_kernel_cholesky(const spectrum::FourierTransform& ft, std::size_t D, Rng& rng) {
    auto fact = std::make_shared<const spectrum::SpectralFactorization>(spectrum::reverse_cholesky(ft));
    return sample_column_features(std::move(fact), ft.support, D, rng);
}

/// Random features from the eigendecomposition.
inline FeatureMap approx_kernel_eigen(const spectrum::FourierTransform& ft, std::size_t D, Rng& rng) {
    auto fact = std::make_shared<const spectrum::SpectralFactorization>(spectrum::eigen_factorization(ft));
    return sample_column_features(std::move(fact), ft.support, D, rng);
}

/// Deterministic map using every column with weight sqrt(P_n); reproduces the
/// kernel exactly.
inline FeatureMap exact_feature_map(std::shared_ptr<const spectrum::SpectralFactorization> fact,
                                    const FrequencySupport& support) {
    std::vector<std::size_t> cols(fact->size());
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    Eigen::VectorXd w = fact->P.cwiseMax(0.0).cwiseSqrt();
    const auto kind = fact->kind == spectrum::FactorKind::ReverseCholesky ? FeatureKind::CholeskyFeatures
                                                                          : FeatureKind::EigenFeatures;
    return FeatureMap::columns(kind, std::move(fact), support, std::move(cols), w);
}

struct ErrorStats {
    double max = 0.0;
    double mean = 0.0;
};

struct PointPair {
    Eigen::VectorXd x, y;
};

/// Pairs drawn uniformly over one period per dimension.
inline std::vector<PointPair> random_pairs(const FrequencySupport& support, std::size_t n, Rng& rng) {
    std::vector<PointPair> out;
    for (std::size_t i = 0; i < n; ++i) {
        PointPair p{Eigen::VectorXd(support.dims()), Eigen::VectorXd(support.dims())};
        for (int j = 0; j < support.dims(); ++j) {
            p.x[j] = uniform(rng, 0.0, support.period(j));
            p.y[j] = uniform(rng, 0.0, support.period(j));
        }
        out.push_back(std::move(p));
    }
    return out;
}

/// max and mean of |s(x, y) - k(x, y)| over the pairs.
template <class Kernel>
ErrorStats pointwise_error(const Kernel& kernel, const FeatureMap& map, const std::vector<PointPair>& pairs) {
    if (pairs.empty()) throw InputError("pointwise_error needs at least one pair");
    ErrorStats e;
    for (const auto& p : pairs) {
        const double err = std::abs(map.approx(p.x, p.y) - kernel(p.x, p.y));
        e.max = std::max(e.max, err);
        e.mean += err;
    }
    e.mean /= static_cast<double>(pairs.size());
    return e;
}

}  // namespace rffdq::rff
