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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rffdq/config.hpp"
#include "rffdq/dataset.hpp"
#include "rffdq/learners.hpp"
#include "rffdq/qsim.hpp"
#include "rffdq/rff.hpp"
#include "rffdq/spectrum.hpp"

/// Risk-versus-D sweeps, minimum-D search and the quantum-kernel baseline.
namespace rffdq::harness {

struct ExperimentData {
    Dataset train, test;
    std::optional<dequant::FourierFunction> truth;
};

/// Synthetic data from a random low-frequency function, or a CSV split into
/// disjoint train/test rows after a seeded shuffle.
inline ExperimentData prepare_data(const ExperimentConfig& c, int d) {
    ExperimentData out;
    if (c.data_source == "synthetic") {
        auto frng = make_rng(c.seed, {0xF0F0, static_cast<std::uint64_t>(d)});
        out.truth = random_low_frequency_function(d, c.max_frequency, frng, c.decay);
        auto trng = make_rng(c.seed, {0xDA7A, static_cast<std::uint64_t>(d), 0});
        auto vrng = make_rng(c.seed, {0xDA7A, static_cast<std::uint64_t>(d), 1});
        out.train = synth_fourier_dataset(*out.truth, static_cast<Eigen::Index>(c.n_train), c.label_mode, c.noise, trng);
        out.test = synth_fourier_dataset(*out.truth, static_cast<Eigen::Index>(c.n_test), c.label_mode, c.noise, vrng);
    } else {
        const auto mode = c.classification() ? LabelMode::Classification : LabelMode::Regression;
        Dataset all = load_csv(c.data_source, mode);
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(all.m()));
        std::iota(idx.begin(), idx.end(), Eigen::Index{0});
        auto rng = make_rng(c.seed, {0x5917});
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i))]);
        if (c.test_source.empty()) {
            if (idx.size() < c.n_train + c.n_test) throw ConfigError("dataset has fewer rows than train + test");
            out.train = all.subset({idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(c.n_train)});
            out.test = all.subset({idx.begin() + static_cast<std::ptrdiff_t>(c.n_train),
                                   idx.begin() + static_cast<std::ptrdiff_t>(c.n_train + c.n_test)});
        } else {
            if (idx.size() < c.n_train) throw ConfigError("training file has fewer rows than requested");
            out.train = all.subset({idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(c.n_train)});
            Dataset test = load_csv(c.test_source, mode);
            const auto n = std::min<Eigen::Index>(test.m(), static_cast<Eigen::Index>(c.n_test));
            std::vector<Eigen::Index> ti(static_cast<std::size_t>(n));
            std::iota(ti.begin(), ti.end(), Eigen::Index{0});
            out.test = test.subset(ti);
        }
        if (c.pca_dim > 0) {
            const auto p = pca_reduce(out.train.X, c.pca_dim);
            out.train.X = p.X_reduced;
            out.test.X = p.apply(out.test.X);
        }
        if (out.train.d() != d) throw ConfigError("data dimension does not match the configured dimension");
    }
    return out;
}

struct SweepRow {
    std::string config_id;
    std::string method;
    std::size_t D = 0;
    int repetition = 0;
    std::uint64_t seed = 0;
    double train_risk = 0.0;
    double test_risk = 0.0;
    double wall_time = 0.0;
};

struct SweepResult {
    std::string config_id;
    learners::Loss loss = learners::Loss::ZeroOne;
    std::vector<SweepRow> rows;

    /// Columns config_id,method,D,repetition,seed,train_risk,test_risk and,
    /// with `timing`, wall_time. Baseline rows carry D = 0.
    void write_csv(std::ostream& out, bool timing = false) const {
        out << "config_id,method,D,repetition,seed,train_risk,test_risk";
        if (timing) out << ",wall_time";
        out << '\n';
        for (const auto& r : rows) {
            out << r.config_id << ',' << r.method << ',' << r.D << ',' << r.repetition << ',' << r.seed << ','
                << detail::fmt(r.train_risk) << ',' << detail::fmt(r.test_risk);
            if (timing) out << ',' << detail::fmt(r.wall_time);
            out << '\n';
        }
    }

    std::vector<double> test_risks(const std::string& method, std::size_t D) const {
        std::vector<double> v;
        for (const auto& r : rows)
            if (r.method == method && r.D == D) v.push_back(r.test_risk);
        return v;
    }
};

inline double median(std::vector<double> v) {
    if (v.empty()) throw InputError("median of an empty set");
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw InputError("mean of an empty set");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

namespace detail {

struct SweepContext {
    const ExperimentConfig& config;
    const ExperimentData& data;
    const qsim::EncodingCircuit& circuit;
    spectrum::FrequencySupport support;
    std::optional<spectrum::FourierTransform> ft;
    std::shared_ptr<const spectrum::SpectralFactorization> fact;

    const spectrum::FourierTransform& fourier() {
        if (!ft) ft = spectrum::kernel_fourier_transform(circuit);
        return *ft;
    }
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Trains one random-feature model and returns (train risk, test risk).
inline std::pair<double, double> fit_features(const ExperimentConfig& c, const ExperimentData& data,
                                              const rff::FeatureMap& map, std::size_t D, std::uint64_t seed) {
    const learners::Loss loss = c.classification() ? learners::Loss::ZeroOne : learners::Loss::Mse;
    if (c.classification()) {
        const double s = std::sqrt(static_cast<double>(D));
        const Eigen::MatrixXd Z = map.transform(data.train.X, s);
        learners::SvmOptions o;
        o.epochs = c.epochs;
        o.eta0 = c.eta0;
        o.seed = seed;
        const auto model = learners::train_rff_svm(Z, data.train.y, c.lambda, c.C, D, o);
        return {learners::empirical_risk(model.decision_on_features(Z), data.train.y, loss),
                learners::empirical_risk(model.decision_on_features(map.transform(data.test.X, s)), data.test.y, loss)};
    }
    const Eigen::MatrixXd Z = map.transform(data.train.X);
    const auto model = learners::train_rff_ridge(Z, data.train.y, c.lambda);
    return {learners::empirical_risk(model.decision_on_features(Z), data.train.y, loss),
            learners::empirical_risk(model.decision_on_features(map.transform(data.test.X)), data.test.y, loss)};
}

inline rff::SamplingDistribution distribution_for(SweepContext& ctx, rff::Strategy s) {
    rff::DistributionParams params;
    if (s == rff::Strategy::Diagonal || s == rff::Strategy::SqrtDiagonal) params.q = ctx.fourier().diagonal();
    if (s == rff::Strategy::CoefficientAligned) {
        if (!ctx.data.truth) throw ConfigError("aligned sampling needs a synthetic ground truth");
        // Coefficients re-indexed onto the kernel support.
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(ctx.support.size()));
        const auto& t = *ctx.data.truth;
        for (std::size_t i = 0; i < t.support.size(); ++i)
            if (const auto k = ctx.support.find(t.support[i])) c[static_cast<Eigen::Index>(*k)] = t.c[static_cast<Eigen::Index>(i)];
        params.c = c;
    }
    if (s == rff::Strategy::Custom) throw ConfigError("custom sampling is not available in sweeps");
    return rff::make_distribution(s, ctx.support, params);
}

}  // namespace detail

/// Quantum-kernel baseline rows (SVM or kernel ridge), one per shot setting.
/// Shot noise affects training; inference is exact unless `noisy_inference`.
inline std::vector<SweepRow> kernel_baseline(const ExperimentConfig& c, const ExperimentData& data,
                                             const qsim::EncodingCircuit& circuit, const std::string& config_id) {
    std::vector<SweepRow> rows;
    const learners::Loss loss = c.classification() ? learners::Loss::ZeroOne : learners::Loss::Mse;
    for (const auto& shots : c.shots) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::uint64_t seed = derive_seed(c.seed, {0xBA5E, shots ? *shots : 0});
        const auto sm = shots ? qsim::ShotModel::finite(*shots, seed) : qsim::ShotModel::exact();
        Eigen::MatrixXd K = qsim::gram_matrix(circuit, data.train.X, sm);
        if (shots) K = learners::repair_psd(K);
        const Eigen::MatrixXd Kt = qsim::noisy_cross_gram(circuit, data.test.X, data.train.X,
                                                          shots && c.noisy_inference
                                                              ? qsim::ShotModel::finite(*shots, derive_seed(seed, {1}))
                                                              : qsim::ShotModel::exact());
        learners::DualModel model = c.classification()
                                        ? learners::train_kernel_svm_dual(K, data.train.y, c.baseline_lambda)
                                        : learners::train_kernel_ridge(K, data.train.y, c.baseline_lambda);
        SweepRow r;
        r.config_id = config_id;
        r.method = std::string(c.classification() ? "qsvm-" : "qkrr-") + (shots ? std::to_string(*shots) : "inf");
        r.seed = seed;
        r.train_risk = learners::empirical_risk(model.decision_from_gram(K), data.train.y, loss);
        r.test_risk = learners::empirical_risk(model.decision_from_gram(Kt), data.test.y, loss);
        r.wall_time = detail::seconds_since(t0);
        rows.push_back(std::move(r));
    }
    return rows;
}

/// For each method, D and repetition: sample features, train, and record
/// train and held-out risk. Each cell draws from its own stream keyed by
/// (seed, method, D, repetition).
inline SweepResult risk_vs_D_sweep(const ExperimentConfig& c, const ExperimentData& data,
                                   const qsim::EncodingCircuit& circuit) {
    c.validate();
    if (c.classification()) {
        learners::require_pm1(data.train.y);
        learners::require_pm1(data.test.y);
    }
    SweepResult res;
    res.config_id = c.hash();
    res.loss = c.classification() ? learners::Loss::ZeroOne : learners::Loss::Mse;
    detail::SweepContext ctx{c, data, circuit, spectrum::frequency_support(circuit), std::nullopt, nullptr};

    const bool trig = c.features == rff::FeatureKind::TrigPairs;
    if (!trig) {
        ctx.fact = std::make_shared<const spectrum::SpectralFactorization>(
            c.features == rff::FeatureKind::CholeskyFeatures ? spectrum::reverse_cholesky(ctx.fourier())
                                                             : spectrum::eigen_factorization(ctx.fourier()));
    }
    const std::size_t n_methods = trig ? c.strategies.size() : 1;
    for (std::size_t s = 0; s < n_methods; ++s) {
        std::optional<rff::SamplingDistribution> dist;
        if (trig) dist = detail::distribution_for(ctx, c.strategies[s]);
        const std::string method = trig ? rff::strategy_name(c.strategies[s]) : rff::feature_kind_name(c.features);
        const auto method_key = static_cast<std::uint64_t>(trig ? static_cast<int>(c.strategies[s]) : 100 + static_cast<int>(c.features));
        for (std::size_t D : c.D_grid) {
            for (int rep = 0; rep < c.repetitions; ++rep) {
                const auto t0 = std::chrono::steady_clock::now();
                const std::uint64_t seed = derive_seed(c.seed, {0x5EED, method_key, D, static_cast<std::uint64_t>(rep)});
                Rng rng(seed);
                const rff::FeatureMap map = trig ? rff::trig_feature_map(rff::sample_frequencies(*dist, D, rng), ctx.support.base())
                                                 : rff::sample_column_features(ctx.fact, ctx.support, D, rng);
                const auto [tr, te] = detail::fit_features(c, data, map, D, seed);
                res.rows.push_back({res.config_id, method, D, rep, seed, tr, te, detail::seconds_since(t0)});
            }
        }
    }
    if (c.baseline)
        for (auto& r : kernel_baseline(c, data, circuit, res.config_id)) res.rows.push_back(std::move(r));
    return res;
}

inline SweepResult risk_vs_D_sweep(const ExperimentConfig& c) {
    const auto data = prepare_data(c, c.pca_dim > 0 ? c.pca_dim : c.dim);
    return risk_vs_D_sweep(c, data, c.circuit_for_dim(c.pca_dim > 0 ? c.pca_dim : c.dim));
}

struct MinDResult {
    std::optional<std::size_t> D;  // empty when no grid point reaches the threshold
    std::vector<std::pair<std::size_t, double>> mean_risk;
};

/// Smallest D whose mean test risk over repetitions is at most `threshold`.
inline MinDResult min_D_from_sweep(const SweepResult& res, const std::string& method,
                                   const std::vector<std::size_t>& grid, double threshold) {
    MinDResult out;
    for (std::size_t D : grid) {
        const auto v = res.test_risks(method, D);
        if (v.empty()) continue;
        const double m = mean(v);
        out.mean_risk.emplace_back(D, m);
        if (!out.D && m <= threshold) out.D = D;
    }
    return out;
}

inline MinDResult min_D_to_risk(const ExperimentConfig& c, const ExperimentData& data,
                                const qsim::EncodingCircuit& circuit, double threshold) {
    ExperimentConfig cc = c;
    cc.baseline = false;
    cc.strategies.resize(1);
    const auto res = risk_vs_D_sweep(cc, data, circuit);
    const std::string method = cc.features == rff::FeatureKind::TrigPairs ? rff::strategy_name(cc.strategies[0])
                                                                          : rff::feature_kind_name(cc.features);
    return min_D_from_sweep(res, method, cc.D_grid, threshold);
}

inline MinDResult min_D_to_risk(const ExperimentConfig& c, double threshold) {
    const int d = c.pca_dim > 0 ? c.pca_dim : c.dim;
    return min_D_to_risk(c, prepare_data(c, d), c.circuit_for_dim(d), threshold);
}

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

/// Least-squares line through (log x, log y).
inline LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InputError("log-log fit needs at least two points");
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(x[static_cast<std::size_t>(i)] > 0.0 && y[static_cast<std::size_t>(i)] > 0.0)) throw InputError("log-log fit needs positive values");
        A(i, 0) = std::log(x[static_cast<std::size_t>(i)]);
        A(i, 1) = 1.0;
        b[i] = std::log(y[static_cast<std::size_t>(i)]);
    }
    const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
    const double ss_res = (A * coef - b).squaredNorm();
    const double ss_tot = (b.array() - b.mean()).square().sum();
    return {coef[0], coef[1], ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0, x.size()};
}

struct MinDScan {
    std::vector<std::pair<int, MinDResult>> per_dim;
    std::optional<LogLogFit> fit;
};

/// min-D for each input dimension in `dims` (synthetic data), plus a
/// log-log fit of min-D against d over the dimensions that reached it.
inline MinDScan min_D_vs_dim(const ExperimentConfig& c, const std::vector<int>& dims, double threshold) {
    MinDScan scan;
    std::vector<double> xs, ys;
    for (int d : dims) {
        auto r = min_D_to_risk(c, prepare_data(c, d), c.circuit_for_dim(d), threshold);
        if (r.D) {
            xs.push_back(d);
            ys.push_back(static_cast<double>(*r.D));
        }
        scan.per_dim.emplace_back(d, std::move(r));
    }
    if (xs.size() >= 2) scan.fit = fit_loglog(xs, ys);
    return scan;
}

}  // namespace rffdq::harness
