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
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rffdq/errors.hpp"
#include "rffdq/rff.hpp"

/// Primal random-feature learners, dual kernel learners and risk estimation.
namespace rffdq::learners {

inline constexpr std::size_t kMaxPrimalFeatures = 20000;

struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;

    Eigen::Index m() const { return X.rows(); }
    Eigen::Index d() const { return X.cols(); }

    void validate() const {
        if (X.rows() < 1) throw InputError("dataset is empty");
        if (X.rows() != y.size()) throw InputError("dataset has mismatched X and y lengths");
    }

    bool is_binary() const {
        return (y.array() == 1.0 || y.array() == -1.0).all();
    }

    Dataset subset(const std::vector<Eigen::Index>& rows) const {
        Dataset s{Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), X.cols()),
                  Eigen::VectorXd(static_cast<Eigen::Index>(rows.size()))};
        for (std::size_t i = 0; i < rows.size(); ++i) {
            s.X.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
            s.y[static_cast<Eigen::Index>(i)] = y[rows[i]];
        }
        return s;
    }
};

inline void require_pm1(const Eigen::VectorXd& y) {
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (y[i] != 1.0 && y[i] != -1.0) throw InputError("classification labels must be -1 or +1");
}

struct TrainMeta {
    double lambda = 0.0;
    std::optional<double> C;
    std::size_t D = 0;
    std::uint64_t seed = 0;
    int iterations = 0;
    double objective = 0.0;
    /// Best objective after each epoch (SVM only).
    std::vector<double> best_trace;
};

/// Linear model over a feature map. `feature_scale` multiplies the map output
/// before the dot product (sqrt(D) when trained with train_rff_svm).
struct PrimalModel {
    Eigen::VectorXd beta;
    TrainMeta meta;
    std::optional<rff::FeatureMap> feature_map;
    double feature_scale = 1.0;

    Eigen::VectorXd decision_on_features(const Eigen::MatrixXd& Z) const {
        if (Z.cols() != beta.size()) throw InputError("feature matrix width does not match model");
        return Z * beta;
    }

    Eigen::VectorXd decision(const Eigen::MatrixXd& X) const {
        if (!feature_map) throw InputError("model has no feature map attached");
        return decision_on_features(feature_map->transform(X, feature_scale));
    }
};

using KernelFn = std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

enum class DualKind { Svm, Ridge };

/// Kernel expansion f(x) = sum_i coef_i k(x_i, x) + bias. For SVMs
/// coef_i = alpha_i y_i.
struct DualModel {
    DualKind kind = DualKind::Svm;
    Eigen::VectorXd alphas;
    Eigen::VectorXd coef;
    std::vector<Eigen::Index> support_indices;
    double bias = 0.0;
    double box = std::numeric_limits<double>::infinity();
    int iterations = 0;
    double objective = 0.0;
    std::vector<std::string> warnings;
    Eigen::MatrixXd X_train;
    KernelFn kernel;

    /// Kx holds k(x_train_j, x_test_i) at (i, j).
    Eigen::VectorXd decision_from_gram(const Eigen::MatrixXd& Kx) const {
        if (Kx.cols() != coef.size()) throw InputError("cross Gram width does not match model");
        return (Kx * coef).array() + bias;
    }

    Eigen::VectorXd decision(const Eigen::MatrixXd& X) const {
        if (!kernel || X_train.rows() != coef.size()) throw InputError("model has no kernel or training points attached");
        Eigen::MatrixXd Kx(X.rows(), X_train.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            for (Eigen::Index j = 0; j < X_train.rows(); ++j) Kx(i, j) = kernel(X_train.row(j).transpose(), X.row(i).transpose());
        return decision_from_gram(Kx);
    }

    /// ||f||^2 in the RKHS of the training Gram K.
    double rkhs_norm_squared(const Eigen::MatrixXd& K) const { return coef.dot(K * coef); }
};

/// Eigenvalue clipping at 0 followed by re-symmetrization.
inline Eigen::MatrixXd repair_psd(const Eigen::MatrixXd& K) {
    const Eigen::MatrixXd S = 0.5 * (K + K.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed during PSD repair");
    const Eigen::MatrixXd R = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (R + R.transpose());
}

inline double min_eigenvalue(const Eigen::MatrixXd& K) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (K + K.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// Ridge

struct RidgeOptions {
    std::optional<double> box;
    int max_iterations = 100000;
    double tolerance = 1e-13;
};

/// (1/2m)||Z b - y||^2 + (lambda/2)||b||^2.
inline double ridge_objective(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, double lambda, const Eigen::VectorXd& b) {
    const double m = static_cast<double>(Z.rows());
    return 0.5 * (Z * b - y).squaredNorm() / m + 0.5 * lambda * b.squaredNorm();
}

/// beta = (Z^T Z + lambda m I)^{-1} Z^T y, then an optional projected-gradient
/// pass onto ||beta||_inf <= box.
inline PrimalModel train_rff_ridge(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, double lambda,
                                   const RidgeOptions& opts = {}) {
    if (!(lambda >= 0.0)) throw InputError("lambda must be nonnegative");
    if (Z.rows() < 1 || Z.rows() != y.size()) throw InputError("feature matrix and labels disagree in length");
    if (static_cast<std::size_t>(Z.cols()) > kMaxPrimalFeatures) throw ResourceError("too many primal features");
    const double m = static_cast<double>(Z.rows());
    Eigen::MatrixXd A = Z.transpose() * Z;
    A.diagonal().array() += lambda * m;
    const Eigen::VectorXd rhs = Z.transpose() * y;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    const double scale = std::max(1.0, A.diagonal().cwiseAbs().maxCoeff());
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14 || ldlt.vectorD().cwiseAbs().minCoeff() < 1e-14 * scale)
        throw NumericError("normal matrix is singular; use lambda > 0");
    PrimalModel model;
    model.beta = ldlt.solve(rhs);
    model.meta.lambda = lambda;
    model.meta.iterations = 0;
    if (opts.box) {
        const double b = *opts.box;
        if (!(b > 0.0)) throw InputError("box must be positive");
        model.meta.C = b;
        // Accelerated projected gradient on the box.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
        const double Lip = es.eigenvalues().maxCoeff() / m;
        const auto proj = [b](Eigen::VectorXd v) { return Eigen::VectorXd(v.cwiseMax(-b).cwiseMin(b)); };
        Eigen::VectorXd x = proj(model.beta), v = x;
        double t = 1.0;
        int it = 0;
        for (; it < opts.max_iterations; ++it) {
            const Eigen::VectorXd g = (A * v - rhs) / m;
            const Eigen::VectorXd xn = proj(v - g / Lip);
            const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            v = xn + ((t - 1.0) / tn) * (xn - x);
            const double step = (xn - x).lpNorm<Eigen::Infinity>();
            x = xn;
            t = tn;
            if (step < opts.tolerance) break;
        }
        model.beta = x;
        model.meta.iterations = it;
    }
    model.meta.objective = ridge_objective(Z, y, lambda, model.beta);
    return model;
}

// ---------------------------------------------------------------------------
// Box-constrained hinge SVM over explicit features

struct SvmOptions {
    int epochs = 200;
    double eta0 = 1.0;
    double tolerance = 1e-6;
    int window = 10;
    std::uint64_t seed = 0;
};

/// (lambda/2)||b||^2 + (1/m) sum max(0, 1 - y_i b.z_i).
inline double svm_objective(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, double lambda, const Eigen::VectorXd& b) {
    const Eigen::VectorXd margins = y.cwiseProduct(Z * b);
    return 0.5 * lambda * b.squaredNorm() + (1.0 - margins.array()).cwiseMax(0.0).mean();
}

/// Projected subgradient descent with eta_t = eta0 / sqrt(t) on the box
/// ||beta||_inf <= C / D. Returns the averaged iterate unless it is more than
/// 1e-3 worse than the best iterate seen.
inline PrimalModel train_rff_svm(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, double lambda, double C,
                                 std::size_t D, const SvmOptions& opts = {}) {
    require_pm1(y);
    if (Z.rows() < 1 || Z.rows() != y.size()) throw InputError("feature matrix and labels disagree in length");
    if (!(C > 0.0)) throw InputError("C must be positive");
    if (D < 1) throw InputError("D must be at least 1");
    if (!(lambda >= 0.0)) throw InputError("lambda must be nonnegative");
    if (opts.epochs < 1 || !(opts.eta0 > 0.0)) throw InputError("invalid optimizer options");
    const double box = C / static_cast<double>(D);
    const double m = static_cast<double>(Z.rows());
    const auto p = Z.cols();

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p), avg = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd best = beta;
    double best_obj = svm_objective(Z, y, lambda, beta);
    std::vector<double> history{best_obj};
    int epoch = 0;
    for (epoch = 1; epoch <= opts.epochs; ++epoch) {
        const Eigen::VectorXd margins = y.cwiseProduct(Z * beta);
        Eigen::VectorXd w = Eigen::VectorXd::Zero(Z.rows());
        for (Eigen::Index i = 0; i < Z.rows(); ++i)
            if (margins[i] < 1.0) w[i] = y[i];
        const Eigen::VectorXd g = lambda * beta - Z.transpose() * w / m;
        beta = (beta - (opts.eta0 / std::sqrt(static_cast<double>(epoch))) * g).cwiseMax(-box).cwiseMin(box);
        avg += (beta - avg) / static_cast<double>(epoch);
        const double obj = svm_objective(Z, y, lambda, beta);
        if (obj < best_obj) {
            best_obj = obj;
            best = beta;
        }
        history.push_back(best_obj);
        if (epoch >= opts.window) {
            const double old = history[history.size() - 1 - static_cast<std::size_t>(opts.window)];
            if ((old - best_obj) <= opts.tolerance * std::max(1.0, std::abs(best_obj))) break;
        }
    }
    const double avg_obj = svm_objective(Z, y, lambda, avg);
    PrimalModel model;
    model.beta = avg_obj <= best_obj + 1e-3 ? avg : best;
    model.meta.lambda = lambda;
    model.meta.C = C;
    model.meta.D = D;
    model.meta.seed = opts.seed;
    model.meta.iterations = std::min(epoch, opts.epochs);
    model.meta.objective = svm_objective(Z, y, lambda, model.beta);
    model.meta.best_trace = std::move(history);
    return model;
}

// ---------------------------------------------------------------------------
// Dual kernel SVM

struct DualSvmOptions {
    bool unscaled_box = false;
    bool bias = false;
    int max_sweeps = 100000;
    double tolerance = 1e-6;
    double psd_tolerance = 1e-6;
};

/// Coordinate ascent on max sum(a) - a^T Q a / 2, Q_ij = y_i y_j K_ij, over
/// 0 <= a <= 1/(lambda m) (or 1/lambda with `unscaled_box`).
inline DualModel train_kernel_svm_dual(const Eigen::MatrixXd& K_in, const Eigen::VectorXd& y, double lambda,
                                       const DualSvmOptions& opts = {}) {
    require_pm1(y);
    const Eigen::Index m = y.size();
    if (K_in.rows() != m || K_in.cols() != m) throw InputError("Gram matrix shape does not match labels");
    if (!(lambda > 0.0)) throw InputError("lambda must be positive");
    if ((K_in - K_in.transpose()).cwiseAbs().maxCoeff() > 1e-9) throw InputError("Gram matrix is not symmetric");
    Eigen::MatrixXd K = K_in;
    DualModel model;
    const double mine = min_eigenvalue(K);
    if (mine < -opts.psd_tolerance) throw NumericError("Gram matrix is not positive semidefinite (min eigenvalue " + std::to_string(mine) + ")");
    if (mine < 0.0) {
        K = repair_psd(K);
        model.warnings.push_back("clipped negative Gram eigenvalues");
    }
    if (opts.bias) K.array() += 1.0;
    const double box = opts.unscaled_box ? 1.0 / lambda : 1.0 / (lambda * static_cast<double>(m));
    Eigen::MatrixXd Q = K;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) Q(i, j) *= y[i] * y[j];

    Eigen::VectorXd a = Eigen::VectorXd::Zero(m), Qa = Eigen::VectorXd::Zero(m);
    int sweep = 0;
    for (; sweep < opts.max_sweeps; ++sweep) {
        double viol = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            const double G = 1.0 - Qa[i];
            double pg = G;
            if (a[i] <= 0.0) pg = std::max(G, 0.0);
            else if (a[i] >= box) pg = std::min(G, 0.0);
            viol = std::max(viol, std::abs(pg));
            if (pg == 0.0) continue;
            double ni;
            if (Q(i, i) > 0.0) ni = std::clamp(a[i] + G / Q(i, i), 0.0, box);
            else ni = G > 0.0 ? box : 0.0;
            const double delta = ni - a[i];
            if (delta != 0.0) {
                Qa += delta * Q.col(i);
                a[i] = ni;
            }
        }
        if (viol < opts.tolerance) break;
    }
    model.kind = DualKind::Svm;
    model.alphas = a;
    model.coef = a.cwiseProduct(y);
    model.bias = opts.bias ? model.coef.sum() : 0.0;
    model.box = box;
    model.iterations = sweep;
    model.objective = a.sum() - 0.5 * a.dot(Qa);
    for (Eigen::Index i = 0; i < m; ++i)
        if (a[i] > 0.0) model.support_indices.push_back(i);
    if (sweep == opts.max_sweeps) model.warnings.push_back("coordinate ascent hit the sweep limit");
    return model;
}

// ---------------------------------------------------------------------------
// Kernel ridge

/// alpha = (K + lambda m I)^{-1} y.
inline DualModel train_kernel_ridge(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double lambda) {
    const Eigen::Index m = y.size();
    if (K.rows() != m || K.cols() != m) throw InputError("Gram matrix shape does not match labels");
    if (!(lambda > 0.0)) throw InputError("lambda must be positive");
    Eigen::MatrixXd A = 0.5 * (K + K.transpose());
    A.diagonal().array() += lambda * static_cast<double>(m);
    DualModel model;
    model.kind = DualKind::Ridge;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().cwiseAbs().minCoeff(), hi = es.eigenvalues().cwiseAbs().maxCoeff();
    if (!(lo > 0.0)) throw NumericError("kernel ridge system is singular");
    if (hi / lo > 1e12) model.warnings.push_back("kernel ridge system is ill-conditioned (condition number " + std::to_string(hi / lo) + ")");
    model.alphas = A.ldlt().solve(y);
    model.coef = model.alphas;
    for (Eigen::Index i = 0; i < m; ++i) model.support_indices.push_back(i);
    return model;
}

// ---------------------------------------------------------------------------
// Risk

enum class Loss { Hinge, ZeroOne, Mse };

inline Loss parse_loss(const std::string& s) {
    if (s == "hinge") return Loss::Hinge;
    if (s == "zero_one" || s == "zero-one" || s == "01") return Loss::ZeroOne;
    if (s == "mse") return Loss::Mse;
    throw ConfigError("unknown loss '" + s + "'");
}

inline std::string loss_name(Loss l) {
    switch (l) {
        case Loss::Hinge: return "hinge";
        case Loss::ZeroOne: return "zero_one";
        case Loss::Mse: return "mse";
    }
    return "?";
}

/// Predicted class; sign(0) is +1.
inline double predict_sign(double f) { return f >= 0.0 ? 1.0 : -1.0; }

inline double empirical_risk(const Eigen::VectorXd& f, const Eigen::VectorXd& y, Loss loss) {
    if (f.size() != y.size() || y.size() == 0) throw InputError("prediction and label lengths differ");
    if (loss != Loss::Mse) require_pm1(y);
    double s = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        switch (loss) {
            case Loss::Hinge: s += std::max(0.0, 1.0 - y[i] * f[i]); break;
            case Loss::ZeroOne: s += predict_sign(f[i]) != y[i]; break;
            case Loss::Mse: s += (f[i] - y[i]) * (f[i] - y[i]); break;
        }
    }
    return s / static_cast<double>(y.size());
}

inline double empirical_risk(const PrimalModel& model, const Dataset& data, Loss loss) {
    return empirical_risk(model.decision(data.X), data.y, loss);
}

inline double empirical_risk(const DualModel& model, const Dataset& data, Loss loss) {
    return empirical_risk(model.decision(data.X), data.y, loss);
}

}  // namespace rffdq::learners
