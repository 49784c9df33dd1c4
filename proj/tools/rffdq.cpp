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

// Command-line front end: simulate-kernel, spectrum, approx, train, check,
// sweep and min-d.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rffdq/rffdq.hpp"

using namespace rffdq;
using json = nlohmann::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "experiment config (INI)");
    cmd->add_option("--seed", c.seed, "master seed");
    cmd->add_option("--out", c.out, "output path (default stdout)");
}

/// Output sink: the --out file when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw InputError("cannot write '" + path + "'");
        }
    }
    std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

std::string num(double v) { return harness::detail::fmt(v); }

std::optional<harness::ExperimentConfig> maybe_config(const Common& c) {
    if (c.config.empty()) return std::nullopt;
    auto cfg = harness::load_config(c.config);
    if (c.seed) cfg.seed = *c.seed;
    return cfg;
}

std::uint64_t seed_of(const Common& c, const std::optional<harness::ExperimentConfig>& cfg) {
    if (c.seed) return *c.seed;
    return cfg ? cfg->seed : 1;
}

/// Kernel from --kernel, else from the config, else `fallback`.
qsim::EncodingCircuit resolve_kernel(const std::string& spec, const std::optional<harness::ExperimentConfig>& cfg,
                                     int dim, const std::string& fallback) {
    if (!spec.empty()) return qsim::circuit_from_spec(spec);
    if (cfg) return cfg->circuit_for_dim(cfg->pca_dim > 0 ? cfg->pca_dim : (dim > 0 ? dim : cfg->dim));
    return qsim::circuit_from_spec(fallback);
}

/// Feature columns of a CSV (every column except `y`).
Eigen::MatrixXd read_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    const auto t = harness::read_csv_table(in);
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < t.header.size(); ++j)
        if (t.header[j] != "y") cols.push_back(j);
    if (cols.empty() || t.rows.empty()) throw ParseError("'" + path + "' has no feature columns or rows");
    Eigen::MatrixXd X(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t k = 0; k < cols.size(); ++k) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = t.rows[i][cols[k]];
    return X;
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& M) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) os << (j ? "," : "") << num(M(i, j));
        os << '\n';
    }
}

json freq_json(const spectrum::Freq& w) { return json(w); }

// ---------------------------------------------------------------------------

struct SimulateArgs {
    Common common;
    std::string kernel, data;
    std::size_t n = 10;
    std::optional<std::uint64_t> shots;
    std::size_t variance_pairs = 0;
};

int run_simulate(const SimulateArgs& a) {
    const auto cfg = maybe_config(a.common);
    const std::uint64_t seed = seed_of(a.common, cfg);
    Eigen::MatrixXd X;
    if (!a.data.empty()) X = read_points(a.data);
    const auto circuit = resolve_kernel(a.kernel, cfg, X.size() ? static_cast<int>(X.cols()) : 0, "xrot");
    if (!X.size()) {
        if (a.n < 1) throw InputError("--n must be positive");
        auto rng = make_rng(seed, {0x9017});
        X.resize(static_cast<Eigen::Index>(a.n), circuit.dim);
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    }
    const auto sm = a.shots ? qsim::ShotModel::finite(*a.shots, derive_seed(seed, {0x5407})) : qsim::ShotModel::exact();
    const Eigen::MatrixXd K = qsim::gram_matrix(circuit, X, sm);
    Sink sink(a.common.out);
    write_matrix(sink.os(), K);
    if (a.variance_pairs) {
        auto rng = make_rng(seed, {0x7A41});
        const double v = qsim::kernel_variance(qsim::FidelityKernel{circuit}, circuit.dim, a.variance_pairs, rng);
        std::cerr << "kernel variance over " << a.variance_pairs << " random pairs: " << num(v) << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct SpectrumArgs {
    Common common;
    std::string kernel, method = "exact", format;
    std::size_t samples = 20000;
};

int run_spectrum(const SpectrumArgs& a) {
    const auto cfg = maybe_config(a.common);
    const auto circuit = resolve_kernel(a.kernel, cfg, 0, "xrot");
    const auto support = spectrum::frequency_support(circuit);
    Sink sink(a.common.out);
    if (a.method == "estimate") {
        auto rng = make_rng(seed_of(a.common, cfg), {0x0E57});
        const auto q = spectrum::estimate_diagonal(qsim::FidelityKernel{circuit}, support, a.samples, rng);
        if (a.format == "json") {
            json j{{"method", "estimate"}, {"samples", a.samples}, {"support", json::array()}, {"q", json::array()}, {"stderr", json::array()}};
            for (std::size_t i = 0; i < support.size(); ++i) {
                j["support"].push_back(freq_json(support[i]));
                j["q"].push_back(q.q[static_cast<Eigen::Index>(i)]);
                j["stderr"].push_back(q.stderr_[static_cast<Eigen::Index>(i)]);
            }
            sink.os() << j.dump(2) << '\n';
        } else if (a.format.empty() || a.format == "diagonal") {
            spectrum::write_diagonal_csv(sink.os(), support, q.q);
        } else {
            throw InputError("estimated spectra support --format diagonal or json");
        }
        return 0;
    }
    if (a.method != "exact") throw InputError("--method must be exact or estimate");
    const auto ft = spectrum::kernel_fourier_transform(circuit);
    if (a.format.empty() || a.format == "fourier") {
        spectrum::write_fourier(sink.os(), ft);
    } else if (a.format == "diagonal") {
        spectrum::write_diagonal_csv(sink.os(), ft.support, spectrum::diagonal_distribution(ft).q);
    } else if (a.format == "json") {
        const auto q = spectrum::diagonal_distribution(ft);
        json j{{"method", "exact"},
               {"size", ft.size()},
               {"trace", ft.trace()},
               {"hermitian_error", ft.hermitian_error()},
               {"min_eigenvalue", ft.min_eigenvalue()},
               {"conjugate_symmetry_error", ft.conjugate_symmetry_error()},
               {"max_off_diagonal", ft.max_off_diagonal()},
               {"sqrt_sum_q", dequant::sqrt_sum_concentration(q)},
               {"support", json::array()},
               {"q", json::array()}};
        for (std::size_t i = 0; i < ft.size(); ++i) {
            j["support"].push_back(freq_json(ft.support[i]));
            j["q"].push_back(q.q[static_cast<Eigen::Index>(i)]);
        }
        sink.os() << j.dump(2) << '\n';
    } else {
        throw InputError("--format must be fourier, diagonal or json");
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct ApproxArgs {
    Common common;
    std::string kernel, algorithm = "cholesky";
    std::vector<std::size_t> D{50, 200, 1000};
    int repetitions = 10;
    std::size_t pairs = 10;
};

int run_approx(const ApproxArgs& a) {
    const auto cfg = maybe_config(a.common);
    const std::uint64_t seed = seed_of(a.common, cfg);
    const auto circuit = resolve_kernel(a.kernel, cfg, 0, "xrot");
    if (a.repetitions < 1 || a.pairs < 1) throw InputError("--repetitions and --pairs must be positive");
    std::vector<std::string> algs;
    if (a.algorithm == "both") algs = {"cholesky", "eigen"};
    else if (a.algorithm == "cholesky" || a.algorithm == "eigen") algs = {a.algorithm};
    else throw InputError("--algorithm must be cholesky, eigen or both");
    const auto ft = spectrum::kernel_fourier_transform(circuit);
    const qsim::FidelityKernel kernel{circuit};
    Sink sink(a.common.out);
    auto& os = sink.os();
    os << "algorithm,D,seed,max_err,mean_err\n";
    for (const auto& alg : algs) {
        auto fact = std::make_shared<const spectrum::SpectralFactorization>(
            alg == "cholesky" ? spectrum::reverse_cholesky(ft) : spectrum::eigen_factorization(ft));
        for (std::size_t D : a.D) {
            if (D < 1) throw InputError("D must be positive");
            for (int r = 0; r < a.repetitions; ++r) {
                const std::uint64_t s = derive_seed(seed, {0xA99, D, static_cast<std::uint64_t>(r)});
                Rng rng(s);
                const auto pairs = rff::random_pairs(ft.support, a.pairs, rng);
                const auto map = rff::sample_column_features(fact, ft.support, D, rng);
                const auto e = rff::pointwise_error(kernel, map, pairs);
                os << alg << ',' << D << ',' << s << ',' << num(e.max) << ',' << num(e.mean) << '\n';
            }
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
    Common common;
    std::string data, test, kernel, model, features, strategy, model_out;
    std::optional<std::size_t> D;
    std::optional<double> lambda, C, eta0;
    std::optional<int> epochs;
    std::optional<std::uint64_t> shots;
    bool unscaled_box = false, bias = false;
};

json vector_json(const Eigen::VectorXd& v) {
    json j = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

json matrix_json(const Eigen::MatrixXd& M) {
    json j = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) j.push_back(vector_json(M.row(i).transpose()));
    return j;
}

int run_train(const TrainArgs& a) {
    const auto cfg = maybe_config(a.common);
    harness::ExperimentConfig c = cfg.value_or(harness::ExperimentConfig{});
    const std::uint64_t seed = seed_of(a.common, cfg);
    if (a.data.empty()) throw InputError("train needs --data");

    std::string model = a.model.empty() ? (c.model == "svm" ? "rff-svm" : "rff-ridge") : a.model;
    static const std::map<std::string, bool> kinds{{"rff-svm", true}, {"rff-ridge", false}, {"qsvm", true}, {"qkrr", false}};
    const auto kit = kinds.find(model);
    if (kit == kinds.end()) throw InputError("--model must be rff-svm, rff-ridge, qsvm or qkrr");
    const bool classification = kit->second;
    const auto mode = classification ? harness::LabelMode::Classification : harness::LabelMode::Regression;
    const auto train = harness::load_csv(a.data, mode);
    std::optional<learners::Dataset> test;
    if (!a.test.empty()) test = harness::load_csv(a.test, mode);
    const auto circuit = resolve_kernel(a.kernel, cfg, static_cast<int>(train.d()),
                                        "ring:" + std::to_string((train.d() + 1) / 2) + ",1," + std::to_string(train.d()));
    if (circuit.dim != train.d()) throw InputError("kernel dimension does not match the data");
    if (test && test->d() != train.d()) throw InputError("train and test files differ in dimension");

    const double lambda = a.lambda.value_or(model == "qsvm" || model == "qkrr" ? c.baseline_lambda : c.lambda);
    const auto loss = classification ? learners::Loss::ZeroOne : learners::Loss::Mse;
    json metrics{{"model", model}, {"seed", seed}, {"m", train.m()}, {"d", train.d()}, {"lambda", lambda}, {"loss", learners::loss_name(loss)}};
    json saved{{"model", model}, {"kernel", a.kernel.empty() ? (cfg ? cfg->kernel : std::string("ring")) : a.kernel}, {"lambda", lambda}};

    if (model == "qsvm" || model == "qkrr") {
        const auto sm = a.shots ? qsim::ShotModel::finite(*a.shots, derive_seed(seed, {0xBA5E})) : qsim::ShotModel::exact();
        Eigen::MatrixXd K = qsim::gram_matrix(circuit, train.X, sm);
        if (a.shots) K = learners::repair_psd(K);
        learners::DualModel dm;
        if (model == "qsvm") {
            learners::DualSvmOptions o;
            o.unscaled_box = a.unscaled_box;
            o.bias = a.bias;
            dm = learners::train_kernel_svm_dual(K, train.y, lambda, o);
            metrics["box"] = dm.box;
            metrics["support_vectors"] = dm.support_indices.size();
            metrics["sweeps"] = dm.iterations;
        } else {
            dm = learners::train_kernel_ridge(K, train.y, lambda);
        }
        metrics["shots"] = a.shots ? json(*a.shots) : json("inf");
        metrics["train_risk"] = learners::empirical_risk(dm.decision_from_gram(K), train.y, loss);
        if (classification) metrics["train_hinge"] = learners::empirical_risk(dm.decision_from_gram(K), train.y, learners::Loss::Hinge);
        if (test) metrics["test_risk"] = learners::empirical_risk(dm.decision_from_gram(qsim::cross_gram(circuit, test->X, train.X)), test->y, loss);
        metrics["warnings"] = dm.warnings;
        saved["coef"] = vector_json(dm.coef);
        saved["bias"] = dm.bias;
        saved["X_train"] = matrix_json(train.X);
    } else {
        const std::size_t D = a.D.value_or(c.D_grid.front());
        std::string feat = a.features.empty() ? rff::feature_kind_name(c.features) : a.features;
        const std::string strat = a.strategy.empty() ? rff::strategy_name(c.strategies.front()) : a.strategy;
        Rng rng = make_rng(seed, {0x7EA1, D});
        std::optional<rff::FeatureMap> map;
        const auto support = spectrum::frequency_support(circuit);
        if (feat == "trig") {
            rff::DistributionParams params;
            const auto s = rff::parse_strategy(strat);
            if (s == rff::Strategy::Diagonal || s == rff::Strategy::SqrtDiagonal)
                params.q = spectrum::kernel_fourier_transform(circuit).diagonal();
            if (s == rff::Strategy::CoefficientAligned || s == rff::Strategy::Custom)
                throw InputError("strategy '" + strat + "' is not available for train");
            const auto dist = rff::make_distribution(s, support, params);
            map = rff::trig_feature_map(rff::sample_frequencies(dist, D, rng), support.base());
            json fr = json::array();
            for (const auto& w : map->frequencies()) fr.push_back(freq_json(w));
            saved["frequencies"] = fr;
            saved["strategy"] = strat;
        } else if (feat == "cholesky" || feat == "eigen") {
            const auto ft = spectrum::kernel_fourier_transform(circuit);
            map = feat == "cholesky" ? rff::approx_kernel_cholesky(ft, D, rng) : rff::approx_kernel_eigen(ft, D, rng);
            saved["columns"] = map->sampled_columns();
        } else {
            throw InputError("--features must be trig, cholesky or eigen");
        }
        saved["features"] = feat;
        saved["D"] = D;
        metrics["features"] = feat;
        metrics["D"] = D;
        learners::PrimalModel pm;
        double scale = 1.0;
        if (classification) {
            scale = std::sqrt(static_cast<double>(D));
            learners::SvmOptions o;
            o.epochs = a.epochs.value_or(c.epochs);
            o.eta0 = a.eta0.value_or(c.eta0);
            o.seed = seed;
            const double C = a.C.value_or(c.C);
            pm = learners::train_rff_svm(map->transform(train.X, scale), train.y, lambda, C, D, o);
            metrics["C"] = C;
            metrics["epochs_run"] = pm.meta.iterations;
            metrics["objective"] = pm.meta.objective;
        } else {
            pm = learners::train_rff_ridge(map->transform(train.X), train.y, lambda);
        }
        pm.feature_map = map;
        pm.feature_scale = scale;
        metrics["train_risk"] = learners::empirical_risk(pm, train, loss);
        if (classification) metrics["train_hinge"] = learners::empirical_risk(pm, train, learners::Loss::Hinge);
        if (test) metrics["test_risk"] = learners::empirical_risk(pm, *test, loss);
        saved["feature_scale"] = scale;
        saved["beta"] = vector_json(pm.beta);
    }
    if (!a.model_out.empty()) {
        std::ofstream mf(a.model_out, std::ios::binary);
        if (!mf) throw InputError("cannot write '" + a.model_out + "'");
        mf << saved.dump(2) << '\n';
    }
    Sink sink(a.common.out);
    sink.os() << metrics.dump() << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct CheckArgs {
    Common common;
    std::string kernel, fourier, diagonal, coefficients, distribution, format = "json";
    std::optional<double> budget;
};

/// Coefficient CSV: w0,...,w{d-1},re,im. Frequencies outside `support` are
/// rejected; absent frequencies get 0.
dequant::FourierFunction read_coefficients(const std::string& path, const std::optional<spectrum::FrequencySupport>& support) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    const auto t = harness::read_csv_table(in);
    if (t.header.size() < 3 || t.header[t.header.size() - 2] != "re" || t.header.back() != "im")
        throw ParseError("coefficient CSV needs columns w0,...,re,im");
    const std::size_t d = t.header.size() - 2;
    std::vector<std::pair<spectrum::Freq, spectrum::cplx>> entries;
    for (const auto& r : t.rows) {
        spectrum::Freq w(d);
        for (std::size_t j = 0; j < d; ++j) {
            if (r[j] != std::round(r[j])) throw ParseError("coefficient frequencies must be integers");
            w[j] = static_cast<int>(r[j]);
        }
        entries.emplace_back(w, spectrum::cplx(r[d], r[d + 1]));
    }
    spectrum::FrequencySupport sup;
    if (support) {
        sup = *support;
        if (static_cast<std::size_t>(sup.dims()) != d) throw InputError("coefficient dimension does not match the Fourier support");
    } else {
        std::vector<std::vector<int>> per(d, std::vector<int>{0});
        for (const auto& [w, v] : entries)
            for (std::size_t j = 0; j < d; ++j) {
                per[j].push_back(w[j]);
                per[j].push_back(-w[j]);
            }
        sup = spectrum::FrequencySupport(per);
    }
    dequant::FourierFunction f{sup, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sup.size()))};
    for (const auto& [w, v] : entries) {
        const auto i = sup.find(w);
        if (!i) throw InputError("coefficient frequency outside the Fourier support");
        f.c[static_cast<Eigen::Index>(*i)] = v;
    }
    f.validate();
    return f;
}

int run_check(const CheckArgs& a) {
    const auto cfg = maybe_config(a.common);
    dequant::ReportInputs in;
    std::optional<qsim::EncodingCircuit> circuit;
    if (!a.kernel.empty() || (cfg && a.fourier.empty() && a.diagonal.empty())) circuit = resolve_kernel(a.kernel, cfg, 0, "xrot");
    if (!a.fourier.empty()) {
        in.ft = spectrum::load_fourier(a.fourier);
        in.fourier_source = a.fourier;
    } else if (circuit) {
        in.ft = spectrum::kernel_fourier_transform(*circuit);
        in.fourier_source = a.kernel.empty() ? "config" : a.kernel;
    }
    if (!a.diagonal.empty()) {
        std::ifstream qin(a.diagonal);
        if (!qin) throw InputError("cannot open '" + a.diagonal + "'");
        in.q = spectrum::read_diagonal_csv(qin);
        if (!in.ft) in.fourier_source = a.diagonal;
    }
    std::optional<spectrum::FrequencySupport> sup;
    if (in.ft) sup = in.ft->support;
    else if (in.q) sup = in.q->support;
    if (!a.coefficients.empty()) in.f = read_coefficients(a.coefficients, sup);
    if (!sup && in.f) sup = in.f->support;
    if (!in.ft && !in.q && !in.f) throw InputError("check needs --kernel, --fourier, --diagonal or --coefficients");

    std::string dist = a.distribution;
    if (dist.empty()) dist = in.f && !in.ft && !in.q ? "aligned" : "sqrt-diagonal";
    const auto strategy = rff::parse_strategy(dist);
    rff::DistributionParams params;
    if (strategy == rff::Strategy::Diagonal || strategy == rff::Strategy::SqrtDiagonal) {
        if (in.ft) params.q = spectrum::diagonal_distribution(*in.ft).q;
        else if (in.q) params.q = in.q->q;
        else throw InputError("distribution '" + dist + "' needs a Fourier transform or diagonal");
    }
    if (strategy == rff::Strategy::CoefficientAligned) {
        if (!in.f) throw InputError("distribution 'aligned' needs --coefficients");
        params.c = in.f->c;
    }
    if (strategy == rff::Strategy::Custom) throw InputError("custom distributions are not available in check");
    if ((strategy == rff::Strategy::Convolutional || strategy == rff::Strategy::TruncatedConvolutional) && circuit)
        sup = spectrum::frequency_support(*circuit);
    in.p = rff::make_distribution(strategy, *sup, params);
    in.distribution_source = dist;
    in.budget = a.budget;
    const auto report = dequant::condition_report(in);

    Sink sink(a.common.out);
    auto& os = sink.os();
    if (a.format == "json") {
        json j{{"fourier_source", report.fourier_source}, {"distribution_source", report.distribution_source}, {"conditions", json::array()}};
        for (const auto& e : report.entries) {
            json je{{"name", e.name}, {"threshold", e.threshold_expression}};
            je["value"] = std::isfinite(e.value) ? json(e.value) : json("inf");
            je["satisfied_at_budget"] = e.satisfied_at_budget ? json(*e.satisfied_at_budget) : json(nullptr);
            j["conditions"].push_back(je);
        }
        if (a.budget) j["budget"] = *a.budget;
        os << j.dump(2) << '\n';
    } else if (a.format == "table") {
        os << "fourier: " << report.fourier_source << "\ndistribution: " << report.distribution_source << '\n';
        char line[160];
        std::snprintf(line, sizeof line, "%-20s %24s  %-16s %s\n", "condition", "value", "threshold", "within budget");
        os << line;
        for (const auto& e : report.entries) {
            std::snprintf(line, sizeof line, "%-20s %24s  %-16s %s\n", e.name.c_str(), num(e.value).c_str(),
                          e.threshold_expression.c_str(),
                          e.satisfied_at_budget ? (*e.satisfied_at_budget ? "yes" : "no") : "-");
            os << line;
        }
    } else {
        throw InputError("--format must be json or table");
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
    Common common;
};

int run_sweep(const SweepArgs& a) {
    const auto cfg = maybe_config(a.common);
    if (!cfg) throw ConfigError("sweep needs --config");
    const auto res = harness::risk_vs_D_sweep(*cfg);
    const std::string out = a.common.out.empty() ? cfg->output : a.common.out;
    {
        Sink sink(out);
        res.write_csv(sink.os(), cfg->timing);
    }
    if (!out.empty()) {
        std::ofstream side(out + ".json", std::ios::binary);
        if (!side) throw InputError("cannot write '" + out + ".json'");
        json j{{"config_id", res.config_id}, {"canonical", cfg->canonical()}, {"loss", learners::loss_name(res.loss)}, {"rows", res.rows.size()}};
        side << j.dump(2) << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct MinDArgs {
    Common common;
    std::optional<double> threshold;
    std::vector<int> dims;
};

json min_d_json(int d, const harness::MinDResult& r) {
    json j{{"d", d}, {"min_D", r.D ? json(*r.D) : json(nullptr)}, {"mean_risk", json::array()}};
    for (const auto& [D, m] : r.mean_risk) j["mean_risk"].push_back({{"D", D}, {"risk", m}});
    return j;
}

int run_min_d(const MinDArgs& a) {
    const auto cfg = maybe_config(a.common);
    if (!cfg) throw ConfigError("min-d needs --config");
    const auto threshold = a.threshold ? a.threshold : cfg->threshold;
    if (!threshold) throw ConfigError("min-d needs --threshold or run.threshold");
    const auto dims = a.dims.empty() ? cfg->dims : a.dims;
    json j{{"config_id", cfg->hash()}, {"threshold", *threshold}, {"per_dim", json::array()}};
    if (dims.empty()) {
        const int d = cfg->pca_dim > 0 ? cfg->pca_dim : cfg->dim;
        j["per_dim"].push_back(min_d_json(d, harness::min_D_to_risk(*cfg, *threshold)));
    } else {
        if (cfg->data_source != "synthetic") throw ConfigError("a dimension scan needs synthetic data");
        const auto scan = harness::min_D_vs_dim(*cfg, dims, *threshold);
        for (const auto& [d, r] : scan.per_dim) j["per_dim"].push_back(min_d_json(d, r));
        if (scan.fit) j["fit"] = {{"slope", scan.fit->slope}, {"intercept", scan.fit->intercept}, {"r2", scan.fit->r2}, {"points", scan.fit->n}};
        else j["fit"] = nullptr;
    }
    Sink sink(a.common.out);
    sink.os() << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rffdq: random Fourier features for quantum kernels"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate-kernel", "Gram matrix of a fidelity kernel");
    add_common(c_sim, sim.common);
    c_sim->add_option("--kernel", sim.kernel, "kernel spec: xrot, rot:<X|Y|Z|P>, ring:<n>,<L>[,<d>] or a circuit file");
    c_sim->add_option("--data", sim.data, "CSV of points (columns other than y)");
    c_sim->add_option("--n", sim.n, "number of random points when --data is absent");
    c_sim->add_option("--shots", sim.shots, "finite measurement shots per entry");
    c_sim->add_option("--variance-pairs", sim.variance_pairs, "report kernel variance over this many random pairs on stderr");

    SpectrumArgs spec;
    auto* c_spec = app.add_subcommand("spectrum", "frequency support and Fourier transform of a kernel");
    add_common(c_spec, spec.common);
    c_spec->add_option("--kernel", spec.kernel, "kernel spec");
    c_spec->add_option("--method", spec.method, "exact or estimate");
    c_spec->add_option("--samples", spec.samples, "Monte Carlo pairs for --method estimate");
    c_spec->add_option("--format", spec.format, "fourier, diagonal or json");

    ApproxArgs ap;
    auto* c_ap = app.add_subcommand("approx", "pointwise error of random-feature kernel approximations");
    add_common(c_ap, ap.common);
    c_ap->add_option("--kernel", ap.kernel, "kernel spec");
    c_ap->add_option("--algorithm", ap.algorithm, "cholesky, eigen or both");
    c_ap->add_option("--D", ap.D, "feature counts")->delimiter(',');
    c_ap->add_option("--repetitions", ap.repetitions, "seeds per D");
    c_ap->add_option("--pairs", ap.pairs, "random test pairs per seed");

    TrainArgs tr;
    auto* c_tr = app.add_subcommand("train", "train a random-feature or quantum-kernel model");
    add_common(c_tr, tr.common);
    c_tr->add_option("--data", tr.data, "training CSV with label column y");
    c_tr->add_option("--test", tr.test, "held-out CSV");
    c_tr->add_option("--kernel", tr.kernel, "kernel spec");
    c_tr->add_option("--model", tr.model, "rff-svm, rff-ridge, qsvm or qkrr");
    c_tr->add_option("--features", tr.features, "trig, cholesky or eigen");
    c_tr->add_option("--strategy", tr.strategy, "frequency sampling strategy for trig features");
    c_tr->add_option("--D", tr.D, "number of random features");
    c_tr->add_option("--lambda", tr.lambda, "regularization");
    c_tr->add_option("--C", tr.C, "box radius C (weights bounded by C/D)");
    c_tr->add_option("--epochs", tr.epochs, "subgradient epochs");
    c_tr->add_option("--eta0", tr.eta0, "initial step size");
    c_tr->add_option("--shots", tr.shots, "finite shots for the quantum-kernel Gram matrix");
    c_tr->add_flag("--unscaled-box", tr.unscaled_box, "dual box 1/lambda instead of 1/(lambda m)");
    c_tr->add_flag("--bias", tr.bias, "add a bias term to the kernel SVM");
    c_tr->add_option("--model-out", tr.model_out, "write the trained model as JSON");

    CheckArgs ck;
    auto* c_ck = app.add_subcommand("check", "evaluate dequantization condition measures");
    add_common(c_ck, ck.common);
    c_ck->add_option("--kernel", ck.kernel, "kernel spec (F extracted exactly)");
    c_ck->add_option("--fourier", ck.fourier, "Fourier transform file");
    c_ck->add_option("--diagonal", ck.diagonal, "diagonal distribution CSV");
    c_ck->add_option("--coefficients", ck.coefficients, "function coefficients CSV (w0,...,re,im)");
    c_ck->add_option("--distribution", ck.distribution, "sampling strategy to assess");
    c_ck->add_option("--budget", ck.budget, "compare every measure against this value");
    c_ck->add_option("--format", ck.format, "json or table");

    SweepArgs sw;
    auto* c_sw = app.add_subcommand("sweep", "risk versus D for each sampling strategy");
    add_common(c_sw, sw.common);

    MinDArgs md;
    auto* c_md = app.add_subcommand("min-d", "smallest D reaching a risk threshold");
    add_common(c_md, md.common);
    c_md->add_option("--threshold", md.threshold, "risk threshold");
    c_md->add_option("--dims", md.dims, "input dimensions to scan (synthetic data)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*c_sim) return run_simulate(sim);
        if (*c_spec) return run_spectrum(spec);
        if (*c_ap) return run_approx(ap);
        if (*c_tr) return run_train(tr);
        if (*c_ck) return run_check(ck);
        if (*c_sw) return run_sweep(sw);
        if (*c_md) return run_min_d(md);
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const ResourceError& e) {
        std::cerr << "resource limit: " << e.what() << '\n';
        return kExitInput;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
