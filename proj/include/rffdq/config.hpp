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

#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rffdq/circuit_io.hpp"
#include "rffdq/dataset.hpp"
#include "rffdq/errors.hpp"
#include "rffdq/rff.hpp"

namespace rffdq::harness {

/// Experiment description read from an INI file with sections
/// [kernel], [data], [model], [sampling], [baseline] and [run].
struct ExperimentConfig {
    // [kernel]
    std::string kernel = "ring";
    int layers = 1;
    // [data]
    std::string data_source = "synthetic";
    std::string test_source;
    int dim = 2;
    int max_frequency = 1;
    double decay = 1.0;
    SynthLabels label_mode = SynthLabels::Sign;
    double noise = 0.0;
    std::size_t n_train = 400;
    std::size_t n_test = 200;
    int pca_dim = 0;
    // [model]
    std::string model = "svm";
    rff::FeatureKind features = rff::FeatureKind::TrigPairs;
    double lambda = 0.0;
    double C = 10.0;
    int epochs = 200;
    double eta0 = 1.0;
    // [sampling]
    std::vector<rff::Strategy> strategies{rff::Strategy::TruncatedConvolutional};
    std::vector<std::size_t> D_grid{50, 200, 800};
    // [baseline]
    bool baseline = true;
    std::vector<std::optional<std::uint64_t>> shots{std::nullopt};
    double baseline_lambda = 1e-3;
    bool noisy_inference = false;
    // [run]
    int repetitions = 10;
    std::uint64_t seed = 1;
    std::optional<double> threshold;
    std::vector<int> dims;
    std::string output;
    bool timing = false;

    bool classification() const { return model == "svm"; }

    void validate() const {
        if (D_grid.empty()) throw ConfigError("D grid is empty");
        for (std::size_t i = 0; i < D_grid.size(); ++i) {
            if (D_grid[i] < 1) throw ConfigError("D grid entries must be positive");
            if (i && D_grid[i] <= D_grid[i - 1]) throw ConfigError("D grid must be strictly increasing");
        }
        if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
        if (strategies.empty()) throw ConfigError("no sampling strategy given");
        if (model != "svm" && model != "ridge") throw ConfigError("model kind must be svm or ridge");
        if (model == "svm" && !(C > 0.0)) throw ConfigError("C must be positive");
        if (model == "ridge" && !(lambda > 0.0)) throw ConfigError("ridge needs lambda > 0");
        if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
        if (!(baseline_lambda > 0.0)) throw ConfigError("baseline lambda must be positive");
        if (n_train < 1 || n_test < 1) throw ConfigError("train and test sizes must be positive");
        if (dim < 1) throw ConfigError("dim must be positive");
        if (layers < 0) throw ConfigError("layers must be nonnegative");
        if (epochs < 1 || !(eta0 > 0.0)) throw ConfigError("invalid optimizer settings");
        for (int d : dims)
            if (d < 1) throw ConfigError("dims entries must be positive");
    }

    /// Encoding circuit for input dimension d. `ring` picks ceil(d/2) qubits.
    qsim::EncodingCircuit circuit_for_dim(int d) const {
        if (kernel == "ring") {
            try {
                return qsim::ring_encoding((d + 1) / 2, layers, d);
            } catch (const InputError& e) {
                throw ConfigError(e.what());
            }
        }
        auto c = qsim::circuit_from_spec(kernel);
        if (c.dim != d) throw ConfigError("kernel dimension " + std::to_string(c.dim) + " does not match data dimension " + std::to_string(d));
        return c;
    }

    /// Canonical text used for the config hash.
    std::string canonical() const {
        std::ostringstream o;
        o << "kernel=" << kernel << ";layers=" << layers << ";source=" << data_source << ";test=" << test_source
          << ";dim=" << dim << ";maxf=" << max_frequency << ";decay=" << detail::fmt(decay)
          << ";labels=" << (label_mode == SynthLabels::Sign ? "sign" : "value") << ";noise=" << detail::fmt(noise)
          << ";train=" << n_train << ";ntest=" << n_test << ";pca=" << pca_dim << ";model=" << model
          << ";features=" << rff::feature_kind_name(features) << ";lambda=" << detail::fmt(lambda)
          << ";C=" << detail::fmt(C) << ";epochs=" << epochs << ";eta0=" << detail::fmt(eta0) << ";strategies=";
        for (auto s : strategies) o << rff::strategy_name(s) << ',';
        o << ";D=";
        for (auto D : D_grid) o << D << ',';
        o << ";baseline=" << baseline << ";shots=";
        for (const auto& s : shots) o << (s ? std::to_string(*s) : "inf") << ',';
        o << ";blambda=" << detail::fmt(baseline_lambda) << ";noisyinf=" << noisy_inference << ";reps=" << repetitions << ";seed=" << seed;
        return o.str();
    }

    std::string hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char ch : canonical()) {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    for (auto& p : split(s, ','))
        if (!p.empty()) out.push_back(p);
    return out;
}

template <class T>
T parse_value(const std::string& key, const std::string& v) {
    std::istringstream ss(v);
    T out{};
    ss >> out;
    if (ss.fail() || !(ss >> std::ws).eof()) throw ConfigError("bad value '" + v + "' for " + key);
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("bad boolean '" + v + "' for " + key);
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    static const std::set<std::string> known{
        "kernel.spec", "kernel.layers", "data.source", "data.test_source", "data.dim", "data.max_frequency",
        "data.decay", "data.labels", "data.noise", "data.train", "data.test", "data.pca", "model.kind",
        "model.features", "model.lambda", "model.C", "model.epochs", "model.eta0", "sampling.strategies",
        "sampling.D", "baseline.enabled", "baseline.shots", "baseline.lambda", "baseline.noisy_inference", "run.repetitions", "run.seed",
        "run.threshold", "run.dims", "run.output", "run.timing"};
    ExperimentConfig c;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) throw ConfigError("config: key '" + section + "' outside a section");
        for (const auto& [key, node] : body) {
            const std::string full = section + "." + key;
            if (!known.count(full)) throw ConfigError("config: unknown key '" + full + "'");
            const std::string v = detail::trim(node.data());
            using detail::parse_value;
            if (full == "kernel.spec") c.kernel = v;
            else if (full == "kernel.layers") c.layers = parse_value<int>(full, v);
            else if (full == "data.source") c.data_source = v;
            else if (full == "data.test_source") c.test_source = v;
            else if (full == "data.dim") c.dim = parse_value<int>(full, v);
            else if (full == "data.max_frequency") c.max_frequency = parse_value<int>(full, v);
            else if (full == "data.decay") c.decay = parse_value<double>(full, v);
            else if (full == "data.labels") c.label_mode = parse_synth_labels(v);
            else if (full == "data.noise") c.noise = parse_value<double>(full, v);
            else if (full == "data.train") c.n_train = parse_value<std::size_t>(full, v);
            else if (full == "data.test") c.n_test = parse_value<std::size_t>(full, v);
            else if (full == "data.pca") c.pca_dim = parse_value<int>(full, v);
            else if (full == "model.kind") c.model = v;
            else if (full == "model.features") {
                if (v == "trig") c.features = rff::FeatureKind::TrigPairs;
                else if (v == "cholesky") c.features = rff::FeatureKind::CholeskyFeatures;
                else if (v == "eigen") c.features = rff::FeatureKind::EigenFeatures;
                else throw ConfigError("unknown feature kind '" + v + "'");
            } else if (full == "model.lambda") c.lambda = parse_value<double>(full, v);
            else if (full == "model.C") c.C = parse_value<double>(full, v);
            else if (full == "model.epochs") c.epochs = parse_value<int>(full, v);
            else if (full == "model.eta0") c.eta0 = parse_value<double>(full, v);
            else if (full == "sampling.strategies") {
                c.strategies.clear();
                for (const auto& s : detail::split_list(v)) c.strategies.push_back(rff::parse_strategy(s));
            } else if (full == "sampling.D") {
                c.D_grid.clear();
                for (const auto& s : detail::split_list(v)) c.D_grid.push_back(parse_value<std::size_t>(full, s));
            } else if (full == "baseline.enabled") c.baseline = detail::parse_bool(full, v);
            else if (full == "baseline.shots") {
                c.shots.clear();
                for (const auto& s : detail::split_list(v)) {
                    if (s == "inf" || s == "exact") c.shots.emplace_back(std::nullopt);
                    else {
                        const auto t = parse_value<std::uint64_t>(full, s);
                        if (t < 1) throw ConfigError("shot counts must be positive");
                        c.shots.emplace_back(t);
                    }
                }
            } else if (full == "baseline.lambda") c.baseline_lambda = parse_value<double>(full, v);
            else if (full == "baseline.noisy_inference") c.noisy_inference = detail::parse_bool(full, v);
            else if (full == "run.repetitions") c.repetitions = parse_value<int>(full, v);
            else if (full == "run.seed") c.seed = parse_value<std::uint64_t>(full, v);
            else if (full == "run.threshold") c.threshold = parse_value<double>(full, v);
            else if (full == "run.dims") {
                c.dims.clear();
                for (const auto& s : detail::split_list(v)) c.dims.push_back(parse_value<int>(full, s));
            } else if (full == "run.output") c.output = v;
            else if (full == "run.timing") c.timing = detail::parse_bool(full, v);
        }
    }
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse_config(in);
}

}  // namespace rffdq::harness
