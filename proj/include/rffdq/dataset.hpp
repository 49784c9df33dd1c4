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
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rffdq/dequant.hpp"
#include "rffdq/errors.hpp"
#include "rffdq/learners.hpp"
#include "rffdq/random.hpp"

namespace rffdq::harness {

using learners::Dataset;

enum class LabelMode { Auto, Classification, Regression };

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

namespace detail {

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

inline double parse_double(const std::string& s, std::size_t line) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (!s.empty() && *b == '+') ++b;
    const auto res = std::from_chars(b, e, v);
    if (s.empty() || res.ec != std::errc() || res.ptr != e)
        throw ParseError("line " + std::to_string(line) + ": '" + s + "' is not a number");
    return v;
}

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Numeric CSV with a header row. Blank lines are skipped.
inline CsvTable read_csv_table(std::istream& in) {
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        if (t.header.empty()) {
            t.header = detail::split(line);
            continue;
        }
        const auto cells = detail::split(line);
        if (cells.size() != t.header.size())
            throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                             " fields, found " + std::to_string(cells.size()));
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(detail::parse_double(c, lineno));
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw ParseError("missing header row");
    return t;
}

inline Dataset read_csv(std::istream& in, LabelMode mode = LabelMode::Auto) {
    const auto t = read_csv_table(in);
    const auto it = std::find(t.header.begin(), t.header.end(), "y");
    if (it == t.header.end()) throw ParseError("no label column named 'y'");
    if (t.rows.empty()) throw ParseError("dataset has no rows");
    const auto ycol = static_cast<std::size_t>(it - t.header.begin());
    const auto m = static_cast<Eigen::Index>(t.rows.size());
    const auto d = static_cast<Eigen::Index>(t.header.size() - 1);
    Dataset ds{Eigen::MatrixXd(m, d), Eigen::VectorXd(m)};
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& r = t.rows[static_cast<std::size_t>(i)];
        Eigen::Index k = 0;
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c == ycol) ds.y[i] = r[c];
            else ds.X(i, k++) = r[c];
        }
    }
    const bool zero_one = (ds.y.array() == 0.0 || ds.y.array() == 1.0).all();
    const bool pm_one = (ds.y.array() == -1.0 || ds.y.array() == 1.0).all();
    if (mode == LabelMode::Classification && !zero_one && !pm_one)
        throw ParseError("classification labels must be in {0, 1} or {-1, +1}");
    if (mode != LabelMode::Regression && zero_one && !pm_one) ds.y = 2.0 * ds.y.array() - 1.0;
    return ds;
}

inline Dataset load_csv(const std::string& path, LabelMode mode = LabelMode::Auto) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return read_csv(in, mode);
}

/// Header x0,...,x{d-1},y; values printed with 17 significant digits.
inline void write_csv(std::ostream& out, const Dataset& ds) {
    for (Eigen::Index j = 0; j < ds.X.cols(); ++j) out << 'x' << j << ',';
    out << "y\n";
    for (Eigen::Index i = 0; i < ds.X.rows(); ++i) {
        for (Eigen::Index j = 0; j < ds.X.cols(); ++j) out << detail::fmt(ds.X(i, j)) << ',';
        out << detail::fmt(ds.y[i]) << '\n';
    }
}

inline void save_csv(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    write_csv(out, ds);
}

// ---------------------------------------------------------------------------

enum class SynthLabels { Sign, Value };

inline SynthLabels parse_synth_labels(const std::string& s) {
    if (s == "sign") return SynthLabels::Sign;
    if (s == "value") return SynthLabels::Value;
    throw ConfigError("unknown label mode '" + s + "'");
}

/// x uniform over one period per dimension; y = sign(f(x) + noise) or f(x) + noise.
inline Dataset synth_fourier_dataset(const dequant::FourierFunction& f, Eigen::Index m, SynthLabels mode, double noise,
                                     Rng& rng) {
    f.validate();
    if (m < 1) throw InputError("dataset size must be positive");
    if (noise < 0.0) throw InputError("noise must be nonnegative");
    const int d = f.support.dims();
    Dataset ds{Eigen::MatrixXd(m, d), Eigen::VectorXd(m)};
    for (Eigen::Index i = 0; i < m; ++i) {
        for (int j = 0; j < d; ++j) ds.X(i, j) = uniform(rng, 0.0, f.support.period(j));
        double v = f.evaluate(ds.X.row(i).transpose());
        if (noise > 0.0) v += noise * standard_normal(rng);
        ds.y[i] = mode == SynthLabels::Sign ? learners::predict_sign(v) : v;
    }
    return ds;
}

/// Random real function with coefficients on |w_j| <= max_freq and c_0 = 0;
/// each conjugate pair gets a standard complex Gaussian c_w scaled by `decay`^{|w|_1}.
inline dequant::FourierFunction random_low_frequency_function(int d, int max_freq, Rng& rng, double decay = 1.0) {
    if (d < 1 || max_freq < 1) throw InputError("dimension and frequency range must be positive");
    std::vector<int> f;
    for (int w = -max_freq; w <= max_freq; ++w) f.push_back(w);
    spectrum::FrequencySupport sup(std::vector<std::vector<int>>(static_cast<std::size_t>(d), f));
    dequant::FourierFunction fn{sup, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sup.size()))};
    for (auto i : sup.positive_half()) {
        int l1 = 0;
        for (int w : sup[i]) l1 += std::abs(w);
        const double s = std::pow(decay, l1) / std::sqrt(2.0);
        const double re = standard_normal(rng), im = standard_normal(rng);
        const spectrum::cplx c(s * re, s * im);
        fn.c[static_cast<Eigen::Index>(i)] = c;
        fn.c[static_cast<Eigen::Index>(sup.negation(i))] = std::conj(c);
    }
    return fn;
}

// ---------------------------------------------------------------------------

struct PcaResult {
    Eigen::MatrixXd X_reduced;
    Eigen::MatrixXd projection;  // d x k, columns ordered by variance
    Eigen::RowVectorXd mean;
    Eigen::VectorXd explained_variance;

    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const { return (X.rowwise() - mean) * projection; }
    Eigen::MatrixXd reconstruct() const { return (X_reduced * projection.transpose()).rowwise() + mean; }
};

inline PcaResult pca_reduce(const Eigen::MatrixXd& X, Eigen::Index target_dim) {
    if (target_dim <= 0) throw InputError("target dimension must be positive");
    if (target_dim > X.cols()) throw InputError("target dimension exceeds data dimension");
    if (X.rows() < 1) throw InputError("PCA needs at least one point");
    PcaResult r;
    r.mean = X.colwise().mean();
    const Eigen::MatrixXd Xc = X.rowwise() - r.mean;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Xc, Eigen::ComputeThinV);
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(X.cols(), X.cols());
    V.leftCols(svd.matrixV().cols()) = svd.matrixV();
    if (svd.matrixV().cols() < X.cols()) {
        // Complete the basis when there are fewer points than dimensions.
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(V.leftCols(svd.matrixV().cols()));
        const Eigen::MatrixXd Qf = qr.householderQ();
        V.rightCols(X.cols() - svd.matrixV().cols()) = Qf.rightCols(X.cols() - svd.matrixV().cols());
    }
    r.projection = V.leftCols(target_dim);
    const double denom = std::max<double>(1.0, static_cast<double>(X.rows() - 1));
    r.explained_variance = Eigen::VectorXd::Zero(target_dim);
    for (Eigen::Index k = 0; k < std::min<Eigen::Index>(target_dim, svd.singularValues().size()); ++k)
        r.explained_variance[k] = svd.singularValues()[k] * svd.singularValues()[k] / denom;
    r.X_reduced = Xc * r.projection;
    return r;
}

}  // namespace rffdq::harness
