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

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "rffdq/errors.hpp"
#include "rffdq/spectrum.hpp"

/// Text serialization of Fourier transforms and diagonal distributions.
///
/// Fourier transform file:
///
///     rffdq-fourier 1
///     dims <d>
///     base <b_1> ... <b_d>
///     size <n>
///     freq <w_1> ... <w_d>        (n lines, ascending order)
///     matrix
///     <re> <im> <re> <im> ...     (n rows, 2n numbers each)
///
/// Diagonal CSV: header `w0,...,w{d-1},prob`, one row per frequency.
namespace rffdq::spectrum {

namespace detail {
inline std::string fmt17(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}
}  // namespace detail

inline void write_fourier(std::ostream& out, const FourierTransform& ft) {
    const auto& sup = ft.support;
    out << "rffdq-fourier 1\ndims " << sup.dims() << "\nbase";
    for (double b : sup.base()) out << ' ' << detail::fmt17(b);
    out << "\nsize " << sup.size() << '\n';
    for (const auto& w : sup.full()) {
        out << "freq";
        for (int v : w) out << ' ' << v;
        out << '\n';
    }
    out << "matrix\n";
    for (Eigen::Index r = 0; r < ft.F.rows(); ++r) {
        for (Eigen::Index c = 0; c < ft.F.cols(); ++c) {
            if (c) out << ' ';
            out << detail::fmt17(ft.F(r, c).real()) << ' ' << detail::fmt17(ft.F(r, c).imag());
        }
        out << '\n';
    }
}

inline FourierTransform read_fourier(std::istream& in) {
    int line_no = 0;
    std::string line;
    const auto next = [&]() -> std::istringstream {
        if (!std::getline(in, line)) throw ParseError("unexpected end of Fourier file after line " + std::to_string(line_no));
        ++line_no;
        return std::istringstream(line);
    };
    const auto fail = [&](const std::string& what) {
        throw ParseError("Fourier file line " + std::to_string(line_no) + ": " + what);
    };
    std::string key;
    int version = 0;
    if (auto s = next(); !(s >> key >> version) || key != "rffdq-fourier" || version != 1) fail("bad header");
    int dims = 0;
    if (auto s = next(); !(s >> key >> dims) || key != "dims" || dims < 1) fail("expected 'dims <d>'");
    std::vector<double> base(static_cast<std::size_t>(dims));
    if (auto s = next(); !(s >> key) || key != "base") fail("expected 'base'");
    else
        for (auto& b : base)
            if (!(s >> b)) fail("short base line");
    std::size_t n = 0;
    if (auto s = next(); !(s >> key >> n) || key != "size" || n < 1) fail("expected 'size <n>'");
    std::vector<Freq> freqs(n, Freq(static_cast<std::size_t>(dims)));
    std::vector<std::vector<int>> per_dim(static_cast<std::size_t>(dims));
    for (auto& w : freqs) {
        auto s = next();
        if (!(s >> key) || key != "freq") fail("expected 'freq'");
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (!(s >> w[j])) fail("short freq line");
            per_dim[j].push_back(w[j]);
        }
    }
    if (auto s = next(); !(s >> key) || key != "matrix") fail("expected 'matrix'");
    FrequencySupport sup(per_dim, base);
    if (sup.size() != n) fail("frequency list is not a full Cartesian product");
    Eigen::MatrixXcd F(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        auto s = next();
        for (std::size_t c = 0; c < n; ++c) {
            double re = 0, im = 0;
            if (!(s >> re >> im)) fail("short matrix row");
            F(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = {re, im};
        }
        if (std::string extra; s >> extra) fail("trailing data in matrix row");
    }
    // Rows may have been written in any order consistent with the header.
    Eigen::MatrixXcd G(F.rows(), F.cols());
    std::vector<Eigen::Index> pos(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = sup.find(freqs[i]);
        if (!idx) fail("frequency not in support");
        pos[i] = static_cast<Eigen::Index>(*idx);
    }
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) G(pos[r], pos[c]) = F(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    return {sup, G};
}

inline void save_fourier(const std::string& path, const FourierTransform& ft) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    write_fourier(out, ft);
}

inline FourierTransform load_fourier(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return read_fourier(in);
}

inline void write_diagonal_csv(std::ostream& out, const FrequencySupport& sup, const Eigen::VectorXd& q) {
    for (int j = 0; j < sup.dims(); ++j) out << 'w' << j << ',';
    out << "prob\n";
    for (std::size_t i = 0; i < sup.size(); ++i) {
        for (int v : sup[i]) out << v << ',';
        out << detail::fmt17(q[static_cast<Eigen::Index>(i)]) << '\n';
    }
}

/// Reads a diagonal CSV back; frequencies must form a full product support.
inline DiagonalDistribution read_diagonal_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty diagonal CSV");
    std::size_t cols = 1;
    for (char c : line) cols += c == ',';
    if (cols < 2) throw ParseError("diagonal CSV needs at least one frequency column");
    const std::size_t dims = cols - 1;
    std::vector<Freq> freqs;
    std::vector<double> probs;
    std::vector<std::vector<int>> per_dim(dims);
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        Freq w(dims);
        std::string cell;
        try {
            for (std::size_t j = 0; j < dims; ++j) {
                if (!std::getline(ss, cell, ',')) throw std::invalid_argument("short");
                w[j] = std::stoi(cell);
                per_dim[j].push_back(w[j]);
            }
            if (!std::getline(ss, cell, ',')) throw std::invalid_argument("short");
            probs.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ParseError("diagonal CSV line " + std::to_string(line_no) + ": malformed row");
        }
        freqs.push_back(w);
    }
    FrequencySupport sup(per_dim);
    if (sup.size() != freqs.size()) throw ParseError("diagonal CSV does not list a full product support");
    Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sup.size()));
    for (std::size_t i = 0; i < freqs.size(); ++i) q[static_cast<Eigen::Index>(*sup.find(freqs[i]))] = probs[i];
    if ((q.array() < 0.0).any()) throw InputError("diagonal CSV has negative probabilities");
    const double s = q.sum();
    if (!(s > 0.0)) throw InputError("diagonal CSV sums to zero");
    return {sup, q / s, {}};
}

}  // namespace rffdq::spectrum
