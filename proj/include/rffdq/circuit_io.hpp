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
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rffdq/errors.hpp"
#include "rffdq/qsim.hpp"

/// Plain-text circuit descriptions and kernel spec strings.
///
/// Circuit files are line oriented; `#` starts a comment:
///
///     qubits 2
///     dim 2
///     layer
///     H 0
///     RY 0 x=1 scale=1/2
///     P 1 angle=0.25
///     CNOT 0 1
///     layer
///     ...
///
/// Gate lines are `<KIND> <target>` or `CNOT <control> <target>`, with KIND in
/// {H, RX, RY, RZ, P}. Parametric gates take either `x=<index>` (optionally
/// `scale=<p>/<q>` or `scale=<integer>`) or `angle=<radians>`.
namespace rffdq::qsim {

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

inline std::int64_t parse_int(const std::string& s, int line_no) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": expected an integer, got '" + s + "'");
    }
}

inline Rational parse_rational(const std::string& s, int line_no) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(parse_int(s, line_no), 1);
    const auto den = parse_int(s.substr(slash + 1), line_no);
    if (den == 0) throw ParseError("line " + std::to_string(line_no) + ": zero denominator in scale");
    return Rational(parse_int(s.substr(0, slash), line_no), den);
}

inline GateKind parse_kind(const std::string& s, int line_no) {
    std::string u = s;
    std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (u == "H") return GateKind::Hadamard;
    if (u == "RX") return GateKind::RotX;
    if (u == "RY") return GateKind::RotY;
    if (u == "RZ") return GateKind::RotZ;
    if (u == "P") return GateKind::Phase;
    if (u == "CNOT" || u == "CX") return GateKind::CNOT;
    throw ParseError("line " + std::to_string(line_no) + ": unknown gate '" + s + "'");
}

}  // namespace detail

inline EncodingCircuit parse_circuit(std::istream& in) {
    EncodingCircuit c;
    bool have_qubits = false, have_dim = false;
    int line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto tok = detail::split_ws(line);
        if (tok.empty()) continue;
        const auto at = [&](std::size_t i) -> const std::string& {
            if (i >= tok.size()) throw ParseError("line " + std::to_string(line_no) + ": missing field");
            return tok[i];
        };
        if (tok[0] == "qubits") {
            c.n_qubits = static_cast<int>(detail::parse_int(at(1), line_no));
            have_qubits = true;
        } else if (tok[0] == "dim") {
            c.dim = static_cast<int>(detail::parse_int(at(1), line_no));
            have_dim = true;
        } else if (tok[0] == "layer") {
            c.layers.emplace_back();
        } else {
            if (c.layers.empty()) throw ParseError("line " + std::to_string(line_no) + ": gate before first 'layer'");
            GateSpec g;
            g.kind = detail::parse_kind(tok[0], line_no);
            if (g.kind == GateKind::CNOT) {
                g.control = static_cast<int>(detail::parse_int(at(1), line_no));
                g.target = static_cast<int>(detail::parse_int(at(2), line_no));
            } else {
                g.target = static_cast<int>(detail::parse_int(at(1), line_no));
                for (std::size_t i = 2; i < tok.size(); ++i) {
                    const auto eq = tok[i].find('=');
                    if (eq == std::string::npos) throw ParseError("line " + std::to_string(line_no) + ": expected key=value");
                    const auto key = tok[i].substr(0, eq), val = tok[i].substr(eq + 1);
                    if (key == "x") g.data_index = static_cast<int>(detail::parse_int(val, line_no));
                    else if (key == "scale") g.scale = detail::parse_rational(val, line_no);
                    else if (key == "angle") {
                        try { g.angle = std::stod(val); }
                        catch (const std::exception&) { throw ParseError("line " + std::to_string(line_no) + ": bad angle"); }
                    } else throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
                }
                if (!is_parametric(g.kind) && (g.data_index || g.angle != 0.0))
                    throw ParseError("line " + std::to_string(line_no) + ": Hadamard takes no parameters");
            }
            c.layers.back().push_back(g);
        }
    }
    if (!have_qubits || !have_dim) throw ParseError("circuit file must declare 'qubits' and 'dim'");
    try {
        c.validate();
    } catch (const ResourceError&) {
        throw;
    } catch (const InputError& e) {
        throw ParseError(std::string("invalid circuit: ") + e.what());
    }
    return c;
}

inline EncodingCircuit load_circuit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open circuit file '" + path + "'");
    return parse_circuit(in);
}

inline void write_circuit(std::ostream& out, const EncodingCircuit& c) {
    out << "qubits " << c.n_qubits << "\ndim " << c.dim << "\n";
    for (const auto& layer : c.layers) {
        out << "layer\n";
        for (const auto& g : layer) {
            if (g.kind == GateKind::CNOT) { out << "CNOT " << g.control << ' ' << g.target << '\n'; continue; }
            out << gate_name(g.kind) << ' ' << g.target;
            if (g.data_index) {
                out << " x=" << *g.data_index;
                if (g.scale != Rational(1, 1)) out << " scale=" << g.scale.num << '/' << g.scale.den;
            } else if (is_parametric(g.kind)) {
                std::ostringstream a;
                a.precision(17);
                a << g.angle;
                out << " angle=" << a.str();
            }
            out << '\n';
        }
    }
}

/// Resolves a kernel spec: `ring:<n>,<L>[,<d>]`, `rot:<X|Y|Z|P>`, `xrot`
/// (alias for `rot:X`), or a path to a circuit file.
inline EncodingCircuit circuit_from_spec(const std::string& spec) {
    if (spec == "xrot") return single_rotation(GateKind::RotX);
    if (spec.rfind("rot:", 0) == 0) {
        const auto axis = spec.substr(4);
        if (axis == "X") return single_rotation(GateKind::RotX);
        if (axis == "Y") return single_rotation(GateKind::RotY);
        if (axis == "Z") return single_rotation(GateKind::RotZ);
        if (axis == "P") return single_rotation(GateKind::Phase);
        throw ConfigError("unknown rotation axis in kernel spec '" + spec + "'");
    }
    if (spec.rfind("ring:", 0) == 0) {
        std::vector<int> args;
        std::stringstream ss(spec.substr(5));
        for (std::string part; std::getline(ss, part, ',');) {
            try {
                std::size_t pos = 0;
                args.push_back(std::stoi(part, &pos));
                if (pos != part.size()) throw std::invalid_argument(part);
            } catch (const std::exception&) {
                throw ConfigError("bad integer in kernel spec '" + spec + "'");
            }
        }
        if (args.size() < 2 || args.size() > 3) throw ConfigError("ring spec is ring:<n>,<L>[,<d>]");
        try {
            return ring_encoding(args[0], args[1], args.size() == 3 ? std::optional<int>(args[2]) : std::nullopt);
        } catch (const InputError& e) {
            throw ConfigError(e.what());
        }
    }
    return load_circuit(spec);
}

}  // namespace rffdq::qsim
