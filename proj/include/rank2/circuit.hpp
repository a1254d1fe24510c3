// Copyright 2026 The rank2 Authors
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
#include <cstddef>
#include <fstream>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace rank2 {

using Complex = std::complex<double>;
using Qubit = std::size_t;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces an angle into [0, 2pi).
inline double wrap_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0) {
        r += kTwoPi;
    }
    // fmod can round up to exactly 2pi for tiny negative inputs.
    return r >= kTwoPi ? 0.0 : r;
}

namespace gates {

/// Phase gate exp(-i lambda Z / 2).
struct U1 {
    double lambda;
    explicit U1(double lambda_) : lambda(wrap_angle(lambda_)) {}
};

struct U2 {
    double phi;
    double lambda;
    U2(double phi_, double lambda_) : phi(wrap_angle(phi_)), lambda(wrap_angle(lambda_)) {}
};

/// General single-qubit gate Rz(phi) Ry(theta) Rz(lambda).
///
/// Angles are stored with theta in [0, pi] and phi, lambda in [0, 2pi).
/// Construction from out-of-range angles yields a gate equal to the requested
/// one up to global phase.
struct U3 {
    double theta;
    double phi;
    double lambda;
    U3(double theta_, double phi_, double lambda_) {
        double t = wrap_angle(theta_);
        if (t > kPi) {
            // Ry(t) = Rz(pi) Ry(2pi - t) Rz(pi) up to a sign.
            t = kTwoPi - t;
            phi_ += kPi;
            lambda_ += kPi;
        }
        theta = t;
        phi = wrap_angle(phi_);
        lambda = wrap_angle(lambda_);
    }
};

struct CX {
    Qubit control;
    Qubit target;
};

/// exp(-i angle X / 2).
struct RX {
    double angle;
};

/// exp(-i angle Y / 2).
struct RY {
    double angle;
};

struct X {};
struct H {};

}  // namespace gates

using GateKind = std::variant<gates::U1, gates::U2, gates::U3, gates::CX, gates::RX, gates::RY, gates::X, gates::H>;

inline bool is_two_qubit(const GateKind &g) { return std::holds_alternative<gates::CX>(g); }

inline bool is_basis_gate(const GateKind &g) {
    return std::holds_alternative<gates::U1>(g) || std::holds_alternative<gates::U2>(g) ||
           std::holds_alternative<gates::U3>(g) || std::holds_alternative<gates::CX>(g);
}

inline std::string gate_name(const GateKind &g) {
    return std::visit(
        [](const auto &k) -> std::string {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, gates::U1>) return "u1";
            else if constexpr (std::is_same_v<T, gates::U2>) return "u2";
            else if constexpr (std::is_same_v<T, gates::U3>) return "u3";
            else if constexpr (std::is_same_v<T, gates::CX>) return "cx";
            else if constexpr (std::is_same_v<T, gates::RX>) return "rx";
            else if constexpr (std::is_same_v<T, gates::RY>) return "ry";
            else if constexpr (std::is_same_v<T, gates::X>) return "x";
            else return "h";
        },
        g);
}

namespace detail {

inline Eigen::Matrix2cd rz(double a) {
    const Complex i(0, 1);
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = std::exp(-i * (a / 2));
    m(1, 1) = std::exp(i * (a / 2));
    return m;
}

inline Eigen::Matrix2cd ry(double a) {
    const double c = std::cos(a / 2);
    const double s = std::sin(a / 2);
    Eigen::Matrix2cd m;
    m << c, -s, s, c;
    return m;
}

inline Eigen::Matrix2cd rx(double a) {
    const double c = std::cos(a / 2);
    const double s = std::sin(a / 2);
    const Complex i(0, 1);
    Eigen::Matrix2cd m;
    m << c, -i * s, -i * s, c;
    return m;
}

inline Eigen::Matrix2cd u3(double theta, double phi, double lambda) { return rz(phi) * ry(theta) * rz(lambda); }

}  // namespace detail

/// 2x2 matrix of a single-qubit gate. Throws for CX.
inline Eigen::Matrix2cd single_qubit_matrix(const GateKind &g) {
    return std::visit(
        [](const auto &k) -> Eigen::Matrix2cd {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, gates::U1>) {
                return detail::u3(0, 0, k.lambda);
            } else if constexpr (std::is_same_v<T, gates::U2>) {
                return detail::u3(kPi / 2, k.phi, k.lambda);
            } else if constexpr (std::is_same_v<T, gates::U3>) {
                return detail::u3(k.theta, k.phi, k.lambda);
            } else if constexpr (std::is_same_v<T, gates::CX>) {
                throw std::invalid_argument("single_qubit_matrix: CX is a two-qubit gate");
            } else if constexpr (std::is_same_v<T, gates::RX>) {
                return detail::rx(k.angle);
            } else if constexpr (std::is_same_v<T, gates::RY>) {
                return detail::ry(k.angle);
            } else if constexpr (std::is_same_v<T, gates::X>) {
                Eigen::Matrix2cd m;
                m << 0, 1, 1, 0;
                return m;
            } else {
                const double r = 1 / std::sqrt(2.0);
                Eigen::Matrix2cd m;
                m << r, r, r, -r;
                return m;
            }
        },
        g);
}

/// Unitary of a gate: 2x2 for single-qubit gates, 4x4 for CX in the basis
/// |control target> with the control as the more significant bit.
inline Eigen::MatrixXcd gate_matrix(const GateKind &g) {
    if (is_two_qubit(g)) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
        m(0, 0) = 1;
        m(1, 1) = 1;
        m(2, 3) = 1;
        m(3, 2) = 1;
        return m;
    }
    return single_qubit_matrix(g);
}

/// Rewrites a gate over the {U1, U2, U3, CX} basis. The product of the
/// returned gates (applied first to last) equals gate_matrix(g) up to a
/// global phase.
inline std::vector<GateKind> reduce_to_basis(const GateKind &g) {
    return std::visit(
        [&](const auto &k) -> std::vector<GateKind> {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, gates::RX>) {
                return {gates::U3(k.angle, -kPi / 2, kPi / 2)};
            } else if constexpr (std::is_same_v<T, gates::RY>) {
                return {gates::U3(k.angle, 0, 0)};
            } else if constexpr (std::is_same_v<T, gates::X>) {
                return {gates::U3(kPi, 0, kPi)};
            } else if constexpr (std::is_same_v<T, gates::H>) {
                return {gates::U2(0, kPi)};
            } else {
                return {g};
            }
        },
        g);
}

/// One gate placed in a circuit. `qubit` is the acted-on qubit of a
/// single-qubit gate; CX carries its own control/target and mirrors the
/// target here.
struct Operation {
    GateKind gate;
    Qubit qubit = 0;
};

inline std::vector<Qubit> operation_qubits(const Operation &op) {
    if (const auto *cx = std::get_if<gates::CX>(&op.gate)) {
        return {cx->control, cx->target};
    }
    return {op.qubit};
}

/// Ordered gate list over a fixed number of qubits.
///
/// Qubit i corresponds to bit (N - 1 - i) of a basis-state index, so
/// |q0 q1 ... q_{N-1}> reads left to right as the binary index.
class Circuit {
   public:
    explicit Circuit(std::size_t num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits == 0) {
            throw std::invalid_argument("Circuit: num_qubits must be positive");
        }
    }

    std::size_t num_qubits() const noexcept { return num_qubits_; }
    const std::vector<Operation> &operations() const noexcept { return ops_; }
    std::size_t size() const noexcept { return ops_.size(); }
    bool empty() const noexcept { return ops_.empty(); }

    Circuit &append(const GateKind &g, Qubit q = 0) {
        if (const auto *cx = std::get_if<gates::CX>(&g)) {
            check_qubit(cx->control);
            check_qubit(cx->target);
            if (cx->control == cx->target) {
                throw std::invalid_argument("Circuit: CX control and target must differ");
            }
            ops_.push_back(Operation{g, cx->target});
        } else {
            check_qubit(q);
            ops_.push_back(Operation{g, q});
        }
        return *this;
    }

    Circuit &append(const Operation &op) { return append(op.gate, op.qubit); }

    Circuit &append(const Circuit &other) {
        if (other.num_qubits_ > num_qubits_) {
            throw std::invalid_argument("Circuit: appended circuit has more qubits");
        }
        for (const auto &op : other.ops_) {
            append(op);
        }
        return *this;
    }

    Circuit &u1(Qubit q, double lambda) { return append(gates::U1(lambda), q); }
    Circuit &u2(Qubit q, double phi, double lambda) { return append(gates::U2(phi, lambda), q); }
    Circuit &u3(Qubit q, double theta, double phi, double lambda) { return append(gates::U3(theta, phi, lambda), q); }
    Circuit &cx(Qubit control, Qubit target) { return append(gates::CX{control, target}); }
    Circuit &rx(Qubit q, double angle) { return append(gates::RX{angle}, q); }
    Circuit &ry(Qubit q, double angle) { return append(gates::RY{angle}, q); }
    Circuit &x(Qubit q) { return append(gates::X{}, q); }
    Circuit &h(Qubit q) { return append(gates::H{}, q); }

    /// Same circuit with every gate rewritten over {U1, U2, U3, CX}.
    Circuit reduced_to_basis() const {
        Circuit out(num_qubits_);
        for (const auto &op : ops_) {
            for (const auto &g : reduce_to_basis(op.gate)) {
                out.append(g, op.qubit);
            }
        }
        return out;
    }

   private:
    void check_qubit(Qubit q) const {
        if (q >= num_qubits_) {
            throw std::out_of_range("Circuit: qubit index " + std::to_string(q) + " out of range for " +
                                    std::to_string(num_qubits_) + " qubits");
        }
    }

    std::size_t num_qubits_;
    std::vector<Operation> ops_;
};

/// Circuit JSON: {"num_qubits": n, "gates": [{"name": "u3", "qubits": [0], "params": [t, p, l]}, ...]}.
inline Circuit circuit_from_json(const nlohmann::json &j) {
    Circuit c(j.at("num_qubits").get<std::size_t>());
    for (const auto &g : j.at("gates")) {
        const auto name = g.at("name").get<std::string>();
        const auto qs = g.at("qubits").get<std::vector<Qubit>>();
        const auto ps = g.value("params", std::vector<double>{});
        auto need = [&](std::size_t nq, std::size_t np) {
            if (qs.size() != nq || ps.size() != np) {
                throw std::invalid_argument("circuit_from_json: wrong arity for gate '" + name + "'");
            }
        };
        if (name == "u1") {
            need(1, 1);
            c.u1(qs[0], ps[0]);
        } else if (name == "u2") {
            need(1, 2);
            c.u2(qs[0], ps[0], ps[1]);
        } else if (name == "u3") {
            need(1, 3);
            c.u3(qs[0], ps[0], ps[1], ps[2]);
        } else if (name == "cx") {
            need(2, 0);
            c.cx(qs[0], qs[1]);
        } else if (name == "rx") {
            need(1, 1);
            c.rx(qs[0], ps[0]);
        } else if (name == "ry") {
            need(1, 1);
            c.ry(qs[0], ps[0]);
        } else if (name == "x") {
            need(1, 0);
            c.x(qs[0]);
        } else if (name == "h") {
            need(1, 0);
            c.h(qs[0]);
        } else {
            throw std::invalid_argument("circuit_from_json: unknown gate '" + name + "'");
        }
    }
    return c;
}

/// Undirected graph of qubit pairs on which CX is available.
class CouplingMap {
   public:
    using Edge = std::pair<Qubit, Qubit>;

    CouplingMap(std::size_t num_qubits, const std::vector<Edge> &edges) : num_qubits_(num_qubits) {
        if (num_qubits == 0) {
            throw std::invalid_argument("CouplingMap: num_qubits must be positive");
        }
        for (auto [a, b] : edges) {
            if (a >= num_qubits || b >= num_qubits) {
                throw std::out_of_range("CouplingMap: edge references qubit outside the device");
            }
            if (a == b) {
                throw std::invalid_argument("CouplingMap: self-loop edge");
            }
            edges_.insert(normalize(a, b));
        }
    }

    std::size_t num_qubits() const noexcept { return num_qubits_; }
    const std::set<Edge> &edges() const noexcept { return edges_; }

    bool has_edge(Qubit a, Qubit b) const { return edges_.contains(normalize(a, b)); }

    static Edge normalize(Qubit a, Qubit b) { return a < b ? Edge{a, b} : Edge{b, a}; }

   private:
    std::size_t num_qubits_;
    std::set<Edge> edges_;
};

inline CouplingMap coupling_map_from_json(const nlohmann::json &j) {
    std::vector<CouplingMap::Edge> edges;
    for (const auto &e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) {
            throw std::invalid_argument("coupling map: each edge must be a pair");
        }
        edges.emplace_back(e[0].get<Qubit>(), e[1].get<Qubit>());
    }
    return CouplingMap(j.at("num_qubits").get<std::size_t>(), edges);
}

inline nlohmann::json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw std::runtime_error("'" + path + "': " + e.what());
    }
}

inline CouplingMap load_coupling_map(const std::string &path) { return coupling_map_from_json(read_json_file(path)); }

struct CouplingViolation {
    std::size_t gate_index;
    Qubit control;
    Qubit target;
};

/// Lists every CX whose qubit pair is not an edge of the map. Throws
/// std::invalid_argument if the circuit has more qubits than the device.
inline std::vector<CouplingViolation> validate_against_coupling(const Circuit &c, const CouplingMap &m) {
    if (c.num_qubits() > m.num_qubits()) {
        throw std::invalid_argument("validate_against_coupling: circuit uses " + std::to_string(c.num_qubits()) +
                                    " qubits but the device has " + std::to_string(m.num_qubits()));
    }
    std::vector<CouplingViolation> out;
    const auto &ops = c.operations();
    for (std::size_t k = 0; k < ops.size(); ++k) {
        if (const auto *cx = std::get_if<gates::CX>(&ops[k].gate)) {
            if (!m.has_edge(cx->control, cx->target)) {
                out.push_back({k, cx->control, cx->target});
            }
        }
    }
    return out;
}

}  // namespace rank2
