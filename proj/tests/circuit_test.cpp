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

#include "rank2/circuit.hpp"

#include "gtest/gtest.h"

#include "oracles.hpp"

using namespace rank2;
using rank2::testing::compose;
using rank2::testing::phase_overlap;

namespace {

const std::complex<double> I(0, 1);

std::vector<GateKind> random_gates(Rng &rng, std::size_t count) {
    std::vector<GateKind> out;
    for (std::size_t k = 0; k < count; ++k) {
        const double a = 6 * kPi * rng.uniform() - 3 * kPi;
        const double b = 6 * kPi * rng.uniform() - 3 * kPi;
        const double c = 6 * kPi * rng.uniform() - 3 * kPi;
        switch (k % 8) {
            case 0: out.push_back(gates::U1(a)); break;
            case 1: out.push_back(gates::U2(a, b)); break;
            case 2: out.push_back(gates::U3(a, b, c)); break;
            case 3: out.push_back(gates::CX{0, 1}); break;
            case 4: out.push_back(gates::RX{a}); break;
            case 5: out.push_back(gates::RY{a}); break;
            case 6: out.push_back(gates::X{}); break;
            default: out.push_back(gates::H{}); break;
        }
    }
    return out;
}

}  // namespace

TEST(circuit, u3_zero_is_identity) {
    const auto m = gate_matrix(gates::U3(0, 0, 0));
    EXPECT_LE((m - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(circuit, u3_prepares_plus_state) {
    const auto m = gate_matrix(gates::U3(kPi / 2, 0, kPi));
    Eigen::Vector2cd v = m.col(0);
    Eigen::Vector2cd plus(1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
    EXPECT_NEAR(std::abs(plus.dot(v)), 1.0, 1e-12);
}

TEST(circuit, u1_u2_are_u3_special_cases) {
    Rng rng(3);
    for (int k = 0; k < 200; ++k) {
        const double phi = 10 * rng.uniform() - 5;
        const double lambda = 10 * rng.uniform() - 5;
        EXPECT_LE((gate_matrix(gates::U1(lambda)) - gate_matrix(gates::U3(0, 0, lambda))).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_LE((gate_matrix(gates::U2(phi, lambda)) - gate_matrix(gates::U3(kPi / 2, phi, lambda)))
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-15);
    }
}

TEST(circuit, angles_are_canonicalized) {
    Rng rng(11);
    for (int k = 0; k < 1000; ++k) {
        const double t = 20 * rng.uniform() - 10;
        const double p = 20 * rng.uniform() - 10;
        const double l = 20 * rng.uniform() - 10;
        gates::U3 g(t, p, l);
        ASSERT_GE(g.theta, 0.0);
        ASSERT_LE(g.theta, kPi);
        ASSERT_GE(g.phi, 0.0);
        ASSERT_LT(g.phi, kTwoPi);
        ASSERT_GE(g.lambda, 0.0);
        ASSERT_LT(g.lambda, kTwoPi);
        // Reduction never changes the operator beyond a global phase.
        ASSERT_NEAR(phase_overlap(detail::u3(t, p, l), gate_matrix(g)), 1.0, 1e-12);
    }
}

TEST(circuit, all_gates_unitary) {
    Rng rng(5);
    for (const auto &g : random_gates(rng, 2000)) {
        const auto m = gate_matrix(g);
        const auto id = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
        ASSERT_LE((m.adjoint() * m - id).cwiseAbs().maxCoeff(), 1e-12) << gate_name(g);
    }
}

TEST(circuit, u3_on_zero_matches_general_qubit_state) {
    Rng rng(17);
    for (int k = 0; k < 1000; ++k) {
        const double theta = kPi * rng.uniform();
        const double phi = kTwoPi * rng.uniform();
        const double lambda = kTwoPi * rng.uniform();
        Eigen::Vector2cd got = gate_matrix(gates::U3(theta, phi, lambda)).col(0);
        Eigen::Vector2cd want(std::cos(theta / 2), std::sin(theta / 2) * std::exp(I * phi));
        ASSERT_NEAR(std::abs(want.dot(got)), 1.0, 1e-12);
    }
}

TEST(circuit, cx_matrix_ordering) {
    // Control is the more significant bit: |10> -> |11>.
    const auto m = gate_matrix(gates::CX{0, 1});
    EXPECT_EQ(m(3, 2), std::complex<double>(1, 0));
    EXPECT_EQ(m(2, 3), std::complex<double>(1, 0));
    EXPECT_EQ(m(0, 0), std::complex<double>(1, 0));
    EXPECT_EQ(m(1, 1), std::complex<double>(1, 0));
}

TEST(circuit, reduce_ry_minus_half_pi) {
    const auto seq = reduce_to_basis(gates::RY{-kPi / 2});
    ASSERT_EQ(seq.size(), 1u);
    ASSERT_TRUE(std::holds_alternative<gates::U3>(seq[0]));
    const auto &u = std::get<gates::U3>(seq[0]);
    EXPECT_NEAR(u.theta, kPi / 2, 1e-15);
    // exp(+i pi/4 sigma_y) = cos(pi/4) I + i sin(pi/4) sigma_y.
    Eigen::Matrix2cd want;
    const double r = 1 / std::sqrt(2.0);
    want << r, r, -r, r;
    EXPECT_NEAR(phase_overlap(compose(seq), want), 1.0, 1e-12);
}

TEST(circuit, reduce_h) {
    const auto seq = reduce_to_basis(gates::H{});
    ASSERT_EQ(seq.size(), 1u);
    ASSERT_TRUE(std::holds_alternative<gates::U2>(seq[0]));
    EXPECT_NEAR(std::get<gates::U2>(seq[0]).phi, 0.0, 1e-15);
    EXPECT_NEAR(std::get<gates::U2>(seq[0]).lambda, kPi, 1e-15);
    Eigen::Matrix2cd h;
    const double r = 1 / std::sqrt(2.0);
    h << r, r, r, -r;
    EXPECT_NEAR(phase_overlap(compose(seq), h), 1.0, 1e-12);
}

TEST(circuit, reduce_basis_gate_passes_through) {
    const auto seq = reduce_to_basis(gates::U3(1.0, 2.0, 3.0));
    ASSERT_EQ(seq.size(), 1u);
    const auto &u = std::get<gates::U3>(seq[0]);
    EXPECT_EQ(u.theta, 1.0);
    EXPECT_EQ(u.phi, 2.0);
    EXPECT_EQ(u.lambda, 3.0);
}

TEST(circuit, reduce_preserves_operator_up_to_phase) {
    Rng rng(23);
    for (const auto &g : random_gates(rng, 1000)) {
        const auto seq = reduce_to_basis(g);
        for (const auto &b : seq) ASSERT_TRUE(is_basis_gate(b));
        ASSERT_NEAR(phase_overlap(compose(seq), gate_matrix(g)), 1.0, 1e-10) << gate_name(g);
    }
}

TEST(circuit, rejects_bad_qubits) {
    Circuit c(2);
    EXPECT_THROW(c.h(2), std::out_of_range);
    EXPECT_THROW(c.cx(1, 1), std::invalid_argument);
    EXPECT_THROW(c.cx(0, 5), std::out_of_range);
    EXPECT_THROW(Circuit(0), std::invalid_argument);
}

TEST(circuit, append_has_value_semantics) {
    Circuit a(2);
    a.h(0).cx(0, 1);
    Circuit b = a;
    b.x(1).ry(0, 0.3);
    ASSERT_EQ(a.size(), 2u);
    ASSERT_EQ(b.size(), 4u);
    EXPECT_EQ(gate_name(a.operations()[1].gate), "cx");
}

TEST(circuit, from_json) {
    const auto c = circuit_from_json(nlohmann::json::parse(R"({
        "num_qubits": 3,
        "gates": [{"name": "h", "qubits": [0]},
                  {"name": "cx", "qubits": [0, 2]},
                  {"name": "u3", "qubits": [1], "params": [0.1, 0.2, 0.3]}]})"));
    ASSERT_EQ(c.num_qubits(), 3u);
    ASSERT_EQ(c.size(), 3u);
    const auto qs = operation_qubits(c.operations()[1]);
    EXPECT_EQ(qs, (std::vector<Qubit>{0, 2}));
    EXPECT_THROW(circuit_from_json(nlohmann::json::parse(R"({"num_qubits": 1, "gates": [{"name": "t", "qubits": [0]}]})")),
                 std::invalid_argument);
    EXPECT_THROW(circuit_from_json(nlohmann::json::parse(R"({"num_qubits": 1, "gates": [{"name": "u1", "qubits": [0]}]})")),
                 std::invalid_argument);
}

TEST(coupling, bundled_map_matches_device_table) {
    const auto m = load_coupling_map(std::string(RANK2_DATA_DIR) + "/ibmq-melbourne.json");
    EXPECT_EQ(m.num_qubits(), 15u);
    EXPECT_EQ(m.edges().size(), 20u);
    for (auto [a, b] : std::vector<std::pair<Qubit, Qubit>>{
             {0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 8}, {7, 8}, {8, 9}, {9, 10},
             {10, 11}, {11, 12}, {12, 13}, {13, 14}, {0, 14}, {1, 13}, {2, 12}, {3, 11}, {4, 10}, {5, 9}}) {
        EXPECT_TRUE(m.has_edge(a, b));
        EXPECT_TRUE(m.has_edge(b, a));
    }
    EXPECT_FALSE(m.has_edge(0, 2));
    EXPECT_FALSE(m.has_edge(6, 7));
}

TEST(coupling, validate) {
    const auto m = load_coupling_map(std::string(RANK2_DATA_DIR) + "/ibmq-melbourne.json");
    Circuit ok(3);
    ok.h(0).cx(0, 1);
    EXPECT_TRUE(validate_against_coupling(ok, m).empty());

    Circuit bad(3);
    bad.h(0).cx(0, 1).cx(0, 2).cx(2, 1);
    const auto v = validate_against_coupling(bad, m);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].gate_index, 2u);
    EXPECT_EQ(v[0].control, 0u);
    EXPECT_EQ(v[0].target, 2u);

    Circuit single(4);
    single.h(0).x(3).ry(2, 0.1);
    EXPECT_TRUE(validate_against_coupling(single, m).empty());

    EXPECT_THROW(validate_against_coupling(Circuit(16), m), std::invalid_argument);
}

TEST(coupling, rejects_bad_edges) {
    EXPECT_THROW(CouplingMap(2, {{0, 2}}), std::out_of_range);
    EXPECT_THROW(CouplingMap(2, {{1, 1}}), std::invalid_argument);
    EXPECT_THROW(coupling_map_from_json(nlohmann::json::parse(R"({"num_qubits": 2, "edges": [[0]]})")),
                 std::invalid_argument);
}
