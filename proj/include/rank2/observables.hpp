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

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rank2/circuit.hpp"
#include "rank2/pauli.hpp"
#include "rank2/simulator.hpp"

namespace rank2 {

/// The effective Pauli operators of the {|0...0>, |1...1>} subspace.
struct SigmaOperators {
    PauliString x;
    PauliString y;
    PauliString z;
};

/// Sigma^x = X on every qubit; Sigma^y = the same with Y at `target`;
/// Sigma^z = Z on qubit 0, identity elsewhere.
inline SigmaOperators sigma_operators(std::size_t num_qubits, Qubit target) {
    if (num_qubits == 0) {
        throw std::invalid_argument("sigma_operators: num_qubits must be positive");
    }
    if (target >= num_qubits) {
        throw std::out_of_range("sigma_operators: target " + std::to_string(target) + " out of range for " +
                                std::to_string(num_qubits) + " qubits");
    }
    std::vector<Pauli> x(num_qubits, Pauli::X);
    std::vector<Pauli> y = x;
    y[target] = Pauli::Y;
    std::vector<Pauli> z(num_qubits, Pauli::I);
    z[0] = Pauli::Z;
    return {PauliString(std::move(x)), PauliString(std::move(y)), PauliString(std::move(z))};
}

/// Pre-measurement rotations that map a Pauli string onto a Z-parity.
struct MeasurementSetting {
    std::vector<Operation> rotations;
    /// Non-identity positions, ascending.
    std::vector<Qubit> mask;
};

/// X -> RY(-pi/2) = exp(+i pi/4 Y); Y -> RX(pi/2) = exp(-i pi/4 X);
/// Z and I need no rotation, and I is left out of the parity mask.
inline MeasurementSetting measurement_setting(const PauliString &p) {
    MeasurementSetting s;
    for (Qubit q = 0; q < p.num_qubits(); ++q) {
        switch (p[q]) {
            case Pauli::I:
                continue;
            case Pauli::X:
                s.rotations.push_back({gates::RY{-kPi / 2}, q});
                break;
            case Pauli::Y:
                s.rotations.push_back({gates::RX{kPi / 2}, q});
                break;
            case Pauli::Z:
                break;
        }
        s.mask.push_back(q);
    }
    return s;
}

/// Estimated +/-1-valued correlation function.
struct CorrelationEstimate {
    double value = 1.0;
    double p_plus = 1.0;
    double p_minus = 0.0;
    std::size_t shots = 0;
    double std_error = 0.0;
};

/// Mean of (-1)^(number of ones inside `mask`) over all recorded shots.
/// An empty mask is the identity observable and yields exactly +1.
inline CorrelationEstimate estimate_parity(std::span<const ShotRecord> records, std::span<const Qubit> mask) {
    if (records.empty()) {
        throw std::invalid_argument("estimate_parity: no shot records");
    }
    std::size_t even = 0;
    std::size_t total = 0;
    for (const auto &r : records) {
        unsigned ones = 0;
        for (Qubit q : mask) {
            if (q >= r.bits.size()) {
                throw std::out_of_range("estimate_parity: mask index " + std::to_string(q) + " beyond bitstring");
            }
            ones += r.bits[q];
        }
        total += r.count;
        if (ones % 2 == 0) even += r.count;
    }
    if (total == 0) {
        throw std::invalid_argument("estimate_parity: records hold zero shots");
    }
    CorrelationEstimate e;
    e.shots = total;
    if (mask.empty()) {
        return e;
    }
    e.p_plus = static_cast<double>(even) / static_cast<double>(total);
    e.p_minus = static_cast<double>(total - even) / static_cast<double>(total);
    e.value = e.p_plus - e.p_minus;
    e.std_error = std::sqrt(std::max(0.0, 1.0 - e.value * e.value) / static_cast<double>(total));
    return e;
}

/// Estimates <P> by appending the measurement setting of `p` (reduced to
/// basis gates) to a copy of `c` and sampling.
inline CorrelationEstimate pauli_expectation_sampled(const Circuit &c, const PauliString &p, std::size_t shots,
                                                     std::uint64_t seed, const NoiseModel *noise = nullptr,
                                                     std::size_t threads = 1) {
    if (p.num_qubits() != c.num_qubits()) {
        throw std::invalid_argument("pauli_expectation_sampled: Pauli string has " + std::to_string(p.num_qubits()) +
                                    " qubits, circuit has " + std::to_string(c.num_qubits()));
    }
    const auto setting = measurement_setting(p);
    Circuit measured = c;
    for (const auto &op : setting.rotations) {
        for (const auto &g : reduce_to_basis(op.gate)) {
            measured.append(g, op.qubit);
        }
    }
    const auto records = sample_shots(measured, shots, seed, noise, threads);
    return estimate_parity(records, setting.mask);
}

}  // namespace rank2
