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
#include <stdexcept>
#include <string>
#include <vector>

#include "rank2/circuit.hpp"

namespace rank2 {

/// A mixed state given as a weighted list of pure-state preparations,
/// rho = sum_a w_a |psi_a><psi_a| with |psi_a> = U_a |0...0>.
class Rank2Ensemble {
   public:
    struct Member {
        double weight;
        Circuit preparation;
    };

    Rank2Ensemble(std::size_t num_qubits, std::vector<Member> members)
        : num_qubits_(num_qubits), members_(std::move(members)) {
        if (members_.empty()) {
            throw std::invalid_argument("Rank2Ensemble: needs at least one member");
        }
        double total = 0;
        for (const auto &m : members_) {
            if (!(m.weight >= 0.0)) {
                throw std::invalid_argument("Rank2Ensemble: weights must be non-negative");
            }
            if (m.preparation.num_qubits() != num_qubits_) {
                throw std::invalid_argument("Rank2Ensemble: member circuit has " +
                                            std::to_string(m.preparation.num_qubits()) + " qubits, expected " +
                                            std::to_string(num_qubits_));
            }
            total += m.weight;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw std::invalid_argument("Rank2Ensemble: weights sum to " + std::to_string(total) + ", not 1");
        }
    }

    std::size_t num_qubits() const noexcept { return num_qubits_; }
    const std::vector<Member> &members() const noexcept { return members_; }

    std::vector<double> weights() const {
        std::vector<double> w;
        w.reserve(members_.size());
        for (const auto &m : members_) w.push_back(m.weight);
        return w;
    }

   private:
    std::size_t num_qubits_;
    std::vector<Member> members_;
};

}  // namespace rank2
