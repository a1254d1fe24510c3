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

#include <bit>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rank2 {

enum class Pauli : unsigned char { I, X, Y, Z };

inline char pauli_char(Pauli p) {
    constexpr char chars[] = {'I', 'X', 'Y', 'Z'};
    return chars[static_cast<int>(p)];
}

/// Tensor product of single-qubit Paulis, qubit 0 leftmost ("XXYX").
class PauliString {
   public:
    explicit PauliString(std::vector<Pauli> letters) : letters_(std::move(letters)) {
        if (letters_.empty()) {
            throw std::invalid_argument("PauliString: needs at least one qubit");
        }
    }

    /// Parses a letter string such as "XXYX". Lower case is accepted.
    static PauliString parse(std::string_view text) {
        std::vector<Pauli> letters;
        letters.reserve(text.size());
        for (char c : text) {
            switch (c) {
                case 'I': case 'i': letters.push_back(Pauli::I); break;
                case 'X': case 'x': letters.push_back(Pauli::X); break;
                case 'Y': case 'y': letters.push_back(Pauli::Y); break;
                case 'Z': case 'z': letters.push_back(Pauli::Z); break;
                default:
                    throw std::invalid_argument("PauliString: bad letter '" + std::string(1, c) + "' in \"" +
                                                std::string(text) + "\"");
            }
        }
        return PauliString(std::move(letters));
    }

    static PauliString identity(std::size_t num_qubits) {
        return PauliString(std::vector<Pauli>(num_qubits, Pauli::I));
    }

    std::size_t num_qubits() const noexcept { return letters_.size(); }
    const std::vector<Pauli> &letters() const noexcept { return letters_; }
    Pauli operator[](std::size_t q) const { return letters_.at(q); }

    bool is_identity() const {
        for (auto p : letters_) {
            if (p != Pauli::I) return false;
        }
        return true;
    }

    std::string str() const {
        std::string s;
        s.reserve(letters_.size());
        for (auto p : letters_) s.push_back(pauli_char(p));
        return s;
    }

    bool operator==(const PauliString &) const = default;

   private:
    std::vector<Pauli> letters_;
};

/// Bit-level action of a Pauli string on computational basis states:
/// P|i> = phase * (-1)^popcount(i & sign) |i ^ flip>, with qubit q stored in
/// bit (N - 1 - q) of the index.
struct PauliAction {
    std::size_t flip = 0;
    std::size_t sign = 0;
    std::complex<double> phase{1, 0};

    explicit PauliAction(const PauliString &p) {
        const std::size_t n = p.num_qubits();
        int num_y = 0;
        for (std::size_t q = 0; q < n; ++q) {
            const std::size_t m = std::size_t{1} << (n - 1 - q);
            switch (p[q]) {
                case Pauli::I: break;
                case Pauli::X: flip |= m; break;
                // Y = i X Z.
                case Pauli::Y: flip |= m; sign |= m; ++num_y; break;
                case Pauli::Z: sign |= m; break;
            }
        }
        static const std::complex<double> kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        phase = kIPow[num_y % 4];
    }

    double sign_of(std::size_t i) const { return (std::popcount(i & sign) & 1) ? -1.0 : 1.0; }
};

}  // namespace rank2
