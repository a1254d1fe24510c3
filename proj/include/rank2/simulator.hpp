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
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rank2/circuit.hpp"
#include "rank2/pauli.hpp"
#include "rank2/rng.hpp"

namespace rank2 {

/// Pure state of N qubits as 2^N amplitudes.
///
/// Gates are applied in place over pairs of indices that differ in one bit;
/// no 2^N x 2^N operator is ever formed.
class StateVector {
   public:
    static constexpr std::size_t kMaxQubits = 30;

    /// |0...0>.
    explicit StateVector(std::size_t num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits == 0 || num_qubits > kMaxQubits) {
            throw std::invalid_argument("StateVector: num_qubits must be in [1, " + std::to_string(kMaxQubits) + "]");
        }
        amps_.assign(std::size_t{1} << num_qubits, Complex(0, 0));
        amps_[0] = 1;
    }

    /// Takes ownership of explicit amplitudes. The length must be a power of
    /// two and the vector must be normalized to within 1e-10.
    explicit StateVector(std::vector<Complex> amplitudes) : amps_(std::move(amplitudes)) {
        if (amps_.empty() || !std::has_single_bit(amps_.size())) {
            throw std::invalid_argument("StateVector: amplitude count must be a power of two");
        }
        num_qubits_ = static_cast<std::size_t>(std::countr_zero(amps_.size()));
        if (num_qubits_ == 0) {
            throw std::invalid_argument("StateVector: needs at least one qubit");
        }
        if (std::abs(norm_squared() - 1) > 1e-10) {
            throw std::invalid_argument("StateVector: amplitudes are not normalized");
        }
    }

    std::size_t num_qubits() const noexcept { return num_qubits_; }
    std::size_t dimension() const noexcept { return amps_.size(); }
    std::span<const Complex> amplitudes() const noexcept { return amps_; }
    const Complex &operator[](std::size_t i) const { return amps_[i]; }

    /// Bit of the basis index that holds qubit q.
    std::size_t mask_of(Qubit q) const {
        if (q >= num_qubits_) {
            throw std::out_of_range("StateVector: qubit " + std::to_string(q) + " out of range");
        }
        return std::size_t{1} << (num_qubits_ - 1 - q);
    }

    void apply_single(const Eigen::Matrix2cd &m, Qubit q) {
        const std::size_t mask = mask_of(q);
        const Complex m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & mask) continue;
            const Complex a0 = amps_[i];
            const Complex a1 = amps_[i | mask];
            amps_[i] = m00 * a0 + m01 * a1;
            amps_[i | mask] = m10 * a0 + m11 * a1;
        }
    }

    void apply_cx(Qubit control, Qubit target) {
        const std::size_t cm = mask_of(control);
        const std::size_t tm = mask_of(target);
        if (cm == tm) {
            throw std::invalid_argument("StateVector: CX control and target must differ");
        }
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & cm) && !(i & tm)) {
                std::swap(amps_[i], amps_[i | tm]);
            }
        }
    }

    void apply_pauli(Pauli p, Qubit q) {
        const std::size_t mask = mask_of(q);
        const Complex i1(0, 1);
        switch (p) {
            case Pauli::I:
                return;
            case Pauli::X:
                for (std::size_t i = 0; i < amps_.size(); ++i) {
                    if (!(i & mask)) std::swap(amps_[i], amps_[i | mask]);
                }
                return;
            case Pauli::Y:
                for (std::size_t i = 0; i < amps_.size(); ++i) {
                    if (i & mask) continue;
                    const Complex a0 = amps_[i];
                    amps_[i] = -i1 * amps_[i | mask];
                    amps_[i | mask] = i1 * a0;
                }
                return;
            case Pauli::Z:
                for (std::size_t i = 0; i < amps_.size(); ++i) {
                    if (i & mask) amps_[i] = -amps_[i];
                }
                return;
        }
    }

    void apply(const Operation &op) {
        if (const auto *cx = std::get_if<gates::CX>(&op.gate)) {
            apply_cx(cx->control, cx->target);
        } else {
            apply_single(single_qubit_matrix(op.gate), op.qubit);
        }
    }

    double norm_squared() const {
        double s = 0;
        for (const auto &a : amps_) s += std::norm(a);
        return s;
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        for (std::size_t i = 0; i < amps_.size(); ++i) p[i] = std::norm(amps_[i]);
        return p;
    }

   private:
    std::size_t num_qubits_ = 0;
    std::vector<Complex> amps_;
};

inline StateVector run_statevector(const Circuit &c) {
    StateVector s(c.num_qubits());
    for (const auto &op : c.operations()) {
        s.apply(op);
    }
    return s;
}

/// <psi|P|psi> / <psi|psi>. Throws on qubit-count mismatch or if the
/// imaginary residue exceeds 1e-10.
inline double expectation_exact(const StateVector &state, const PauliString &p) {
    if (p.num_qubits() != state.num_qubits()) {
        throw std::invalid_argument("expectation_exact: Pauli string has " + std::to_string(p.num_qubits()) +
                                    " qubits, state has " + std::to_string(state.num_qubits()));
    }
    const PauliAction action(p);
    Complex acc(0, 0);
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        acc += std::conj(amps[i ^ action.flip]) * amps[i] * action.sign_of(i);
    }
    acc *= action.phase / state.norm_squared();
    if (std::abs(acc.imag()) > 1e-10) {
        throw std::logic_error("expectation_exact: non-negligible imaginary part");
    }
    return std::clamp(acc.real(), -1.0, 1.0);
}

/// Calibration-derived noise: symmetric readout flips, single-qubit
/// depolarizing per qubit, two-qubit depolarizing per coupled pair.
/// T1/T2 are carried for reporting only and never enter the dynamics.
struct NoiseModel {
    std::vector<double> readout_flip;
    std::vector<double> single_qubit_depol;
    std::map<CouplingMap::Edge, double> two_qubit_depol;
    std::vector<double> t1_us;
    std::vector<double> t2_us;

    std::size_t num_qubits() const noexcept { return readout_flip.size(); }

    void validate() const {
        auto prob = [](double p, const char *what) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw std::invalid_argument(std::string("NoiseModel: ") + what + " probability outside [0, 1]");
            }
        };
        if (single_qubit_depol.size() != readout_flip.size()) {
            throw std::invalid_argument("NoiseModel: per-qubit tables differ in length");
        }
        for (double p : readout_flip) prob(p, "readout");
        for (double p : single_qubit_depol) prob(p, "gate");
        for (const auto &[edge, p] : two_qubit_depol) {
            prob(p, "cx");
            if (edge.first >= num_qubits() || edge.second >= num_qubits()) {
                throw std::invalid_argument("NoiseModel: cx error references unknown qubit");
            }
        }
    }

    /// Throws if a calibrated CX pair is not an edge of the device.
    void check_against(const CouplingMap &m) const {
        for (const auto &[edge, p] : two_qubit_depol) {
            if (!m.has_edge(edge.first, edge.second)) {
                throw std::invalid_argument("NoiseModel: cx error for pair " + std::to_string(edge.first) + "_" +
                                            std::to_string(edge.second) + " not in coupling map");
            }
        }
    }

    double cx_error(Qubit a, Qubit b) const {
        auto it = two_qubit_depol.find(CouplingMap::normalize(a, b));
        if (it == two_qubit_depol.end()) {
            throw std::invalid_argument("NoiseModel: no CX calibration for pair " + std::to_string(a) + "_" +
                                        std::to_string(b));
        }
        return it->second;
    }

    /// Noise-free model of a given width; useful as a baseline.
    static NoiseModel ideal(std::size_t num_qubits) {
        NoiseModel m;
        m.readout_flip.assign(num_qubits, 0.0);
        m.single_qubit_depol.assign(num_qubits, 0.0);
        m.t1_us.assign(num_qubits, 0.0);
        m.t2_us.assign(num_qubits, 0.0);
        return m;
    }
};

/// Calibration JSON:
/// {"qubits": [{"id": 0, "t1_us": .., "t2_us": .., "gate_error": .., "readout_error": ..}, ...],
///  "cx_errors": [{"pair": [0, 1], "error": ..}, ...]}
inline NoiseModel noise_model_from_json(const nlohmann::json &j) {
    const auto &qubits = j.at("qubits");
    const std::size_t n = qubits.size();
    NoiseModel m;
    m.readout_flip.assign(n, 0.0);
    m.single_qubit_depol.assign(n, 0.0);
    m.t1_us.assign(n, 0.0);
    m.t2_us.assign(n, 0.0);
    std::vector<bool> seen(n, false);
    for (const auto &q : qubits) {
        const auto id = q.at("id").get<std::size_t>();
        if (id >= n || seen[id]) {
            throw std::invalid_argument("calibration: qubit ids must be a permutation of 0..n-1");
        }
        seen[id] = true;
        m.readout_flip[id] = q.at("readout_error").get<double>();
        m.single_qubit_depol[id] = q.at("gate_error").get<double>();
        m.t1_us[id] = q.value("t1_us", 0.0);
        m.t2_us[id] = q.value("t2_us", 0.0);
    }
    for (const auto &e : j.value("cx_errors", nlohmann::json::array())) {
        const auto pair = e.at("pair").get<std::vector<Qubit>>();
        if (pair.size() != 2 || pair[0] == pair[1]) {
            throw std::invalid_argument("calibration: cx pair must name two distinct qubits");
        }
        m.two_qubit_depol[CouplingMap::normalize(pair[0], pair[1])] = e.at("error").get<double>();
    }
    m.validate();
    return m;
}

inline NoiseModel load_calibration(const std::string &path) { return noise_model_from_json(read_json_file(path)); }

/// One distinct measured bitstring (qubit 0 first) and how often it occurred.
struct ShotRecord {
    std::vector<std::uint8_t> bits;
    std::size_t count = 0;

    std::string bitstring() const {
        std::string s;
        s.reserve(bits.size());
        for (auto b : bits) s.push_back(b ? '1' : '0');
        return s;
    }

    static ShotRecord from_string(std::string_view s, std::size_t count) {
        ShotRecord r;
        r.count = count;
        for (char c : s) {
            if (c != '0' && c != '1') {
                throw std::invalid_argument("ShotRecord: bitstring must contain only 0 and 1");
            }
            r.bits.push_back(c == '1');
        }
        return r;
    }
};

namespace detail {

struct PauliEvent {
    std::size_t op_index;
    Qubit qubit;
    Pauli pauli;
};

inline std::size_t draw_outcome(std::span<const double> cdf, double u) {
    const double x = u * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
    if (it == cdf.end()) --it;
    return static_cast<std::size_t>(it - cdf.begin());
}

inline std::vector<double> cumulative(const StateVector &s) {
    std::vector<double> cdf = s.probabilities();
    for (std::size_t i = 1; i < cdf.size(); ++i) cdf[i] += cdf[i - 1];
    return cdf;
}

class ShotSampler {
   public:
    ShotSampler(const Circuit &c, std::uint64_t seed, const NoiseModel *noise)
        : seed_(seed), noise_(noise), circuit_(noise ? c.reduced_to_basis() : c), num_qubits_(c.num_qubits()) {
        ideal_cdf_ = cumulative(run_statevector(circuit_));
        if (noise_) {
            for (const auto &op : circuit_.operations()) {
                if (const auto *cx = std::get_if<gates::CX>(&op.gate)) {
                    cx_error_.push_back(noise_->cx_error(cx->control, cx->target));
                } else {
                    cx_error_.push_back(0.0);
                }
            }
        }
    }

    /// Basis-state index observed on shot k.
    std::size_t shot(std::uint64_t k) {
        Rng rng = Rng::stream(seed_, k);
        if (!noise_) {
            return draw_outcome(ideal_cdf_, rng.uniform());
        }
        events_.clear();
        const auto &ops = circuit_.operations();
        for (std::size_t i = 0; i < ops.size(); ++i) {
            if (const auto *cx = std::get_if<gates::CX>(&ops[i].gate)) {
                if (rng.bernoulli(cx_error_[i])) {
                    // One of the 15 non-identity two-qubit Paulis.
                    const auto which = 1 + rng.below(15);
                    events_.push_back({i, cx->control, static_cast<Pauli>(which >> 2)});
                    events_.push_back({i, cx->target, static_cast<Pauli>(which & 3)});
                }
            } else if (rng.bernoulli(noise_->single_qubit_depol[ops[i].qubit])) {
                events_.push_back({i, ops[i].qubit, static_cast<Pauli>(1 + rng.below(3))});
            }
        }
        std::size_t outcome;
        if (events_.empty()) {
            outcome = draw_outcome(ideal_cdf_, rng.uniform());
        } else {
            StateVector s(num_qubits_);
            auto ev = events_.begin();
            for (std::size_t i = 0; i < ops.size(); ++i) {
                s.apply(ops[i]);
                for (; ev != events_.end() && ev->op_index == i; ++ev) {
                    s.apply_pauli(ev->pauli, ev->qubit);
                }
            }
            outcome = draw_outcome(cumulative(s), rng.uniform());
        }
        for (Qubit q = 0; q < num_qubits_; ++q) {
            if (rng.bernoulli(noise_->readout_flip[q])) {
                outcome ^= std::size_t{1} << (num_qubits_ - 1 - q);
            }
        }
        return outcome;
    }

   private:
    std::uint64_t seed_;
    const NoiseModel *noise_;
    Circuit circuit_;
    std::size_t num_qubits_;
    std::vector<double> ideal_cdf_;
    std::vector<double> cx_error_;
    std::vector<PauliEvent> events_;
};

}  // namespace detail

/// Measures every qubit in the Z basis `shots` times.
///
/// Shot k draws all of its randomness from stream k of `seed`, so the
/// result is independent of `threads`. With a noise model, each shot is a
/// trajectory over the basis-reduced circuit: after every single-qubit gate a
/// uniformly random X/Y/Z is injected with that qubit's gate error, after
/// every CX one of the 15 non-identity two-qubit Paulis is injected with the
/// pair's CX error, and each measured bit is flipped with its readout error.
/// Records are ordered by bitstring.
inline std::vector<ShotRecord> sample_shots(const Circuit &c, std::size_t shots, std::uint64_t seed,
                                            const NoiseModel *noise = nullptr, std::size_t threads = 1) {
    if (shots == 0) {
        throw std::invalid_argument("sample_shots: shots must be positive");
    }
    if (noise && noise->num_qubits() < c.num_qubits()) {
        throw std::invalid_argument("sample_shots: noise model covers " + std::to_string(noise->num_qubits()) +
                                    " qubits, circuit needs " + std::to_string(c.num_qubits()));
    }
    threads = std::clamp<std::size_t>(threads, 1, shots);

    std::vector<std::map<std::size_t, std::size_t>> partial(threads);
    auto work = [&](std::size_t t) {
        detail::ShotSampler sampler(c, seed, noise);
        const std::size_t begin = shots * t / threads;
        const std::size_t end = shots * (t + 1) / threads;
        for (std::size_t k = begin; k < end; ++k) {
            ++partial[t][sampler.shot(k)];
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }

    std::map<std::size_t, std::size_t> counts;
    for (const auto &p : partial) {
        for (const auto &[idx, n] : p) counts[idx] += n;
    }
    const std::size_t n = c.num_qubits();
    std::vector<ShotRecord> out;
    out.reserve(counts.size());
    for (const auto &[idx, cnt] : counts) {
        ShotRecord r;
        r.count = cnt;
        r.bits.resize(n);
        for (Qubit q = 0; q < n; ++q) r.bits[q] = (idx >> (n - 1 - q)) & 1;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace rank2
