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
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rank2/circuit.hpp"
#include "rank2/ensemble.hpp"
#include "rank2/pauli.hpp"
#include "rank2/simulator.hpp"

namespace rank2 {

/// Validated N-qubit density matrix: Hermitian, unit trace and positive
/// semidefinite, each to within 1e-10.
class DensityMatrix {
   public:
    static constexpr double kTolerance = 1e-10;

    explicit DensityMatrix(Eigen::MatrixXcd m) : matrix_(std::move(m)) {
        const auto dim = static_cast<std::size_t>(matrix_.rows());
        if (matrix_.rows() != matrix_.cols() || dim < 2 || !std::has_single_bit(dim)) {
            throw std::invalid_argument("DensityMatrix: must be square with power-of-two dimension >= 2");
        }
        num_qubits_ = static_cast<std::size_t>(std::countr_zero(dim));
        if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kTolerance) {
            throw std::invalid_argument("DensityMatrix: not Hermitian");
        }
        if (std::abs(matrix_.trace() - Complex(1, 0)) > kTolerance) {
            throw std::invalid_argument("DensityMatrix: trace is not 1");
        }
        const Eigen::MatrixXcd herm = (matrix_ + matrix_.adjoint()) / 2.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -kTolerance) {
            throw std::invalid_argument("DensityMatrix: has a negative eigenvalue");
        }
    }

    static DensityMatrix pure(const StateVector &s) {
        Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dimension()));
        for (std::size_t i = 0; i < s.dimension(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
        return DensityMatrix(v * v.adjoint());
    }

    static DensityMatrix maximally_mixed(std::size_t num_qubits) {
        const auto dim = static_cast<Eigen::Index>(std::size_t{1} << num_qubits);
        return DensityMatrix(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
    }

    std::size_t num_qubits() const noexcept { return num_qubits_; }
    const Eigen::MatrixXcd &matrix() const noexcept { return matrix_; }

    /// Eigenvalues in descending order.
    std::vector<double> spectrum() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_, Eigen::EigenvaluesOnly);
        std::vector<double> ev(es.eigenvalues().begin(), es.eigenvalues().end());
        std::sort(ev.rbegin(), ev.rend());
        return ev;
    }

   private:
    Eigen::MatrixXcd matrix_;
    std::size_t num_qubits_ = 0;
};

/// Geometric measure E and/or concurrence C of a state.
struct EntanglementValue {
    std::optional<double> geometric;
    std::optional<double> concurrence;
};

/// Two-qubit states a|00> + b|11> mixed with weights.
struct Rank2Amplitudes {
    struct Term {
        double weight;
        Complex a;
        Complex b;
    };
    std::vector<Term> terms;

    void validate() const {
        if (terms.empty()) {
            throw std::invalid_argument("Rank2Amplitudes: no terms");
        }
        double total = 0;
        for (const auto &t : terms) {
            if (!(t.weight >= 0)) {
                throw std::invalid_argument("Rank2Amplitudes: negative weight");
            }
            if (std::abs(std::norm(t.a) + std::norm(t.b) - 1.0) > 1e-12) {
                throw std::invalid_argument("Rank2Amplitudes: |a|^2 + |b|^2 != 1");
            }
            total += t.weight;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw std::invalid_argument("Rank2Amplitudes: weights do not sum to 1");
        }
    }

    DensityMatrix density_matrix() const {
        validate();
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(4, 4);
        for (const auto &t : terms) {
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
            v(0) = t.a;
            v(3) = t.b;
            rho += t.weight * (v * v.adjoint());
        }
        return DensityMatrix(rho);
    }
};

/// E = (1 - sqrt(1 - s)) / 2 with s = mean_x^2 + mean_y^2 clamped to [0, 1].
inline double geometric_measure(double mean_x, double mean_y) {
    const double s = std::clamp(mean_x * mean_x + mean_y * mean_y, 0.0, 1.0);
    return 0.5 * (1.0 - std::sqrt(1.0 - s));
}

/// C = min(1, sqrt(mean_x^2 + mean_y^2)); exact for two-qubit rank-2 states.
inline double concurrence_from_correlations(double mean_x, double mean_y) {
    return std::min(1.0, std::sqrt(mean_x * mean_x + mean_y * mean_y));
}

/// Concurrence recovered from the geometric measure, C = 2 sqrt(E (1 - E)).
inline double relation_check(double geometric) {
    if (!(geometric >= 0.0 && geometric <= 0.5)) {
        throw std::domain_error("relation_check: E must lie in [0, 0.5], got " + std::to_string(geometric));
    }
    return 2.0 * std::sqrt(geometric * (1.0 - geometric));
}

namespace detail {

inline void require_two_qubits(const DensityMatrix &rho, const char *who) {
    if (rho.num_qubits() != 2) {
        throw std::invalid_argument(std::string(who) + ": needs a two-qubit density matrix");
    }
}

}  // namespace detail

/// (sigma_y x sigma_y) rho^* (sigma_y x sigma_y).
inline Eigen::Matrix4cd spin_flip(const DensityMatrix &rho) {
    detail::require_two_qubits(rho, "spin_flip");
    Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
    yy(0, 3) = -1;
    yy(1, 2) = 1;
    yy(2, 1) = 1;
    yy(3, 0) = -1;
    const Eigen::Matrix4cd r = rho.matrix();
    return yy * r.conjugate() * yy;
}

/// Eigenvalues of the non-Hermitian rho * rho~ (real parts), descending.
/// These are the squares of the Wootters lambdas.
inline std::array<double, 4> rho_rho_tilde_spectrum(const DensityMatrix &rho) {
    const Eigen::Matrix4cd r = rho.matrix();
    const Eigen::Matrix4cd product = r * spin_flip(rho);
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(product, false);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("rho_rho_tilde_spectrum: eigenvalue solver did not converge");
    }
    std::array<double, 4> out{};
    for (int k = 0; k < 4; ++k) out[k] = es.eigenvalues()(k).real();
    std::sort(out.rbegin(), out.rend());
    return out;
}

/// Null-space tolerance for rho when forming Wootters lambdas.
inline constexpr double kRangeTolerance = 1e-13;

/// Squared Wootters lambdas, descending.
///
/// rho * rho~ and (D V^dag rho~ V) share their nonzero eigenvalues, where
/// rho = V D V^dag is restricted to eigenvalues above kRangeTolerance. Working
/// on the range of rho keeps the null eigenvalues exactly zero, so their
/// square roots do not inject sqrt(machine epsilon) noise into C.
inline std::array<double, 4> wootters_lambda_squares(const DensityMatrix &rho) {
    detail::require_two_qubits(rho, "wootters_lambda_squares");
    const Eigen::Matrix4cd r = rho.matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(r);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < 4; ++k) {
        if (es.eigenvalues()(k) > kRangeTolerance) keep.push_back(k);
    }
    const auto rank = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXcd v(4, rank);
    Eigen::VectorXcd d(rank);
    for (Eigen::Index k = 0; k < rank; ++k) {
        v.col(k) = es.eigenvectors().col(keep[static_cast<std::size_t>(k)]);
        d(k) = es.eigenvalues()(keep[static_cast<std::size_t>(k)]);
    }
    const Eigen::MatrixXcd reduced = d.asDiagonal() * (v.adjoint() * spin_flip(rho) * v);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(reduced, false);
    if (ces.info() != Eigen::Success) {
        throw std::runtime_error("wootters_lambda_squares: eigenvalue solver did not converge");
    }
    std::array<double, 4> out{};
    for (Eigen::Index k = 0; k < rank; ++k) out[static_cast<std::size_t>(k)] = ces.eigenvalues()(k).real();
    std::sort(out.rbegin(), out.rend());
    return out;
}

/// Wootters concurrence max(0, l1 - l2 - l3 - l4), where l_i^2 are the
/// eigenvalues of rho * rho~ in decreasing order. Eigenvalues above -1e-9
/// are clamped to zero; anything more negative means rho is not a state.
inline double wootters_concurrence(const DensityMatrix &rho) {
    const auto sq = wootters_lambda_squares(rho);
    std::array<double, 4> l{};
    for (int k = 0; k < 4; ++k) {
        if (sq[k] < -1e-9) {
            throw std::domain_error("wootters_concurrence: rho * rho~ has a negative eigenvalue");
        }
        l[k] = std::sqrt(std::max(0.0, sq[k]));
    }
    return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

struct Rank2Concurrence {
    double lambda1;
    double lambda2;
    double concurrence;
};

/// Closed-form Wootters lambdas of sum_a w_a (a_a|00> + b_a|11>):
/// l_{1,2} = sqrt(sum_ab w_a w_b |a_a|^2 |b_b|^2) +/- |sum_a w_a a_a b_a^*|,
/// the other two vanish, and C = 2 |sum_a w_a a_a b_a^*|.
inline Rank2Concurrence concurrence_rank2_closed_form(const Rank2Amplitudes &amps) {
    amps.validate();
    double weight_a = 0;
    double weight_b = 0;
    Complex coherence(0, 0);
    for (const auto &t : amps.terms) {
        weight_a += t.weight * std::norm(t.a);
        weight_b += t.weight * std::norm(t.b);
        coherence += t.weight * t.a * std::conj(t.b);
    }
    const double root = std::sqrt(weight_a * weight_b);
    const double c = std::abs(coherence);
    return {root + c, root - c, 2.0 * c};
}

/// tr(rho P) / tr(rho).
inline double pauli_expectation(const DensityMatrix &rho, const PauliString &p) {
    if (p.num_qubits() != rho.num_qubits()) {
        throw std::invalid_argument("pauli_expectation: Pauli string has " + std::to_string(p.num_qubits()) +
                                    " qubits, density matrix has " + std::to_string(rho.num_qubits()));
    }
    const PauliAction action(p);
    const auto &m = rho.matrix();
    Complex acc(0, 0);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const auto j = static_cast<Eigen::Index>(static_cast<std::size_t>(i) ^ action.flip);
        acc += m(i, j) * action.sign_of(static_cast<std::size_t>(i));
    }
    acc *= action.phase / m.trace().real();
    if (std::abs(acc.imag()) > 1e-10) {
        throw std::logic_error("pauli_expectation: non-negligible imaginary part");
    }
    return acc.real();
}

/// (tr(rho Sigma^x), tr(rho Sigma^y)).
inline std::pair<double, double> exact_sigma_means(const DensityMatrix &rho, const PauliString &sigma_x,
                                                   const PauliString &sigma_y) {
    return {pauli_expectation(rho, sigma_x), pauli_expectation(rho, sigma_y)};
}

/// rho = sum_a w_a |psi_a><psi_a| with each |psi_a> obtained by statevector
/// simulation of the member's preparation circuit.
inline DensityMatrix ensemble_density_matrix(const Rank2Ensemble &e) {
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << e.num_qubits());
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto &m : e.members()) {
        if (m.weight == 0.0) continue;
        const StateVector s = run_statevector(m.preparation);
        Eigen::VectorXcd v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v(i) = s[static_cast<std::size_t>(i)];
        rho += m.weight * (v * v.adjoint());
    }
    return DensityMatrix(rho);
}

/// Random rank-2 equivalence check across the independent concurrence
/// routes: Wootters eigenvalues, the closed-form lambdas, the correlation
/// formula on exact means, and C recovered from E. Reports the largest
/// pairwise discrepancy over `trials` random states.
struct OracleCheckResult {
    std::size_t trials = 0;
    double max_discrepancy = 0;
    double max_wootters_vs_closed_form = 0;
    double max_correlations_vs_wootters = 0;
    double max_relation_vs_wootters = 0;
};

using CorrelationConcurrenceFn = std::function<double(double, double)>;

inline Rank2Amplitudes random_rank2_amplitudes(Rng &rng) {
    auto gaussian = [&rng]() {
        // Box-Muller.
        const double u1 = 1.0 - rng.uniform();
        const double u2 = rng.uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    };
    const std::size_t n = 1 + rng.below(4);
    Rank2Amplitudes amps;
    double total = 0;
    std::vector<double> w(n);
    for (auto &x : w) {
        x = rng.uniform() + 1e-3;
        total += x;
    }
    for (std::size_t k = 0; k < n; ++k) {
        Complex a(gaussian(), gaussian());
        Complex b(gaussian(), gaussian());
        const double norm = std::sqrt(std::norm(a) + std::norm(b));
        amps.terms.push_back({w[k] / total, a / norm, b / norm});
    }
    // Renormalize the last weight so the sum is 1 to rounding.
    double head = 0;
    for (std::size_t k = 0; k + 1 < n; ++k) head += amps.terms[k].weight;
    amps.terms.back().weight = 1.0 - head;
    return amps;
}

inline OracleCheckResult oracle_check(std::size_t trials, std::uint64_t seed,
                                      const CorrelationConcurrenceFn &from_correlations = concurrence_from_correlations) {
    OracleCheckResult r;
    r.trials = trials;
    const auto sigma_x = PauliString::parse("XX");
    const auto sigma_y = PauliString::parse("YX");
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng = Rng::stream(seed, t);
        const auto amps = random_rank2_amplitudes(rng);
        const auto rho = amps.density_matrix();
        const double wootters = wootters_concurrence(rho);
        const double closed = concurrence_rank2_closed_form(amps).concurrence;
        const auto [mx, my] = exact_sigma_means(rho, sigma_x, sigma_y);
        const double corr = from_correlations(mx, my);
        const double rel = relation_check(geometric_measure(mx, my));
        r.max_wootters_vs_closed_form = std::max(r.max_wootters_vs_closed_form, std::abs(wootters - closed));
        r.max_correlations_vs_wootters = std::max(r.max_correlations_vs_wootters, std::abs(corr - wootters));
        r.max_relation_vs_wootters = std::max(r.max_relation_vs_wootters, std::abs(rel - wootters));
        r.max_discrepancy = std::max({r.max_discrepancy, std::abs(wootters - closed), std::abs(corr - wootters),
                                      std::abs(corr - closed), std::abs(rel - wootters)});
    }
    return r;
}

}  // namespace rank2
