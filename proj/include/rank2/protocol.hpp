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
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rank2/circuit.hpp"
#include "rank2/ensemble.hpp"
#include "rank2/entanglement.hpp"
#include "rank2/observables.hpp"
#include "rank2/rng.hpp"
#include "rank2/simulator.hpp"

namespace rank2 {

struct ShotAllocation {
    std::size_t total = 0;
    std::vector<std::size_t> per_member;
};

/// per_member[a] = round(total * w_a) for every member but the last, which
/// takes the remainder so the counts sum to `total` exactly.
inline ShotAllocation allocate_shots(std::size_t total, const std::vector<double> &weights) {
    if (total == 0) {
        throw std::invalid_argument("allocate_shots: total must be positive");
    }
    if (weights.empty()) {
        throw std::invalid_argument("allocate_shots: no weights");
    }
    double sum = 0;
    for (double w : weights) {
        if (!(w >= 0.0 && w <= 1.0)) {
            throw std::invalid_argument("allocate_shots: weights must lie in [0, 1]");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("allocate_shots: weights must sum to 1");
    }
    ShotAllocation a;
    a.total = total;
    a.per_member.resize(weights.size());
    std::size_t used = 0;
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
        a.per_member[k] = static_cast<std::size_t>(std::llround(static_cast<double>(total) * weights[k]));
        used += a.per_member[k];
    }
    // Rounding up several members can overshoot; take the excess back from
    // the latest members first.
    for (std::size_t k = weights.size() - 1; used > total && k-- > 0;) {
        const std::size_t cut = std::min(a.per_member[k], used - total);
        a.per_member[k] -= cut;
        used -= cut;
    }
    a.per_member.back() = total - used;
    return a;
}

/// GHZ-type preparations on the {|0...0>, |1...1>} subspace.
inline Circuit cat_plus_circuit(std::size_t num_qubits) {
    Circuit c(num_qubits);
    c.h(0);
    for (Qubit q = 0; q + 1 < num_qubits; ++q) c.cx(q, q + 1);
    return c.reduced_to_basis();
}

inline Circuit cat_minus_circuit(std::size_t num_qubits) {
    Circuit c(num_qubits);
    c.x(0).h(0);
    for (Qubit q = 0; q + 1 < num_qubits; ++q) c.cx(q, q + 1);
    return c.reduced_to_basis();
}

namespace detail {

inline void check_omega(double omega, const char *who) {
    if (!(omega >= 0.0 && omega <= 1.0)) {
        throw std::invalid_argument(std::string(who) + ": omega must lie in [0, 1]");
    }
}

}  // namespace detail

/// omega |cat+><cat+| + (1 - omega) |cat-><cat-|.
inline Rank2Ensemble build_cat_ensemble(std::size_t num_qubits, double omega) {
    if (num_qubits < 2) {
        throw std::invalid_argument("build_cat_ensemble: needs at least 2 qubits");
    }
    detail::check_omega(omega, "build_cat_ensemble");
    return Rank2Ensemble(num_qubits, {{omega, cat_plus_circuit(num_qubits)},
                                      {1.0 - omega, cat_minus_circuit(num_qubits)}});
}

/// omega |Phi+><Phi+| + (1 - omega) |00><00|.
inline Rank2Ensemble build_rho1_ensemble(double omega) {
    detail::check_omega(omega, "build_rho1_ensemble");
    return Rank2Ensemble(2, {{omega, cat_plus_circuit(2)}, {1.0 - omega, Circuit(2)}});
}

struct Rho2Setup {
    Rank2Ensemble ensemble;
    SigmaOperators sigma;
};

/// The rho1 pair rotated onto the x axes: omega |Phi+_x><Phi+_x| +
/// (1 - omega) |++><++|, with |Phi+_x> = (|++> + |-->)/sqrt(2). Its
/// subspace operators are ZZ, YZ and XI.
inline Rho2Setup build_rho2_ensemble(double omega) {
    detail::check_omega(omega, "build_rho2_ensemble");
    Circuit bell_x(2);
    bell_x.h(0).cx(0, 1).h(0).h(1);
    Circuit plus_plus(2);
    plus_plus.h(0).h(1);
    return {Rank2Ensemble(2, {{omega, bell_x.reduced_to_basis()}, {1.0 - omega, plus_plus.reduced_to_basis()}}),
            SigmaOperators{PauliString::parse("ZZ"), PauliString::parse("YZ"), PauliString::parse("XI")}};
}

enum class Family { cat, rho1, rho2, custom };

inline std::string family_name(Family f) {
    switch (f) {
        case Family::cat: return "cat";
        case Family::rho1: return "rho1";
        case Family::rho2: return "rho2";
        case Family::custom: return "custom";
    }
    return "?";
}

inline Family parse_family(const std::string &s) {
    if (s == "cat") return Family::cat;
    if (s == "rho1") return Family::rho1;
    if (s == "rho2") return Family::rho2;
    if (s == "custom") return Family::custom;
    throw std::invalid_argument("unknown family '" + s + "' (expected cat, rho1, rho2 or custom)");
}

/// {0, step, 2 step, ..., 1}; 1 is appended when step does not divide it.
inline std::vector<double> omega_grid_with_step(double step) {
    if (!(step > 0.0 && step <= 1.0)) {
        throw std::invalid_argument("omega step must lie in (0, 1]");
    }
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) grid.push_back(std::min(1.0, static_cast<double>(k) * step));
    if (std::abs(grid.back() - 1.0) < 1e-9) {
        grid.back() = 1.0;
    } else {
        grid.push_back(1.0);
    }
    return grid;
}

struct ExperimentConfig {
    Family family = Family::cat;
    std::size_t num_qubits = 2;
    Qubit target_qubit = 0;
    std::vector<double> omega_grid = omega_grid_with_step(0.125);
    std::size_t shots = 8192;
    std::uint64_t seed = 0;
    std::optional<NoiseModel> noise;
    /// Overrides the (Sigma^x, Sigma^y) pair chosen by the family.
    std::optional<std::pair<PauliString, PauliString>> sigma_strings;
    /// family == custom: omega weights the first circuit, 1 - omega the second.
    std::optional<std::pair<Circuit, Circuit>> custom_members;
    std::size_t threads = 1;

    void validate() const {
        if (shots == 0) throw std::invalid_argument("config: shots must be positive");
        if (omega_grid.empty()) throw std::invalid_argument("config: empty omega grid");
        for (double w : omega_grid) detail::check_omega(w, "config");
        if (num_qubits < 2) throw std::invalid_argument("config: needs at least 2 qubits");
        if (target_qubit >= num_qubits) throw std::invalid_argument("config: target qubit out of range");
        if ((family == Family::rho1 || family == Family::rho2) && num_qubits != 2) {
            throw std::invalid_argument("config: " + family_name(family) + " is a two-qubit family");
        }
        if (family == Family::custom) {
            if (!custom_members) throw std::invalid_argument("config: custom family needs member circuits");
            if (custom_members->first.num_qubits() != num_qubits ||
                custom_members->second.num_qubits() != num_qubits) {
                throw std::invalid_argument("config: custom member circuits must match num_qubits");
            }
        }
        if (sigma_strings && (sigma_strings->first.num_qubits() != num_qubits ||
                              sigma_strings->second.num_qubits() != num_qubits)) {
            throw std::invalid_argument("config: sigma strings must match num_qubits");
        }
        if (noise && noise->num_qubits() < num_qubits) {
            throw std::invalid_argument("config: calibration covers fewer qubits than the experiment");
        }
    }
};

/// The ensemble at one omega together with the Sigma^x / Sigma^y strings
/// used to measure it.
struct EnsembleSetup {
    Rank2Ensemble ensemble;
    PauliString sigma_x;
    PauliString sigma_y;
};

inline EnsembleSetup build_ensemble(const ExperimentConfig &cfg, double omega) {
    auto defaults = sigma_operators(cfg.num_qubits, cfg.target_qubit);
    auto pick = [&](SigmaOperators s) {
        if (cfg.sigma_strings) return std::make_pair(cfg.sigma_strings->first, cfg.sigma_strings->second);
        return std::make_pair(s.x, s.y);
    };
    switch (cfg.family) {
        case Family::cat: {
            auto [x, y] = pick(defaults);
            return {build_cat_ensemble(cfg.num_qubits, omega), x, y};
        }
        case Family::rho1: {
            auto [x, y] = pick(defaults);
            return {build_rho1_ensemble(omega), x, y};
        }
        case Family::rho2: {
            auto setup = build_rho2_ensemble(omega);
            auto [x, y] = pick(setup.sigma);
            return {std::move(setup.ensemble), x, y};
        }
        case Family::custom: {
            detail::check_omega(omega, "custom ensemble");
            auto [x, y] = pick(defaults);
            return {Rank2Ensemble(cfg.num_qubits,
                                  {{omega, cfg.custom_members->first}, {1.0 - omega, cfg.custom_members->second}}),
                    x, y};
        }
    }
    throw std::logic_error("build_ensemble: unhandled family");
}

struct ReportRow {
    double omega = 0;
    double mean_x = 0;
    double mean_y = 0;
    double e_est = 0;
    std::optional<double> c_est;
    double e_exact = 0;
    std::optional<double> c_exact;
    /// |E_est - E_exact| / E_exact, or the absolute difference when E_exact is 0.
    double delta_e = 0;
    bool delta_e_relative = true;
    std::optional<double> delta_c;
    bool delta_c_relative = true;
    double stderr_x = 0;
    double stderr_y = 0;
    std::vector<std::size_t> shots_per_member;
};

struct EntanglementReport {
    std::string family;
    std::size_t num_qubits = 0;
    Qubit target_qubit = 0;
    std::size_t shots = 0;
    std::uint64_t seed = 0;
    std::string sigma_x;
    std::string sigma_y;
    bool noisy = false;
    std::vector<double> t1_us;
    std::vector<double> t2_us;
    std::vector<ReportRow> rows;
};

/// Below this an exact value counts as zero when forming deviations.
inline constexpr double kZeroReference = 1e-12;

inline std::pair<double, bool> deviation(double estimate, double exact) {
    if (exact > kZeroReference) return {std::abs(estimate - exact) / exact, true};
    return {std::abs(estimate - exact), false};
}

/// Ensemble-weighted Sigma means using exact member expectations:
/// <S> = sum_a w_a <psi_a|S|psi_a>.
inline std::pair<double, double> weighted_sigma_means(const Rank2Ensemble &e, const std::vector<double> &weights,
                                                      const PauliString &sigma_x, const PauliString &sigma_y) {
    double mx = 0;
    double my = 0;
    for (std::size_t a = 0; a < e.members().size(); ++a) {
        if (weights[a] == 0.0) continue;
        const auto s = run_statevector(e.members()[a].preparation);
        mx += weights[a] * expectation_exact(s, sigma_x);
        my += weights[a] * expectation_exact(s, sigma_y);
    }
    return {mx, my};
}

/// Runs the omega sweep. Each member is measured in both settings with its
/// full share of the shot budget, and member estimates are combined with the
/// realized weights allocated/total. Every (omega index, member, setting)
/// triple draws from its own seed stream.
inline EntanglementReport run_experiment(const ExperimentConfig &cfg) {
    cfg.validate();
    const NoiseModel *noise = cfg.noise ? &*cfg.noise : nullptr;

    EntanglementReport report;
    report.family = family_name(cfg.family);
    report.num_qubits = cfg.num_qubits;
    report.target_qubit = cfg.target_qubit;
    report.shots = cfg.shots;
    report.seed = cfg.seed;
    report.noisy = noise != nullptr;
    if (noise) {
        report.t1_us = noise->t1_us;
        report.t2_us = noise->t2_us;
    }
    const bool two_qubit = cfg.num_qubits == 2;

    for (std::size_t w = 0; w < cfg.omega_grid.size(); ++w) {
        const double omega = cfg.omega_grid[w];
        const auto setup = build_ensemble(cfg, omega);
        if (w == 0) {
            report.sigma_x = setup.sigma_x.str();
            report.sigma_y = setup.sigma_y.str();
        }
        const auto alloc = allocate_shots(cfg.shots, setup.ensemble.weights());

        ReportRow row;
        row.omega = omega;
        row.shots_per_member = alloc.per_member;
        double var_x = 0;
        double var_y = 0;
        const auto &members = setup.ensemble.members();
        for (std::size_t a = 0; a < members.size(); ++a) {
            const std::size_t n = alloc.per_member[a];
            if (n == 0) continue;
            const double share = static_cast<double>(n) / static_cast<double>(cfg.shots);
            const auto ex = pauli_expectation_sampled(members[a].preparation, setup.sigma_x, n,
                                                      derive_seed(cfg.seed, {w, a, 0}), noise, cfg.threads);
            const auto ey = pauli_expectation_sampled(members[a].preparation, setup.sigma_y, n,
                                                      derive_seed(cfg.seed, {w, a, 1}), noise, cfg.threads);
            row.mean_x += share * ex.value;
            row.mean_y += share * ey.value;
            var_x += share * share * ex.std_error * ex.std_error;
            var_y += share * share * ey.std_error * ey.std_error;
        }
        row.stderr_x = std::sqrt(var_x);
        row.stderr_y = std::sqrt(var_y);
        row.e_est = geometric_measure(row.mean_x, row.mean_y);

        const auto rho = ensemble_density_matrix(setup.ensemble);
        const auto [exact_x, exact_y] = exact_sigma_means(rho, setup.sigma_x, setup.sigma_y);
        row.e_exact = geometric_measure(exact_x, exact_y);
        std::tie(row.delta_e, row.delta_e_relative) = deviation(row.e_est, row.e_exact);
        if (two_qubit) {
            row.c_est = concurrence_from_correlations(row.mean_x, row.mean_y);
            row.c_exact = wootters_concurrence(rho);
            double dc;
            std::tie(dc, row.delta_c_relative) = deviation(*row.c_est, *row.c_exact);
            row.delta_c = dc;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

/// Exact curve of the family: E and (for two qubits) C from the ensemble
/// density matrix, no sampling.
struct ExactPoint {
    double omega;
    double e_exact;
    std::optional<double> c_exact;
};

inline std::vector<ExactPoint> exact_curve(const ExperimentConfig &cfg) {
    cfg.validate();
    std::vector<ExactPoint> out;
    for (double omega : cfg.omega_grid) {
        const auto setup = build_ensemble(cfg, omega);
        const auto rho = ensemble_density_matrix(setup.ensemble);
        const auto [mx, my] = exact_sigma_means(rho, setup.sigma_x, setup.sigma_y);
        ExactPoint p{omega, geometric_measure(mx, my), std::nullopt};
        if (cfg.num_qubits == 2) p.c_exact = wootters_concurrence(rho);
        out.push_back(p);
    }
    return out;
}

// ---- Serialization ---------------------------------------------------------

inline constexpr const char *kReportCsvHeader =
    "omega,mean_x,mean_y,E_est,C_est,E_exact,C_exact,delta_E,delta_C,stderr_x,stderr_y";

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string format_optional(const std::optional<double> &v) { return v ? format_number(*v) : std::string(); }

inline void write_report_csv(std::ostream &out, const EntanglementReport &r) {
    out << kReportCsvHeader << '\n';
    for (const auto &row : r.rows) {
        out << format_number(row.omega) << ',' << format_number(row.mean_x) << ',' << format_number(row.mean_y) << ','
            << format_number(row.e_est) << ',' << format_optional(row.c_est) << ',' << format_number(row.e_exact)
            << ',' << format_optional(row.c_exact) << ',' << format_number(row.delta_e) << ','
            << format_optional(row.delta_c) << ',' << format_number(row.stderr_x) << ','
            << format_number(row.stderr_y) << '\n';
    }
}

inline nlohmann::json report_to_json(const EntanglementReport &r) {
    nlohmann::json rows = nlohmann::json::array();
    auto opt = [](const std::optional<double> &v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    for (const auto &row : r.rows) {
        rows.push_back({{"omega", row.omega},
                        {"mean_x", row.mean_x},
                        {"mean_y", row.mean_y},
                        {"E_est", row.e_est},
                        {"C_est", opt(row.c_est)},
                        {"E_exact", row.e_exact},
                        {"C_exact", opt(row.c_exact)},
                        {"delta_E", row.delta_e},
                        {"delta_E_relative", row.delta_e_relative},
                        {"delta_C", opt(row.delta_c)},
                        {"delta_C_relative", row.delta_c ? nlohmann::json(row.delta_c_relative) : nlohmann::json(nullptr)},
                        {"stderr_x", row.stderr_x},
                        {"stderr_y", row.stderr_y},
                        {"shots_per_member", row.shots_per_member}});
    }
    nlohmann::json meta = {{"family", r.family},
                           {"num_qubits", r.num_qubits},
                           {"target_qubit", r.target_qubit},
                           {"shots", r.shots},
                           {"seed", r.seed},
                           {"sigma_x", r.sigma_x},
                           {"sigma_y", r.sigma_y},
                           {"shots_per_setting", "full member allocation for each of sigma_x and sigma_y"},
                           {"noise", r.noisy ? "calibrated" : "none"}};
    if (r.noisy) {
        meta["readout_model"] = "symmetric bit flip";
        meta["gate_noise_model"] = "depolarizing via stochastic Pauli injection";
        meta["t1_us"] = r.t1_us;
        meta["t2_us"] = r.t2_us;
        meta["t1_t2_used_in_dynamics"] = false;
    }
    return {{"metadata", meta}, {"rows", rows}};
}

inline void write_exact_curve_csv(std::ostream &out, const std::vector<ExactPoint> &curve) {
    out << "omega,E_exact,C_exact\n";
    for (const auto &p : curve) {
        out << format_number(p.omega) << ',' << format_number(p.e_exact) << ',' << format_optional(p.c_exact) << '\n';
    }
}

inline nlohmann::json exact_curve_to_json(const std::vector<ExactPoint> &curve) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &p : curve) {
        rows.push_back({{"omega", p.omega},
                        {"E_exact", p.e_exact},
                        {"C_exact", p.c_exact ? nlohmann::json(*p.c_exact) : nlohmann::json(nullptr)}});
    }
    return rows;
}

/// Config JSON:
/// {"family": "cat", "num_qubits": 2, "target_qubit": 0, "omega_step": 0.125 | "omega_grid": [...],
///  "shots": 8192, "seed": 7, "calibration": "cal.json", "sigma_strings": ["XX", "YX"],
///  "members": [circuit, circuit]}
/// Relative calibration paths resolve against `base_dir`.
inline ExperimentConfig config_from_json(const nlohmann::json &j, const std::filesystem::path &base_dir = {}) {
    ExperimentConfig cfg;
    cfg.family = parse_family(j.value("family", std::string("cat")));
    cfg.num_qubits = j.value("num_qubits", std::size_t{2});
    cfg.target_qubit = j.value("target_qubit", std::size_t{0});
    if (j.contains("omega_grid")) {
        if (j.contains("omega_step")) {
            throw std::invalid_argument("config: give omega_grid or omega_step, not both");
        }
        cfg.omega_grid = j.at("omega_grid").get<std::vector<double>>();
    } else if (j.contains("omega_step")) {
        cfg.omega_grid = omega_grid_with_step(j.at("omega_step").get<double>());
    }
    cfg.shots = j.value("shots", std::size_t{8192});
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.threads = j.value("threads", std::size_t{1});
    if (j.contains("calibration") && !j.at("calibration").is_null()) {
        std::filesystem::path p = j.at("calibration").get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        cfg.noise = load_calibration(p.string());
    }
    if (j.contains("sigma_strings")) {
        const auto s = j.at("sigma_strings").get<std::vector<std::string>>();
        if (s.size() != 2) throw std::invalid_argument("config: sigma_strings needs exactly two strings");
        cfg.sigma_strings.emplace(PauliString::parse(s[0]), PauliString::parse(s[1]));
    }
    if (j.contains("members")) {
        const auto &m = j.at("members");
        if (!m.is_array() || m.size() != 2) throw std::invalid_argument("config: members needs exactly two circuits");
        cfg.custom_members.emplace(circuit_from_json(m[0]), circuit_from_json(m[1]));
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string &path) {
    return config_from_json(read_json_file(path), std::filesystem::path(path).parent_path());
}

}  // namespace rank2
