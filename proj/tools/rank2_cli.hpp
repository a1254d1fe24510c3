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

// Command-line front end. Exit codes: 0 ok, 1 check failed, 2 usage, 3 I/O
// or configuration error. Data goes to stdout (or --out); diagnostics to
// stderr.

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rank2/rank2.hpp"

#ifndef RANK2_DATA_DIR
#define RANK2_DATA_DIR "data"
#endif

namespace rank2::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kIoError = 3 };

/// Thrown for problems with files or their contents.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown for flag combinations that are syntactically fine but unusable.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Resolves a data file: as given if it exists, otherwise from the bundled
/// data directory.
inline std::string resolve_data_file(const std::string &path) {
    if (std::filesystem::exists(path)) return path;
    const auto bundled = std::filesystem::path(RANK2_DATA_DIR) / path;
    if (std::filesystem::exists(bundled)) return bundled.string();
    throw IoError("file not found: '" + path + "'");
}

template <typename F>
auto io_guard(F &&f) -> decltype(f()) {
    try {
        return f();
    } catch (const IoError &) {
        throw;
    } catch (const std::exception &e) {
        throw IoError(e.what());
    }
}

struct GridFlags {
    std::optional<double> step;
    std::vector<double> list;

    void add_to(CLI::App *cmd) {
        auto *s = cmd->add_option("--omega-step", step, "Grid spacing from 0 to 1 (default 0.125)");
        auto *l = cmd->add_option("--omega-list", list, "Explicit comma-separated omega values")->delimiter(',');
        s->excludes(l);
    }

    std::vector<double> grid() const {
        if (!list.empty()) return list;
        return omega_grid_with_step(step.value_or(0.125));
    }
};

struct OutputFlags {
    std::string out;
    std::string format = "csv";

    void add_to(CLI::App *cmd) {
        cmd->add_option("--out", out, "Write output to this file instead of stdout");
        cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    }

    void emit(std::ostream &stdout_, const std::function<void(std::ostream &)> &write) const {
        if (out.empty()) {
            write(stdout_);
            return;
        }
        std::ofstream f(out);
        if (!f) throw IoError("cannot open '" + out + "' for writing");
        write(f);
        if (!f) throw IoError("failed writing '" + out + "'");
    }
};

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t> &flag) {
    if (flag) return *flag;
    if (const char *env = std::getenv("RANK2_SEED")) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception &) {
        }
        throw UsageError(std::string("RANK2_SEED is not an unsigned integer: '") + env + "'");
    }
    throw UsageError("no seed given: pass --seed or set RANK2_SEED");
}

/// Runs the tool on argv-style arguments (without the program name).
inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"rank2: entanglement of rank-2 mixed states from simulated correlation measurements"};
    app.require_subcommand(1);

    // sweep
    auto *sweep = app.add_subcommand("sweep", "Run an omega sweep and report estimated vs exact E and C");
    std::string family;
    std::size_t qubits = 2;
    std::size_t shots = 8192;
    std::optional<std::uint64_t> seed;
    std::string noise_file;
    std::string config_file;
    Qubit target = 0;
    std::size_t threads = 1;
    GridFlags sweep_grid;
    OutputFlags sweep_out;
    auto *fam = sweep->add_option("--family", family, "cat, rho1 or rho2")->check(CLI::IsMember({"cat", "rho1", "rho2"}));
    sweep->add_option("--qubits", qubits, "Number of qubits")->check(CLI::PositiveNumber);
    sweep->add_option("--shots", shots, "Shots per mixed state (split by weight)")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed, "Experiment seed (default: $RANK2_SEED)");
    sweep->add_option("--noise", noise_file, "Calibration JSON (bundled: ibmq-melbourne-cal.json)");
    sweep->add_option("--target", target, "Qubit whose entanglement with the rest is measured");
    sweep->add_option("--threads", threads, "Sampling threads (results do not depend on this)")
        ->check(CLI::PositiveNumber);
    auto *cfg_opt = sweep->add_option("--config", config_file, "Experiment config JSON");
    cfg_opt->excludes(fam);
    sweep_grid.add_to(sweep);
    sweep_out.add_to(sweep);

    // exact-curve
    auto *curve = app.add_subcommand("exact-curve", "Exact E and C of a family over an omega grid");
    std::string curve_family;
    std::size_t curve_qubits = 2;
    Qubit curve_target = 0;
    GridFlags curve_grid;
    OutputFlags curve_out;
    curve->add_option("--family", curve_family, "cat, rho1 or rho2")
        ->required()
        ->check(CLI::IsMember({"cat", "rho1", "rho2"}));
    curve->add_option("--qubits", curve_qubits, "Number of qubits")->check(CLI::PositiveNumber);
    curve->add_option("--target", curve_target, "Target qubit");
    curve_grid.add_to(curve);
    curve_out.add_to(curve);

    // oracle-check
    auto *oracle = app.add_subcommand("oracle-check", "Cross-check concurrence routes on random rank-2 states");
    std::size_t trials = 1000;
    std::optional<std::uint64_t> oracle_seed;
    double tolerance = 1e-9;
    oracle->add_option("--trials", trials, "Number of random states")->check(CLI::PositiveNumber);
    oracle->add_option("--seed", oracle_seed, "Seed (default: $RANK2_SEED)");
    oracle->add_option("--tolerance", tolerance, "Largest accepted discrepancy");

    // validate
    auto *validate = app.add_subcommand("validate", "Check CX placement against a device coupling map");
    std::string coupling_file = "ibmq-melbourne.json";
    std::string circuit_file;
    std::string validate_family;
    std::size_t validate_qubits = 2;
    validate->add_option("--coupling", coupling_file, "Coupling-map JSON");
    auto *circ = validate->add_option("--circuit", circuit_file, "Circuit JSON");
    auto *vfam = validate->add_option("--family", validate_family, "Validate the family's preparation circuits")
                     ->check(CLI::IsMember({"cat", "rho1", "rho2"}));
    validate->add_option("--qubits", validate_qubits, "Qubits for --family")->check(CLI::PositiveNumber);
    circ->excludes(vfam);

    // info
    auto *info = app.add_subcommand("info", "Describe the gate set, device and calibration");
    std::string info_cal = "ibmq-melbourne-cal.json";
    std::string info_coupling = "ibmq-melbourne.json";
    info->add_option("--noise", info_cal, "Calibration JSON");
    info->add_option("--coupling", info_coupling, "Coupling-map JSON");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*sweep) {
            ExperimentConfig cfg;
            if (!config_file.empty()) {
                cfg = io_guard([&] { return load_config(config_file); });
            } else {
                if (family.empty()) throw UsageError("sweep: --family or --config is required");
                cfg.family = parse_family(family);
                cfg.num_qubits = qubits;
                cfg.target_qubit = target;
                cfg.omega_grid = sweep_grid.grid();
                cfg.shots = shots;
            }
            // A config file carries its own seed; --seed still overrides it.
            if (config_file.empty() || seed) cfg.seed = resolve_seed(seed);
            if (sweep->count("--threads")) cfg.threads = threads;
            if (!noise_file.empty()) {
                cfg.noise = io_guard([&] { return load_calibration(resolve_data_file(noise_file)); });
            }
            try {
                cfg.validate();
            } catch (const std::invalid_argument &e) {
                throw UsageError(e.what());
            }
            const auto report = io_guard([&] { return run_experiment(cfg); });
            sweep_out.emit(out, [&](std::ostream &o) {
                if (sweep_out.format == "json") {
                    o << report_to_json(report).dump(2) << '\n';
                } else {
                    write_report_csv(o, report);
                }
            });
            return kOk;
        }

        if (*curve) {
            ExperimentConfig cfg;
            cfg.family = parse_family(curve_family);
            cfg.num_qubits = curve_qubits;
            cfg.target_qubit = curve_target;
            cfg.omega_grid = curve_grid.grid();
            try {
                cfg.validate();
            } catch (const std::invalid_argument &e) {
                throw UsageError(e.what());
            }
            const auto points = exact_curve(cfg);
            curve_out.emit(out, [&](std::ostream &o) {
                if (curve_out.format == "json") {
                    o << exact_curve_to_json(points).dump(2) << '\n';
                } else {
                    write_exact_curve_csv(o, points);
                }
            });
            return kOk;
        }

        if (*oracle) {
            const auto r = oracle_check(trials, resolve_seed(oracle_seed));
            out << "trials," << r.trials << '\n'
                << "max_discrepancy," << format_number(r.max_discrepancy) << '\n'
                << "wootters_vs_closed_form," << format_number(r.max_wootters_vs_closed_form) << '\n'
                << "correlations_vs_wootters," << format_number(r.max_correlations_vs_wootters) << '\n'
                << "relation_vs_wootters," << format_number(r.max_relation_vs_wootters) << '\n';
            if (r.max_discrepancy > tolerance) {
                err << "oracle-check: discrepancy " << r.max_discrepancy << " exceeds " << tolerance << '\n';
                return kCheckFailed;
            }
            return kOk;
        }

        if (*validate) {
            const auto map = io_guard([&] { return load_coupling_map(resolve_data_file(coupling_file)); });
            std::vector<std::pair<std::string, Circuit>> circuits;
            if (!circuit_file.empty()) {
                circuits.emplace_back(circuit_file,
                                      io_guard([&] { return circuit_from_json(read_json_file(circuit_file)); }));
            } else if (!validate_family.empty()) {
                ExperimentConfig cfg;
                cfg.family = parse_family(validate_family);
                cfg.num_qubits = validate_qubits;
                cfg.omega_grid = {0.5};
                try {
                    cfg.validate();
                } catch (const std::invalid_argument &e) {
                    throw UsageError(e.what());
                }
                const auto setup = build_ensemble(cfg, 0.5);
                for (std::size_t a = 0; a < setup.ensemble.members().size(); ++a) {
                    circuits.emplace_back(validate_family + "[" + std::to_string(a) + "]",
                                          setup.ensemble.members()[a].preparation);
                }
            } else {
                throw UsageError("validate: pass --circuit or --family");
            }
            out << "circuit,gate_index,control,target\n";
            std::size_t total = 0;
            for (const auto &[name, c] : circuits) {
                std::vector<CouplingViolation> v;
                try {
                    v = validate_against_coupling(c, map);
                } catch (const std::invalid_argument &e) {
                    throw IoError(e.what());
                }
                for (const auto &x : v) {
                    out << name << ',' << x.gate_index << ',' << x.control << ',' << x.target << '\n';
                }
                total += v.size();
            }
            if (total > 0) {
                err << "validate: " << total << " CX gate(s) not on the coupling map\n";
                return kCheckFailed;
            }
            return kOk;
        }

        if (*info) {
            const auto cal = io_guard([&] { return load_calibration(resolve_data_file(info_cal)); });
            const auto map = io_guard([&] { return load_coupling_map(resolve_data_file(info_coupling)); });
            nlohmann::json j;
            j["basis_gates"] = {"u1", "u2", "u3", "cx"};
            j["convenience_gates"] = {"rx", "ry", "x", "h"};
            j["coupling_map"] = {{"num_qubits", map.num_qubits()}, {"edges", map.edges()}};
            nlohmann::json qs = nlohmann::json::array();
            for (std::size_t q = 0; q < cal.num_qubits(); ++q) {
                qs.push_back({{"id", q},
                              {"t1_us", cal.t1_us[q]},
                              {"t2_us", cal.t2_us[q]},
                              {"gate_error", cal.single_qubit_depol[q]},
                              {"readout_error", cal.readout_flip[q]}});
            }
            j["calibration"] = {{"qubits", qs}, {"cx_pairs", cal.two_qubit_depol.size()}};
            j["noise_model"] = {{"readout", "symmetric bit flip"},
                                {"gates", "depolarizing via stochastic Pauli injection"},
                                {"t1_t2_used_in_dynamics", false}};
            try {
                cal.check_against(map);
                j["calibration_matches_coupling_map"] = true;
            } catch (const std::invalid_argument &e) {
                j["calibration_matches_coupling_map"] = false;
                err << "info: " << e.what() << '\n';
            }
            out << j.dump(2) << '\n';
            return kOk;
        }
    } catch (const UsageError &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError &e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace rank2::cli
