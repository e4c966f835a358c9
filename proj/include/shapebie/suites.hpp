// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "shapebie/shape_diff.hpp"

namespace shapebie {

struct ExperimentConfig {
    std::string suite;                 // coeffs | surfops | operators | potentials | kernels | all
    std::string shape = "circle";
    std::vector<std::string> fields = {"normal"};
    std::string kernel = "helmholtz2d(1)";
    int N = 128;
    std::vector<double> ladder = {1e-2, 5e-3, 2.5e-3};
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    bool inject_failure = false;       // testing hook, see docs/config.md
    std::vector<int> N_list;           // for the table subcommand

    static ExperimentConfig from_json(const nlohmann::json& j);  // throws ConfigError
    nlohmann::json to_json() const;
};

// one row of summary.csv: suite,target,xi,shape,N,kappa,order,max_error,pass
struct SuiteRow {
    std::string suite, target, xi, shape;
    int N = 0;
    std::complex<double> kappa{0.0, 0.0};
    std::string order;  // numeric text, "PASS_SATURATED", or "n/a" for identity checks
    double max_error = 0.0;
    bool pass = false;
};

struct RunResult {
    std::vector<DerivativeReport> reports;
    std::vector<SuiteRow> rows;
    bool all_pass = true;
    double wall_ms = 0.0;
};

RunResult run_suites(const ExperimentConfig& cfg);

std::string summary_csv(const RunResult& result);

// writes report.json, summary.csv, MANIFEST.json under out_dir;
// returns 0 if every check passed, 1 otherwise
int write_outputs(const ExperimentConfig& cfg, const RunResult& result, const std::string& out_dir);

// convergence-table subcommand (suite=operators, N_list required): emits
// table.csv with per-N operator self-convergence and FD-order columns
struct TableResult {
    std::string csv;
    bool monotone = true;
};
TableResult run_table(const ExperimentConfig& cfg);

// full CLI: shapebie run --config cfg.json [--suite S] [--out DIR]
//           shapebie table --config cfg.json
// exit codes: 0 all-pass, 1 check failure, 2 config error
int run_cli(int argc, const char* const* argv);

}  // namespace shapebie
