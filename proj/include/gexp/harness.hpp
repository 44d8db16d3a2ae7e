#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gexp/discrete_expectation.hpp"
#include "gexp/payoff.hpp"
#include "gexp/pde.hpp"
#include "gexp/volatility_domain.hpp"

namespace gexp {

struct PdeOverrides {
    std::optional<int> m;
    std::optional<double> xmax_mult;
};

// One convergence experiment: a payoff, a domain, and an ascending list of
// discretizations, each compared against the continuous-time reference.
struct ExperimentConfig {
    double r_d = 0.0;
    double R_d = 1.0;
    double T = 1.0;
    std::string payoff = "square";
    std::vector<int> n_list;
    std::string engine = "dp"; // dp | enum
    PdeOverrides pde;
    std::uint64_t seed = 0;
    std::string out;      // CSV path; empty writes to stdout
    std::string json_out; // optional JSON mirror

    void validate() const; // throws ConfigError
};

// JSON schema: {"r_d":., "R_d":., "T":., "payoff":"...", "n_list":[...],
//               "engine":"dp", "pde":{"m":., "xmax_mult":.}, "seed":.,
//               "out":"...", "json_out":"..."}.
ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

struct ConvergenceRow {
    int n = 0;
    double discrete_value = 0.0;
    std::optional<double> pde_value;
    std::optional<double> abs_gap;
    int sigma_levels = 0;
    double seconds = 0.0;
    std::string error; // empty when the row succeeded
};

// For each n: discrete value with the configured engine, against a reference
// computed once (closed form when the catalogue has one, else the PDE
// solution; absent for path-dependent payoffs). Per-row engine errors are
// recorded in the row and the run continues.
std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& config);

// Least-squares slope of log(abs_gap) against log(n) over rows with positive
// gaps; needs at least 3 such rows. Diagnostics only.
double fit_rate(const std::vector<ConvergenceRow>& rows);

// CSV with header n,discrete_value,pde_value,abs_gap,sigma_levels,seconds,
// 12 significant digits, nan for absent reference values.
std::string rows_to_csv(const std::vector<ConvergenceRow>& rows);
std::string rows_to_json(const ExperimentConfig& config, const std::vector<ConvergenceRow>& rows);

} // namespace gexp
