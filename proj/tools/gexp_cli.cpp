// Command-line front end: worst-case discrete expectations on the volatility
// lattice, the nonlinear-heat reference solver, Monte Carlo sampling, and the
// convergence harness. Every subcommand prints machine-readable output.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gexp/discrete_expectation.hpp"
#include "gexp/harness.hpp"
#include "gexp/montecarlo.hpp"
#include "gexp/pde.hpp"
#include "gexp/volatility_domain.hpp"

using nlohmann::json;

namespace {

struct DomainFlags {
    double r_d = 0.25;
    double R_d = 1.0;
    double T = 1.0;
    std::string payoff = "square";

    void attach(CLI::App* cmd) {
        cmd->add_option("--r-d", r_d, "variance lower bound r_D");
        cmd->add_option("--R-d", R_d, "variance upper bound R_D");
        cmd->add_option("--T", T, "time horizon");
        cmd->add_option("--payoff", payoff,
                        "payoff spec: identity|square|neg-square|call:K=..|put:K=..|"
                        "butterfly:K=..,w=..|lookback");
    }
    gexp::VolatilityDomain domain() const { return {r_d, R_d, T}; }
};

json report_json(const gexp::ValueReport& report) {
    return json{{"n", report.n},
                {"value", report.value},
                {"engine", gexp::engine_name(report.engine)},
                {"nodes", report.node_count},
                {"seconds", report.wall_time}};
}

gexp::VolatilityPolicy resolve_policy(const std::string& spec, const gexp::Payoff& payoff,
                                      int n, const gexp::VolatilityDomain& domain) {
    if (spec == "from-dp") {
        gexp::DpOptions opts;
        opts.with_policy = true;
        const auto report = gexp::value_markov_dp(payoff, n, domain, opts);
        return gexp::VolatilityPolicy::from_markov(*report.policy);
    }
    if (spec.rfind("const:", 0) == 0) {
        const double sigma = std::stod(spec.substr(6));
        const double numerator = sigma * n;
        const double rounded = std::round(numerator);
        if (std::fabs(numerator - rounded) > 1e-9) {
            throw gexp::PolicyError("constant level " + spec.substr(6) +
                                    " is not a multiple of 1/n for n=" + std::to_string(n));
        }
        return gexp::VolatilityPolicy::constant(static_cast<int>(rounded));
    }
    throw gexp::ConfigError("unknown policy '" + spec + "' (expected from-dp or const:SIGMA)");
}

int run_converge(const std::string& config_path) {
    const gexp::ExperimentConfig cfg = gexp::load_config_file(config_path);
    const auto rows = gexp::run_convergence(cfg);

    const std::string csv = gexp::rows_to_csv(rows);
    if (cfg.out.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(cfg.out);
        if (!out) throw gexp::ConfigError("cannot write CSV to '" + cfg.out + "'");
        out << csv;
    }
    if (!cfg.json_out.empty()) {
        std::ofstream out(cfg.json_out);
        if (!out) throw gexp::ConfigError("cannot write JSON to '" + cfg.json_out + "'");
        out << gexp::rows_to_json(cfg, rows) << "\n";
    }

    int failures = 0;
    for (const auto& row : rows) {
        if (!row.error.empty()) {
            ++failures;
            std::cerr << "n=" << row.n << " failed: " << row.error << "\n";
        }
    }
    try {
        std::cerr << "empirical rate: " << gexp::fit_rate(rows) << "\n";
    } catch (const gexp::InsufficientData&) {
        // purely diagnostic
    }
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"worst-case expectation engine on the volatility lattice"};
    app.require_subcommand(1);

    DomainFlags value_flags;
    int value_n = 16;
    std::string value_engine = "dp";
    bool value_serial = false;
    auto* value_cmd = app.add_subcommand("value", "discrete worst-case expectation");
    value_flags.attach(value_cmd);
    value_cmd->add_option("--n", value_n, "number of time steps")->required();
    value_cmd->add_option("--engine", value_engine, "dp | enum")
        ->check(CLI::IsMember({"dp", "enum"}));
    value_cmd->add_flag("--serial", value_serial, "run the serial reference kernels");

    DomainFlags pde_flags;
    std::optional<int> pde_m;
    std::optional<double> pde_xmax;
    auto* pde_cmd = app.add_subcommand("pde", "continuous-time reference via the nonlinear heat equation");
    pde_flags.attach(pde_cmd);
    pde_cmd->add_option("--m", pde_m, "spatial intervals (default 1200)");
    pde_cmd->add_option("--xmax-mult", pde_xmax, "half-width in units of sqrt(R_D*T) (default 6)");

    DomainFlags enum_flags;
    int enum_n = 4;
    std::string enum_out;
    auto* enum_cmd = app.add_subcommand("enumerate", "exhaustive integrand search (tiny n)");
    enum_flags.attach(enum_cmd);
    enum_cmd->add_option("--n", enum_n, "number of time steps")->required();
    enum_cmd->add_option("--out", enum_out, "write the argmax integrand CSV here (default stdout)");

    DomainFlags sample_flags;
    int sample_n = 16;
    long long sample_paths_count = 10000;
    std::uint64_t sample_seed = 0;
    std::string sample_policy = "from-dp";
    std::string dump_path_file;
    long long dump_index = 0;
    bool sample_serial = false;
    auto* sample_cmd = app.add_subcommand("sample", "Monte Carlo estimate under a volatility policy");
    sample_flags.attach(sample_cmd);
    sample_cmd->add_option("--n", sample_n, "number of time steps")->required();
    sample_cmd->add_option("--paths", sample_paths_count, "number of sample paths");
    sample_cmd->add_option("--seed", sample_seed, "rng seed");
    sample_cmd->add_option("--policy", sample_policy, "from-dp | const:SIGMA");
    sample_cmd->add_option("--dump-path", dump_path_file,
                           "write one sampled path as CSV (step,index,value)");
    sample_cmd->add_option("--dump-index", dump_index, "which path to dump (default 0)");
    sample_cmd->add_flag("--serial", sample_serial, "run the serial reference kernels");

    std::string converge_config;
    auto* converge_cmd = app.add_subcommand("converge", "convergence experiment from a JSON config");
    converge_cmd->add_option("--config", converge_config, "experiment config path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*value_cmd) {
            const auto domain = value_flags.domain();
            const auto payoff = gexp::parse_payoff(value_flags.payoff);
            std::optional<gexp::Engine> engine;
            if (value_engine == "enum") engine = gexp::Engine::Enumeration;
            gexp::DpOptions opts;
            opts.exec = value_serial ? gexp::Exec::Serial : gexp::Exec::Parallel;
            const auto report = gexp::compute_value(payoff, value_n, domain, engine, opts);
            std::cout << report_json(report).dump() << "\n";
            return 0;
        }
        if (*pde_cmd) {
            const auto domain = pde_flags.domain();
            const auto payoff = gexp::parse_payoff(pde_flags.payoff);
            if (payoff.kind != gexp::PayoffKind::Terminal) {
                throw gexp::ConfigError("the pde subcommand needs a terminal payoff");
            }
            const auto grid = gexp::PdeGrid::standard(domain, payoff.growth_b, pde_m, pde_xmax);
            const auto sol = gexp::solve_g_heat(payoff.terminal, domain, grid);
            json out{{"value", sol.value_at_origin},
                     {"grid",
                      {{"m", grid.m}, {"dx", grid.dx()}, {"dt", grid.dt}, {"steps", grid.steps}}}};
            std::cout << out.dump() << "\n";
            return 0;
        }
        if (*enum_cmd) {
            const auto domain = enum_flags.domain();
            const auto payoff = gexp::parse_payoff(enum_flags.payoff);
            const auto result = gexp::value_enumerate(payoff, enum_n, domain);
            std::cout << report_json(result.report).dump() << "\n";
            if (enum_out.empty()) {
                std::cout << result.argmax.to_csv();
            } else {
                std::ofstream out(enum_out);
                if (!out) throw gexp::ConfigError("cannot write integrand CSV to '" + enum_out + "'");
                out << result.argmax.to_csv();
            }
            return 0;
        }
        if (*sample_cmd) {
            const auto domain = sample_flags.domain();
            const auto payoff = gexp::parse_payoff(sample_flags.payoff);
            const auto policy = resolve_policy(sample_policy, payoff, sample_n, domain);
            const gexp::RngSpec rng{sample_seed};
            const auto est = gexp::estimate(payoff, policy, sample_n, sample_paths_count, domain,
                                            rng,
                                            sample_serial ? gexp::Exec::Serial
                                                          : gexp::Exec::Parallel);
            json out{{"mean", est.mean},
                     {"se", est.standard_error},
                     {"paths", est.n_paths},
                     {"seed", est.seed}};
            std::cout << out.dump() << "\n";
            if (!dump_path_file.empty()) {
                if (dump_index < 0 || dump_index >= sample_paths_count) {
                    throw gexp::ConfigError("--dump-index outside [0, paths)");
                }
                const auto paths =
                    gexp::sample_paths(policy, sample_n, dump_index + 1, domain, rng);
                const auto& path = paths.back();
                std::ofstream out_csv(dump_path_file);
                if (!out_csv) {
                    throw gexp::ConfigError("cannot write path CSV to '" + dump_path_file + "'");
                }
                out_csv << "step,index,value\n";
                char line[80];
                for (std::size_t k = 0; k < path.indices.size(); ++k) {
                    std::snprintf(line, sizeof(line), "%zu,%lld,%.12g\n", k, path.indices[k],
                                  path.value(static_cast<int>(k)));
                    out_csv << line;
                }
            }
            return 0;
        }
        if (*converge_cmd) {
            return run_converge(converge_config);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
