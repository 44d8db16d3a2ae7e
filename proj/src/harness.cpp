#include "gexp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gexp {

void ExperimentConfig::validate() const {
    if (n_list.empty()) throw ConfigError("n_list must not be empty");
    for (std::size_t i = 0; i + 1 < n_list.size(); ++i) {
        if (n_list[i] >= n_list[i + 1]) throw ConfigError("n_list must be strictly ascending");
    }
    if (n_list.front() < 1) throw ConfigError("n_list entries must be >= 1");
    if (engine != "dp" && engine != "enum") {
        throw ConfigError("engine must be 'dp' or 'enum', got '" + engine + "'");
    }
    parse_payoff(payoff); // throws ConfigError for unknown payoffs
    try {
        VolatilityDomain check(r_d, R_d, T);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid domain parameters: ") + e.what());
    }
}

ExperimentConfig parse_config_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    try {
        if (j.contains("r_d")) cfg.r_d = j.at("r_d").get<double>();
        if (j.contains("R_d")) cfg.R_d = j.at("R_d").get<double>();
        if (j.contains("T")) cfg.T = j.at("T").get<double>();
        if (j.contains("payoff")) cfg.payoff = j.at("payoff").get<std::string>();
        if (j.contains("n_list")) cfg.n_list = j.at("n_list").get<std::vector<int>>();
        if (j.contains("engine")) cfg.engine = j.at("engine").get<std::string>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
        if (j.contains("json_out")) cfg.json_out = j.at("json_out").get<std::string>();
        if (j.contains("pde")) {
            const auto& p = j.at("pde");
            if (p.contains("m")) cfg.pde.m = p.at("m").get<int>();
            if (p.contains("xmax_mult")) cfg.pde.xmax_mult = p.at("xmax_mult").get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_json(ss.str());
}

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& config) {
    config.validate();
    const VolatilityDomain domain(config.r_d, config.R_d, config.T);
    const Payoff payoff = parse_payoff(config.payoff);

    // Reference computed once: closed form when known, else the PDE solution.
    // Path-dependent payoffs have no PDE reference here.
    std::optional<double> reference;
    if (payoff.kind == PayoffKind::Terminal) {
        reference = reference_value(payoff, domain);
        if (!reference) {
            const PdeGrid grid =
                PdeGrid::standard(domain, payoff.growth_b, config.pde.m, config.pde.xmax_mult);
            reference = solve_g_heat(payoff.terminal, domain, grid).value_at_origin;
        }
    }

    std::optional<Engine> engine;
    if (config.engine == "enum") engine = Engine::Enumeration;

    std::vector<ConvergenceRow> rows;
    rows.reserve(config.n_list.size());
    for (int n : config.n_list) {
        ConvergenceRow row;
        row.n = n;
        try {
            const ValueReport report = compute_value(payoff, n, domain, engine);
            row.discrete_value = report.value;
            row.seconds = report.wall_time;
            row.sigma_levels = admissible_sigmas(domain, n).size();
            if (reference) {
                row.pde_value = *reference;
                row.abs_gap = std::fabs(report.value - *reference);
            }
        } catch (const std::exception& e) {
            row.discrete_value = std::nan("");
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

double fit_rate(const std::vector<ConvergenceRow>& rows) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const ConvergenceRow& row : rows) {
        if (row.error.empty() && row.abs_gap && *row.abs_gap > 0.0) {
            xs.push_back(std::log(static_cast<double>(row.n)));
            ys.push_back(std::log(*row.abs_gap));
        }
    }
    if (xs.size() < 3) {
        throw InsufficientData("rate fit needs >= 3 rows with positive gaps, got " +
                               std::to_string(xs.size()));
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    return sxy / sxx;
}

namespace {

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

std::string rows_to_csv(const std::vector<ConvergenceRow>& rows) {
    std::string out = "n,discrete_value,pde_value,abs_gap,sigma_levels,seconds\n";
    for (const ConvergenceRow& row : rows) {
        out += std::to_string(row.n);
        out += ',';
        out += fmt12(row.discrete_value);
        out += ',';
        out += row.pde_value ? fmt12(*row.pde_value) : "nan";
        out += ',';
        out += row.abs_gap ? fmt12(*row.abs_gap) : "nan";
        out += ',';
        out += std::to_string(row.sigma_levels);
        out += ',';
        out += fmt12(row.seconds);
        out += '\n';
    }
    return out;
}

std::string rows_to_json(const ExperimentConfig& config,
                         const std::vector<ConvergenceRow>& rows) {
    nlohmann::json j;
    j["payoff"] = config.payoff;
    j["r_d"] = config.r_d;
    j["R_d"] = config.R_d;
    j["T"] = config.T;
    j["engine"] = config.engine;
    j["rows"] = nlohmann::json::array();
    for (const ConvergenceRow& row : rows) {
        nlohmann::json r;
        r["n"] = row.n;
        r["discrete_value"] = row.discrete_value;
        if (row.pde_value) r["pde_value"] = *row.pde_value;
        else r["pde_value"] = nullptr;
        if (row.abs_gap) r["abs_gap"] = *row.abs_gap;
        else r["abs_gap"] = nullptr;
        r["sigma_levels"] = row.sigma_levels;
        r["seconds"] = row.seconds;
        if (!row.error.empty()) r["error"] = row.error;
        j["rows"].push_back(std::move(r));
    }
    return j.dump(2);
}

} // namespace gexp
