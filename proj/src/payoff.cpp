#include "gexp/payoff.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace gexp {

double evaluate_payoff(const Payoff& payoff, const LatticePath& path) {
    double v = 0.0;
    switch (payoff.kind) {
        case PayoffKind::Terminal:
            v = payoff.terminal(path.value(path.steps()));
            break;
        case PayoffKind::RunningMax:
            v = payoff.terminal_max(path.value(path.steps()), running_max(path));
            break;
        case PayoffKind::PathFunctional:
            v = payoff.functional(path);
            break;
    }
    if (!std::isfinite(v)) {
        throw PayoffError("payoff '" + payoff.name + "' evaluated to a non-finite value");
    }
    return v;
}

namespace payoffs {

Payoff identity() {
    Payoff p;
    p.kind = PayoffKind::Terminal;
    p.name = "identity";
    p.family = "identity";
    p.growth_a = 1.0;
    p.growth_b = 1.0;
    p.terminal = [](double x) { return x; };
    return p;
}

Payoff square() {
    Payoff p;
    p.kind = PayoffKind::Terminal;
    p.name = "square";
    p.family = "square";
    p.growth_a = 1.0;
    p.growth_b = 2.0;
    p.terminal = [](double x) { return x * x; };
    return p;
}

Payoff neg_square() {
    Payoff p;
    p.kind = PayoffKind::Terminal;
    p.name = "neg-square";
    p.family = "neg-square";
    p.growth_a = 1.0;
    p.growth_b = 2.0;
    p.terminal = [](double x) { return -x * x; };
    return p;
}

Payoff call(double strike) {
    Payoff p;
    p.kind = PayoffKind::Terminal;
    p.name = "call:K=" + std::to_string(strike);
    p.family = "call";
    p.strike = strike;
    p.growth_a = 1.0 + std::fabs(strike);
    p.growth_b = 1.0;
    p.terminal = [strike](double x) { return std::max(x - strike, 0.0); };
    return p;
}

Payoff put(double strike) {
    Payoff p;
    p.kind = PayoffKind::Terminal;
    p.name = "put:K=" + std::to_string(strike);
    p.family = "put";
    p.strike = strike;
    p.growth_a = 1.0 + std::fabs(strike);
    p.growth_b = 1.0;
    p.terminal = [strike](double x) { return std::max(strike - x, 0.0); };
    return p;
}

Payoff butterfly(double strike, double width) {
    if (!(width > 0.0)) throw ConfigError("butterfly width must be > 0");
    Payoff p;
    p.kind = PayoffKind::Terminal;
    p.name = "butterfly:K=" + std::to_string(strike) + ",w=" + std::to_string(width);
    p.family = "butterfly";
    p.strike = strike;
    p.width = width;
    p.growth_a = width;
    p.growth_b = 1.0;
    p.terminal = [strike, width](double x) { return std::max(width - std::fabs(x - strike), 0.0); };
    return p;
}

Payoff lookback_max() {
    Payoff p;
    p.kind = PayoffKind::RunningMax;
    p.name = "lookback";
    p.family = "lookback";
    p.growth_a = 1.0;
    p.growth_b = 1.0;
    p.terminal_max = [](double, double m) { return m; };
    return p;
}

} // namespace payoffs

namespace {

std::map<std::string, double> parse_params(const std::string& text) {
    std::map<std::string, double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("payoff parameter '" + item + "' is not of the form key=value");
        }
        try {
            out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw ConfigError("payoff parameter '" + item + "' has a non-numeric value");
        }
    }
    return out;
}

double param_or(const std::map<std::string, double>& params, const std::string& key,
                double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

} // namespace

Payoff parse_payoff(const std::string& spec) {
    std::string name = spec;
    std::map<std::string, double> params;
    const auto colon = spec.find(':');
    if (colon != std::string::npos) {
        name = spec.substr(0, colon);
        params = parse_params(spec.substr(colon + 1));
    }

    if (name == "identity") return payoffs::identity();
    if (name == "square") return payoffs::square();
    if (name == "neg-square") return payoffs::neg_square();
    if (name == "call") return payoffs::call(param_or(params, "K", 0.0));
    if (name == "put") return payoffs::put(param_or(params, "K", 0.0));
    if (name == "butterfly")
        return payoffs::butterfly(param_or(params, "K", 0.0), param_or(params, "w", 0.5));
    if (name == "lookback") return payoffs::lookback_max();

    throw ConfigError("unknown payoff '" + name +
                      "' (expected identity|square|neg-square|call|put|butterfly|lookback)");
}

} // namespace gexp
