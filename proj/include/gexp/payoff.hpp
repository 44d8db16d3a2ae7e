#pragma once

#include <functional>
#include <string>

#include "gexp/lattice.hpp"

namespace gexp {

enum class PayoffKind {
    Terminal,       // g(x_n)
    RunningMax,     // g(x_n, max_k x_k)
    PathFunctional, // xi applied to the interpolated path
};

// Continuous payoff functional with a declared polynomial growth bound
// |xi(omega)| <= a * (1 + ||omega||_inf)^b.
struct Payoff {
    PayoffKind kind = PayoffKind::Terminal;
    std::string name;
    std::string family = "custom"; // catalogue family tag, "custom" otherwise
    double strike = 0.0;
    double width = 0.0;
    double growth_a = 1.0;
    double growth_b = 1.0;

    std::function<double(double)> terminal;               // Terminal
    std::function<double(double, double)> terminal_max;   // RunningMax: (x_n, max)
    std::function<double(const LatticePath&)> functional; // PathFunctional
};

// Evaluates the payoff on the (interpolated) path. Throws PayoffError when
// the result is not finite.
double evaluate_payoff(const Payoff& payoff, const LatticePath& path);

// Built-in catalogue. Growth metadata is part of each instance.
namespace payoffs {

Payoff identity();
Payoff square();
Payoff neg_square();
Payoff call(double strike);
Payoff put(double strike);
Payoff butterfly(double strike, double width);
Payoff lookback_max();

} // namespace payoffs

// Parses a CLI payoff spec: "square", "call:K=0.0", "butterfly:K=0.0,w=0.5",
// "lookback", ... Throws ConfigError for unknown names or bad parameters.
Payoff parse_payoff(const std::string& spec);

} // namespace gexp
