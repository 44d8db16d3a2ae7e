#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gexp/exec.hpp"
#include "gexp/payoff.hpp"
#include "gexp/volatility_domain.hpp"

namespace gexp {

// Space-time grid for the explicit scheme. Stability requires the CFL bound
// R_d * dt / dx^2 <= 1/2; the default grid uses a 0.4 safety factor.
struct PdeGrid {
    double x_min = 0.0;
    double x_max = 0.0;
    int m = 0;       // number of spatial intervals (m+1 nodes)
    double dt = 0.0; // time step
    int steps = 0;   // steps * dt == T

    double dx() const { return (x_max - x_min) / m; }

    // Truncation at xmax_mult * sqrt(R_d*T) standard deviations, doubled for
    // payoffs growing faster than linearly (growth exponent b > 1).
    static PdeGrid standard(const VolatilityDomain& domain, double growth_b = 1.0,
                            std::optional<int> m_override = {},
                            std::optional<double> xmax_mult = {});

    void validate(const VolatilityDomain& domain) const; // throws CflViolation / DomainError
};

struct PdeSolution {
    PdeGrid grid;
    std::vector<double> u0;       // values at t = 0 on the grid nodes
    double value_at_origin = 0.0; // u(0, 0), interpolated if 0 is between nodes
};

// Solves the nonlinear backward heat equation
//   -du/dt - G(d2u/dx2) = 0,  u(T, .) = g,
// by stepping u(t-dt, x) = u(t, x) + dt * G(D2 u(t, x)) with the centered
// second difference D2 (zero at the two boundary rows).
PdeSolution solve_g_heat(const std::function<double(double)>& terminal,
                         const VolatilityDomain& domain, const PdeGrid& grid,
                         Exec exec = Exec::Parallel);

// One explicit time step; exposed for the stepper tests.
void g_heat_step(const VolatilityDomain& domain, double dt, double dx,
                 const std::vector<double>& u, std::vector<double>& out,
                 Exec exec = Exec::Parallel);

// E[(X - K)^+] and E[(K - X)^+] for X Gaussian with mean 0 and standard
// deviation sigma*sqrt(T).
double bachelier_call(double sigma, double T, double K);
double bachelier_put(double sigma, double T, double K);

// Known continuous-time values for catalogue terminal payoffs:
// square -> R_d*T, neg-square -> -r_d*T, identity -> 0,
// call/put -> Bachelier at sqrt(R_d). Absent for anything else.
std::optional<double> reference_value(const Payoff& payoff, const VolatilityDomain& domain);

} // namespace gexp
