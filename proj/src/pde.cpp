#include "gexp/pde.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <string>

namespace gexp {

PdeGrid PdeGrid::standard(const VolatilityDomain& domain, double growth_b,
                          std::optional<int> m_override, std::optional<double> xmax_mult) {
    PdeGrid grid;
    const double mult = xmax_mult.value_or(6.0);
    double half = mult * std::sqrt(domain.R_d * domain.T);
    if (growth_b > 1.0) half *= 2.0; // superlinear payoffs need more headroom
    if (!(half > 0.0)) half = 1.0;   // degenerate R_d == 0
    grid.x_min = -half;
    grid.x_max = half;
    grid.m = m_override.value_or(1200);

    const double dx = grid.dx();
    if (domain.R_d > 0.0) {
        const double dt_target = 0.4 * dx * dx / domain.R_d;
        grid.steps = static_cast<int>(std::ceil(domain.T / dt_target));
    } else {
        grid.steps = 1; // G == 0, the stepper is the identity
    }
    grid.dt = domain.T / grid.steps;
    return grid;
}

void PdeGrid::validate(const VolatilityDomain& domain) const {
    if (!(x_min < 0.0 && 0.0 < x_max)) {
        throw DomainError("PDE grid must bracket the origin: [" + std::to_string(x_min) + ", " +
                          std::to_string(x_max) + "]");
    }
    if (m < 2) throw DomainError("PDE grid needs at least 2 spatial intervals");
    if (!(dt > 0.0) || steps < 1) throw DomainError("PDE grid needs dt > 0 and steps >= 1");
    if (std::fabs(steps * dt - domain.T) > 1e-9 * domain.T) {
        throw DomainError("PDE grid does not cover the horizon: steps*dt != T");
    }
    const double dx_ = dx();
    if (domain.R_d * dt / (dx_ * dx_) > 0.5 + 1e-12) {
        throw CflViolation("explicit scheme unstable: R_d*dt/dx^2 = " +
                           std::to_string(domain.R_d * dt / (dx_ * dx_)) + " > 1/2");
    }
}

// Below this many nodes a 1-D layer is too thin for the fork/barrier cost;
// the explicit CFL coupling keeps realistic grids near this regime, so thin
// layers run the same arithmetic serially.
constexpr long long kPdeParallelGrain = 8192;

void g_heat_step(const VolatilityDomain& domain, double dt, double dx,
                 const std::vector<double>& u, std::vector<double>& out, Exec exec) {
    const long long m = static_cast<long long>(u.size()) - 1;
    out.resize(u.size());
    const double inv_dx2 = 1.0 / (dx * dx);
    const bool parallel = exec == Exec::Parallel && m >= kPdeParallelGrain;
    out[0] = u[0];
    out[static_cast<std::size_t>(m)] = u[static_cast<std::size_t>(m)];
#pragma omp parallel for schedule(static) if (parallel)
    for (long long i = 1; i < m; ++i) {
        const double d2 = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2;
        out[i] = u[i] + dt * g_function(domain, d2);
    }
}

PdeSolution solve_g_heat(const std::function<double(double)>& terminal,
                         const VolatilityDomain& domain, const PdeGrid& grid, Exec exec) {
    grid.validate(domain);
    const double dx = grid.dx();
    const bool parallel = exec == Exec::Parallel;

    std::vector<double> u(static_cast<std::size_t>(grid.m) + 1);
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static) if (parallel)
    for (long long i = 0; i <= grid.m; ++i) {
        try {
            u[i] = terminal(grid.x_min + static_cast<double>(i) * dx);
        } catch (...) {
            failed.store(true, std::memory_order_relaxed);
        }
    }
    for (double v : u) {
        if (failed.load(std::memory_order_relaxed) || !std::isfinite(v)) {
            throw NonFinite("terminal data not finite on the PDE grid");
        }
    }

    std::vector<double> next(u.size());
    if (parallel && grid.m >= kPdeParallelGrain) {
        // One thread team for the whole sweep; a fork per step would swamp
        // the small per-layer work. Buffers alternate by step parity, the
        // worksharing barrier keeps the layers in lockstep.
        const long long m = grid.m;
        const double inv_dx2 = 1.0 / (dx * dx);
        const double dt = grid.dt;
        double* const a = u.data();
        double* const b = next.data();
        const int steps = grid.steps;
#pragma omp parallel
        for (int step = 0; step < steps; ++step) {
            const double* src = (step % 2 == 0) ? a : b;
            double* dst = (step % 2 == 0) ? b : a;
#pragma omp for schedule(static)
            for (long long i = 0; i <= m; ++i) {
                if (i == 0 || i == m) {
                    dst[i] = src[i];
                } else {
                    const double d2 = (src[i - 1] - 2.0 * src[i] + src[i + 1]) * inv_dx2;
                    dst[i] = src[i] + dt * g_function(domain, d2);
                }
            }
        }
        if (grid.steps % 2 == 1) u.swap(next);
    } else {
        for (int step = 0; step < grid.steps; ++step) {
            g_heat_step(domain, grid.dt, dx, u, next, Exec::Serial);
            u.swap(next);
        }
    }
    for (double v : u) {
        if (!std::isfinite(v)) throw NonFinite("PDE solution overflowed");
    }

    PdeSolution sol;
    sol.grid = grid;
    // u(0, 0): linear interpolation between the nodes bracketing the origin.
    double pos = (0.0 - grid.x_min) / dx;
    long long i0 = static_cast<long long>(std::floor(pos));
    if (i0 >= grid.m) i0 = grid.m - 1;
    const double w = pos - static_cast<double>(i0);
    sol.value_at_origin = (1.0 - w) * u[static_cast<std::size_t>(i0)] +
                          w * u[static_cast<std::size_t>(i0) + 1];
    sol.u0 = std::move(u);
    return sol;
}

namespace {

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double std_normal_cdf_upper(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

} // namespace

double bachelier_call(double sigma, double T, double K) {
    if (!(sigma > 0.0)) throw DomainError("bachelier_call requires sigma > 0");
    if (!(T > 0.0)) throw DomainError("bachelier_call requires T > 0");
    const double s = sigma * std::sqrt(T);
    const double z = K / s;
    return s * std_normal_pdf(z) - K * std_normal_cdf_upper(z);
}

double bachelier_put(double sigma, double T, double K) {
    // (K - X)^+ = (X - K)^+ - X + K and E[X] = 0.
    return bachelier_call(sigma, T, K) + K;
}

std::optional<double> reference_value(const Payoff& payoff, const VolatilityDomain& domain) {
    if (payoff.family == "square") return domain.R_d * domain.T;
    if (payoff.family == "neg-square") return -domain.r_d * domain.T;
    if (payoff.family == "identity") return 0.0;
    if (payoff.family == "call" && domain.R_d > 0.0) {
        return bachelier_call(std::sqrt(domain.R_d), domain.T, payoff.strike);
    }
    if (payoff.family == "put" && domain.R_d > 0.0) {
        return bachelier_put(std::sqrt(domain.R_d), domain.T, payoff.strike);
    }
    return std::nullopt;
}

} // namespace gexp
