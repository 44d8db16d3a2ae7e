// Benchmark comparing the serial reference kernels with the OpenMP versions:
// backward-induction sweep, PDE time stepping, Monte Carlo path loop. The two
// modes must agree bitwise; the table reports runtimes and speedups.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gexp/discrete_expectation.hpp"
#include "gexp/montecarlo.hpp"
#include "gexp/pde.hpp"

using namespace gexp;

namespace {

template <typename F>
double time_of(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const char* name, double serial, double parallel, bool identical) {
    std::printf("%-28s %10.3fs %10.3fs %8.2fx   %s\n", name, serial, parallel,
                serial / parallel, identical ? "bit-identical" : "MISMATCH");
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serially\n\n");
#endif
    std::printf("%-28s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

    const VolatilityDomain domain(0.25, 1.0, 1.0);

    {
        const Payoff payoff = payoffs::butterfly(0.0, 0.5);
        DpOptions serial_opts;
        serial_opts.exec = Exec::Serial;
        double vs = 0.0;
        double vp = 0.0;
        const double ts = time_of([&] { vs = value_markov_dp(payoff, 220, domain, serial_opts).value; });
        const double tp = time_of([&] { vp = value_markov_dp(payoff, 220, domain).value; });
        row("markov dp (n=220)", ts, tp, vs == vp);
    }
    {
        DpOptions serial_opts;
        serial_opts.exec = Exec::Serial;
        double vs = 0.0;
        double vp = 0.0;
        const double ts = time_of(
            [&] { vs = value_maxaug_dp(payoffs::lookback_max(), 40, domain, serial_opts).value; });
        const double tp =
            time_of([&] { vp = value_maxaug_dp(payoffs::lookback_max(), 40, domain).value; });
        row("max-augmented dp (n=40)", ts, tp, vs == vp);
    }
    {
        const Payoff payoff = payoffs::butterfly(0.0, 0.5);
        const PdeGrid grid = PdeGrid::standard(domain, payoff.growth_b, 2400);
        double vs = 0.0;
        double vp = 0.0;
        const double ts = time_of(
            [&] { vs = solve_g_heat(payoff.terminal, domain, grid, Exec::Serial).value_at_origin; });
        const double tp = time_of(
            [&] { vp = solve_g_heat(payoff.terminal, domain, grid).value_at_origin; });
        row("pde stepper (m=2400)", ts, tp, vs == vp);
    }
    {
        const Payoff payoff = payoffs::call(0.0);
        const auto policy = VolatilityPolicy::constant(100);
        const RngSpec rng{12345};
        McEstimate es;
        McEstimate ep;
        const double ts = time_of(
            [&] { es = estimate(payoff, policy, 100, 2'000'000, domain, rng, Exec::Serial); });
        const double tp =
            time_of([&] { ep = estimate(payoff, policy, 100, 2'000'000, domain, rng); });
        row("monte carlo (2e6 paths)", ts, tp,
            es.mean == ep.mean && es.standard_error == ep.standard_error);
    }
    return 0;
}
