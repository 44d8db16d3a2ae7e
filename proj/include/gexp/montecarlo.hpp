#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "gexp/discrete_expectation.hpp"
#include "gexp/exec.hpp"
#include "gexp/payoff.hpp"
#include "gexp/rng.hpp"
#include "gexp/volatility_domain.hpp"

namespace gexp {

struct McEstimate {
    double mean = 0.0;
    double standard_error = 0.0; // sample std / sqrt(n_paths)
    long long n_paths = 0;
    std::uint64_t seed = 0;
};

// Volatility control for the simulated walk: a constant level, a Markov
// argmax table from the DP, or a full adapted integrand.
struct VolatilityPolicy {
    enum class Kind { Constant, Markov, Integrand };
    Kind kind = Kind::Constant;
    int constant_numerator = 0;
    std::shared_ptr<const MarkovPolicy> markov;
    std::shared_ptr<const AdaptedIntegrand> integrand;

    static VolatilityPolicy constant(int numerator);
    static VolatilityPolicy from_markov(MarkovPolicy policy);
    static VolatilityPolicy from_integrand(AdaptedIntegrand f);
};

// Simulates n_paths walks of n steps: step k draws a fair sign from the
// counter-based stream (seed, path, step) and moves +-sigma*sqrt(T/n).
// Identical inputs give an identical path list on every platform.
std::vector<LatticePath> sample_paths(const VolatilityPolicy& policy, int n, long long n_paths,
                                      const VolatilityDomain& domain, const RngSpec& rng);

// Sample mean and standard error of the payoff over the simulated paths.
// Per-path values land in a buffer indexed by path id and are reduced by
// serial pairwise summation, so the estimate is bit-identical for any
// thread count.
McEstimate estimate(const Payoff& payoff, const VolatilityPolicy& policy, int n,
                    long long n_paths, const VolatilityDomain& domain, const RngSpec& rng,
                    Exec exec = Exec::Parallel);

} // namespace gexp
