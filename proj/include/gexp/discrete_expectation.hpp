#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gexp/exec.hpp"
#include "gexp/lattice.hpp"
#include "gexp/payoff.hpp"
#include "gexp/volatility_domain.hpp"

namespace gexp {

// Volatility control f(step, observed path prefix) -> admissible level.
// Keying on the path prefix makes adaptedness structural: the value cannot
// depend on anything the filtration has not revealed.
struct AdaptedIntegrand {
    int n = 0;
    SigmaSet sigmas;
    // Returns the sigma numerator for step k given x_0..x_k as lattice indices.
    std::function<int(int step, std::span<const long long> prefix)> numerator_at;

    static AdaptedIntegrand constant(SigmaSet sigmas, int numerator);
    // Deterministic pseudo-random choice keyed by (seed, step, prefix).
    static AdaptedIntegrand randomized(SigmaSet sigmas, std::uint64_t seed);
};

// Integrand as an explicit table over binary sign-prefix nodes, the form the
// enumeration engine reports its argmax in. Node (step k, prefix-id b) sits
// at heap slot (1<<k)-1+b, where bit i of b is 1 iff step i moved up. When a
// zero-volatility step makes two sign prefixes share one path prefix, the
// up-branch entry is the canonical one.
struct IntegrandTable {
    int n = 0;
    SigmaSet sigmas;
    std::vector<int> numerator_by_node; // size 2^n - 1

    static std::size_t node_slot(int step, std::uint64_t prefix_id) {
        return (std::size_t(1) << step) - 1 + prefix_id;
    }
    AdaptedIntegrand as_integrand() const;
    std::string to_csv() const; // header: step,prefix-id,sigma
};

struct WeightedPath {
    std::vector<long long> indices; // x_0..x_n as lattice indices
    double probability;
};

// Finite-support law of the controlled walk.
struct MartingaleLaw {
    Lattice lattice;
    std::vector<WeightedPath> support;
};

// Pushforward of the uniform sign measure: from each prefix the walk moves
// +-sigma*sqrt(T/n) with conditional probability 1/2 each, sigma chosen by
// the integrand. Support is merged on exact integer index paths. Guarded at
// n <= 20 (2^n sign sequences).
MartingaleLaw law_from_integrand(const AdaptedIntegrand& f, const VolatilityDomain& domain);

struct ValidationReport {
    bool probabilities_ok = false;
    double total_probability = 0.0;
    double min_probability = 0.0;

    bool martingale_ok = false;
    double worst_conditional_mean = 0.0; // max over prefixes of |E[next increment]|

    bool bounds_ok = false;
    double worst_bound_violation = 0.0; // distance of (k/n)^2 outside [r_d, R_d]

    bool all_ok() const { return probabilities_ok && martingale_ok && bounds_ok; }
};

// Checks the three martingale-law invariants: probabilities positive and
// summing to 1 (tol 1e-12), zero conditional mean of every next increment
// given its prefix (tol 1e-12), and increment bounds r_d <= (k/n)^2 <= R_d
// decided exactly in index arithmetic.
ValidationReport validate_law(const MartingaleLaw& law, const VolatilityDomain& domain);

enum class Engine {
    MarkovDP,
    MaxAugmentedDP,
    Enumeration,
};
const char* engine_name(Engine engine);

// Argmax volatility per (step, lattice index) over the reachable range
// [-step*kmax, step*kmax]. Ties resolve to the smallest level.
struct MarkovPolicy {
    int n = 0;
    int max_numerator = 0;
    std::vector<std::vector<int>> rows; // rows[k][j + k*max_numerator]

    int numerator_at(int step, long long j) const;
};

struct ValueReport {
    int n = 0;
    double value = 0.0;
    std::optional<MarkovPolicy> policy;
    Engine engine = Engine::MarkovDP;
    long long node_count = 0;
    double wall_time = 0.0; // seconds
};

struct DpOptions {
    bool with_policy = false;
    Exec exec = Exec::Parallel;
    long long maxaug_state_cap = 8'000'000; // states per level
};

// Backward induction on lattice indices for terminal payoffs:
//   V_n(x) = g(x),  V_k(x) = max_sigma (V_{k+1}(x+d) + V_{k+1}(x-d)) / 2,
// d = sigma*sqrt(T/n). Returns V_0(0) and, on request, the argmax policy.
ValueReport value_markov_dp(const Payoff& payoff, int n, const VolatilityDomain& domain,
                            const DpOptions& opts = {});

// Same recursion on the state (x, running max) for RunningMax payoffs.
ValueReport value_maxaug_dp(const Payoff& payoff, int n, const VolatilityDomain& domain,
                            const DpOptions& opts = {});

struct EnumerationResult {
    ValueReport report;
    IntegrandTable argmax;
};

// Exhaustive maximization over every adapted integrand: sigma choices at
// distinct prefix nodes are independent, so a depth-first sweep that tries
// each level at each node covers the whole finite class and the max is
// attained. Works for any payoff kind. Guarded at n <= 6, |SigmaSet| <= 4.
EnumerationResult value_enumerate(const Payoff& payoff, int n, const VolatilityDomain& domain);

// Engine dispatch: Terminal -> MarkovDP, RunningMax -> MaxAugmentedDP,
// PathFunctional -> Enumeration. An explicit engine overrides the default.
ValueReport compute_value(const Payoff& payoff, int n, const VolatilityDomain& domain,
                          std::optional<Engine> engine = {}, const DpOptions& opts = {});

} // namespace gexp
