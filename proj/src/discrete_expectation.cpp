#include "gexp/discrete_expectation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "gexp/rng.hpp"

namespace gexp {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

bool numerator_in_set(const SigmaSet& sigmas, int k) {
    return std::binary_search(sigmas.numerators.begin(), sigmas.numerators.end(), k);
}

} // namespace

AdaptedIntegrand AdaptedIntegrand::constant(SigmaSet sigmas, int numerator) {
    if (!numerator_in_set(sigmas, numerator)) {
        throw PolicyError("constant integrand level " + std::to_string(numerator) + "/" +
                          std::to_string(sigmas.n) + " is not admissible");
    }
    AdaptedIntegrand f;
    f.n = sigmas.n;
    f.sigmas = std::move(sigmas);
    f.numerator_at = [numerator](int, std::span<const long long>) { return numerator; };
    return f;
}

AdaptedIntegrand AdaptedIntegrand::randomized(SigmaSet sigmas, std::uint64_t seed) {
    AdaptedIntegrand f;
    f.n = sigmas.n;
    f.sigmas = std::move(sigmas);
    const auto numerators = f.sigmas.numerators; // by value: the lambda owns its copy
    f.numerator_at = [numerators, seed](int step, std::span<const long long> prefix) {
        std::uint64_t h = rng::mix64(seed ^ (std::uint64_t(step) + 1));
        for (long long v : prefix) h = rng::mix64(h ^ static_cast<std::uint64_t>(v));
        return numerators[h % numerators.size()];
    };
    return f;
}

AdaptedIntegrand IntegrandTable::as_integrand() const {
    AdaptedIntegrand f;
    f.n = n;
    f.sigmas = sigmas;
    const auto table = numerator_by_node;
    f.numerator_at = [table](int step, std::span<const long long> prefix) {
        // Recover the sign prefix from the observed increments; a zero step
        // is read as the canonical up-branch.
        std::uint64_t bits = 0;
        for (int i = 0; i < step; ++i) {
            const long long d = prefix[i + 1] - prefix[i];
            if (d >= 0) bits |= std::uint64_t(1) << i;
        }
        return table[node_slot(step, bits)];
    };
    return f;
}

std::string IntegrandTable::to_csv() const {
    std::string out = "step,prefix-id,sigma\n";
    char line[96];
    for (int k = 0; k < n; ++k) {
        for (std::uint64_t b = 0; b < (std::uint64_t(1) << k); ++b) {
            const int num = numerator_by_node[node_slot(k, b)];
            std::snprintf(line, sizeof(line), "%d,%llu,%.12g\n", k,
                          static_cast<unsigned long long>(b),
                          static_cast<double>(num) / n);
            out += line;
        }
    }
    return out;
}

MartingaleLaw law_from_integrand(const AdaptedIntegrand& f, const VolatilityDomain& domain) {
    if (f.n < 1) throw DomainError("integrand step count must be >= 1");
    if (f.n > 20) {
        throw BudgetExceeded("law_from_integrand supports n <= 20 (2^n sign sequences), got n=" +
                             std::to_string(f.n));
    }

    MartingaleLaw law;
    law.lattice = Lattice(domain, f.n);
    law.support.push_back({{0}, 1.0});

    for (int k = 0; k < f.n; ++k) {
        std::vector<WeightedPath> next;
        next.reserve(law.support.size() * 2);
        for (const WeightedPath& wp : law.support) {
            const int s = f.numerator_at(k, std::span<const long long>(wp.indices));
            if (!numerator_in_set(f.sigmas, s)) {
                throw PolicyError("integrand returned level " + std::to_string(s) + "/" +
                                  std::to_string(f.n) + " outside the admissible set at step " +
                                  std::to_string(k));
            }
            const long long x = wp.indices.back();
            if (s == 0) {
                // Both sign branches coincide; keep one merged copy.
                WeightedPath child{wp.indices, wp.probability};
                child.indices.push_back(x);
                next.push_back(std::move(child));
            } else {
                WeightedPath up{wp.indices, 0.5 * wp.probability};
                up.indices.push_back(x + s);
                WeightedPath down{wp.indices, 0.5 * wp.probability};
                down.indices.push_back(x - s);
                next.push_back(std::move(up));
                next.push_back(std::move(down));
            }
        }
        law.support = std::move(next);
    }
    return law;
}

namespace {

// Grouping pass for the martingale check: entries in [lo, hi) share the
// prefix x_0..x_step; accumulates the conditional mean of the next increment
// (in index units, exact for dyadic probabilities) and recurses into the
// sub-groups by x_{step+1}.
void martingale_scan(const std::vector<const WeightedPath*>& order, std::size_t lo, std::size_t hi,
                     int step, int n, double h, double& worst) {
    if (step >= n) return;
    double sum_p = 0.0;
    double sum_pd = 0.0; // sum of p * (index increment)
    for (std::size_t i = lo; i < hi; ++i) {
        const auto& idx = order[i]->indices;
        sum_p += order[i]->probability;
        sum_pd += order[i]->probability *
                  static_cast<double>(idx[step + 1] - idx[step]);
    }
    if (sum_p > 0.0) {
        worst = std::max(worst, std::fabs(sum_pd / sum_p * h));
    }
    std::size_t run = lo;
    while (run < hi) {
        std::size_t end = run + 1;
        while (end < hi && order[end]->indices[step + 1] == order[run]->indices[step + 1]) ++end;
        martingale_scan(order, run, end, step + 1, n, h, worst);
        run = end;
    }
}

} // namespace

ValidationReport validate_law(const MartingaleLaw& law, const VolatilityDomain& domain) {
    const int n = law.lattice.n;
    for (const WeightedPath& wp : law.support) {
        if (static_cast<int>(wp.indices.size()) != n + 1 || wp.indices.front() != 0) {
            throw DomainError("law support path malformed (wrong length or x_0 != 0)");
        }
    }

    ValidationReport rep;

    double total = 0.0;
    double minp = std::numeric_limits<double>::infinity();
    for (const WeightedPath& wp : law.support) {
        total += wp.probability;
        minp = std::min(minp, wp.probability);
    }
    rep.total_probability = total;
    rep.min_probability = law.support.empty() ? 0.0 : minp;
    rep.probabilities_ok =
        !law.support.empty() && rep.min_probability > 0.0 && std::fabs(total - 1.0) <= 1e-12;

    std::vector<const WeightedPath*> order;
    order.reserve(law.support.size());
    for (const WeightedPath& wp : law.support) order.push_back(&wp);
    std::sort(order.begin(), order.end(), [](const WeightedPath* a, const WeightedPath* b) {
        return a->indices < b->indices;
    });
    double worst_mean = 0.0;
    martingale_scan(order, 0, order.size(), 0, n, law.lattice.h, worst_mean);
    rep.worst_conditional_mean = worst_mean;
    rep.martingale_ok = worst_mean <= 1e-12;

    double worst_violation = 0.0;
    for (const WeightedPath& wp : law.support) {
        for (int k = 0; k < n; ++k) {
            const long long a = std::llabs(wp.indices[k + 1] - wp.indices[k]);
            if (!sigma_admissible(domain, a, n)) {
                const double sq = (static_cast<double>(a) / n) * (static_cast<double>(a) / n);
                const double dist = std::max(domain.r_d - sq, sq - domain.R_d);
                worst_violation = std::max(worst_violation, dist);
            }
        }
    }
    rep.worst_bound_violation = worst_violation;
    rep.bounds_ok = worst_violation == 0.0;

    return rep;
}

const char* engine_name(Engine engine) {
    switch (engine) {
        case Engine::MarkovDP: return "dp";
        case Engine::MaxAugmentedDP: return "maxaug";
        case Engine::Enumeration: return "enum";
    }
    return "?";
}

int MarkovPolicy::numerator_at(int step, long long j) const {
    if (step < 0 || step >= n) throw PolicyError("policy step out of range");
    const long long r = static_cast<long long>(step) * max_numerator;
    if (j < -r || j > r) throw PolicyError("policy index outside reachable range");
    return rows[step][static_cast<std::size_t>(j + r)];
}

ValueReport value_markov_dp(const Payoff& payoff, int n, const VolatilityDomain& domain,
                            const DpOptions& opts) {
    if (payoff.kind != PayoffKind::Terminal) {
        throw DomainError("value_markov_dp requires a terminal payoff, got '" + payoff.name + "'");
    }
    const auto t0 = clock_type::now();

    const SigmaSet sigmas = admissible_sigmas(domain, n);
    const Lattice lattice(domain, n);
    const int kmax = sigmas.max_numerator();
    const long long reach = static_cast<long long>(n) * kmax;
    const long long width = 2 * reach + 1;
    const bool parallel = opts.exec == Exec::Parallel;

    std::vector<double> buf_a(static_cast<std::size_t>(width));
    std::vector<double> buf_b(static_cast<std::size_t>(width));
    double* curr = buf_a.data() + reach;
    double* out = buf_b.data() + reach;

    const auto& g = payoff.terminal;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static) if (parallel)
    for (long long j = -reach; j <= reach; ++j) {
        try {
            curr[j] = g(lattice.value(j));
        } catch (...) {
            failed.store(true, std::memory_order_relaxed);
        }
    }
    for (long long j = -reach; j <= reach; ++j) {
        if (failed.load(std::memory_order_relaxed) || !std::isfinite(curr[j])) {
            throw PayoffError("payoff '" + payoff.name + "' non-finite on the lattice");
        }
    }
    long long nodes = width;

    ValueReport report;
    if (opts.with_policy) {
        MarkovPolicy policy;
        policy.n = n;
        policy.max_numerator = kmax;
        policy.rows.resize(static_cast<std::size_t>(n));
        report.policy = std::move(policy);
    }

    const int levels = sigmas.size();
    const int* ks = sigmas.numerators.data();

    for (int k = n - 1; k >= 0; --k) {
        const long long r = static_cast<long long>(k) * kmax;
        if (opts.with_policy) {
            auto& row = report.policy->rows[static_cast<std::size_t>(k)];
            row.assign(static_cast<std::size_t>(2 * r + 1), 0);
            int* rowp = row.data() + r;
#pragma omp parallel for schedule(static) if (parallel)
            for (long long j = -r; j <= r; ++j) {
                double best = -std::numeric_limits<double>::infinity();
                int best_k = ks[0];
                for (int si = 0; si < levels; ++si) {
                    const long long s = ks[si];
                    const double cand = 0.5 * (curr[j + s] + curr[j - s]);
                    if (cand > best) {
                        best = cand;
                        best_k = ks[si];
                    }
                }
                out[j] = best;
                rowp[j] = best_k;
            }
        } else {
#pragma omp parallel for schedule(static) if (parallel)
            for (long long j = -r; j <= r; ++j) {
                double best = -std::numeric_limits<double>::infinity();
                for (int si = 0; si < levels; ++si) {
                    const long long s = ks[si];
                    const double cand = 0.5 * (curr[j + s] + curr[j - s]);
                    best = cand > best ? cand : best;
                }
                out[j] = best;
            }
        }
        nodes += 2 * r + 1;
        std::swap(curr, out);
    }

    report.n = n;
    report.value = curr[0];
    report.engine = Engine::MarkovDP;
    report.node_count = nodes;
    report.wall_time = seconds_since(t0);
    return report;
}

ValueReport value_maxaug_dp(const Payoff& payoff, int n, const VolatilityDomain& domain,
                            const DpOptions& opts) {
    if (payoff.kind != PayoffKind::RunningMax) {
        throw DomainError("value_maxaug_dp requires a running-max payoff, got '" + payoff.name +
                          "'");
    }
    const auto t0 = clock_type::now();

    const SigmaSet sigmas = admissible_sigmas(domain, n);
    const Lattice lattice(domain, n);
    const int kmax = sigmas.max_numerator();
    const long long reach = static_cast<long long>(n) * kmax;
    const long long width_j = 2 * reach + 1;
    const long long width_m = reach + 1;
    const bool parallel = opts.exec == Exec::Parallel;

    const long long total = width_j * width_m;
    if (total > opts.maxaug_state_cap) {
        throw BudgetExceeded("max-augmented state space has " + std::to_string(total) +
                             " states per level, cap is " + std::to_string(opts.maxaug_state_cap));
    }

    std::vector<double> buf_a(static_cast<std::size_t>(total));
    std::vector<double> buf_b(static_cast<std::size_t>(total));
    double* curr = buf_a.data();
    double* out = buf_b.data();
    const auto at = [reach, width_m](long long j, long long m) {
        return static_cast<std::size_t>((j + reach) * width_m + m);
    };

    const auto& g = payoff.terminal_max;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static) if (parallel)
    for (long long j = -reach; j <= reach; ++j) {
        try {
            for (long long m = std::max(j, 0LL); m <= reach; ++m) {
                curr[at(j, m)] = g(lattice.value(j), lattice.value(m));
            }
        } catch (...) {
            failed.store(true, std::memory_order_relaxed);
        }
    }
    if (failed.load(std::memory_order_relaxed)) {
        throw PayoffError("payoff '" + payoff.name + "' failed on the lattice");
    }
    for (long long j = -reach; j <= reach; ++j) {
        for (long long m = std::max(j, 0LL); m <= reach; ++m) {
            if (!std::isfinite(curr[at(j, m)])) {
                throw PayoffError("payoff '" + payoff.name + "' non-finite on the lattice");
            }
        }
    }

    long long nodes = 0;
    const int levels = sigmas.size();
    const int* ks = sigmas.numerators.data();

    for (int k = n - 1; k >= 0; --k) {
        const long long r = static_cast<long long>(k) * kmax;
#pragma omp parallel for schedule(static) if (parallel)
        for (long long j = -r; j <= r; ++j) {
            for (long long m = std::max(j, 0LL); m <= r; ++m) {
                double best = -std::numeric_limits<double>::infinity();
                for (int si = 0; si < levels; ++si) {
                    const long long s = ks[si];
                    const long long ju = j + s;
                    // Down-move never raises the max: m >= j >= j - s.
                    const double cand =
                        0.5 * (curr[at(ju, std::max(m, ju))] + curr[at(j - s, m)]);
                    best = cand > best ? cand : best;
                }
                out[at(j, m)] = best;
            }
        }
        nodes += (2 * r + 1) * (r + 1); // upper bound on valid states in the level
        std::swap(curr, out);
    }

    ValueReport report;
    report.n = n;
    report.value = curr[at(0, 0)];
    report.engine = Engine::MaxAugmentedDP;
    report.node_count = nodes;
    report.wall_time = seconds_since(t0);
    return report;
}

namespace {

// Depth-first exhaustive search over adapted integrands. The scratch path
// doubles as the DFS stack; payoffs are evaluated at the 2^n sign leaves.
struct EnumeratorState {
    const Payoff& payoff;
    const SigmaSet& sigmas;
    int n;
    LatticePath scratch;
    long long leaves = 0;

    double best_value(int k) {
        if (k == n) {
            ++leaves;
            return evaluate_payoff(payoff, scratch);
        }
        const long long x = scratch.indices.back();
        double best = -std::numeric_limits<double>::infinity();
        for (int s : sigmas.numerators) {
            scratch.indices.push_back(x + s);
            const double up = best_value(k + 1);
            scratch.indices.back() = x - s;
            const double down = best_value(k + 1);
            scratch.indices.pop_back();
            const double cand = 0.5 * (up + down);
            best = cand > best ? cand : best;
        }
        return best;
    }

    // Recomputes the per-level values at each realized node, records the
    // argmax choice (ties to the smallest level), and walks the chosen tree.
    double fill(int k, std::uint64_t bits, IntegrandTable& table) {
        if (k == n) return evaluate_payoff(payoff, scratch);
        const long long x = scratch.indices.back();
        double best = -std::numeric_limits<double>::infinity();
        int best_k = sigmas.numerators.front();
        for (int s : sigmas.numerators) {
            scratch.indices.push_back(x + s);
            const double up = best_value(k + 1);
            scratch.indices.back() = x - s;
            const double down = best_value(k + 1);
            scratch.indices.pop_back();
            const double cand = 0.5 * (up + down);
            if (cand > best) {
                best = cand;
                best_k = s;
            }
        }
        table.numerator_by_node[IntegrandTable::node_slot(k, bits)] = best_k;
        scratch.indices.push_back(x + best_k);
        fill(k + 1, bits | (std::uint64_t(1) << k), table);
        scratch.indices.back() = x - best_k;
        fill(k + 1, bits, table);
        scratch.indices.pop_back();
        return best;
    }
};

} // namespace

EnumerationResult value_enumerate(const Payoff& payoff, int n, const VolatilityDomain& domain) {
    const auto t0 = clock_type::now();
    const SigmaSet sigmas = admissible_sigmas(domain, n);
    if (n > 6 || sigmas.size() > 4) {
        throw BudgetExceeded("enumeration supports n <= 6 and |SigmaSet| <= 4, got n=" +
                             std::to_string(n) + " levels=" + std::to_string(sigmas.size()));
    }
    const Lattice lattice(domain, n);

    EnumeratorState state{payoff, sigmas, n, LatticePath{lattice, {0}}, 0};

    IntegrandTable table;
    table.n = n;
    table.sigmas = sigmas;
    table.numerator_by_node.assign((std::size_t(1) << n) - 1, sigmas.numerators.front());

    const double value = state.fill(0, 0, table);

    EnumerationResult result;
    result.report.n = n;
    result.report.value = value;
    result.report.engine = Engine::Enumeration;
    result.report.node_count = state.leaves;
    result.report.wall_time = seconds_since(t0);
    result.argmax = std::move(table);
    return result;
}

ValueReport compute_value(const Payoff& payoff, int n, const VolatilityDomain& domain,
                          std::optional<Engine> engine, const DpOptions& opts) {
    Engine chosen = Engine::MarkovDP;
    if (engine) {
        chosen = *engine;
    } else {
        switch (payoff.kind) {
            case PayoffKind::Terminal: chosen = Engine::MarkovDP; break;
            case PayoffKind::RunningMax: chosen = Engine::MaxAugmentedDP; break;
            case PayoffKind::PathFunctional: chosen = Engine::Enumeration; break;
        }
    }
    switch (chosen) {
        case Engine::MarkovDP: return value_markov_dp(payoff, n, domain, opts);
        case Engine::MaxAugmentedDP: return value_maxaug_dp(payoff, n, domain, opts);
        case Engine::Enumeration: return value_enumerate(payoff, n, domain).report;
    }
    throw Error("unreachable engine dispatch");
}

} // namespace gexp
