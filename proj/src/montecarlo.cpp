#include "gexp/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <span>
#include <string>

namespace gexp {

VolatilityPolicy VolatilityPolicy::constant(int numerator) {
    VolatilityPolicy p;
    p.kind = Kind::Constant;
    p.constant_numerator = numerator;
    return p;
}

VolatilityPolicy VolatilityPolicy::from_markov(MarkovPolicy policy) {
    VolatilityPolicy p;
    p.kind = Kind::Markov;
    p.markov = std::make_shared<const MarkovPolicy>(std::move(policy));
    return p;
}

VolatilityPolicy VolatilityPolicy::from_integrand(AdaptedIntegrand f) {
    VolatilityPolicy p;
    p.kind = Kind::Integrand;
    p.integrand = std::make_shared<const AdaptedIntegrand>(std::move(f));
    return p;
}

namespace {

void check_policy(const VolatilityPolicy& policy, const SigmaSet& sigmas, int n) {
    const auto in_set = [&](int k) {
        return std::binary_search(sigmas.numerators.begin(), sigmas.numerators.end(), k);
    };
    switch (policy.kind) {
        case VolatilityPolicy::Kind::Constant:
            if (!in_set(policy.constant_numerator)) {
                throw PolicyError("constant policy level " +
                                  std::to_string(policy.constant_numerator) + "/" +
                                  std::to_string(n) + " is not admissible");
            }
            break;
        case VolatilityPolicy::Kind::Markov:
            if (!policy.markov || policy.markov->n != n) {
                throw PolicyError("Markov policy missing or built for a different n");
            }
            break;
        case VolatilityPolicy::Kind::Integrand:
            if (!policy.integrand || policy.integrand->n != n) {
                throw PolicyError("integrand policy missing or built for a different n");
            }
            break;
    }
}

// One walk; prefix must hold {0} on entry and has room for n more entries.
void simulate_path(const VolatilityPolicy& policy, const SigmaSet& sigmas, int n,
                   const RngSpec& rng, long long path_id, std::vector<long long>& prefix) {
    const auto in_set = [&](int k) {
        return std::binary_search(sigmas.numerators.begin(), sigmas.numerators.end(), k);
    };
    for (int k = 0; k < n; ++k) {
        int s = 0;
        switch (policy.kind) {
            case VolatilityPolicy::Kind::Constant:
                s = policy.constant_numerator;
                break;
            case VolatilityPolicy::Kind::Markov:
                s = policy.markov->numerator_at(k, prefix.back());
                break;
            case VolatilityPolicy::Kind::Integrand:
                s = policy.integrand->numerator_at(k, std::span<const long long>(prefix));
                break;
        }
        if (!in_set(s)) {
            throw PolicyError("policy returned inadmissible level " + std::to_string(s) + "/" +
                              std::to_string(n) + " at step " + std::to_string(k));
        }
        const int sign = rng::sign_at(rng, static_cast<std::uint64_t>(path_id),
                                      static_cast<std::uint64_t>(k));
        prefix.push_back(prefix.back() + static_cast<long long>(sign) * s);
    }
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 32) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t mid = v.size() / 2;
    return pairwise_sum(v.first(mid)) + pairwise_sum(v.subspan(mid));
}

double pairwise_sum_sqdev(std::span<const double> v, double mean) {
    if (v.size() <= 32) {
        double s = 0.0;
        for (double x : v) s += (x - mean) * (x - mean);
        return s;
    }
    const std::size_t mid = v.size() / 2;
    return pairwise_sum_sqdev(v.first(mid), mean) + pairwise_sum_sqdev(v.subspan(mid), mean);
}

} // namespace

std::vector<LatticePath> sample_paths(const VolatilityPolicy& policy, int n, long long n_paths,
                                      const VolatilityDomain& domain, const RngSpec& rng) {
    if (n_paths < 0) throw DomainError("n_paths must be >= 0");
    const SigmaSet sigmas = admissible_sigmas(domain, n);
    check_policy(policy, sigmas, n);
    const Lattice lattice(domain, n);

    std::vector<LatticePath> out;
    out.reserve(static_cast<std::size_t>(n_paths));
    for (long long p = 0; p < n_paths; ++p) {
        std::vector<long long> prefix;
        prefix.reserve(static_cast<std::size_t>(n) + 1);
        prefix.push_back(0);
        simulate_path(policy, sigmas, n, rng, p, prefix);
        out.push_back(LatticePath{lattice, std::move(prefix)});
    }
    return out;
}

McEstimate estimate(const Payoff& payoff, const VolatilityPolicy& policy, int n,
                    long long n_paths, const VolatilityDomain& domain, const RngSpec& rng,
                    Exec exec) {
    if (n_paths < 1) throw DomainError("estimate needs n_paths >= 1");
    const SigmaSet sigmas = admissible_sigmas(domain, n);
    check_policy(policy, sigmas, n);
    const Lattice lattice(domain, n);
    const bool parallel = exec == Exec::Parallel;

    std::vector<double> values(static_cast<std::size_t>(n_paths));
    std::atomic<bool> failed{false};
    std::string error;
    bool policy_fault = false;

#pragma omp parallel if (parallel)
    {
        std::vector<long long> prefix;
        prefix.reserve(static_cast<std::size_t>(n) + 1);
        LatticePath path{lattice, {}};
#pragma omp for schedule(static)
        for (long long p = 0; p < n_paths; ++p) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
                prefix.clear();
                prefix.push_back(0);
                simulate_path(policy, sigmas, n, rng, p, prefix);
                path.indices = prefix;
                values[static_cast<std::size_t>(p)] = evaluate_payoff(payoff, path);
            } catch (const std::exception& e) {
#pragma omp critical
                {
                    error = e.what();
                    policy_fault = dynamic_cast<const PolicyError*>(&e) != nullptr;
                }
                failed.store(true, std::memory_order_relaxed);
            }
        }
    }
    if (failed.load(std::memory_order_relaxed)) {
        if (policy_fault) throw PolicyError(error);
        throw PayoffError("Monte Carlo evaluation failed: " + error);
    }

    McEstimate est;
    est.n_paths = n_paths;
    est.seed = rng.seed;
    est.mean = pairwise_sum(values) / static_cast<double>(n_paths);
    if (n_paths > 1) {
        const double var =
            pairwise_sum_sqdev(values, est.mean) / static_cast<double>(n_paths - 1);
        est.standard_error = std::sqrt(var / static_cast<double>(n_paths));
    }
    return est;
}

} // namespace gexp
