#include "gexp/volatility_domain.hpp"

#include <cmath>
#include <string>

namespace gexp {

VolatilityDomain::VolatilityDomain(double r_d_, double R_d_, double T_)
    : r_d(r_d_), R_d(R_d_), T(T_) {
    if (!(r_d >= 0.0) || !(r_d <= R_d) || !std::isfinite(R_d)) {
        throw DomainError("volatility domain requires 0 <= r_d <= R_d < inf, got r_d=" +
                          std::to_string(r_d) + " R_d=" + std::to_string(R_d));
    }
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw DomainError("horizon must satisfy T > 0, got T=" + std::to_string(T));
    }
}

double g_function(const VolatilityDomain& domain, double gamma) {
    return 0.5 * (gamma >= 0.0 ? domain.R_d : domain.r_d) * gamma;
}

bool sigma_admissible(const VolatilityDomain& domain, long long k, int n) {
    if (k < 0) return false;
    const double sigma = static_cast<double>(k) / n;
    const double sq = sigma * sigma;
    return domain.r_d <= sq && sq <= domain.R_d;
}

SigmaSet admissible_sigmas(const VolatilityDomain& domain, int n) {
    if (n < 1) throw DomainError("step count n must be >= 1");

    // Candidate numerators live near [n*sqrt(r_d), n*sqrt(R_d)]; widen by a
    // couple of slots and let the canonical predicate decide the edges.
    long long lo = static_cast<long long>(std::floor(n * std::sqrt(domain.r_d))) - 2;
    long long hi = static_cast<long long>(std::ceil(n * std::sqrt(domain.R_d))) + 2;
    if (lo < 0) lo = 0;

    SigmaSet set;
    set.n = n;
    for (long long k = lo; k <= hi; ++k) {
        if (sigma_admissible(domain, k, n)) {
            set.numerators.push_back(static_cast<int>(k));
            set.levels.push_back(static_cast<double>(k) / n);
        }
    }

    if (set.numerators.empty()) {
        if (domain.r_d == domain.R_d) {
            throw NotRepresentable("sqrt(r_d) is not representable as k/" + std::to_string(n) +
                                   " for r_d = R_d = " + std::to_string(domain.r_d));
        }
        const double gap = std::sqrt(domain.R_d) - std::sqrt(domain.r_d);
        const int n_min = static_cast<int>(std::ceil(1.0 / gap));
        throw EmptySigmaSet("no admissible volatility level at n=" + std::to_string(n) +
                                "; smallest feasible n is " + std::to_string(n_min),
                            n_min);
    }
    return set;
}

} // namespace gexp
