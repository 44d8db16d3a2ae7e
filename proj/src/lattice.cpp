#include "gexp/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gexp {

Lattice::Lattice(const VolatilityDomain& domain, int n_) {
    if (n_ < 1) throw DomainError("lattice step count must be >= 1");
    n = n_;
    T = domain.T;
    h = std::sqrt(domain.T) / (static_cast<double>(n) * std::sqrt(static_cast<double>(n)));
    j_max = static_cast<long long>(
        std::ceil(static_cast<double>(n) * static_cast<double>(n) * std::sqrt(domain.R_d)));
}

double interpolate(const LatticePath& path, double t) {
    const double T = path.lattice.T;
    if (!(t >= 0.0) || !(t <= T)) {
        throw DomainError("interpolation time " + std::to_string(t) + " outside [0, " +
                          std::to_string(T) + "]");
    }
    const int n = path.steps();
    const double s = static_cast<double>(n) * t / T;
    long long k = static_cast<long long>(std::floor(s));
    if (k >= n) return path.value(n); // t == T (or rounding overshoot)
    const double w = s - static_cast<double>(k);
    return (1.0 - w) * path.value(static_cast<int>(k)) + w * path.value(static_cast<int>(k) + 1);
}

double sup_norm(const LatticePath& path) {
    long long worst = 0;
    for (long long j : path.indices) worst = std::max(worst, std::llabs(j));
    return path.lattice.value(worst);
}

double running_max(const LatticePath& path) {
    long long best = path.indices.front();
    for (long long j : path.indices) best = std::max(best, j);
    return path.lattice.value(best);
}

} // namespace gexp
