#pragma once

#include <cstdint>
#include <vector>

#include "gexp/errors.hpp"
#include "gexp/volatility_domain.hpp"

namespace gexp {

// Spatial grid for the controlled walk. Spacing h = sqrt(T)/(n*sqrt(n)) makes
// every step +-sigma*sqrt(T/n) with sigma = k/n land exactly k index slots
// away, so reachability and path identity are integer arithmetic.
struct Lattice {
    int n = 0;            // step count
    double h = 0.0;       // spacing
    long long j_max = 0;  // |index| bound, ceil(n^2 * sqrt(R_d))
    double T = 0.0;       // horizon (carried for interpolation)

    Lattice() = default;
    Lattice(const VolatilityDomain& domain, int n);

    double value(long long j) const { return static_cast<double>(j) * h; }
    bool in_bounds(long long j) const { return j >= -j_max && j <= j_max; }

    // Index displacement of one step at volatility k/n is exactly k.
    static long long step_index(int sigma_numerator) { return sigma_numerator; }
};

// Discrete path x_0..x_n held as integer lattice indices; values j*h are
// materialized on demand.
struct LatticePath {
    Lattice lattice;
    std::vector<long long> indices;

    int steps() const { return static_cast<int>(indices.size()) - 1; }
    double value(int k) const { return lattice.value(indices[k]); }
};

// Piecewise-linear interpolation of the path at time t in [0, T]:
//   x_hat(t) = (floor(nt/T)+1-nt/T) x_floor + (nt/T-floor(nt/T)) x_floor+1
// with x_hat(T) = x_n exactly. Throws DomainError outside [0, T].
double interpolate(const LatticePath& path, double t);

// sup_t |x_hat(t)| = max_k |x_k| since the interpolation is piecewise linear.
double sup_norm(const LatticePath& path);

// max_k x_k (running maximum of the interpolated path).
double running_max(const LatticePath& path);

} // namespace gexp
