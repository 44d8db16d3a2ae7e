#pragma once

#include <vector>

#include "gexp/errors.hpp"

namespace gexp {

// Uncertainty interval D = [r_d, R_d] for the variance per unit time,
// together with the horizon T. The generator G and the admissible discrete
// volatility levels are both derived from it.
struct VolatilityDomain {
    double r_d; // variance lower bound (per unit time)
    double R_d; // variance upper bound (per unit time)
    double T;   // time horizon

    VolatilityDomain(double r_d, double R_d, double T);
};

// G(gamma) = 1/2 * sup_{c in [r_d, R_d]} c * gamma
//          = 1/2 * R_d * gamma  for gamma >= 0,
//            1/2 * r_d * gamma  for gamma <  0.
double g_function(const VolatilityDomain& domain, double gamma);

// Admissible volatility levels at discretization n: all sigma = k/n with
// k a nonnegative integer and r_d <= sigma^2 <= R_d. Levels are kept both
// as integer numerators k (exact index arithmetic) and as values k/n.
struct SigmaSet {
    int n;
    std::vector<int> numerators; // ascending k
    std::vector<double> levels;  // ascending k/n

    int size() const { return static_cast<int>(numerators.size()); }
    int min_numerator() const { return numerators.front(); }
    int max_numerator() const { return numerators.back(); }
};

// The canonical admissibility predicate. Every module that needs to decide
// whether an increment is admissible must go through this one test so the
// answer is consistent across the code base.
bool sigma_admissible(const VolatilityDomain& domain, long long k, int n);

// Enumerates the full SigmaSet for n. Throws EmptySigmaSet (carrying the
// smallest feasible n) when no level exists and r_d < R_d; throws
// NotRepresentable when r_d == R_d and sqrt(r_d) is not a fraction k/n.
SigmaSet admissible_sigmas(const VolatilityDomain& domain, int n);

} // namespace gexp
