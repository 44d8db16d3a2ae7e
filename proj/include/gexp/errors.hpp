#pragma once

#include <stdexcept>
#include <string>

namespace gexp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter outside its admissible range (t outside [0,T], sigma <= 0, ...).
struct DomainError : Error {
    using Error::Error;
};

// No volatility level k/n has its square inside [r_d, R_d] at this n.
// Carries the smallest n for which the level set becomes nonempty.
struct EmptySigmaSet : Error {
    EmptySigmaSet(const std::string& msg, int smallest_feasible_n)
        : Error(msg), smallest_feasible_n(smallest_feasible_n) {}
    int smallest_feasible_n;
};

// r_d == R_d and sqrt(r_d) is not a grid fraction k/n at any n.
struct NotRepresentable : Error {
    using Error::Error;
};

// State or integrand count exceeds the configured cap.
struct BudgetExceeded : Error {
    using Error::Error;
};

// Payoff evaluation produced a non-finite value or was otherwise invalid.
struct PayoffError : Error {
    using Error::Error;
};

// Explicit-scheme stability bound R_d * dt / dx^2 <= 1/2 violated.
struct CflViolation : Error {
    using Error::Error;
};

// A computed value overflowed to inf or nan.
struct NonFinite : Error {
    using Error::Error;
};

// Volatility policy returned a level outside the admissible set.
struct PolicyError : Error {
    using Error::Error;
};

// Experiment configuration invalid (empty n list, unknown payoff, ...).
struct ConfigError : Error {
    using Error::Error;
};

// Not enough usable data points (rate fit needs >= 3 positive gaps).
struct InsufficientData : Error {
    using Error::Error;
};

} // namespace gexp
