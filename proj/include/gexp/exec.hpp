#pragma once

namespace gexp {

// Execution mode for the data-parallel kernels (backward-induction level
// sweeps, PDE time steps, Monte Carlo path loops). Serial is the reference
// implementation; Parallel uses OpenMP and is required to produce
// bit-identical results.
enum class Exec {
    Serial,
    Parallel,
};

} // namespace gexp
