#pragma once

#include <cstdint>

namespace gexp {

// Counter-based generator spec. The algorithm is fixed and documented so a
// seed identifies one path stream on every platform: draw (seed, stream,
// counter) -> uint64 via three rounds of the splitmix64 finalizer.
struct RngSpec {
    std::uint64_t seed = 0;
    static constexpr const char* algorithm = "splitmix64-counter-v1";
};

namespace rng {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless draw: independent of evaluation order, so parallel consumers
// see the same stream.
inline std::uint64_t at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ (stream * 0xd6e8feb86659fd93ULL));
    h = mix64(h ^ (counter * 0xa0761d6478bd642fULL));
    return h;
}

// Fair sign in {-1, +1} for (path, step).
inline int sign_at(const RngSpec& spec, std::uint64_t path, std::uint64_t step) {
    return (at(spec.seed, path, step) & 1ULL) ? 1 : -1;
}

} // namespace rng
} // namespace gexp
