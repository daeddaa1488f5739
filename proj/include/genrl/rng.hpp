#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>

namespace genrl {

/// Generator identity recorded in run metadata. All randomness in the
/// library flows through Rng so runs are reproducible bit-for-bit.
inline constexpr const char* kRngName = "mt19937_64";

/// splitmix64 finalizer, used to derive child-stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seedable 64-bit generator with an explicit uniform mapping.
///
/// Uniform doubles are produced as (x >> 11) * 2^-53 from the raw
/// mt19937_64 output, so streams are identical on every platform.
/// Child streams: stream k of seed s is seeded with
/// splitmix64(s ^ (0x9E3779B97F4A7C15 * (k + 1))).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    static Rng child(std::uint64_t seed, std::uint64_t stream);

    /// Uniform draw in [0, 1).
    double uniform();

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal();

    /// Inverse-CDF draw from an unnormalized-tolerant probability row:
    /// smallest index i with cumsum(probs[0..i]) > u. Falls back to the
    /// last positive entry if rounding pushes u past the total.
    int categorical(std::span<const double> probs);

  private:
    std::mt19937_64 gen_;
};

} // namespace genrl
