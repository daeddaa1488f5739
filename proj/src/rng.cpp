#include "genrl/rng.hpp"

#include <cmath>

namespace genrl {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng Rng::child(std::uint64_t seed, std::uint64_t stream) {
    return Rng(splitmix64(seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1))));
}

double Rng::uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    // Box-Muller; u1 shifted away from 0 so the log is finite.
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * M_PI * u2);
}

int Rng::categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    int last_positive = 0;
    for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
        if (probs[i] > 0.0) last_positive = i;
        acc += probs[i];
        if (u < acc) return i;
    }
    return last_positive;
}

} // namespace genrl
