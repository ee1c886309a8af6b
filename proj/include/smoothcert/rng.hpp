#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace smoothcert {

/// Mixes two 64-bit values into a well-scrambled seed (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

/// Deterministic random stream. The core generator is std::mt19937_64 (whose
/// output sequence is fixed by the standard); all floating-point transforms
/// are coded explicitly here so that streams are byte-reproducible across
/// platforms and library versions.
///
/// Substreams derived via substream(i) depend only on the construction seed,
/// never on how much of the parent stream has been consumed, so work can be
/// partitioned across workers without changing results.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double strictly inside (0, 1).
    double next_unit() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

    /// Uniform double in (-1, 1).
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

    /// Uniform double in (lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Standard normal draw (Box-Muller, one spare cached per pair).
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Independent stream keyed by (construction seed, stream index).
    Rng substream(std::uint64_t stream) const {
        return Rng(mix_seed(seed_, stream));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace smoothcert
