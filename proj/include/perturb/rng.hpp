#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace perturb {

/// SplitMix64 finalizer; used to derive independent per-trial seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/**
 * Deterministic random stream.
 *
 * Wraps std::mt19937_64 but implements its own bounded-integer and real
 * draws, since the standard distributions are implementation defined and
 * the harness promises byte-identical output for a fixed seed.
 *
 * Streams are split by (seed, index): split(i) never depends on how many
 * numbers the parent has produced, so trials may run in any order.
 */
class Rng {
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return engine_(); }

    std::uint64_t seed() const { return seed_; }

    /// Child stream keyed by `index`.
    Rng split(std::uint64_t index) const
    {
        return Rng(splitmix64(seed_ ^ splitmix64(index + 0x632be59bd9b4e019ull)));
    }

    /// Uniform integer in [0, bound). Lemire's nearly-divisionless method.
    std::uint64_t below(std::uint64_t bound)
    {
        if (bound <= 1) return 0;
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(engine_()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p)
    {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform01() < p;
    }

    /// Number of failures before the first success of a Bernoulli(p) sequence.
    std::uint64_t geometric(double p)
    {
        if (p >= 1.0) return 0;
        double u = 1.0 - uniform01(); // (0, 1]
        double g = std::floor(std::log(u) / std::log1p(-p));
        if (!(g < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
        return static_cast<std::uint64_t>(g);
    }

    template <class T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace perturb
