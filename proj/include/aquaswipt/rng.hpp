#pragma once

#include <cstdint>
#include <random>

namespace aquaswipt
{
//---------------------------------------------------------------------------//
/*!
 * Seeded generator with platform-independent variate mappings.
 *
 * The raw mt19937_64 stream is fully specified by the standard, but the
 * standard distributions are not, so all conversions happen here.
 */
class Rng
{
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t operator()() { return engine_(); }

    //! Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * this->uniform(); }

    //! Uniform integer in [0, n) by rejection; n > 0.
    std::uint64_t below(std::uint64_t n)
    {
        std::uint64_t const limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do
        {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    //! Uniform integer in [lo, hi].
    int between(int lo, int hi)
    {
        return lo + static_cast<int>(this->below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return UINT64_MAX; }

  private:
    std::mt19937_64 engine_;
};

//! SplitMix64 finalizer, used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
    return mix_seed(mix_seed(a) ^ (b + 0x632be59bd9b4e019ULL));
}

}  // namespace aquaswipt
