#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace lpp {

//! SplitMix64 finalizer. Used both as a standalone generator and as the
//! mixing function behind stream derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/*!
 * Derive the seed of an independent substream from a parent seed and a
 * stream index. Counter-based: stream r can be reproduced without touching
 * streams 0..r-1.
 */
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    return splitmix64(seed ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
}

/*!
 * xoshiro256** generator. Satisfies UniformRandomBitGenerator so it can be
 * handed to standard algorithms, but all sampling in this library goes
 * through uniform01() and inverse CDFs so results are platform independent.
 */
class Xoshiro256
{
  public:
    using result_type = std::uint64_t;

    explicit constexpr Xoshiro256(std::uint64_t seed = 0) noexcept
    {
        std::uint64_t x = seed;
        for (auto& s : s_)
        {
            x = splitmix64(x);
            s = x;
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept
    {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    //! Uniform on the open interval (0,1); never returns 0 or 1.
    double uniform01() noexcept
    {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    //! Number of failures before the first success, success probability q.
    std::uint64_t geometric0(double q) noexcept
    {
        if (q >= 1.0)
            return 0;
        return static_cast<std::uint64_t>(std::floor(std::log(uniform01()) / std::log1p(-q)));
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
    {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4]{};
};

} // namespace lpp
