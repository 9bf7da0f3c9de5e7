#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>

namespace filterlab {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Stream derivation rule for parallel replicates:
///   seed' = mix64(mix64(seed) ^ mix64(stream_id + 0x9E3779B97F4A7C15)).
/// Replicate r of a run seeded with s always draws from derive_stream(s, r),
/// so results do not depend on how replicates are scheduled.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream_id) noexcept
{
    return mix64(mix64(seed) ^ mix64(stream_id + 0x9E3779B97F4A7C15ULL));
}

/// Counter-based 64-bit generator: the i-th output (i = 1, 2, ...) of key k is
/// mix64(k + i * 0x9E3779B97F4A7C15). This is SplitMix64 with the state written
/// as an explicit counter, so draws are addressable and the generator is a
/// pure function of (key, counter).
///
/// Satisfies UniformRandomBitGenerator, but the helpers below are what the
/// library uses: they avoid the implementation-defined std distributions, so
/// outputs are identical across standard libraries.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept
    {
        ++counter_;
        return mix64(key_ + counter_ * kGamma);
    }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() noexcept
    {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer on [0, n), unbiased (Lemire's multiply-and-reject).
    std::uint64_t below(std::uint64_t n) noexcept
    {
        __extension__ using u128 = unsigned __int128;
        u128 m = static_cast<u128>((*this)()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<u128>((*this)()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform on {-1, +1}.
    int sign() noexcept { return ((*this)() >> 63) ? 1 : -1; }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() noexcept
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Index drawn with probability proportional to `weights` (nonnegative,
    /// positive total). Rounding at the top end falls back to the last index
    /// carrying positive weight.
    std::size_t categorical(std::span<const double> weights) noexcept
    {
        double total = 0.0;
        for (double w : weights) total += w;
        const double u = uniform() * total;
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            acc += weights[i];
            last_positive = i;
            if (u < acc) return i;
        }
        return last_positive;
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace filterlab
