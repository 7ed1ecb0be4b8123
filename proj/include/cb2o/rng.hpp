#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace cb2o::rng {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based stream: the n-th draw is a pure function of (key, n), so a
/// stream can be reconstructed from its key on any thread.
class Stream {
public:
    using result_type = std::uint64_t;

    constexpr explicit Stream(std::uint64_t key) noexcept : key_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept
    {
        ++counter_;
        return mix64(key_ ^ mix64(counter_ * 0x9E3779B97F4A7C15ULL));
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept
    {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept
    {
        return lo + (hi - lo) * uniform();
    }

    /// Uniform integer in [0, n) by rejection; n > 0.
    std::uint64_t below(std::uint64_t n) noexcept
    {
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return x % n;
    }

    /// Standard normal via Box-Muller. Platform-independent, unlike
    /// std::normal_distribution.
    double normal() noexcept
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    std::uint64_t key() const noexcept { return key_; }

    template <typename T>
    void shuffle(std::vector<T>& values) noexcept
    {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Derives an independent stream from a master seed and a tuple of ids
/// such as (purpose, particle, iteration).
inline Stream make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) noexcept
{
    std::uint64_t key = mix64(seed + 0x632BE59BD9B4E019ULL);
    std::uint64_t salt = 0xD1B54A32D192ED03ULL;
    for (auto id : ids) {
        key = mix64(key ^ mix64(id + salt));
        salt += 0x9E3779B97F4A7C15ULL;
    }
    return Stream(key);
}

// Stream-purpose tags to keep different uses of one seed apart.
enum Purpose : std::uint64_t {
    init_benign = 1,
    init_malicious = 2,
    diffusion = 3,
    adversary = 4,
    fed_data = 10,
    fed_init = 11,
    fed_local = 12,
    fed_sampling = 13,
    fed_malicious = 14,
    probe = 20,
    sweep = 30,
};

}  // namespace cb2o::rng
