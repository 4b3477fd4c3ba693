/**
 * @file rng.hpp
 * @brief Seeded, platform-independent random streams.
 *
 * std::uniform_int_distribution and friends are implementation-defined, so
 * every draw used for surrogates, pseudo ids and fold splits goes through
 * SplitMix64 and the bounded samplers below.
 */

#pragma once

#include "radvlp/core/error.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>

namespace radvlp {

inline constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// One SplitMix64 step applied to @p x (state advance + output mix).
inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class RandomStream {
public:
    using result_type = std::uint64_t;

    constexpr explicit RandomStream(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept { return next(); }

    constexpr std::uint64_t next() noexcept {
        const std::uint64_t out = splitmix64(state_);
        state_ += 0x9e3779b97f4a7c15ULL;
        return out;
    }

    /// Uniform in [0, n). Rejection sampling, so no modulo bias.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw ComputeError("RandomStream::below: empty range");
        const std::uint64_t limit = max() - max() % n;
        for (;;) {
            const std::uint64_t x = next();
            if (x < limit) return x % n;
        }
    }

    /// Uniform in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw ComputeError("RandomStream::between: lo > hi");
        const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
        if (span == max()) return static_cast<std::int64_t>(next());
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + below(span + 1));
    }

    /// Uniform in [0, 1) with 53 random bits.
    double unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Index drawn proportionally to @p weights (all > 0).
    std::size_t weighted(std::span<const double> weights) {
        double total = 0.0;
        for (const double w : weights) total += w;
        if (!(total > 0.0)) throw ComputeError("RandomStream::weighted: no positive weight");
        const double r = unit() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (r < acc) return i;
        }
        return weights.size() - 1;
    }

    /// 128 random bits as 32 lowercase hex digits.
    std::string hex128() {
        static constexpr char kHex[] = "0123456789abcdef";
        std::string out(32, '0');
        for (int half = 0; half < 2; ++half) {
            std::uint64_t x = next();
            for (int k = 15; k >= 0; --k) {
                out[static_cast<std::size_t>(half * 16 + k)] = kHex[x & 0xF];
                x >>= 4;
            }
        }
        return out;
    }

    constexpr std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

/// Stream for one patient: seeded from the master seed and the patient id bytes.
inline RandomStream derive_patient_stream(std::uint64_t master_seed, std::string_view patient_id) noexcept {
    return RandomStream(splitmix64(master_seed ^ fnv1a64(patient_id)));
}

}  // namespace radvlp
