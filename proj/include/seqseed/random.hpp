#pragma once

#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace seqseed {

using NodeId = std::uint32_t;

/// SplitMix64 finalizer. Used to decorrelate stream keys before seeding.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a, for turning labels (strategy names) into stream keys.
constexpr std::uint64_t hash_label(std::string_view s) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/**
 * Seeded random stream with a platform-independent output sequence.
 *
 * The engine is std::mt19937_64, whose raw output is fixed by the standard.
 * The standard distributions are not, so uniform reals, bounded integers and
 * shuffles are derived here from raw 64-bit draws.
 */
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed = 0x5eed5eedULL) : engine_(mix64(seed)) {}

    /// Stream for a tuple of keys, e.g. (master seed, config id, strategy, run id).
    /// Distinct key tuples give unrelated streams; the same tuple always gives
    /// the same stream.
    static RandomStream derive(std::uint64_t master, std::initializer_list<std::uint64_t> keys)
    {
        std::uint64_t h = mix64(master);
        for (auto k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
        return RandomStream(h);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    result_type operator()() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer on [0, bound). Lemire's multiply-and-reject method.
    std::uint64_t below(std::uint64_t bound)
    {
        if (bound == 0) return 0;
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(engine_()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    template <class T>
    void shuffle(std::span<T> items)
    {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

    /// One activation attempt of the cascade. The endpoints are ignored here;
    /// scripted and instrumented sources in the tests key on them.
    bool attempt(NodeId /*from*/, NodeId /*to*/, double pp) { return bernoulli(pp); }

private:
    std::mt19937_64 engine_;
};

/// Anything the cascade can ask "does from activate to?".
template <class S>
concept AttemptSource = requires(S& s, NodeId u, NodeId v, double p) {
    { s.attempt(u, v, p) } -> std::convertible_to<bool>;
};

}  // namespace seqseed
