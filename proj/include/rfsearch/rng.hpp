#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace rfsearch {

// splitmix64; used to derive independent stream seeds from (seed, tag) pairs
// so that trial/prompt/eval streams never depend on consumption order.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_str(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t n = 0) {
    return mix64(base ^ mix64(hash_str(tag)) ^ mix64(n * 0x9e3779b97f4a7c15ULL + 1));
}

// Deterministic xoshiro256** stream. Self-contained so results do not depend
// on the standard library's distribution implementations.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) {
            s = mix64(s);
            w = s;
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, 1) with 53-bit resolution
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // unbiased integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t threshold = -n % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // index sampled proportional to probs (assumed to sum to ~1)
    std::size_t categorical(std::span<const double> probs) {
        double u = uniform01();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return probs.empty() ? 0 : probs.size() - 1;
    }

    std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t k) {
        std::vector<std::size_t> idx(population);
        for (std::size_t i = 0; i < population; ++i) idx[i] = i;
        for (std::size_t i = 0; i < k && i < population; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(uniform_int(population - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k < population ? k : population);
        return idx;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

}  // namespace rfsearch
