#pragma once

#include <cstdint>
#include <vector>

namespace relucov {

inline std::uint64_t splitmix64_step(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64_step(s);
}

// Deterministic, platform-independent generator. std::uniform_*_distribution
// is implementation-defined, so all sampling is done from raw bits here to
// keep seeded runs byte-identical everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64_step(state_); }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // inclusive on both ends
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    bool coin() { return (next_u64() & 1u) != 0; }

    // k distinct values from [1..n], ascending
    std::vector<int> sample_without_replacement(int n, int k) {
        std::vector<int> pool(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i + 1;
        for (int i = 0; i < k; ++i) {
            const int j = uniform_int(i, n - 1);
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        pool.resize(static_cast<std::size_t>(k));
        std::vector<int> out(pool.begin(), pool.end());
        for (std::size_t i = 1; i < out.size(); ++i)
            for (std::size_t j = i; j > 0 && out[j - 1] > out[j]; --j)
                std::swap(out[j - 1], out[j]);
        return out;
    }

    // independent substream, safe to hand to a worker
    Rng fork(std::uint64_t stream) const { return Rng(mix64(state_, stream)); }

private:
    std::uint64_t state_;
};

} // namespace relucov
