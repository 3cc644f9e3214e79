#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

namespace tot {

// splitmix64 finalizer; used to derive decorrelated seeds for sub-streams.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for a named sub-stream, e.g. seed_for(master, "backend", puzzle_index).
std::uint64_t seed_for(std::uint64_t master, std::string_view tag, std::uint64_t index = 0);

// Deterministic sampling helpers over std::mt19937_64. The engine's output
// sequence is fully specified by the standard; std::uniform_int_distribution
// and std::shuffle are not, so transcripts would not be byte-stable across
// standard libraries if we used them.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    // Uniform in [0, n). Bias-free via rejection.
    std::uint64_t below(std::uint64_t n);

    // Uniform in [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi);

    // Uniform in [0, 1) with 53 bits of precision.
    double unit();

    // Standard normal (Marsaglia polar, cached spare).
    double gaussian();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct values from [0, n), in draw order.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace tot
