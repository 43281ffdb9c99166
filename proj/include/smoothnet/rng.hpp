#pragma once

#include <cstdint>
#include <random>

namespace smoothnet {

// splitmix64 step; used to decorrelate sequential seeds before they reach
// the main generator.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seedable 64-bit generator. All draws below avoid the std <random>
// distributions, whose output is not reproducible across standard library
// implementations; the raw mt19937_64 stream is specified bit-for-bit.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(premix(seed)) {}

    std::uint64_t next_u64() { return gen_(); }

    // 53-bit uniform in [0,1)
    double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool next_bernoulli(double p) { return next_unit() < p; }

    // uniform over {0,...,m-1}; exact for powers of two, bias < 2^-64 otherwise
    std::uint64_t next_below(std::uint64_t m) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(gen_()) * m) >> 64);
    }

private:
    static std::uint64_t premix(std::uint64_t s) { return splitmix64(s); }

    std::mt19937_64 gen_;
};

} // namespace smoothnet
