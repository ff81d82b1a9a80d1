#ifndef NOMAD_SEEDED_RNG_HPP
#define NOMAD_SEEDED_RNG_HPP

#include <cstdint>
#include <string>

namespace nomad {

// splitmix64: tiny, well-mixed, and fully specified, so seeded results are
// identical across platforms and standard-library versions.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent stream for (seed, index); used to make parallel
// per-scenario work order-independent.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ULL + index * 0xd1b54a32d192ed03ULL);
    return splitmix64(state);
}

class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return splitmix64(state_); }

    // Uniform in [0, bound); bound >= 1. Rejection-free multiply-shift is
    // fine here: draws parameterize test scenarios, not statistics.
    std::uint64_t below(std::uint64_t bound) {
        return std::uint64_t((static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    long range(long lo, long hi) {  // inclusive bounds
        return lo + long(below(std::uint64_t(hi - lo + 1)));
    }

    std::string token(const char* prefix) {
        static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
        std::string out(prefix);
        for (int i = 0; i < 10; ++i) {
            out.push_back(kAlphabet[below(sizeof kAlphabet - 1)]);
        }
        return out;
    }

private:
    std::uint64_t state_;
};

} // namespace nomad

#endif
