#pragma once

#include <cstdint>
#include <random>

namespace l4dec {

// Seeded 64-bit stream with a fully pinned sample path:
//   engine   std::mt19937_64 (bit-exact per the C++ standard)
//   uniform  (x >> 11) * 2^-53, in [0, 1)
//   normal   Box-Muller on (1 - u1, u2), spare cached
// std::normal_distribution / std::uniform_real_distribution are avoided on
// purpose: their algorithms are implementation-defined and would break the
// bitwise reproducibility contract across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; one transform yields two draws.
    double normal();

    bool bernoulli(double theta) { return uniform() < theta; }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// SplitMix64 mix step; used to derive independent substreams from one seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace l4dec
