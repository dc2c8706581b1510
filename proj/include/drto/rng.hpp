#pragma once

#include <cmath>
#include <cstdint>

namespace drto {

/// Counter-based random stream: every draw is a pure function of
/// (key, counter), so parallel evaluation order cannot change results.
/// The key is built by hashing a master seed with stream indices
/// (iteration, atom, sample).
class CounterRng {
  public:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static std::uint64_t key(std::uint64_t master, std::uint64_t a = 0, std::uint64_t b = 0,
                             std::uint64_t c = 0) {
        std::uint64_t k = mix(master);
        k = mix(k ^ (a + 0x243F6A8885A308D3ull));
        k = mix(k ^ (b + 0x13198A2E03707344ull));
        k = mix(k ^ (c + 0xA4093822299F31D0ull));
        return k;
    }

    explicit CounterRng(std::uint64_t key_value) : key_(key_value) {}
    CounterRng(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0)
        : key_(key(master, a, b, c)) {}

    std::uint64_t next_u64() { return mix(key_ + 0x9E3779B97F4A7C15ull * (++counter_)); }

    /// Uniform in [0, 1).
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal (Box-Muller, one deviate per pair of uniforms).
    double next_normal() {
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

  private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace drto
