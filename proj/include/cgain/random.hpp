#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace cgain {

/// Derives an independent stream seed from a master seed, a stream name and
/// an index. All randomness in a run flows from one master seed through
/// named substreams ("fold", "mask", "fuzzify", "seeds", "hints", "init").
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0);

/// Thin wrapper over a 64-bit Mersenne twister. Floating-point draws are
/// built from raw bits so sequences do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        const double u = lo + (hi - lo) * uniform();
        return u < hi ? u : lo;
    }

    /// Uniform on the closed interval [lo, hi].
    double uniform_closed(double lo, double hi) {
        const double u = static_cast<double>(engine_() >> 11) / static_cast<double>((std::uint64_t{1} << 53) - 1);
        return lo + (hi - lo) * u;
    }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t index(std::size_t n);

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = index(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace cgain
