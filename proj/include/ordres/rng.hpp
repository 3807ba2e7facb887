#pragma once

#include <cstdint>
#include <random>

namespace ordres {

// Seeded generator with a fixed 53-bit uniform mapping so that streams are
// bit-identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Uniform on [-1, 1].
    double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(gen_() % span);
    }

    std::uint64_t next() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace ordres
