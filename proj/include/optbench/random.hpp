#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace optbench {

// Source of randomness used by all optimizers. Virtual so tests can
// substitute degenerate streams (e.g. all-zero normals).
class RandomSource {
public:
    virtual ~RandomSource() = default;

    // Uniform draw in [0, 1).
    virtual double uniform01() = 0;

    // Standard normal draw.
    virtual double normal01() = 0;

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal(double mean, double sd) { return mean + sd * normal01(); }

    // Integer in [0, n). n must be > 0.
    std::size_t below(std::size_t n)
    {
        auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }
};

// Mersenne-Twister-backed source. uniform01 and normal01 are generated
// from raw engine words so replays are bit-identical across platforms
// (std::normal_distribution is implementation-defined).
class Mt19937Source final : public RandomSource {
public:
    explicit Mt19937Source(std::uint64_t seed) : engine_(seed) {}

    double uniform01() override
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double normal01() override
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // Marsaglia polar method
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace optbench
