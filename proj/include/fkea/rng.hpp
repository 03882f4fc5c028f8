#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace fkea {

// Seedable generator with a fully specified output sequence. mt19937_64 is
// bit-exact by the C++ standard; the uniform and normal transforms below are
// written out by hand because std::uniform_real_distribution and
// std::normal_distribution leave their algorithms implementation-defined.
//
// Stream order contract (relied on by FourierBasis reproducibility and the
// mixture generator): consumers draw values strictly sequentially, and
// normal() produces Box-Muller pairs, returning the cosine branch first.
class Rng {
public:
    static constexpr const char* kAlgorithmId = "mt19937_64/box-muller/v1";

    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random mantissa bits.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Standard normal via Box-Muller. u1 is shifted into (0, 1] so the log
    // is always finite.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace fkea
