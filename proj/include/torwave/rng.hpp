#pragma once

#include <torwave/rational.hpp>

#include <cmath>
#include <cstdint>
#include <random>

namespace torwave {

// Deterministic random source: mt19937_64 with hand-rolled distributions, so
// that seeded runs produce identical streams on every platform/standard
// library (std::uniform_real_distribution et al. are not pinned by the
// standard).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0, 1): 53 random mantissa bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    // Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0;
        while (u1 == 0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Random rational p/q with |p| <= max_num, 1 <= q <= max_den.
    Rat rational(std::int64_t max_num, std::int64_t max_den) {
        return Rat(Int(uniform_int(-max_num, max_num)), Int(uniform_int(1, max_den)));
    }

    std::uint64_t raw() { return eng_(); }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0;
};

}  // namespace torwave
