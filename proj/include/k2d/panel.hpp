#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "k2d/params.hpp"
#include "k2d/scalar.hpp"

namespace k2d {

inline constexpr std::uint64_t default_panel_seed = 20240611;

/// Reproducible draws of small rationals. Uses plain modulo reduction of the
/// engine output, so sequences are identical across standard libraries
/// (std::uniform_int_distribution is not).
class RationalSampler {
public:
    explicit RationalSampler(std::uint64_t seed) : engine_(seed) {}

    /// Uniform-ish integer in [lo, hi].
    long integer(long lo, long hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<long>(engine_() % span);
    }

    /// n/d with 1 <= n <= max_numerator and 1 <= d <= max_denominator.
    Rational positive(long max_numerator, long max_denominator) {
        const long n = integer(1, max_numerator);
        const long d = integer(1, max_denominator);
        return Rational(n, d);
    }

    /// n/d with |n| <= max_numerator, 1 <= d <= max_denominator.
    Rational signed_value(long max_numerator, long max_denominator) {
        const long n = integer(-max_numerator, max_numerator);
        const long d = integer(1, max_denominator);
        return Rational(n, d);
    }

    std::mt19937_64 &engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// `count` positive rational quadruples with p1 p4 != p2 p3, deterministic in seed.
inline std::vector<PQuadruple> random_quadruples(std::uint64_t seed, std::size_t count) {
    RationalSampler sampler(seed);
    std::vector<PQuadruple> out;
    while (out.size() < count) {
        auto q = PQuadruple::make(sampler.positive(9, 5), sampler.positive(9, 5), sampler.positive(9, 5),
                                  sampler.positive(9, 5));
        if (!q.delta().is_zero()) {
            out.push_back(std::move(q));
        }
    }
    return out;
}

}  // namespace k2d
