#pragma once

// Hand-rolled generators for property tests. Each property owns a seeded
// engine; failures print the seed and case index so a case can be replayed.

#include <cstdint>
#include <random>
#include <string>

#include "k2d/combinatorics.hpp"
#include "k2d/params.hpp"
#include "k2d/scalar.hpp"

namespace gen {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    long integer(long lo, long hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<long>(engine_() % span);
    }

    bool coin() { return integer(0, 1) == 1; }

    k2d::Rational rational(long max_num, long max_den) {
        return k2d::Rational(integer(-max_num, max_num), integer(1, max_den));
    }

    k2d::Rational positive(long max_num, long max_den) {
        return k2d::Rational(integer(1, max_num), integer(1, max_den));
    }

    /// Strictly inside (0, 1).
    k2d::Rational unit_open(long max_den) {
        const long d = integer(2, max_den);
        return k2d::Rational(integer(1, d - 1), d);
    }

    /// Rational avoiding the listed values.
    k2d::Rational rational_avoiding(long max_num, long max_den, std::initializer_list<long> banned) {
        for (;;) {
            const auto r = rational(max_num, max_den);
            bool ok = true;
            for (long b : banned) {
                ok = ok && r != k2d::Rational(b);
            }
            if (ok) {
                return r;
            }
        }
    }

    k2d::PQuadruple quadruple(bool nonzero_delta = true) {
        for (;;) {
            auto q = k2d::PQuadruple::make(positive(12, 7), positive(12, 7), positive(12, 7), positive(12, 7));
            if (!nonzero_delta || !q.delta().is_zero()) {
                return q;
            }
        }
    }

    k2d::GridPoint point(int n) {
        const int a = static_cast<int>(integer(0, n));
        const int b = static_cast<int>(integer(0, n - a));
        return {a, b};
    }

    /// (p, q) with p, q > 0 and p + q < 1.
    std::pair<k2d::Rational, k2d::Rational> simplex_pair(long max_den) {
        for (;;) {
            auto p = unit_open(max_den);
            auto q = unit_open(max_den);
            if (p + q < k2d::Rational(1)) {
                return {p, q};
            }
        }
    }

private:
    std::mt19937_64 engine_;
};

inline std::string replay(std::uint64_t seed, int index) {
    return "seed " + std::to_string(seed) + ", case " + std::to_string(index);
}

}  // namespace gen
