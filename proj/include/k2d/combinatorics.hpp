#pragma once

#include <compare>
#include <cstddef>
#include <mutex>
#include <string>
#include <vector>

#include "k2d/error.hpp"
#include "k2d/scalar.hpp"

namespace k2d {

/// A lattice point (a, b) with a, b >= 0. Used both for states (x1, x2) and
/// spectral labels (m1, m2).
struct GridPoint {
    int a = 0;
    int b = 0;

    friend auto operator<=>(const GridPoint &, const GridPoint &) = default;

    [[nodiscard]] int total() const noexcept { return a + b; }
    [[nodiscard]] std::string str() const { return std::to_string(a) + "," + std::to_string(b); }
};

/**
 * The triangle {(a, b) : a, b >= 0, a + b <= N}.
 *
 * Points are ordered lexicographically by (a, b):
 * (0,0), (0,1), ..., (0,N), (1,0), ..., (N,0). That order is the index order
 * of every table, matrix and export in the library.
 */
class TriangularGrid {
public:
    explicit TriangularGrid(int n) : n_(n) {
        if (n < 0) {
            throw Error(ErrorCode::out_of_range, "grid size N must be nonnegative");
        }
        points_.reserve(size());
        for (int a = 0; a <= n; ++a) {
            for (int b = 0; a + b <= n; ++b) {
                points_.push_back({a, b});
            }
        }
    }

    [[nodiscard]] int N() const noexcept { return n_; }
    [[nodiscard]] std::size_t size() const noexcept {
        return static_cast<std::size_t>(n_ + 1) * static_cast<std::size_t>(n_ + 2) / 2;
    }
    [[nodiscard]] bool contains(GridPoint p) const noexcept { return p.a >= 0 && p.b >= 0 && p.a + p.b <= n_; }

    [[nodiscard]] std::size_t index(GridPoint p) const {
        if (!contains(p)) {
            throw Error(ErrorCode::out_of_range,
                        "point (" + p.str() + ") outside triangular grid N=" + std::to_string(n_));
        }
        // rows a' < a contribute (N - a' + 1) points each
        const auto a = static_cast<std::size_t>(p.a);
        const auto n = static_cast<std::size_t>(n_);
        return a * (n + 1) - a * (a - 1) / 2 + static_cast<std::size_t>(p.b);
    }

    [[nodiscard]] GridPoint operator[](std::size_t i) const { return points_[i]; }
    [[nodiscard]] auto begin() const noexcept { return points_.begin(); }
    [[nodiscard]] auto end() const noexcept { return points_.end(); }

private:
    int n_;
    std::vector<GridPoint> points_;
};

namespace detail {

class FactorialTable {
public:
    mpz_class get(int n) {
        std::scoped_lock lock(mutex_);
        while (static_cast<int>(table_.size()) <= n) {
            table_.push_back(table_.back() * static_cast<unsigned long>(table_.size()));
        }
        return table_[static_cast<std::size_t>(n)];
    }

    static FactorialTable &instance() {
        static FactorialTable table;
        return table;
    }

private:
    std::mutex mutex_;
    std::vector<mpz_class> table_{mpz_class(1)};
};

}  // namespace detail

/// n! from a process-wide memo table. Safe to call concurrently.
inline mpz_class factorial(int n) {
    if (n < 0) {
        throw Error(ErrorCode::out_of_range, "factorial of negative integer");
    }
    return detail::FactorialTable::instance().get(n);
}

/// n!/(n-k)! = n (n-1) ... (n-k+1); zero when k > n >= 0.
inline mpz_class falling_factorial(int n, int k) {
    if (k < 0 || n < 0) {
        throw Error(ErrorCode::out_of_range, "falling factorial needs nonnegative arguments");
    }
    if (k > n) {
        return 0;
    }
    return factorial(n) / factorial(n - k);
}

/// Binomial coefficient; zero outside 0 <= k <= n.
inline mpz_class binomial(int n, int k) {
    if (n < 0 || k < 0 || k > n) {
        return 0;
    }
    mpz_class out;
    mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return out;
}

/// N! / (a! b! (N-a-b)!).
inline mpz_class multinomial(int n, int a, int b) {
    if (a < 0 || b < 0 || a + b > n) {
        throw Error(ErrorCode::out_of_range, "multinomial index outside the triangle");
    }
    return factorial(n) / (factorial(a) * factorial(b) * factorial(n - a - b));
}

/**
 * Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1.
 *
 * Stops at the first exactly-zero factor, which is what makes the series with
 * negative-integer parameters terminate.
 */
template <Scalar T>
T pochhammer(const T &a, int k) {
    if (k < 0) {
        throw Error(ErrorCode::out_of_range, "pochhammer length must be nonnegative");
    }
    T out(1);
    for (int i = 0; i < k; ++i) {
        T factor = a + T(i);
        if (is_exact_zero(factor)) {
            return T(0);
        }
        out *= factor;
    }
    return out;
}

/// (-n)_k for a nonnegative integer n, computed as (-1)^k n!/(n-k)!.
inline Rational pochhammer_neg(int n, int k) {
    const mpz_class magnitude = falling_factorial(n, k);
    return Rational(mpq_class((k % 2 == 0) ? magnitude : mpz_class(-magnitude)));
}

namespace detail {

inline void require_probability(const Rational &p, const char *name) {
    if (p < Rational(0) || p > Rational(1)) {
        throw Error(ErrorCode::invalid_probability, std::string(name) + " = " + p.str() + " is not in [0, 1]");
    }
}

}  // namespace detail

/// b(x, N; p) = C(N, x) p^x (1-p)^(N-x).
inline Rational binomial_pmf(int x, int n, const Rational &p) {
    if (n < 0 || x < 0 || x > n) {
        throw Error(ErrorCode::out_of_range, "binomial pmf needs 0 <= x <= N");
    }
    detail::require_probability(p, "p");
    return Rational(binomial(n, x), 1) * pow(p, x) * pow(Rational(1) - p, n - x);
}

/// b2(x1, x2; N; p, q) = N!/(x1! x2! (N-x1-x2)!) p^x1 q^x2 (1-p-q)^(N-x1-x2).
inline Rational trinomial_pmf(int x1, int x2, int n, const Rational &p, const Rational &q) {
    if (n < 0 || x1 < 0 || x2 < 0 || x1 + x2 > n) {
        throw Error(ErrorCode::out_of_range, "trinomial pmf needs (x1, x2) in the triangle of size N");
    }
    detail::require_probability(p, "p");
    detail::require_probability(q, "q");
    const Rational rest = Rational(1) - p - q;
    if (rest.sign() < 0) {
        throw Error(ErrorCode::invalid_probability, "p + q exceeds 1");
    }
    return Rational(multinomial(n, x1, x2), 1) * pow(p, x1) * pow(q, x2) * pow(rest, n - x1 - x2);
}

/// Trinomial mass over the whole grid, in grid order. The weights do not have
/// to be probabilities here: the algebraic weight is used for non-orthogonal
/// parameter sets too.
inline std::vector<Rational> trinomial_weights(int n, const Rational &p, const Rational &q) {
    const TriangularGrid grid(n);
    std::vector<Rational> out;
    out.reserve(grid.size());
    const Rational rest = Rational(1) - p - q;
    for (const auto pt : grid) {
        out.push_back(Rational(multinomial(n, pt.a, pt.b), 1) * pow(p, pt.a) * pow(q, pt.b) *
                      pow(rest, n - pt.a - pt.b));
    }
    return out;
}

}  // namespace k2d
