#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "k2d/combinatorics.hpp"
#include "k2d/error.hpp"
#include "k2d/scalar.hpp"

namespace k2d {

/**
 * Arguments of the bivariate polynomial
 *
 *   P_{m1,m2}(x1,x2) = sum (-m1)_{i+j} (-m2)_{k+l} (-x1)_{i+k} (-x2)_{j+l}
 *                          / (i! j! k! l! (-N)_{i+j+k+l}) u1^i v1^j u2^k v2^l.
 *
 * m = (m1, m2) is the spectral label, x = (x1, x2) the state; both lie in the
 * triangle of size N.
 */
template <Scalar T>
struct BasicF12Arguments {
    GridPoint m;
    GridPoint x;
    int N = 0;
    T u1{0};
    T v1{0};
    T u2{0};
    T v2{0};

    void validate() const {
        if (N < 0 || m.a < 0 || m.b < 0 || x.a < 0 || x.b < 0 || m.total() > N || x.total() > N) {
            throw Error(ErrorCode::out_of_range, "need m1+m2 <= N and x1+x2 <= N with nonnegative entries (m=" +
                                                     m.str() + ", x=" + x.str() + ", N=" + std::to_string(N) + ")");
        }
    }
};

using F12Arguments = BasicF12Arguments<Rational>;

namespace detail {

template <Scalar T>
std::vector<T> powers(const T &base, int count) {
    std::vector<T> out(static_cast<std::size_t>(std::max(count, 0)) + 1, T(1));
    for (std::size_t e = 1; e < out.size(); ++e) {
        out[e] = out[e - 1] * base;
    }
    return out;
}

/// Calls fn(i, j, k, l, coefficient) for every term of P_{m}(x) that survives
/// Pochhammer termination. Only the support box is visited:
/// i+j <= m1, k+l <= m2, i+k <= x1, j+l <= x2.
template <class Fn>
void for_each_polynomial_term(GridPoint m, GridPoint x, int n, Fn &&fn) {
    const int m1 = m.a;
    const int m2 = m.b;
    const int x1 = x.a;
    const int x2 = x.b;
    const mpz_class n_fact = factorial(n);
    for (int i = 0; i <= std::min(m1, x1); ++i) {
        for (int j = 0; j <= std::min(m1 - i, x2); ++j) {
            const mpz_class a_part = falling_factorial(m1, i + j) / (factorial(i) * factorial(j));
            for (int k = 0; k <= std::min(m2, x1 - i); ++k) {
                for (int l = 0; l <= std::min(m2 - k, x2 - j); ++l) {
                    const int total = i + j + k + l;
                    // (-n)_r = (-1)^r n!/(n-r)!; the four numerator signs cancel
                    // pairwise, leaving (-1)^total from the denominator.
                    mpz_class num = a_part * falling_factorial(m2, k + l) * falling_factorial(x1, i + k) *
                                    falling_factorial(x2, j + l) * factorial(n - total);
                    mpz_class den = factorial(k) * factorial(l) * n_fact;
                    if (total % 2 != 0) {
                        num = -num;
                    }
                    fn(i, j, k, l, Rational(num, den));
                }
            }
        }
    }
}

inline int termination_bound(const Rational &a) {
    if (!a.is_nonpositive_integer()) {
        return -1;
    }
    return static_cast<int>(-a.to_long());
}

inline int min_bound(int a, int b) {
    if (a < 0) {
        return b;
    }
    if (b < 0) {
        return a;
    }
    return std::min(a, b);
}

}  // namespace detail

/// Exact P_{m1,m2}(x1,x2) (or its floating evaluation when T = double).
template <Scalar T>
T eval_P(const BasicF12Arguments<T> &args) {
    args.validate();
    const auto pu1 = detail::powers(args.u1, std::min(args.m.a, args.x.a));
    const auto pv1 = detail::powers(args.v1, std::min(args.m.a, args.x.b));
    const auto pu2 = detail::powers(args.u2, std::min(args.m.b, args.x.a));
    const auto pv2 = detail::powers(args.v2, std::min(args.m.b, args.x.b));
    T sum(0);
    detail::for_each_polynomial_term(args.m, args.x, args.N, [&](int i, int j, int k, int l, const Rational &c) {
        sum += scalar_cast<T>(c) * pu1[i] * pv1[j] * pu2[k] * pv2[l];
    });
    return sum;
}

/// Partial derivatives of P with respect to (u1, v1, u2, v2).
///
/// Each monomial is differentiated by decrementing its exponent, so the
/// result is well defined at u = 0 or v = 0.
template <Scalar T>
std::array<T, 4> eval_P_partials(const BasicF12Arguments<T> &args) {
    args.validate();
    const auto pu1 = detail::powers(args.u1, std::min(args.m.a, args.x.a));
    const auto pv1 = detail::powers(args.v1, std::min(args.m.a, args.x.b));
    const auto pu2 = detail::powers(args.u2, std::min(args.m.b, args.x.a));
    const auto pv2 = detail::powers(args.v2, std::min(args.m.b, args.x.b));
    std::array<T, 4> d{T(0), T(0), T(0), T(0)};
    detail::for_each_polynomial_term(args.m, args.x, args.N, [&](int i, int j, int k, int l, const Rational &c) {
        const T coef = scalar_cast<T>(c);
        if (i > 0) {
            d[0] += coef * T(i) * pu1[i - 1] * pv1[j] * pu2[k] * pv2[l];
        }
        if (j > 0) {
            d[1] += coef * T(j) * pu1[i] * pv1[j - 1] * pu2[k] * pv2[l];
        }
        if (k > 0) {
            d[2] += coef * T(k) * pu1[i] * pv1[j] * pu2[k - 1] * pv2[l];
        }
        if (l > 0) {
            d[3] += coef * T(l) * pu1[i] * pv1[j] * pu2[k] * pv2[l - 1];
        }
    });
    return d;
}

/**
 * Terminating Gauss series sum_k (a1)_k (a2)_k z^k / ((c)_k k!).
 *
 * Summation runs over k = 0..term_count and must have hit an exactly-zero
 * numerator by then, otherwise nonterminating_series is thrown. A zero
 * denominator under a surviving numerator throws zero_denominator.
 */
inline Rational gauss_2f1_terminating(const Rational &a1, const Rational &a2, const Rational &c, const Rational &z,
                                      int term_count) {
    Rational sum(0);
    Rational term(1);
    for (int k = 0;; ++k) {
        sum += term;
        const Rational num = (a1 + k) * (a2 + k);
        if (num.is_zero()) {
            return sum;
        }
        if (k >= term_count) {
            throw Error(ErrorCode::nonterminating_series,
                        "2F1 series does not terminate within " + std::to_string(term_count) + " terms");
        }
        const Rational den = (c + k) * Rational(k + 1);
        if (den.is_zero()) {
            throw Error(ErrorCode::zero_denominator, "2F1 bottom parameter " + c.str() + " reaches zero at k=" +
                                                         std::to_string(k) + " before termination");
        }
        term *= num * z / den;
    }
}

/// Parameters of the general bivariate function
/// F(a1,a2; b1,b2; c; u1,v1,u2,v2) whose polynomial specialization is P.
struct F12Parameters {
    Rational a1, a2, b1, b2, c;
    Rational u1, v1, u2, v2;
};

/**
 * Exact terminating evaluation of
 *
 *   sum (a1)_{i+j} (a2)_{k+l} (b1)_{i+k} (b2)_{j+l} / (i! j! k! l! (c)_{i+j+k+l})
 *       u1^i v1^j u2^k v2^l.
 *
 * Every one of i, j, k, l must be bounded by a nonpositive-integer numerator
 * parameter (i by a1 or b1, j by a1 or b2, k by a2 or b1, l by a2 or b2).
 */
inline Rational f12_terminating(const F12Parameters &f) {
    const int ba1 = detail::termination_bound(f.a1);
    const int ba2 = detail::termination_bound(f.a2);
    const int bb1 = detail::termination_bound(f.b1);
    const int bb2 = detail::termination_bound(f.b2);
    const int bi = detail::min_bound(ba1, bb1);
    const int bj = detail::min_bound(ba1, bb2);
    const int bk = detail::min_bound(ba2, bb1);
    const int bl = detail::min_bound(ba2, bb2);
    if (bi < 0 || bj < 0 || bk < 0 || bl < 0) {
        throw Error(ErrorCode::nonterminating_series, "bivariate series does not terminate for these parameters");
    }
    const auto within = [](int bound, int value) { return bound < 0 || value <= bound; };

    const auto pu1 = detail::powers(f.u1, bi);
    const auto pv1 = detail::powers(f.v1, bj);
    const auto pu2 = detail::powers(f.u2, bk);
    const auto pv2 = detail::powers(f.v2, bl);
    Rational sum(0);
    for (int i = 0; i <= bi; ++i) {
        for (int j = 0; j <= bj; ++j) {
            if (!within(ba1, i + j)) {
                break;
            }
            for (int k = 0; k <= bk; ++k) {
                if (!within(bb1, i + k)) {
                    break;
                }
                for (int l = 0; l <= bl; ++l) {
                    if (!within(ba2, k + l) || !within(bb2, j + l)) {
                        break;
                    }
                    const Rational num = pochhammer(f.a1, i + j) * pochhammer(f.a2, k + l) *
                                         pochhammer(f.b1, i + k) * pochhammer(f.b2, j + l);
                    if (num.is_zero()) {
                        continue;
                    }
                    const int total = i + j + k + l;
                    const Rational den = pochhammer(f.c, total);
                    if (den.is_zero()) {
                        throw Error(ErrorCode::zero_denominator,
                                    "bottom parameter " + f.c.str() + " vanishes under a surviving term of order " +
                                        std::to_string(total));
                    }
                    sum += num / (den * Rational(factorial(i) * factorial(j) * factorial(k) * factorial(l), 1)) *
                           pu1[i] * pv1[j] * pu2[k] * pv2[l];
                }
            }
        }
    }
    return sum;
}

/// Exact terminating Appell F1(a; b, b'; c; x, y). Terminates when a is a
/// nonpositive integer, or when b and b' both are.
inline Rational appell_f1_terminating(const Rational &a, const Rational &b, const Rational &b2, const Rational &c,
                                      const Rational &x, const Rational &y) {
    const int ba = detail::termination_bound(a);
    const int bi = detail::min_bound(ba, detail::termination_bound(b));
    const int bj = detail::min_bound(ba, detail::termination_bound(b2));
    if (bi < 0 || bj < 0) {
        throw Error(ErrorCode::nonterminating_series, "Appell F1 series does not terminate; use the floating mode");
    }
    Rational sum(0);
    for (int i = 0; i <= bi; ++i) {
        for (int j = 0; j <= bj; ++j) {
            if (ba >= 0 && i + j > ba) {
                break;
            }
            const Rational num = pochhammer(a, i + j) * pochhammer(b, i) * pochhammer(b2, j);
            if (num.is_zero()) {
                continue;
            }
            const Rational den = pochhammer(c, i + j);
            if (den.is_zero()) {
                throw Error(ErrorCode::zero_denominator, "Appell F1 bottom parameter vanishes under a surviving term");
            }
            sum += num / (den * Rational(factorial(i) * factorial(j), 1)) * pow(x, i) * pow(y, j);
        }
    }
    return sum;
}

/**
 * Floating Appell F1 by increasing total degree n = i + j.
 *
 * Stops once two consecutive degree blocks are below the policy tolerance
 * relative to the running sum. Throws no_convergence after max_degree blocks.
 */
inline double appell_f1_series(double a, double b, double b2, double c, double x, double y,
                               const FloatPolicy &policy = {}, int max_degree = 2000) {
    policy.validate();
    std::vector<double> hx{1.0};  // (b)_i x^i / i!
    std::vector<double> hy{1.0};  // (b')_j y^j / j!
    double ratio = 1.0;           // (a)_n / (c)_n
    double sum = 0.0;
    int quiet = 0;
    for (int n = 0; n <= max_degree; ++n) {
        if (n > 0) {
            if (c + n - 1 == 0.0) {
                if (a + n - 1 == 0.0) {
                    return sum;
                }
                throw Error(ErrorCode::zero_denominator, "Appell F1 bottom parameter reaches zero");
            }
            ratio *= (a + n - 1) / (c + n - 1);
            hx.push_back(hx.back() * (b + n - 1) * x / n);
            hy.push_back(hy.back() * (b2 + n - 1) * y / n);
        }
        double block = 0.0;
        for (int i = 0; i <= n; ++i) {
            block += hx[static_cast<std::size_t>(i)] * hy[static_cast<std::size_t>(n - i)];
        }
        block *= ratio;
        sum += block;
        const double tol = std::max(policy.absolute_tolerance, policy.relative_tolerance * std::abs(sum));
        quiet = std::abs(block) <= tol ? quiet + 1 : 0;
        if (quiet >= 2 || ratio == 0.0) {
            return sum;
        }
    }
    throw Error(ErrorCode::no_convergence, "Appell F1 series did not converge within the degree limit");
}

/**
 * Floating series for F(a1,a2; b1,b2; c; u1,v1,u2,v2), summed by total degree
 * in extended precision. Terminating parameter choices are summed to the end.
 */
inline double f12_series(double a1, double a2, double b1, double b2, double c, double u1, double v1, double u2,
                         double v2, const FloatPolicy &policy = {}, int max_degree = 300) {
    policy.validate();
    using real = long double;
    const auto table = [max_degree](real a) {
        std::vector<real> out(static_cast<std::size_t>(max_degree) + 1, 1.0L);
        for (std::size_t r = 1; r < out.size(); ++r) {
            out[r] = out[r - 1] * (a + static_cast<real>(r - 1));
        }
        return out;
    };
    const auto scaled_powers = [max_degree](real base) {  // base^r / r!
        std::vector<real> out(static_cast<std::size_t>(max_degree) + 1, 1.0L);
        for (std::size_t r = 1; r < out.size(); ++r) {
            out[r] = out[r - 1] * base / static_cast<real>(r);
        }
        return out;
    };
    const auto pa1 = table(a1);
    const auto pa2 = table(a2);
    const auto pb1 = table(b1);
    const auto pb2 = table(b2);
    const auto pc = table(c);
    const auto su1 = scaled_powers(u1);
    const auto sv1 = scaled_powers(v1);
    const auto su2 = scaled_powers(u2);
    const auto sv2 = scaled_powers(v2);

    real sum = 0.0L;
    int quiet = 0;
    for (int n = 0; n <= max_degree; ++n) {
        real block = 0.0L;
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; i + j <= n; ++j) {
                for (int k = 0; i + j + k <= n; ++k) {
                    const int l = n - i - j - k;
                    const real num = pa1[i + j] * pa2[k + l] * pb1[i + k] * pb2[j + l];
                    if (num == 0.0L) {
                        continue;
                    }
                    if (pc[n] == 0.0L) {
                        throw Error(ErrorCode::zero_denominator, "bivariate series bottom parameter reaches zero");
                    }
                    block += num / pc[n] * su1[i] * sv1[j] * su2[k] * sv2[l];
                }
            }
        }
        sum += block;
        const real tol = std::max<real>(policy.absolute_tolerance, policy.relative_tolerance * std::abs(sum));
        quiet = std::abs(block) <= tol ? quiet + 1 : 0;
        if (quiet >= 2) {
            return static_cast<double>(sum);
        }
    }
    throw Error(ErrorCode::no_convergence, "bivariate series did not converge within the degree limit");
}

/// Which pivot the Pfaff-type transformation uses.
enum class PfaffVariant {
    pivot_v,  ///< factor (1-v1)^{-a1}(1-v2)^{-a2}; needs v1, v2 != 1
    pivot_u,  ///< factor (1-u1)^{-a1}(1-u2)^{-a2}; needs u1, u2 != 1
};

/**
 * Both sides of the Pfaff-type transformation applied to P_{m}(x):
 *
 *   pivot_v: F(a1,a2;b1,b2;c;u1,v1,u2,v2) = (1-v1)^{-a1}(1-v2)^{-a2}
 *            F(a1,a2;b1,c-b1-b2;c; (u1-v1)/(1-v1), -v1/(1-v1), (u2-v2)/(1-v2), -v2/(1-v2))
 *   pivot_u: ... = (1-u1)^{-a1}(1-u2)^{-a2}
 *            F(a1,a2;c-b1-b2,b2;c; -u1/(1-u1), (v1-u1)/(1-u1), -u2/(1-u2), (v2-u2)/(1-u2))
 *
 * with a = -m, b = -x, c = -N. Returns (lhs, rhs); callers compare them.
 */
inline std::pair<Rational, Rational> pfaff_transform(const F12Arguments &args, PfaffVariant variant) {
    args.validate();
    const Rational one(1);
    const Rational a1(-args.m.a);
    const Rational a2(-args.m.b);
    const Rational b1(-args.x.a);
    const Rational b2(-args.x.b);
    const Rational c(-args.N);
    Rational lhs = eval_P(args);
    F12Parameters f{a1, a2, b1, b2, c, 0, 0, 0, 0};
    Rational prefactor;
    if (variant == PfaffVariant::pivot_v) {
        if (args.v1 == one || args.v2 == one) {
            throw Error(ErrorCode::division_by_zero, "v-pivot transformation needs v1 != 1 and v2 != 1");
        }
        const Rational w1 = one - args.v1;
        const Rational w2 = one - args.v2;
        f.b2 = c - b1 - b2;
        f.u1 = (args.u1 - args.v1) / w1;
        f.v1 = -args.v1 / w1;
        f.u2 = (args.u2 - args.v2) / w2;
        f.v2 = -args.v2 / w2;
        prefactor = pow(w1, args.m.a) * pow(w2, args.m.b);
    } else {
        if (args.u1 == one || args.u2 == one) {
            throw Error(ErrorCode::division_by_zero, "u-pivot transformation needs u1 != 1 and u2 != 1");
        }
        const Rational w1 = one - args.u1;
        const Rational w2 = one - args.u2;
        f.b1 = c - b1 - b2;
        f.u1 = -args.u1 / w1;
        f.v1 = (args.v1 - args.u1) / w1;
        f.u2 = -args.u2 / w2;
        f.v2 = (args.v2 - args.u2) / w2;
        prefactor = pow(w1, args.m.a) * pow(w2, args.m.b);
    }
    return {std::move(lhs), prefactor * f12_terminating(f)};
}

/**
 * Both sides of the reflection u -> 1 - u:
 *
 *   P_{m}(x; u1,v1,u2,v2) = (x1+x2-N)_{M} / (-N)_{M}
 *       F(-m1,-m2;-x1,-x2; N+1-x1-x2-M; 1-u1,1-v1,1-u2,1-v2),   M = m1+m2.
 *
 * With c' = N+1-x1-x2-M the prefactor equals (-1)^M (c')_M, and the right
 * side is evaluated with (c')_M/(c')_n = (c'+n)_{M-n} folded into each term.
 * That keeps grid points with c' <= 0 well defined; elsewhere it is the
 * same sum.
 */
inline std::pair<Rational, Rational> reflection_transform(const F12Arguments &args) {
    args.validate();
    const int big_m = args.m.total();
    const Rational c_prime(args.N + 1 - args.x.total() - big_m);
    const Rational one(1);
    const Rational w[4] = {one - args.u1, one - args.v1, one - args.u2, one - args.v2};

    Rational sum(0);
    for (int i = 0; i <= args.m.a; ++i) {
        for (int j = 0; i + j <= args.m.a; ++j) {
            for (int k = 0; k <= args.m.b; ++k) {
                for (int l = 0; k + l <= args.m.b; ++l) {
                    if (i + k > args.x.a || j + l > args.x.b) {
                        continue;
                    }
                    const int n = i + j + k + l;
                    const Rational num = pochhammer_neg(args.m.a, i + j) * pochhammer_neg(args.m.b, k + l) *
                                         pochhammer_neg(args.x.a, i + k) * pochhammer_neg(args.x.b, j + l) *
                                         pochhammer(c_prime + n, big_m - n);
                    if (num.is_zero()) {
                        continue;
                    }
                    sum += num / Rational(factorial(i) * factorial(j) * factorial(k) * factorial(l), 1) *
                           pow(w[0], i) * pow(w[1], j) * pow(w[2], k) * pow(w[3], l);
                }
            }
        }
    }
    const Rational sign = big_m % 2 == 0 ? one : -one;
    return {eval_P(args), sign * sum / pochhammer_neg(args.N, big_m)};
}

/// The one-variable reflection, with both of its equivalent prefactors:
/// returns (2F1(-m,-x;-N;u), (x-N)_m/(-N)_m * G, (m-N)_x/(-N)_x * G) where
/// G = 2F1(-m,-x;N+1-x-m;1-u). Prefactors are folded into G as in
/// reflection_transform.
struct ReflectionSides {
    Rational lhs;
    Rational rhs_m;
    Rational rhs_x;
};

inline ReflectionSides reflection_transform_2f1(int m, int x, int n, const Rational &u) {
    if (n < 0 || m < 0 || x < 0 || m > n || x > n) {
        throw Error(ErrorCode::out_of_range, "need 0 <= m, x <= N");
    }
    const Rational one(1);
    const Rational c_prime(n + 1 - x - m);
    const Rational w = one - u;
    Rational lhs = gauss_2f1_terminating(Rational(-m), Rational(-x), Rational(-n), u, std::min(m, x));

    const auto folded = [&](int length) {
        Rational sum(0);
        for (int k = 0; k <= std::min(m, x); ++k) {
            const Rational num = pochhammer_neg(m, k) * pochhammer_neg(x, k) * pochhammer(c_prime + k, length - k);
            sum += num / Rational(factorial(k), 1) * pow(w, k);
        }
        const Rational sign = length % 2 == 0 ? one : -one;
        return sign * sum / pochhammer_neg(n, length);
    };
    // (c')_m/(c')_k and (c')_x/(c')_k are polynomial only for k <= length,
    // which holds because k <= min(m, x).
    return {std::move(lhs), folded(m), folded(x)};
}

}  // namespace k2d
