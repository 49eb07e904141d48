#pragma once

#include <Eigen/Eigenvalues>
#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "k2d/combinatorics.hpp"
#include "k2d/detail/exact_linalg.hpp"
#include "k2d/detail/parallel.hpp"
#include "k2d/error.hpp"
#include "k2d/params.hpp"
#include "k2d/polynomial_table.hpp"

namespace k2d {

/**
 * Poker-dice kernel parameters. Each of N dice shows face 0, 1 or 2. In one
 * step a face-1 die is kept with probability alpha1, a face-2 die with
 * probability alpha2, and every other die is re-rolled, landing on face 1 or 2
 * with probability beta1 or beta2.
 *
 * The closed range [0, 1] is accepted so degenerate kernels can be built;
 * `interior()` reports the open region where the chain is irreducible.
 */
struct KernelParameters {
    Rational alpha1, alpha2, beta1, beta2;
    int N = 0;

    void validate() const {
        if (N < 0) {
            throw Error(ErrorCode::out_of_range, "N must be nonnegative");
        }
        for (const auto *p : {&alpha1, &alpha2, &beta1, &beta2}) {
            if (*p < Rational(0) || *p > Rational(1)) {
                throw Error(ErrorCode::invalid_parameters, "kernel parameter " + p->str() + " is not in [0, 1]");
            }
        }
        if (beta1 + beta2 > Rational(1)) {
            throw Error(ErrorCode::invalid_parameters, "beta1 + beta2 exceeds 1");
        }
    }

    [[nodiscard]] bool interior() const {
        const Rational zero(0), one(1);
        return zero < alpha1 && alpha1 < one && zero < alpha2 && alpha2 < one && zero < beta1 && zero < beta2 &&
               beta1 + beta2 < one;
    }

    [[nodiscard]] std::string str() const {
        return alpha1.str() + "," + alpha2.str() + "," + beta1.str() + "," + beta2.str();
    }
};

/**
 * Column-stochastic transition matrix: at(j, i) = K(j; i) is the probability
 * of moving from state i to state j, so each column sums to 1. Rows and
 * columns follow lexicographic grid order.
 */
class KernelMatrix {
public:
    KernelMatrix(KernelParameters params, std::vector<Rational> entries)
        : params_(std::move(params)), grid_(params_.N), entries_(std::move(entries)) {}

    [[nodiscard]] int N() const noexcept { return grid_.N(); }
    [[nodiscard]] const KernelParameters &params() const noexcept { return params_; }
    [[nodiscard]] const TriangularGrid &grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return grid_.size(); }

    [[nodiscard]] const Rational &at(GridPoint to, GridPoint from) const {
        return entries_[grid_.index(to) * size() + grid_.index(from)];
    }
    [[nodiscard]] const Rational &at_index(std::size_t to, std::size_t from) const {
        return entries_[to * size() + from];
    }

    /// Sum over destinations for each source state; all ones for a valid kernel.
    [[nodiscard]] std::vector<Rational> column_sums() const {
        std::vector<Rational> sums(size(), Rational(0));
        for (std::size_t to = 0; to < size(); ++to) {
            for (std::size_t from = 0; from < size(); ++from) {
                sums[from] += at_index(to, from);
            }
        }
        return sums;
    }

private:
    KernelParameters params_;
    TriangularGrid grid_;
    std::vector<Rational> entries_;
};

/**
 * K(j; i) = sum_{k1 <= min(i1, j1)} sum_{k2 <= min(i2, j2)}
 *   b(k1; i1, alpha1) b(k2; i2, alpha2) b2(j1-k1, j2-k2; N-k1-k2; beta1, beta2).
 */
inline KernelMatrix build_kernel(const KernelParameters &kp) {
    kp.validate();
    const TriangularGrid grid(kp.N);
    const std::size_t g = grid.size();
    std::vector<Rational> entries(g * g);
    detail::parallel_for(g, [&](std::size_t from) {
        const GridPoint i = grid[from];
        for (std::size_t to = 0; to < g; ++to) {
            const GridPoint j = grid[to];
            Rational sum(0);
            for (int k1 = 0; k1 <= std::min(i.a, j.a); ++k1) {
                const Rational keep1 = binomial_pmf(k1, i.a, kp.alpha1);
                for (int k2 = 0; k2 <= std::min(i.b, j.b); ++k2) {
                    sum += keep1 * binomial_pmf(k2, i.b, kp.alpha2) *
                           trinomial_pmf(j.a - k1, j.b - k2, kp.N - k1 - k2, kp.beta1, kp.beta2);
                }
            }
            entries[to * g + from] = std::move(sum);
        }
    });
    return KernelMatrix(kp, std::move(entries));
}

/// Exact solution of K pi = pi with sum(pi) = 1, in grid order. Throws
/// singular_system unless the fixed space is one-dimensional.
inline std::vector<Rational> stationary_distribution(const KernelMatrix &k) {
    const std::size_t g = k.size();
    detail::ExactMatrix a(g, g);
    for (std::size_t r = 0; r < g; ++r) {
        for (std::size_t c = 0; c < g; ++c) {
            a(r, c) = k.at_index(r, c);
        }
        a(r, r) -= Rational(1);
    }
    auto basis = detail::nullspace(std::move(a));
    if (basis.size() != 1) {
        throw Error(ErrorCode::singular_system,
                    "fixed space of the kernel has dimension " + std::to_string(basis.size()) + ", expected 1");
    }
    auto pi = std::move(basis.front());
    Rational total(0);
    for (const auto &v : pi) {
        total += v;
    }
    if (total.is_zero()) {
        throw Error(ErrorCode::singular_system, "stationary vector cannot be normalized");
    }
    for (auto &v : pi) {
        v /= total;
    }
    return pi;
}

/// Power iteration in double precision for grids too large for the exact solve.
inline std::vector<double> stationary_distribution_float(const KernelMatrix &k, double tolerance = 1e-14,
                                                         int max_iterations = 200000) {
    const std::size_t g = k.size();
    Eigen::MatrixXd m(g, g);
    for (std::size_t r = 0; r < g; ++r) {
        for (std::size_t c = 0; c < g; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = k.at_index(r, c).to_double();
        }
    }
    Eigen::VectorXd pi = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(g), 1.0 / static_cast<double>(g));
    for (int it = 0; it < max_iterations; ++it) {
        Eigen::VectorXd next = m * pi;
        next /= next.sum();
        const double change = (next - pi).lpNorm<Eigen::Infinity>();
        pi = std::move(next);
        if (change < tolerance) {
            return {pi.data(), pi.data() + pi.size()};
        }
    }
    throw Error(ErrorCode::no_convergence, "power iteration did not converge");
}

struct EtaFit {
    bool trinomial = false;
    /// Set when the fitted law sits on the boundary (an eta is 0 or they sum to 1) or N = 0.
    bool degenerate = false;
    Rational eta1, eta2;
};

/// Fits (eta1, eta2) from the first moments E[x1] = N eta1, E[x2] = N eta2 and
/// checks every entry of b2(.; N; eta1, eta2) against pi.
inline EtaFit fit_eta(const std::vector<Rational> &pi, int n) {
    const TriangularGrid grid(n);
    if (pi.size() != grid.size()) {
        throw Error(ErrorCode::size_mismatch, "stationary vector does not match the grid");
    }
    EtaFit fit;
    if (n == 0) {
        fit.trinomial = true;
        fit.degenerate = true;
        return fit;
    }
    Rational m1(0), m2(0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        m1 += Rational(grid[i].a) * pi[i];
        m2 += Rational(grid[i].b) * pi[i];
    }
    fit.eta1 = m1 / Rational(n);
    fit.eta2 = m2 / Rational(n);
    const auto weights = trinomial_weights(n, fit.eta1, fit.eta2);
    fit.trinomial = std::equal(weights.begin(), weights.end(), pi.begin());
    const Rational rest = Rational(1) - fit.eta1 - fit.eta2;
    fit.degenerate = fit.eta1.is_zero() || fit.eta2.is_zero() || rest.is_zero();
    return fit;
}

struct RatioTest {
    bool is_eigen = false;
    std::optional<Rational> lambda;
};

/// Checks sum_j K(j; i) P_m(j) = lambda P_m(i) for one exact lambda and every i.
inline RatioTest eigenfunction_ratio_test(const KernelMatrix &k, const PolynomialTable &table, GridPoint m) {
    if (k.N() != table.N()) {
        throw Error(ErrorCode::size_mismatch, "kernel and polynomial table have different N");
    }
    const auto &grid = k.grid();
    const std::size_t g = grid.size();
    std::optional<Rational> lambda;
    std::vector<Rational> image(g, Rational(0));
    for (std::size_t from = 0; from < g; ++from) {
        for (std::size_t to = 0; to < g; ++to) {
            image[from] += k.at_index(to, from) * table.at(m, grid[to]);
        }
    }
    for (std::size_t i = 0; i < g; ++i) {
        const Rational &f = table.at(m, grid[i]);
        if (f.is_zero()) {
            if (!image[i].is_zero()) {
                return {};
            }
            continue;
        }
        const Rational ratio = image[i] / f;
        if (!lambda) {
            lambda = ratio;
        } else if (*lambda != ratio) {
            return {};
        }
    }
    return {lambda.has_value(), lambda};
}

/// Eigenvalues of K in double precision, sorted by modulus descending (ties by
/// real part, then imaginary part, descending). Dense solve, so N <= 12.
inline std::vector<std::complex<double>> spectrum_float(const KernelMatrix &k) {
    if (k.N() > 12) {
        throw Error(ErrorCode::out_of_range, "dense spectrum is limited to N <= 12");
    }
    const auto g = static_cast<Eigen::Index>(k.size());
    Eigen::MatrixXd m(g, g);
    for (Eigen::Index r = 0; r < g; ++r) {
        for (Eigen::Index c = 0; c < g; ++c) {
            m(r, c) = k.at_index(static_cast<std::size_t>(r), static_cast<std::size_t>(c)).to_double();
        }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::eigensolver_failure, "dense eigensolve failed");
    }
    std::vector<std::complex<double>> out(solver.eigenvalues().data(), solver.eigenvalues().data() + g);
    std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
        if (std::abs(a) != std::abs(b)) {
            return std::abs(a) > std::abs(b);
        }
        if (a.real() != b.real()) {
            return a.real() > b.real();
        }
        return a.imag() > b.imag();
    });
    return out;
}

namespace detail {

/// Exact square root of a nonnegative rational, if it is a rational square.
inline std::optional<Rational> rational_sqrt(const Rational &x) {
    if (x.sign() < 0) {
        return std::nullopt;
    }
    const mpz_class num = x.numerator();
    const mpz_class den = x.denominator();
    if (mpz_perfect_square_p(num.get_mpz_t()) == 0 || mpz_perfect_square_p(den.get_mpz_t()) == 0) {
        return std::nullopt;
    }
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    return Rational(rn, rd);
}

inline std::vector<Rational> poly_mul(const std::vector<Rational> &a, const std::vector<Rational> &b) {
    std::vector<Rational> out(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

inline void poly_add_scaled(std::vector<Rational> &acc, const std::vector<Rational> &p, const Rational &s) {
    acc.resize(std::max(acc.size(), p.size()), Rational(0));
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc[i] += s * p[i];
    }
}

}  // namespace detail

/// The two non-unit eigenvalues of the single-die chain, lambda1 > lambda2.
struct OneDieSpectrum {
    Rational lambda1, lambda2;
};

/**
 * Non-unit eigenvalues of one die's 3-state chain, when both are rational,
 * distinct, and avoid {0, alpha1, alpha2}. They are the roots of
 *
 *   (beta0 - t)(t - alpha1)(t - alpha2) + beta1 (1-alpha1) t (t - alpha2)
 *     + beta2 (1-alpha2) t (t - alpha1)
 *
 * after the root t = 1 is divided out; beta0 = 1 - beta1 - beta2.
 */
inline std::optional<OneDieSpectrum> one_die_spectrum(const KernelParameters &kp) {
    kp.validate();
    const Rational one(1);
    const Rational beta0 = one - kp.beta1 - kp.beta2;
    const std::vector<Rational> t_minus_a1{-kp.alpha1, one};
    const std::vector<Rational> t_minus_a2{-kp.alpha2, one};
    const std::vector<Rational> t{Rational(0), one};
    std::vector<Rational> cubic =
        detail::poly_mul(detail::poly_mul({beta0, -one}, t_minus_a1), t_minus_a2);
    detail::poly_add_scaled(cubic, detail::poly_mul(t, t_minus_a2), kp.beta1 * (one - kp.alpha1));
    detail::poly_add_scaled(cubic, detail::poly_mul(t, t_minus_a1), kp.beta2 * (one - kp.alpha2));
    // synthetic division by (t - 1); the remainder is zero for any parameters
    const Rational q2 = cubic[3];
    const Rational q1 = cubic[2] + q2;
    const Rational q0 = cubic[1] + q1;
    if (q0 + cubic[0] != Rational(0)) {
        throw std::logic_error("secular cubic does not vanish at 1");
    }
    if (q2.is_zero()) {
        return std::nullopt;
    }
    const auto root = detail::rational_sqrt(q1 * q1 - Rational(4) * q2 * q0);
    if (!root || root->is_zero()) {
        return std::nullopt;
    }
    Rational r1 = (-q1 + *root) / (Rational(2) * q2);
    Rational r2 = (-q1 - *root) / (Rational(2) * q2);
    if (r1 < r2) {
        std::swap(r1, r2);
    }
    for (const auto *r : {&r1, &r2}) {
        if (r->is_zero() || *r == kp.alpha1 || *r == kp.alpha2) {
            return std::nullopt;
        }
    }
    return OneDieSpectrum{r1, r2};
}

/// A kernel together with the polynomial family that diagonalizes it.
struct CalibratedPair {
    KernelParameters kernel;
    ParameterSet family;
    Rational lambda1, lambda2;

    /// Eigenvalue of P_m: lambda1^m1 lambda2^m2.
    [[nodiscard]] Rational eigenvalue(GridPoint m) const { return pow(lambda1, m.a) * pow(lambda2, m.b); }
};

/**
 * Derives the polynomial family of a kernel. For a single-die eigenvalue t the
 * eigenvector with value 1 on face 0 is (1, 1-u, 1-v) with
 * u = alpha1 (t-1)/(t-alpha1), v = alpha2 (t-1)/(t-alpha2); t = lambda1 gives
 * (u1, v1) and t = lambda2 gives (u2, v2). The weight (eta1, eta2) is fitted
 * from the exact stationary law at kp.N.
 */
inline std::optional<CalibratedPair> calibrate(const KernelParameters &kp) {
    if (!kp.interior() || kp.N < 1) {
        return std::nullopt;
    }
    const auto spectrum = one_die_spectrum(kp);
    if (!spectrum) {
        return std::nullopt;
    }
    const auto u_of = [&](const Rational &t) { return kp.alpha1 * (t - Rational(1)) / (t - kp.alpha1); };
    const auto v_of = [&](const Rational &t) { return kp.alpha2 * (t - Rational(1)) / (t - kp.alpha2); };
    const EtaFit fit = fit_eta(stationary_distribution(build_kernel(kp)), kp.N);
    if (!fit.trinomial || fit.degenerate) {
        return std::nullopt;
    }
    auto family = ParameterSet::make(u_of(spectrum->lambda1), v_of(spectrum->lambda1), u_of(spectrum->lambda2),
                                     v_of(spectrum->lambda2), fit.eta1, fit.eta2);
    return CalibratedPair{kp, std::move(family), spectrum->lambda1, spectrum->lambda2};
}

/// Every calibratable kernel with parameters on the lattice {1/d, ..., (d-1)/d},
/// in lexicographic (alpha1, alpha2, beta1, beta2) order, at most `limit` of them.
inline std::vector<CalibratedPair> calibration_search(int n, int d, std::size_t limit) {
    std::vector<CalibratedPair> found;
    for (int a1 = 1; a1 < d; ++a1) {
        for (int a2 = 1; a2 < d; ++a2) {
            for (int b1 = 1; b1 < d; ++b1) {
                for (int b2 = 1; b1 + b2 < d; ++b2) {
                    const KernelParameters kp{Rational(a1, d), Rational(a2, d), Rational(b1, d), Rational(b2, d), n};
                    if (!one_die_spectrum(kp)) {
                        continue;
                    }
                    if (auto pair = calibrate(kp)) {
                        found.push_back(std::move(*pair));
                        if (found.size() >= limit) {
                            return found;
                        }
                    }
                }
            }
        }
    }
    return found;
}

/**
 * Inverse of `calibrate`: the kernel whose eigenfunctions are the given
 * family, for a chosen scale kappa = lambda1 / (lambda1 - 1).
 *
 * With u' = u/(1-u) the family of a kernel satisfies u1' = a1 s1, v1' = a2 s1,
 * u2' = a1 s2, v2' = a2 s2, where a = alpha/(1-alpha) and s = 1 - 1/lambda.
 * Returns nullopt when the resulting alphas or betas leave (0, 1) or when the
 * built kernel does not reproduce the family. Families from positive
 * p-quadruples always fail: their u1' and v1' have opposite signs.
 */
inline std::optional<KernelParameters> kernel_for_family(const ParameterSet &ps, const Rational &kappa, int n) {
    const Rational one(1);
    for (const auto *x : {&ps.u1(), &ps.v1(), &ps.u2(), &ps.v2()}) {
        if (*x == one) {
            return std::nullopt;
        }
    }
    const auto prime = [&](const Rational &x) { return x / (one - x); };
    const Rational a1 = kappa * prime(ps.u1());
    const Rational a2 = kappa * prime(ps.v1());
    if (a1.sign() <= 0 || a2.sign() <= 0) {
        return std::nullopt;
    }
    const Rational alpha1 = a1 / (one + a1);
    const Rational alpha2 = a2 / (one + a2);
    const Rational eta0 = one - ps.eta1() - ps.eta2();
    const Rational w0 = eta0;
    const Rational w1 = ps.eta1() * (one - alpha1);
    const Rational w2 = ps.eta2() * (one - alpha2);
    const Rational total = w0 + w1 + w2;
    if (total.sign() <= 0) {
        return std::nullopt;
    }
    KernelParameters kp{alpha1, alpha2, w1 / total, w2 / total, n};
    if (w0.sign() <= 0 || w1.sign() <= 0 || w2.sign() <= 0 || !kp.interior()) {
        return std::nullopt;
    }
    const auto spectrum = one_die_spectrum(kp);
    if (!spectrum) {
        return std::nullopt;
    }
    const auto u_of = [&](const Rational &t) { return alpha1 * (t - one) / (t - alpha1); };
    const auto v_of = [&](const Rational &t) { return alpha2 * (t - one) / (t - alpha2); };
    const auto matches = [&](const Rational &t1, const Rational &t2) {
        return u_of(t1) == ps.u1() && v_of(t1) == ps.v1() && u_of(t2) == ps.u2() && v_of(t2) == ps.v2();
    };
    if (matches(spectrum->lambda1, spectrum->lambda2) || matches(spectrum->lambda2, spectrum->lambda1)) {
        return kp;
    }
    return std::nullopt;
}

}  // namespace k2d
