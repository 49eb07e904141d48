#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <vector>

#include "k2d/error.hpp"
#include "k2d/hyper.hpp"
#include "k2d/scalar.hpp"

namespace k2d {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) {
        throw Error(ErrorCode::invalid_parameters, "quadrature order must be positive");
    }
    QuadratureRule rule{std::vector<double>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0;
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            dp = n * (z * p1 - p2) / (z * z - 1.0);
            const double step = p1 / dp;
            z -= step;
            if (std::abs(step) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -z;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = z;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

/**
 * n-point Gauss-Jacobi rule for the weight (1-t)^alpha (1+t)^beta on [-1, 1],
 * by Golub-Welsch. Weights are normalized to sum to 1, so the rule computes
 * the mean of f under the normalized Jacobi density; no gamma functions are
 * involved.
 */
inline QuadratureRule gauss_jacobi_normalized(int n, double alpha, double beta) {
    if (n < 1) {
        throw Error(ErrorCode::invalid_parameters, "quadrature order must be positive");
    }
    if (!(alpha > -1.0) || !(beta > -1.0)) {
        throw Error(ErrorCode::region_violation, "Jacobi weight needs alpha, beta > -1");
    }
    const double ab = alpha + beta;
    Eigen::VectorXd diag(n);
    Eigen::VectorXd off(std::max(n - 1, 0));
    diag(0) = (beta - alpha) / (ab + 2.0);
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + ab;
        diag(k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + ab;
        double b2 = 0.0;
        if (k == 1) {
            // (k+ab)/(s-1) == 1 at k = 1; cancelled to stay finite at ab = -1
            b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / (s * s * (s + 1.0));
        } else {
            b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
        }
        off(k - 1) = std::sqrt(b2);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::eigensolver_failure, "Golub-Welsch eigensolve failed");
    }
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[static_cast<std::size_t>(i)] = v0 * v0;
    }
    return rule;
}

/**
 * Rule on [0, 1] for the Beta(p, q) density xi^(p-1) (1-xi)^(q-1) / B(p, q).
 * Weights sum to 1. Uses Gauss-Legendre when p = q = 1 and Gauss-Jacobi
 * otherwise, so endpoint singularities sit in the weight.
 */
inline QuadratureRule beta_rule(int n, double p, double q) {
    if (!(p > 0.0) || !(q > 0.0)) {
        throw Error(ErrorCode::region_violation, "Beta density needs positive shape parameters");
    }
    QuadratureRule rule = (p == 1.0 && q == 1.0) ? gauss_legendre(n) : gauss_jacobi_normalized(n, q - 1.0, p - 1.0);
    double total = 0.0;
    for (double w : rule.weights) {
        total += w;
    }
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        rule.nodes[i] = 0.5 * (1.0 + rule.nodes[i]);
        rule.weights[i] /= total;
    }
    return rule;
}

/**
 * Appell F1 through its single-integral representation
 *
 *   F1 = Gamma(c)/(Gamma(a)Gamma(c-a)) int_0^1 xi^(a-1) (1-xi)^(c-a-1)
 *        (1 - xi x)^(-b) (1 - xi y)^(-b') dxi,
 *
 * valid for a > 0, c - a > 0, x < 1, y < 1.
 */
inline double appell_f1_integral(double a, double b, double b2, double c, double x, double y, int order = 64) {
    if (!(a > 0.0) || !(c - a > 0.0) || !(x < 1.0) || !(y < 1.0)) {
        throw Error(ErrorCode::region_violation, "integral representation needs a > 0, c - a > 0, x < 1, y < 1");
    }
    const QuadratureRule rule = beta_rule(order, a, c - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double xi = rule.nodes[i];
        sum += rule.weights[i] * std::pow(1.0 - xi * x, -b) * std::pow(1.0 - xi * y, -b2);
    }
    return sum;
}

struct IntegralCheck {
    double integral = 0.0;
    double series = 0.0;
};

/**
 * Double-integral representation of F(a1,a2;b1,b2;c;u1,v1,u2,v2) over the
 * simplex xi1, xi2 >= 0, xi1 + xi2 <= 1 with Dirichlet(a1, a2, c-a1-a2)
 * weight, compared with the direct series.
 *
 * Only meaningful in the convergence region a1, a2 > 0, c - a1 - a2 > 0. The
 * polynomial case (negative-integer a's and c) is outside it.
 *
 * The simplex is mapped by xi1 = r w, xi2 = r (1 - w); the weight then
 * factors into Beta(a1+a2, c-a1-a2) in r and Beta(a1, a2) in w.
 */
inline IntegralCheck f12_integral_check(double a1, double a2, double b1, double b2, double c, double u1, double v1,
                                        double u2, double v2, int order = 48, const FloatPolicy &policy = {}) {
    if (!(a1 > 0.0) || !(a2 > 0.0) || !(c - a1 - a2 > 0.0)) {
        throw Error(ErrorCode::region_violation, "integral representation needs a1, a2 > 0 and a1 + a2 < c");
    }
    const auto is_nonpositive_integer = [](double v) { return v <= 0.0 && std::floor(v) == v; };
    if ((!is_nonpositive_integer(b1) && !(u1 < 1.0 && u2 < 1.0)) ||
        (!is_nonpositive_integer(b2) && !(v1 < 1.0 && v2 < 1.0))) {
        throw Error(ErrorCode::region_violation, "integrand base must stay positive on the simplex");
    }
    const QuadratureRule radial = beta_rule(order, a1 + a2, c - a1 - a2);
    const QuadratureRule angular = beta_rule(order, a1, a2);
    double integral = 0.0;
    for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
        const double r = radial.nodes[i];
        double inner = 0.0;
        for (std::size_t j = 0; j < angular.nodes.size(); ++j) {
            const double xi1 = r * angular.nodes[j];
            const double xi2 = r - xi1;
            inner += angular.weights[j] * std::pow(1.0 - u1 * xi1 - u2 * xi2, -b1) *
                     std::pow(1.0 - v1 * xi1 - v2 * xi2, -b2);
        }
        integral += radial.weights[i] * inner;
    }
    return {integral, f12_series(a1, a2, b1, b2, c, u1, v1, u2, v2, policy)};
}

}  // namespace k2d
