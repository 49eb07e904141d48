#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <concepts>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "k2d/error.hpp"

namespace k2d {

/**
 * Exact rational number with unbounded numerator and denominator.
 *
 * Backed by GMP's mpq_t. Every value is kept canonical (denominator > 0,
 * gcd(|num|, den) = 1) after each arithmetic operation, so equality is a
 * structural comparison. Division by zero throws `Error{division_by_zero}`
 * instead of trapping inside GMP.
 */
class Rational {
public:
    Rational() = default;

    template <std::integral I>
    Rational(I n)  // NOLINT(google-explicit-constructor)
    {
        if constexpr (std::is_signed_v<I>) {
            value_ = mpq_class(mpz_class(static_cast<long>(n)));
        } else {
            value_ = mpq_class(mpz_class(static_cast<unsigned long>(n)));
        }
    }

    Rational(long numerator, long denominator) {
        if (denominator == 0) {
            throw Error(ErrorCode::division_by_zero, "rational with zero denominator");
        }
        value_ = mpq_class(mpz_class(numerator), mpz_class(denominator));
        value_.canonicalize();
    }

    Rational(const mpz_class &numerator, const mpz_class &denominator) {
        if (denominator == 0) {
            throw Error(ErrorCode::division_by_zero, "rational with zero denominator");
        }
        value_ = mpq_class(numerator, denominator);
        value_.canonicalize();
    }

    explicit Rational(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

    /// Exact value of a finite double (every finite double is a dyadic rational).
    static Rational from_double(double x) {
        if (!std::isfinite(x)) {
            throw Error(ErrorCode::out_of_range, "cannot represent a non-finite double exactly");
        }
        return Rational(mpq_class(x));
    }

    /// Accepts "n", "-n", "+n", "n/d", "-n/d" with d > 0. Surrounding blanks are ignored.
    static Rational parse(std::string_view text);

    [[nodiscard]] const mpq_class &mpq() const noexcept { return value_; }
    [[nodiscard]] mpz_class numerator() const { return value_.get_num(); }
    [[nodiscard]] mpz_class denominator() const { return value_.get_den(); }

    [[nodiscard]] int sign() const noexcept { return sgn(value_); }
    [[nodiscard]] bool is_zero() const noexcept { return sign() == 0; }
    [[nodiscard]] bool is_integer() const noexcept { return value_.get_den() == 1; }
    [[nodiscard]] bool is_nonpositive_integer() const noexcept { return is_integer() && sign() <= 0; }

    /// Integer value; throws out_of_range unless the value is an integer fitting in a long.
    [[nodiscard]] long to_long() const {
        if (!is_integer() || !value_.get_num().fits_slong_p()) {
            throw Error(ErrorCode::out_of_range, "rational " + str() + " is not a machine integer");
        }
        return value_.get_num().get_si();
    }

    /// Always "num/den", e.g. "5/18", "-3/1", "0/1".
    [[nodiscard]] std::string str() const { return value_.get_num().get_str() + "/" + value_.get_den().get_str(); }

    /// Nearest double, ties to even. Throws float_overflow when the magnitude
    /// rounds past the largest finite double.
    [[nodiscard]] double to_double() const;

    Rational &operator+=(const Rational &rhs) {
        value_ += rhs.value_;
        return *this;
    }
    Rational &operator-=(const Rational &rhs) {
        value_ -= rhs.value_;
        return *this;
    }
    Rational &operator*=(const Rational &rhs) {
        value_ *= rhs.value_;
        return *this;
    }
    Rational &operator/=(const Rational &rhs) {
        if (rhs.is_zero()) {
            throw Error(ErrorCode::division_by_zero, "division of " + str() + " by zero");
        }
        value_ /= rhs.value_;
        return *this;
    }

    friend Rational operator+(Rational lhs, const Rational &rhs) { return lhs += rhs; }
    friend Rational operator-(Rational lhs, const Rational &rhs) { return lhs -= rhs; }
    friend Rational operator*(Rational lhs, const Rational &rhs) { return lhs *= rhs; }
    friend Rational operator/(Rational lhs, const Rational &rhs) { return lhs /= rhs; }
    friend Rational operator-(const Rational &x) { return Rational(mpq_class(-x.value_)); }

    friend bool operator==(const Rational &lhs, const Rational &rhs) { return cmp(lhs.value_, rhs.value_) == 0; }
    friend std::strong_ordering operator<=>(const Rational &lhs, const Rational &rhs) {
        const int c = cmp(lhs.value_, rhs.value_);
        return c < 0 ? std::strong_ordering::less : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend std::ostream &operator<<(std::ostream &os, const Rational &x) { return os << x.str(); }

private:
    mpq_class value_{0};
};

inline Rational Rational::parse(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\n\r");
    if (first == std::string_view::npos) {
        throw Error(ErrorCode::malformed_rational, "empty rational literal");
    }
    text = text.substr(first, text.find_last_not_of(" \t\n\r") - first + 1);

    auto is_digits = [](std::string_view s) {
        if (s.empty()) {
            return false;
        }
        for (char c : s) {
            if (c < '0' || c > '9') {
                return false;
            }
        }
        return true;
    };

    std::string_view num = text;
    std::string_view den = "1";
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        num = text.substr(0, slash);
        den = text.substr(slash + 1);
    }
    bool negative = false;
    if (!num.empty() && (num.front() == '-' || num.front() == '+')) {
        negative = num.front() == '-';
        num.remove_prefix(1);
    }
    if (!is_digits(num) || !is_digits(den)) {
        throw Error(ErrorCode::malformed_rational, "malformed rational literal '" + std::string(text) + "'");
    }
    mpz_class n(std::string(num), 10);
    const mpz_class d(std::string(den), 10);
    if (d == 0) {
        throw Error(ErrorCode::division_by_zero, "zero denominator in '" + std::string(text) + "'");
    }
    if (negative) {
        n = -n;
    }
    return {n, d};
}

inline double Rational::to_double() const {
    if (is_zero()) {
        return 0.0;
    }
    const bool negative = sign() < 0;
    const mpz_class a = abs(value_.get_num());
    const mpz_class &b = value_.get_den();

    // Scale so the integer quotient carries 55 or 56 significant bits.
    const long ea = static_cast<long>(mpz_sizeinbase(a.get_mpz_t(), 2));
    const long eb = static_cast<long>(mpz_sizeinbase(b.get_mpz_t(), 2));
    const long shift = 55 - (ea - eb);
    mpz_class scaled_num = a;
    mpz_class scaled_den = b;
    if (shift >= 0) {
        mpz_mul_2exp(scaled_num.get_mpz_t(), a.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
    } else {
        mpz_mul_2exp(scaled_den.get_mpz_t(), b.get_mpz_t(), static_cast<mp_bitcnt_t>(-shift));
    }
    mpz_class quotient;
    mpz_class remainder;
    mpz_tdiv_qr(quotient.get_mpz_t(), remainder.get_mpz_t(), scaled_num.get_mpz_t(), scaled_den.get_mpz_t());

    // value = (quotient + remainder/scaled_den) * 2^-shift; keep 53 bits, or
    // fewer when the result is subnormal (exponent floor 2^-1074).
    const long qbits = static_cast<long>(mpz_sizeinbase(quotient.get_mpz_t(), 2));
    long drop = std::max(qbits - 53, shift - 1074);
    mpz_class mantissa;
    mpz_class dropped;
    mpz_fdiv_q_2exp(mantissa.get_mpz_t(), quotient.get_mpz_t(), static_cast<mp_bitcnt_t>(drop));
    mpz_fdiv_r_2exp(dropped.get_mpz_t(), quotient.get_mpz_t(), static_cast<mp_bitcnt_t>(drop));
    mpz_class half;
    mpz_setbit(half.get_mpz_t(), static_cast<mp_bitcnt_t>(drop - 1));
    const int versus_half = cmp(dropped, half);
    const bool sticky = remainder != 0;
    if (versus_half > 0 || (versus_half == 0 && (sticky || mpz_odd_p(mantissa.get_mpz_t())))) {
        mantissa += 1;
    }
    const long exponent = drop - shift;
    if (exponent + static_cast<long>(mpz_sizeinbase(mantissa.get_mpz_t(), 2)) > 1024) {
        throw Error(ErrorCode::float_overflow, "rational " + str() + " overflows double");
    }
    const double magnitude = std::ldexp(mantissa.get_d(), static_cast<int>(exponent));
    if (std::isinf(magnitude)) {
        throw Error(ErrorCode::float_overflow, "rational " + str() + " overflows double");
    }
    return negative ? -magnitude : magnitude;
}

/// x^e for any integer e; 0^0 = 1. Negative e on zero throws division_by_zero.
inline Rational pow(const Rational &x, long e) {
    if (e < 0) {
        if (x.is_zero()) {
            throw Error(ErrorCode::division_by_zero, "zero raised to a negative power");
        }
        return Rational(1) / pow(x, -e);
    }
    mpz_class num;
    mpz_class den;
    mpz_pow_ui(num.get_mpz_t(), x.mpq().get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(den.get_mpz_t(), x.mpq().get_den_mpz_t(), static_cast<unsigned long>(e));
    return {num, den};
}

inline Rational abs(const Rational &x) { return x.sign() < 0 ? -x : x; }

inline std::optional<Rational> checked_div(const Rational &a, const Rational &b) {
    if (b.is_zero()) {
        return std::nullopt;
    }
    return a / b;
}

/// Tolerances for the floating mode (spectra, quadrature, finite differences).
struct FloatPolicy {
    double absolute_tolerance = 1e-12;
    double relative_tolerance = 1e-12;

    void validate() const {
        if (!(absolute_tolerance > 0.0) || !(relative_tolerance > 0.0)) {
            throw Error(ErrorCode::invalid_parameters, "float policy tolerances must be strictly positive");
        }
    }

    [[nodiscard]] bool close(double a, double b) const {
        const double scale = std::max(std::abs(a), std::abs(b));
        return std::abs(a - b) <= std::max(absolute_tolerance, relative_tolerance * scale);
    }
};

/// Number types the series engines are instantiated with.
template <class T>
concept Scalar = std::same_as<T, Rational> || std::same_as<T, double>;

/// Converts an exact value into the working number type.
template <Scalar T>
T scalar_cast(const Rational &x) {
    if constexpr (std::same_as<T, double>) {
        return x.to_double();
    } else {
        return x;
    }
}

template <Scalar T>
bool is_exact_zero(const T &x) {
    if constexpr (std::same_as<T, double>) {
        return x == 0.0;
    } else {
        return x.is_zero();
    }
}

}  // namespace k2d
