#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace qtyper {

/// Raised when an operation leaves the coefficient ring.
struct ring_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::int64_t checked_add(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_add_overflow(x, y, &r))
        throw ring_error("ring coefficient overflow in addition");
    return r;
}

inline std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_mul_overflow(x, y, &r))
        throw ring_error("ring coefficient overflow in multiplication");
    return r;
}

inline std::int64_t checked_shl(std::int64_t x, std::uint32_t s) {
    if (x == 0)
        return 0;
    if (s >= 62)
        throw ring_error("ring coefficient overflow in shift");
    return checked_mul(x, std::int64_t{1} << s);
}

}  // namespace detail

/**
 * An exact element (a + b*sqrt(2)) / 2^k of the ring Z[sqrt(2), 1/2].
 *
 * Canonical form: a and b are not both even while k > 0, and zero is
 * (0, 0, 0).  Canonical forms are unique because 1 and sqrt(2) are
 * linearly independent over the rationals, so exact equality is
 * componentwise.  Every coefficient produced by conjugating Pauli
 * generators through Clifford+T circuits lives in this ring.
 */
struct RingCoeff {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::uint32_t k = 0;

    constexpr RingCoeff() = default;
    constexpr RingCoeff(std::int64_t a_, std::int64_t b_, std::uint32_t k_)
        : a(a_), b(b_), k(k_) {}

    static RingCoeff integer(std::int64_t v) { return RingCoeff(v, 0, 0); }
    static RingCoeff zero() { return RingCoeff(); }
    static RingCoeff one() { return RingCoeff(1, 0, 0); }
    /// sqrt(2)/2, i.e. 1/sqrt(2).
    static RingCoeff inv_rt2() { return RingCoeff(0, 1, 1); }
    static RingCoeff rt2() { return RingCoeff(0, 1, 0); }
    /// 1/2^k.
    static RingCoeff dyadic(std::int64_t num, std::uint32_t k_) {
        RingCoeff r(num, 0, k_);
        r.reduce();
        return r;
    }

    void reduce() {
        if (a == 0 && b == 0) {
            k = 0;
            return;
        }
        while (k > 0 && a % 2 == 0 && b % 2 == 0) {
            a /= 2;
            b /= 2;
            --k;
        }
    }

    bool is_zero() const { return a == 0 && b == 0; }
    bool is_one() const { return a == 1 && b == 0 && k == 0; }
    bool is_minus_one() const { return a == -1 && b == 0 && k == 0; }
    bool is_pm_one() const { return is_one() || is_minus_one(); }
    /// True when the coefficient is a plain integer.
    bool is_integer() const { return b == 0 && k == 0; }

    double value() const {
        constexpr double rt2v = 1.4142135623730950488;
        double num = static_cast<double>(a) + static_cast<double>(b) * rt2v;
        return std::ldexp(num, -static_cast<int>(k));
    }

    friend bool operator==(const RingCoeff&, const RingCoeff&) = default;

    RingCoeff operator-() const { return RingCoeff(-a, -b, k); }

    RingCoeff operator+(const RingCoeff& o) const {
        std::uint32_t kk = std::max(k, o.k);
        RingCoeff r(detail::checked_add(detail::checked_shl(a, kk - k),
                                        detail::checked_shl(o.a, kk - o.k)),
                    detail::checked_add(detail::checked_shl(b, kk - k),
                                        detail::checked_shl(o.b, kk - o.k)),
                    kk);
        r.reduce();
        return r;
    }

    RingCoeff operator-(const RingCoeff& o) const { return *this + (-o); }

    RingCoeff operator*(const RingCoeff& o) const {
        // (a + b r)(c + d r) = (ac + 2bd) + (ad + bc) r
        RingCoeff r(detail::checked_add(detail::checked_mul(a, o.a),
                                        detail::checked_mul(2, detail::checked_mul(b, o.b))),
                    detail::checked_add(detail::checked_mul(a, o.b),
                                        detail::checked_mul(b, o.a)),
                    k + o.k);
        r.reduce();
        return r;
    }

    RingCoeff& operator+=(const RingCoeff& o) { return *this = *this + o; }
    RingCoeff& operator-=(const RingCoeff& o) { return *this = *this - o; }
    RingCoeff& operator*=(const RingCoeff& o) { return *this = *this * o; }

    /// Multiply by 1/sqrt(2); exact, never leaves the ring.
    RingCoeff times_inv_rt2() const {
        RingCoeff r(detail::checked_mul(2, b), a, k + 1);
        r.reduce();
        return r;
    }

    /**
     * Exact division.  Succeeds iff the quotient lies in the ring;
     * throws ring_error otherwise (e.g. dividing by 3).
     */
    RingCoeff operator/(const RingCoeff& d) const {
        if (d.is_zero())
            throw ring_error("division by zero ring coefficient");
        // this/d = (x * conj(y)) / norm(y) * 2^(d.k - this.k) with
        // x, y the integer parts and norm(y) = ya^2 - 2 yb^2.
        std::int64_t za = detail::checked_add(detail::checked_mul(a, d.a),
                                              detail::checked_mul(-2, detail::checked_mul(b, d.b)));
        std::int64_t zb = detail::checked_add(detail::checked_mul(-a, d.b),
                                              detail::checked_mul(b, d.a));
        std::int64_t norm = detail::checked_add(detail::checked_mul(d.a, d.a),
                                                detail::checked_mul(-2, detail::checked_mul(d.b, d.b)));
        // Split norm into sign * 2^m * odd; odd must divide exactly.
        std::int64_t sign = norm < 0 ? -1 : 1;
        std::int64_t mag = norm < 0 ? -norm : norm;
        std::uint32_t m = 0;
        while (mag % 2 == 0) {
            mag /= 2;
            ++m;
        }
        if (za % mag != 0 || zb % mag != 0)
            throw ring_error("quotient is not an element of Z[sqrt2, 1/2]");
        RingCoeff r(sign * (za / mag), sign * (zb / mag), k + m);
        r.reduce();
        // Undo the divisor's dyadic denominator.
        r.a = detail::checked_shl(r.a, d.k);
        r.b = detail::checked_shl(r.b, d.k);
        r.reduce();
        return r;
    }

    /// Multiplicative inverse when it exists in the ring.
    RingCoeff inverse() const { return one() / *this; }

    bool has_ring_inverse() const {
        try {
            (void)inverse();
            return true;
        } catch (const ring_error&) {
            return false;
        }
    }

    /**
     * Minimal s >= 0 such that 2^(s/2) * coeff is an integer, i.e. the
     * coefficient has the shape c / 2^(s/2) with integer c.  Empty when
     * no such s exists (both components nonzero), which certifies that
     * the operator cannot arise from any ancilla-free Clifford+T circuit.
     */
    std::optional<unsigned> denominator_exponent() const {
        if (a == 0 && b == 0)
            return 0u;
        if (b == 0)
            return 2u * k;
        if (a == 0)
            return k == 0 ? 1u : 2u * k - 1u;
        return std::nullopt;
    }

    /**
     * Render in the surface syntax: "1", "-1", "1/2", "rt2/2",
     * "(1+rt2)/4", "(2-rt2)/4", ...
     */
    std::string str() const {
        auto part = [](std::int64_t c, bool rt) {
            std::string s;
            if (rt) {
                if (c == 1)
                    s = "rt2";
                else if (c == -1)
                    s = "-rt2";
                else
                    s = std::to_string(c) + "rt2";
            } else {
                s = std::to_string(c);
            }
            return s;
        };
        std::string num;
        bool paren = false;
        if (a != 0 && b != 0) {
            paren = true;
            num = part(a, false);
            num += (b > 0 ? "+" : "");
            num += part(b, true);
        } else if (b != 0) {
            num = part(b, true);
        } else {
            num = part(a, false);
        }
        if (paren)
            num = "(" + num + ")";
        if (k == 0)
            return num;
        return num + "/" + std::to_string(std::int64_t{1} << k);
    }
};

}  // namespace qtyper
