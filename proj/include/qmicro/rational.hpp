#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace qmicro {

using Rational = mpq_class;

/// Exact conversion: every finite double is a dyadic rational.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("rational_from_double: non-finite value");
    }
    return Rational(x);
}

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

/// num/den in canonical form (GMP leaves fraction constructors unreduced).
inline Rational rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline std::string to_fraction_string(const Rational& q) {
    Rational c(q);
    c.canonicalize();
    return c.get_str();
}

/// Parses "p/q" or "p" (base 10).
inline Rational rational_from_string(const std::string& s) {
    try {
        Rational q(s, 10);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("bad rational literal: " + s);
    }
}

inline mpz_class factorial_z(unsigned n) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return f;
}

inline mpz_class binomial_z(unsigned n, unsigned k) {
    if (k > n) return mpz_class(0);
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return b;
}

// Small numeric shims so templated code handles Rational and double alike.

template <class T>
inline T scalar_from_int(long v) {
    return T(v);
}

inline double binomial_d(unsigned n, unsigned k) {
    return binomial_z(n, k).get_d();
}

template <class T>
inline T binomial_as(unsigned n, unsigned k) {
    if constexpr (std::is_same_v<T, Rational>) {
        return Rational(binomial_z(n, k));
    } else {
        return binomial_d(n, k);
    }
}

template <class T>
inline bool is_zero(const T& v) {
    if constexpr (std::is_same_v<T, Rational>) {
        return sgn(v) == 0;
    } else {
        return v == 0.0;
    }
}

}  // namespace qmicro
