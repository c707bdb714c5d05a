#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qmicro/rational.hpp"

namespace qmicro {

/// Dense univariate polynomial, coefficients ascending in a local variable t.
template <class T>
using Poly = std::vector<T>;

template <class T>
T poly_eval(const Poly<T>& c, const T& t) {
    T acc = scalar_from_int<T>(0);
    for (std::size_t i = c.size(); i-- > 0;) {
        acc = acc * t + c[i];
    }
    return acc;
}

/// Value of the order-th derivative at t (analytic, Horner form). Falling
/// factorials are accumulated in T: they exceed 64-bit range for large
/// spectra.
template <class T>
T poly_deriv_eval(const Poly<T>& c, const T& t, int order) {
    const int deg = static_cast<int>(c.size()) - 1;
    if (order > deg) return scalar_from_int<T>(0);
    T acc = scalar_from_int<T>(0);
    for (int i = deg; i >= order; --i) {
        T fall = scalar_from_int<T>(1);
        for (int k = 0; k < order; ++k) fall = fall * scalar_from_int<T>(i - k);
        acc = acc * t + c[i] * fall;
    }
    return acc;
}

/// Sum of absolute terms of the order-th derivative at |t|; a cancellation-free
/// magnitude used to scale floating-point comparisons.
inline double poly_deriv_eval_abs(const Poly<double>& c, double t, int order) {
    const int deg = static_cast<int>(c.size()) - 1;
    if (order > deg) return 0.0;
    const double at = std::abs(t);
    double acc = 0.0;
    for (int i = deg; i >= order; --i) {
        double fall = 1.0;
        for (int k = 0; k < order; ++k) fall *= (i - k);
        acc = acc * at + std::abs(c[i]) * fall;
    }
    return acc;
}

template <class T>
Poly<T> poly_antiderivative(const Poly<T>& c) {
    Poly<T> out(c.size() + 1, scalar_from_int<T>(0));
    for (std::size_t i = 0; i < c.size(); ++i) {
        out[i + 1] = c[i] / scalar_from_int<T>(static_cast<long>(i) + 1);
    }
    return out;
}

/// Piecewise polynomial over strictly increasing knots. Piece j lives on
/// [knots[j], knots[j+1]) in the shifted basis t = x - knots[j]; evaluation is
/// right-continuous at interior knots and identically zero outside the span.
template <class T>
struct PiecewisePoly {
    std::vector<T> knots;
    std::vector<Poly<T>> pieces;

    int piece_count() const { return static_cast<int>(pieces.size()); }
    const T& e_min() const { return knots.front(); }
    const T& e_max() const { return knots.back(); }

    /// Piece index for right-continuous evaluation; -1 outside [e_min, e_max).
    int locate_right(const T& x) const {
        if (x < knots.front() || !(x < knots.back())) return -1;
        auto it = std::upper_bound(knots.begin(), knots.end(), x);
        return static_cast<int>(it - knots.begin()) - 1;
    }

    /// Piece index for a left limit; -1 at or below e_min, above e_max.
    int locate_left(const T& x) const {
        if (!(x > knots.front()) || x > knots.back()) return -1;
        auto it = std::lower_bound(knots.begin(), knots.end(), x);
        return static_cast<int>(it - knots.begin()) - 1;
    }

    T value(const T& x, int order = 0) const {
        const int j = locate_right(x);
        if (j < 0) return scalar_from_int<T>(0);
        T t = x - knots[j];
        return poly_deriv_eval(pieces[j], t, order);
    }

    T value_right(const T& x, int order = 0) const { return value(x, order); }

    T value_left(const T& x, int order = 0) const {
        const int j = locate_left(x);
        if (j < 0) return scalar_from_int<T>(0);
        T t = x - knots[j];
        return poly_deriv_eval(pieces[j], t, order);
    }

    /// Exact clamped integral of u^power * f(u) over [a, b].
    T moment(const T& a, const T& b, int power) const {
        if (power < 0) throw std::invalid_argument("moment: negative power");
        T lo = std::max(a, knots.front());
        T hi = std::min(b, knots.back());
        T total = scalar_from_int<T>(0);
        if (!(lo < hi)) return total;
        for (int j = 0; j < piece_count(); ++j) {
            T pl = std::max(lo, knots[j]);
            T pr = std::min(hi, knots[j + 1]);
            if (!(pl < pr)) continue;
            // (t + K)^power folded into the local coefficients.
            Poly<T> g(pieces[j].size() + power, scalar_from_int<T>(0));
            for (int s = 0; s <= power; ++s) {
                T w = binomial_as<T>(power, s);
                T kp = scalar_from_int<T>(1);
                for (int e = 0; e < power - s; ++e) kp = kp * knots[j];
                w = w * kp;
                for (std::size_t i = 0; i < pieces[j].size(); ++i) {
                    g[i + s] = g[i + s] + pieces[j][i] * w;
                }
            }
            Poly<T> G = poly_antiderivative(g);
            T t1 = pl - knots[j];
            T t2 = pr - knots[j];
            total = total + poly_eval(G, t2) - poly_eval(G, t1);
        }
        return total;
    }
};

template <class T>
struct KnotContinuity {
    int continuity_order;  // derivatives 0..c agree across the knot
    T next_jump;           // jump of derivative c+1, right minus left
};

/// Per-knot continuity classification by analytic comparison of adjacent piece
/// coefficients; boundary knots are compared against the zero extension.
/// eq(L, R, scale) decides equality (exact for rational backing).
template <class T, class Eq>
std::vector<KnotContinuity<T>> knot_continuity(const PiecewisePoly<T>& f, Eq eq) {
    std::vector<KnotContinuity<T>> out;
    int maxdeg = 0;
    for (const auto& p : f.pieces) {
        maxdeg = std::max(maxdeg, static_cast<int>(p.size()) - 1);
    }
    const Poly<T> zero;
    const int m = static_cast<int>(f.knots.size());
    for (int k = 0; k < m; ++k) {
        const Poly<T>& left = (k == 0) ? zero : f.pieces[k - 1];
        const Poly<T>& right = (k == m - 1) ? zero : f.pieces[k];
        T tl = (k == 0) ? scalar_from_int<T>(0) : f.knots[k] - f.knots[k - 1];
        int c = maxdeg;
        T jump = scalar_from_int<T>(0);
        for (int s = 0; s <= maxdeg + 1; ++s) {
            T lv = poly_deriv_eval(left, tl, s);
            T rv = poly_deriv_eval(right, scalar_from_int<T>(0), s);
            double scale = 1.0;
            if constexpr (std::is_same_v<T, double>) {
                scale = poly_deriv_eval_abs(left, tl, s) +
                        poly_deriv_eval_abs(right, 0.0, s);
            }
            if (!eq(lv, rv, scale)) {
                c = s - 1;
                jump = rv - lv;
                break;
            }
        }
        out.push_back(KnotContinuity<T>{c, jump});
    }
    return out;
}

namespace detail {

/// Polynomial in t = E - K of the r-th u-derivative of u -> (u - E)_+^q,
/// divided by r!, evaluated at node z: C(q, r) * ((z - K) - t)^{q - r} when the
/// node lies strictly above K, zero otherwise.
template <class T>
Poly<T> truncated_power_node_poly(const T& z, const T& K, int q, int r) {
    Poly<T> out(static_cast<std::size_t>(q) + 1, scalar_from_int<T>(0));
    if (!(z > K) || r > q) return out;
    T a = z - K;
    T lead = binomial_as<T>(q, r);
    const int p = q - r;
    for (int s = 0; s <= p; ++s) {
        T term = lead * binomial_as<T>(p, s);
        T ap = scalar_from_int<T>(1);
        for (int e = 0; e < p - s; ++e) ap = ap * a;
        term = term * ap;
        if (s % 2 == 1) term = -term;
        out[s] = term;
    }
    return out;
}

}  // namespace detail

/// Divided difference of u -> (u - E)_+^q over the given ascending nodes,
/// q = nodes.size() - 2, assembled as a piecewise polynomial of E with knots at
/// the distinct node values. Repeated nodes are handled confluently (derivative
/// entries), which is what realizes degenerate levels.
template <class T>
PiecewisePoly<T> truncated_power_divided_difference(const std::vector<T>& nodes) {
    const int N = static_cast<int>(nodes.size());
    if (N < 2) {
        throw std::invalid_argument("divided difference needs at least two nodes");
    }
    for (int i = 1; i < N; ++i) {
        if (nodes[i] < nodes[i - 1]) {
            throw std::invalid_argument("divided difference nodes must be ascending");
        }
    }
    PiecewisePoly<T> out;
    out.knots.push_back(nodes.front());
    for (int i = 1; i < N; ++i) {
        if (nodes[i] > out.knots.back()) out.knots.push_back(nodes[i]);
    }
    if (out.knots.size() < 2) {
        throw std::invalid_argument("divided difference nodes are all equal");
    }
    const int q = N - 2;
    out.pieces.resize(out.knots.size() - 1);

    for (std::size_t j = 0; j + 1 < out.knots.size(); ++j) {
        const T& K = out.knots[j];
        std::vector<Poly<T>> col(N);
        for (int i = 0; i < N; ++i) {
            col[i] = detail::truncated_power_node_poly(nodes[i], K, q, 0);
        }
        for (int r = 1; r < N; ++r) {
            for (int i = 0; i + r < N; ++i) {
                if (nodes[i + r] == nodes[i]) {
                    col[i] = detail::truncated_power_node_poly(nodes[i], K, q, r);
                } else {
                    T gap = nodes[i + r] - nodes[i];
                    for (int s = 0; s <= q; ++s) {
                        col[i][s] = (col[i + 1][s] - col[i][s]) / gap;
                    }
                }
            }
        }
        out.pieces[j] = std::move(col[0]);
    }
    return out;
}

/// Converts the exact representation into its floating mirror.
inline PiecewisePoly<double> to_floating(const PiecewisePoly<Rational>& f) {
    PiecewisePoly<double> out;
    out.knots.reserve(f.knots.size());
    for (const auto& k : f.knots) out.knots.push_back(to_double(k));
    out.pieces.reserve(f.pieces.size());
    for (const auto& p : f.pieces) {
        Poly<double> q;
        q.reserve(p.size());
        for (const auto& c : p) q.push_back(to_double(c));
        out.pieces.push_back(std::move(q));
    }
    return out;
}

}  // namespace qmicro
