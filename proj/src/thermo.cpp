#include "qmicro/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qmicro/errors.hpp"

namespace qmicro {

namespace {

double reduced(const DensityOfStates& d, double e, int order, Side side) {
    const auto& f = d.float_poly();
    return side == Side::left ? f.value_left(e, order) : f.value_right(e, order);
}

void require_interior(const DensityOfStates& d, double e, const char* who) {
    if (!(e > d.e_min() && e < d.e_max())) {
        throw std::domain_error(std::string(who) + ": energy outside the open support");
    }
}

struct SideThermo {
    double t;
    double c;
};

/// One-sided T and C at an exact knot; exact arithmetic under rational backing.
SideThermo knot_thermo(const DensityOfStates& d, int knot_index, Side side) {
    if (const auto* ex = d.exact_poly()) {
        const Rational& e = d.spectrum().energy_exact(knot_index);
        Rational r = side == Side::left ? ex->value_left(e, 0) : ex->value_right(e, 0);
        Rational rp = side == Side::left ? ex->value_left(e, 1) : ex->value_right(e, 1);
        Rational rpp = side == Side::left ? ex->value_left(e, 2) : ex->value_right(e, 2);
        SideThermo out;
        out.t = sgn(rp) == 0 ? std::numeric_limits<double>::infinity()
                             : to_double(Rational(r / rp));
        Rational denom(rp * rp - r * rpp);
        out.c = sgn(denom) == 0 ? std::numeric_limits<double>::infinity()
                                : to_double(Rational(rp * rp / denom));
        return out;
    }
    double e = d.spectrum().energy(knot_index);
    double r = reduced(d, e, 0, side);
    double rp = reduced(d, e, 1, side);
    double rpp = reduced(d, e, 2, side);
    SideThermo out;
    out.t = rp == 0.0 ? std::numeric_limits<double>::infinity() : r / rp;
    double denom = rp * rp - r * rpp;
    out.c = denom == 0.0 ? std::numeric_limits<double>::infinity() : rp * rp / denom;
    return out;
}

}  // namespace

double entropy(const DensityOfStates& d, double energy) {
    require_interior(d, energy, "entropy");
    double r = d.float_poly().value(energy);
    if (!(r > 0.0)) throw std::domain_error("entropy: Omega(E) is not positive");
    return d.pi_power() * std::log(std::numbers::pi) + std::log(r);
}

double temperature(const DensityOfStates& d, double energy, Side side,
                   bool negative_branch) {
    require_interior(d, energy, "temperature");
    double r = reduced(d, energy, 0, side);
    double rp = reduced(d, energy, 1, side);
    if (!(r > 0.0)) throw std::domain_error("temperature: Omega(E) is not positive");
    if (rp == 0.0) {
        throw infinite_temperature_error("temperature: Omega'(E) = 0");
    }
    double t = r / rp;
    if (t < 0.0 && !negative_branch) {
        throw std::domain_error(
            "temperature: E lies on the negative-temperature branch; request it explicitly");
    }
    return t;
}

double specific_heat(const DensityOfStates& d, double energy, Side side,
                     bool negative_branch) {
    require_interior(d, energy, "specific_heat");
    double r = reduced(d, energy, 0, side);
    double rp = reduced(d, energy, 1, side);
    double rpp = reduced(d, energy, 2, side);
    if (!(r > 0.0)) throw std::domain_error("specific_heat: Omega(E) is not positive");
    if (rp == 0.0) {
        throw infinite_temperature_error("specific_heat: Omega'(E) = 0");
    }
    if (rp < 0.0 && !negative_branch) {
        throw std::domain_error(
            "specific_heat: E lies on the negative-temperature branch; request it explicitly");
    }
    double denom = rp * rp - r * rpp;
    if (denom == 0.0) throw divergent_heat_error("specific_heat: divergent");
    return rp * rp / denom;
}

AccessibleRange accessible_range(const DensityOfStates& d) {
    const auto& f = d.float_poly();
    std::vector<double> candidates(f.knots.begin(), f.knots.end());

    for (int j = 0; j < f.piece_count(); ++j) {
        const double width = f.knots[j + 1] - f.knots[j];
        auto slope = [&](double t) { return poly_deriv_eval(f.pieces[j], t, 1); };
        const int scan = 48;
        std::vector<double> ts, ss;
        for (int i = 0; i <= scan; ++i) {
            double frac = static_cast<double>(i) / scan;
            if (i == 0) frac = 1e-9;
            if (i == scan) frac = 1.0 - 1e-9;
            ts.push_back(width * frac);
            ss.push_back(slope(ts.back()));
        }
        for (int i = 0; i <= scan; ++i) {
            if (ss[i] == 0.0) candidates.push_back(f.knots[j] + ts[i]);
        }
        for (int i = 0; i < scan; ++i) {
            if (!(ss[i] * ss[i + 1] < 0.0)) continue;
            double a = ts[i], b = ts[i + 1], sa = ss[i];
            for (int it = 0; it < 90; ++it) {
                double mid = 0.5 * (a + b);
                double sm = slope(mid);
                if (sm == 0.0) {
                    a = b = mid;
                    break;
                }
                if ((sa < 0.0) == (sm < 0.0)) {
                    a = mid;
                    sa = sm;
                } else {
                    b = mid;
                }
            }
            candidates.push_back(f.knots[j] + 0.5 * (a + b));
        }
    }
    std::sort(candidates.begin(), candidates.end());

    double vmax = 0.0;
    std::vector<double> values(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        double v = std::max(f.value_left(candidates[i]), f.value_right(candidates[i]));
        values[i] = v;
        vmax = std::max(vmax, v);
    }
    AccessibleRange out;
    out.e_min = d.e_min();
    out.e_star = d.e_max();
    const double tol = vmax * 1e-12;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (values[i] >= vmax - tol) {
            out.e_star = candidates[i];
            break;
        }
    }
    out.empty_interior =
        out.e_star <= out.e_min + (d.e_max() - d.e_min()) * 1e-15;
    return out;
}

double energy_uncertainty(const DensityOfStates& d, double energy) {
    const double lo = d.e_min();
    const double hi = d.e_max();
    if (!(energy > lo) || !(energy < hi)) {
        if (energy < lo || energy > hi) {
            throw std::domain_error("energy_uncertainty: energy outside the support");
        }
        return 0.0;  // both endpoints, as limits
    }
    double m0, m1;
    if (const auto* ex = d.exact_poly()) {
        Rational e = rational_from_double(energy);
        m0 = to_double(ex->moment(ex->e_min(), e, 0));
        m1 = to_double(ex->moment(ex->e_min(), e, 1));
    } else {
        const auto& f = d.float_poly();
        m0 = f.moment(lo, energy, 0);
        m1 = f.moment(lo, energy, 1);
    }
    double r = d.float_poly().value(energy);
    if (!(r > 0.0)) throw std::domain_error("energy_uncertainty: Omega(E) is not positive");
    double hbar = mean_energy(d.spectrum());
    double radicand = (d.pi_power() + 1) * (hbar * m0 - m1) / r;
    double span = hi - lo;
    if (radicand < -1e-12 * std::max(1.0, span * span)) {
        throw consistency_error("energy_uncertainty: negative variance beyond guard");
    }
    return std::sqrt(std::max(radicand, 0.0));
}

std::vector<double> microcanonical_weights(const DensityOfStates& d, double energy) {
    require_interior(d, energy, "microcanonical_weights");
    const double r = d.float_poly().value(energy);
    if (!(r > 0.0)) {
        throw std::domain_error("microcanonical_weights: Omega(E) is not positive");
    }
    const int n = d.pi_power();
    double nfact = 1.0;
    for (int k = 2; k <= n; ++k) nfact *= k;

    const Spectrum& s = d.spectrum();
    std::vector<Rational> base = s.expanded_exact();
    std::vector<double> weights;
    weights.reserve(s.dimension());
    double denom = nfact * r;
    for (int j = 0; j < s.distinct_count(); ++j) {
        std::vector<Rational> nodes = base;
        const Rational& ej = s.energy_exact(j);
        nodes.insert(std::upper_bound(nodes.begin(), nodes.end(), ej), ej);
        // exact table, rounded once: the double table cancels catastrophically
        // on clustered knots
        auto numerator = to_floating(truncated_power_divided_difference(nodes));
        double w = numerator.value(energy) / denom;
        if (w < -1e-9) {
            throw consistency_error("microcanonical_weights: negative weight beyond guard");
        }
        w = std::max(w, 0.0);
        for (int k = 0; k < s.multiplicity(j); ++k) weights.push_back(w);
    }
    return weights;
}

std::vector<CriticalPoint> critical_points(const DensityOfStates& d) {
    std::vector<CriticalPoint> out;
    AccessibleRange ar = accessible_range(d);
    if (ar.empty_interior) return out;
    auto smooth = d.smoothness_report();
    const double span = d.e_max() - d.e_min();
    const int m = d.spectrum().distinct_count();
    for (int k = 1; k + 1 < m; ++k) {
        double e_c = d.spectrum().energy(k);
        if (!(e_c < ar.e_star - span * 1e-12)) continue;
        SideThermo lo = knot_thermo(d, k, Side::left);
        SideThermo hi = knot_thermo(d, k, Side::right);
        double tmax = std::max(std::abs(lo.t), std::abs(hi.t));
        if (!(std::abs(lo.t - hi.t) <= 1e-9 * tmax)) {
            throw consistency_error("critical_points: one-sided temperatures disagree");
        }
        CriticalPoint cp;
        cp.e_c = e_c;
        cp.t_c = lo.t;
        cp.c_minus = lo.c;
        cp.c_plus = hi.c;
        cp.discontinuity_order = smooth[k].continuity_order + 1;
        out.push_back(cp);
    }
    return out;
}

namespace {

std::vector<double> half_offset_rows(const DensityOfStates& d, double lo, double hi,
                                     int count) {
    const double step = (hi - lo) / count;
    const double span = d.e_max() - d.e_min();
    std::vector<double> grid;
    grid.reserve(count);
    for (int i = 0; i < count; ++i) {
        double e = lo + (i + 0.5) * step;
        for (int j = 0; j < d.spectrum().distinct_count(); ++j) {
            if (std::abs(e - d.spectrum().energy(j)) < span * 1e-12) {
                e += 0.25 * step;
                break;
            }
        }
        grid.push_back(e);
    }
    return grid;
}

}  // namespace

ThermoCurve thermo_curve(const DensityOfStates& d, int count, bool negative_branch) {
    if (count < 2) throw std::invalid_argument("thermo_curve: need at least two points");
    AccessibleRange ar = accessible_range(d);
    if (d.pi_power() == 1) {
        throw std::domain_error(
            "thermo_curve: no finite-temperature branch (Omega is constant)");
    }
    if (ar.empty_interior && !negative_branch) {
        throw std::domain_error(
            "thermo_curve: no finite-temperature branch (frozen: Omega is maximal at E_min)");
    }

    ThermoCurve out;
    out.requested_count = count;
    out.negative_branch = negative_branch;
    out.grid_lo = ar.e_min;
    out.grid_hi = negative_branch ? d.e_max() : ar.e_star;

    auto append_branch = [&](double lo, double hi, bool negative) {
        std::vector<double> grid = half_offset_rows(d, lo, hi, count);
        double prev_t = -std::numeric_limits<double>::infinity();
        for (double e : grid) {
            ThermoRow row;
            row.energy = e;
            row.entropy = entropy(d, e);
            row.temperature = temperature(d, e, Side::left, negative);
            row.specific_heat = specific_heat(d, e, Side::left, negative);
            row.energy_uncertainty = energy_uncertainty(d, e);
            if (!(row.temperature > prev_t)) {
                throw consistency_error("thermo_curve: temperature not strictly increasing");
            }
            prev_t = row.temperature;
            out.rows.push_back(row);
        }
    };

    if (!ar.empty_interior) append_branch(ar.e_min, ar.e_star, false);
    if (negative_branch && ar.e_star < d.e_max()) {
        append_branch(ar.e_star, d.e_max(), true);
    }
    return out;
}

EquilibrateResult equilibrate(const DensityOfStates& d1, double e1,
                              const DensityOfStates& d2, double e2) {
    AccessibleRange a1 = accessible_range(d1);
    AccessibleRange a2 = accessible_range(d2);
    if (a1.empty_interior || a2.empty_interior) {
        throw std::domain_error("equilibrate: a system has no equilibrium branch");
    }
    if (!(e1 > a1.e_min && e1 < a1.e_star) || !(e2 > a2.e_min && e2 < a2.e_star)) {
        throw std::domain_error("equilibrate: energies must lie inside the accessible ranges");
    }
    const double lo = std::max(a1.e_min - e1, e2 - a2.e_star);
    const double hi = std::min(a1.e_star - e1, e2 - a2.e_min);

    auto slope = [&](double eps) {
        const auto& f1 = d1.float_poly();
        const auto& f2 = d2.float_poly();
        double x1 = e1 + eps, x2 = e2 - eps;
        return f1.value(x1, 1) / f1.value(x1) - f2.value(x2, 1) / f2.value(x2);
    };

    const double pad = 1e-12 * (hi - lo);
    double a = lo + pad, b = hi - pad;
    double ga = slope(a), gb = slope(b);
    EquilibrateResult out;
    if ((ga > 0.0 && gb > 0.0) || (ga < 0.0 && gb < 0.0)) {
        // No interior stationary point: the boundary with the larger joint
        // entropy is the equilibrium.
        double sa = entropy(d1, e1 + a) + entropy(d2, e2 - a);
        double sb = entropy(d1, e1 + b) + entropy(d2, e2 - b);
        out.epsilon_star = sa >= sb ? a : b;
        out.t_common = std::numeric_limits<double>::quiet_NaN();
        out.boundary = true;
        return out;
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (a + b);
        double gm = slope(mid);
        if (gm == 0.0) {
            a = b = mid;
            break;
        }
        if ((gm > 0.0) == (ga > 0.0)) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    out.epsilon_star = 0.5 * (a + b);
    double t1 = temperature(d1, e1 + out.epsilon_star);
    double t2 = temperature(d2, e2 - out.epsilon_star);
    if (!(std::abs(t1 - t2) <= 1e-8 * std::max(t1, t2))) {
        throw consistency_error("equilibrate: temperatures failed to match");
    }
    out.t_common = 0.5 * (t1 + t2);
    out.boundary = false;
    return out;
}

double chebyshev_bound(long long n_constituents, double x, double mean,
                       double variance) {
    if (n_constituents < 1) throw std::invalid_argument("chebyshev_bound: N must be >= 1");
    if (!(x > 0.0)) throw std::invalid_argument("chebyshev_bound: x must be > 0");
    if (variance < 0.0) throw std::invalid_argument("chebyshev_bound: negative variance");
    if (mean == 0.0) {
        throw std::invalid_argument("chebyshev_bound: zero mean has no relative deviation");
    }
    double bound = variance / (static_cast<double>(n_constituents) * x * x * mean * mean);
    return std::min(1.0, bound);
}

}  // namespace qmicro
