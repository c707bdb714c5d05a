#include "qmicro/dos.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qmicro/errors.hpp"

namespace qmicro {

namespace {

double pow_pi(int n) {
    return std::pow(std::numbers::pi, n);
}

double factorial_d(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

}  // namespace

double DensityOfStates::phase_space_volume() const {
    return pi_pow_n_ / factorial_d(n_);
}

double DensityOfStates::evaluate(double energy, int order) const {
    if (order < 0 || order > n_ - 1) {
        throw std::invalid_argument("evaluate: derivative order outside [0, n-1]");
    }
    return pi_pow_n_ * approx_.value(energy, order);
}

double DensityOfStates::evaluate_left(double energy, int order) const {
    if (order < 0 || order > n_ - 1) {
        throw std::invalid_argument("evaluate: derivative order outside [0, n-1]");
    }
    return pi_pow_n_ * approx_.value_left(energy, order);
}

double DensityOfStates::evaluate_right(double energy, int order) const {
    if (order < 0 || order > n_ - 1) {
        throw std::invalid_argument("evaluate: derivative order outside [0, n-1]");
    }
    return pi_pow_n_ * approx_.value_right(energy, order);
}

double DensityOfStates::evaluate_unchecked(double energy, int order) const {
    if (order < 0) throw std::invalid_argument("evaluate: negative order");
    return pi_pow_n_ * approx_.value(energy, order);
}

double DensityOfStates::integrate_moment(double a, double b, int power) const {
    if (a > b) throw std::invalid_argument("integrate_moment: a > b");
    if (power < 0 || power > 2) {
        throw std::invalid_argument("integrate_moment: power outside [0, 2]");
    }
    if (exact_) {
        Rational m = exact_->moment(rational_from_double(a), rational_from_double(b), power);
        return pi_pow_n_ * to_double(m);
    }
    return pi_pow_n_ * approx_.moment(a, b, power);
}

Rational DensityOfStates::reduced_moment_exact(const Rational& a, const Rational& b,
                                               int power) const {
    if (!exact_) {
        throw std::logic_error("reduced_moment_exact: floating backing has no exact form");
    }
    return exact_->moment(a, b, power);
}

std::vector<KnotSmoothness> DensityOfStates::smoothness_report() const {
    std::vector<KnotContinuity<double>> cont_f;
    std::vector<KnotContinuity<Rational>> cont_q;
    if (exact_) {
        cont_q = knot_continuity(*exact_, [](const Rational& l, const Rational& r, double) {
            return l == r;
        });
    } else {
        cont_f = knot_continuity(approx_, [](double l, double r, double scale) {
            return std::abs(l - r) <= 1e-8 * std::max(scale, 1e-30);
        });
    }
    std::vector<KnotSmoothness> out;
    const int m = spectrum_.distinct_count();
    for (int k = 0; k < m; ++k) {
        KnotSmoothness e;
        e.knot = spectrum_.energy(k);
        e.multiplicity = spectrum_.multiplicity(k);
        if (exact_) {
            e.continuity_order = cont_q[k].continuity_order;
            e.jump_next_derivative = pi_pow_n_ * to_double(cont_q[k].next_jump);
        } else {
            e.continuity_order = cont_f[k].continuity_order;
            e.jump_next_derivative = pi_pow_n_ * cont_f[k].next_jump;
        }
        out.push_back(e);
    }
    return out;
}

DensityOfStates density_of_states(const Spectrum& s, Backing backing) {
    if (s.dimension() < 2) {
        throw std::invalid_argument("density_of_states: dimension must be >= 2");
    }
    if (s.distinct_count() < 2) {
        throw degenerate_spectrum_error(
            "density_of_states: all levels equal; Omega is a delta distribution");
    }
    DensityOfStates d(s, backing);
    d.n_ = s.n();
    d.pi_pow_n_ = pow_pi(d.n_);
    // The confluent table runs in exact arithmetic for both backings: divided
    // differences over close knots cancel catastrophically in floating point,
    // and every spectrum energy is an exact rational anyway. The floating
    // backing keeps only the correctly rounded coefficients.
    auto dd = truncated_power_divided_difference(s.expanded_exact());
    // Reduced density r = dd / (n-1)!, the unique scale with
    // integral(pi^n * r) = pi^n / n!.
    Rational inv_fact(1, 1);
    inv_fact /= Rational(factorial_z(static_cast<unsigned>(d.n_ - 1)));
    for (auto& piece : dd.pieces) {
        for (auto& c : piece) c *= inv_fact;
    }
    d.approx_ = to_floating(dd);
    if (backing == Backing::rational) {
        d.exact_ = std::move(dd);
    }
    return d;
}

DensityOfStates density_of_states(const Spectrum& s) {
    return density_of_states(
        s, s.prefer_rational() ? Backing::rational : Backing::floating);
}

DensityOfStates dos_from_parts(Spectrum s, Backing backing,
                               std::optional<PiecewisePoly<Rational>> exact,
                               PiecewisePoly<double> approx) {
    if (s.distinct_count() < 2) {
        throw degenerate_spectrum_error("dos_from_parts: all levels equal");
    }
    if (approx.knots.size() < 2 || approx.pieces.size() + 1 != approx.knots.size()) {
        throw std::invalid_argument("dos_from_parts: malformed piecewise polynomial");
    }
    if (backing == Backing::rational && !exact) {
        throw std::invalid_argument("dos_from_parts: rational backing needs exact pieces");
    }
    DensityOfStates d(std::move(s), backing);
    d.n_ = d.spectrum_.n();
    d.pi_pow_n_ = pow_pi(d.n_);
    d.exact_ = std::move(exact);
    d.approx_ = std::move(approx);
    return d;
}

}  // namespace qmicro
