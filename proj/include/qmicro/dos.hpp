#pragma once

#include <optional>
#include <vector>

#include "qmicro/piecewise.hpp"
#include "qmicro/spectrum.hpp"

namespace qmicro {

enum class Backing { rational, floating };

struct KnotSmoothness {
    double knot = 0.0;
    int multiplicity = 0;
    int continuity_order = 0;       // one-sided derivatives 0..c agree
    double jump_next_derivative = 0.0;  // jump of Omega^{(c+1)}, right minus left
};

/// Density of states of a finite spectrum over projective state space: a
/// piecewise polynomial of degree n-1 with knots at the distinct eigenvalues,
/// total integral pi^n/n!. Internally the stored polynomial is the reduced
/// density r = Omega / pi^n, which is exactly rational whenever the spectrum
/// is; the transcendental factor is applied on evaluation.
class DensityOfStates {
public:
    const Spectrum& spectrum() const { return spectrum_; }
    Backing backing() const { return backing_; }
    int pi_power() const { return n_; }
    double phase_space_volume() const;  // pi^n / n!
    double e_min() const { return approx_.knots.front(); }
    double e_max() const { return approx_.knots.back(); }

    /// Omega^{(order)}(E); right-continuous at knots, zero outside the support.
    /// Orders above n-1 are distributional and rejected.
    double evaluate(double energy, int order = 0) const;
    double evaluate_left(double energy, int order = 0) const;
    double evaluate_right(double energy, int order = 0) const;

    /// Integral of u^power * Omega(u) over [a, b] clamped to the support.
    double integrate_moment(double a, double b, int power) const;

    /// Reduced-density moment with exact arithmetic; rational backing only.
    Rational reduced_moment_exact(const Rational& a, const Rational& b, int power) const;

    std::vector<KnotSmoothness> smoothness_report() const;

    /// Reduced density r = Omega / pi^n. The exact form is present only for
    /// the rational backing; the floating mirror always exists.
    const PiecewisePoly<Rational>* exact_poly() const {
        return exact_ ? &*exact_ : nullptr;
    }
    const PiecewisePoly<double>& float_poly() const { return approx_; }

    /// Piecewise derivative value of Omega without the distributional-order
    /// guard; orders >= n evaluate to zero on piece interiors.
    double evaluate_unchecked(double energy, int order) const;

    friend DensityOfStates density_of_states(const Spectrum&, Backing);
    friend DensityOfStates dos_from_parts(Spectrum, Backing,
                                          std::optional<PiecewisePoly<Rational>>,
                                          PiecewisePoly<double>);

private:
    DensityOfStates(Spectrum s, Backing b) : spectrum_(std::move(s)), backing_(b) {}

    Spectrum spectrum_;
    Backing backing_;
    int n_ = 0;
    double pi_pow_n_ = 1.0;
    std::optional<PiecewisePoly<Rational>> exact_;
    PiecewisePoly<double> approx_;
};

/// Builds Omega via confluent divided differences of the truncated power
/// function over the eigenvalues counted with multiplicity. Spectra with a
/// single distinct level are rejected (delta distribution).
DensityOfStates density_of_states(const Spectrum& s, Backing backing);
DensityOfStates density_of_states(const Spectrum& s);

/// Reassembles a DensityOfStates from serialized parts (see io.hpp).
DensityOfStates dos_from_parts(Spectrum s, Backing backing,
                               std::optional<PiecewisePoly<Rational>> exact,
                               PiecewisePoly<double> approx);

}  // namespace qmicro
