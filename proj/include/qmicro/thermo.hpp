#pragma once

#include <vector>

#include "qmicro/dos.hpp"

namespace qmicro {

/// One-sided evaluation at knots; the default (left) approaches by cooling.
enum class Side { left, right };

struct AccessibleRange {
    double e_min = 0.0;
    double e_star = 0.0;       // smallest maximizer of Omega
    bool empty_interior = false;  // Omega already maximal at e_min (frozen)
};

struct CriticalPoint {
    double e_c = 0.0;
    double t_c = 0.0;
    double c_minus = 0.0;  // specific heat approaching from below (cooling side)
    double c_plus = 0.0;
    int discontinuity_order = 0;  // order of the transition: first derivative of
                                  // E(T) that disagrees one-sidedly, plus one
};

struct ThermoRow {
    double energy;
    double entropy;
    double temperature;
    double specific_heat;
    double energy_uncertainty;
};

struct ThermoCurve {
    std::vector<ThermoRow> rows;
    double grid_lo = 0.0;
    double grid_hi = 0.0;
    int requested_count = 0;
    bool negative_branch = false;
};

struct EquilibrateResult {
    double epsilon_star = 0.0;
    double t_common = 0.0;  // NaN for boundary equilibria
    bool boundary = false;
};

/// S(E) = ln Omega(E) in units of k_B.
double entropy(const DensityOfStates& d, double energy);

/// k_B T = Omega / Omega'. Throws infinite_temperature_error when Omega' = 0;
/// negative values require the explicit negative-branch request.
double temperature(const DensityOfStates& d, double energy, Side side = Side::left,
                   bool negative_branch = false);

/// C = (Omega')^2 / [(Omega')^2 - Omega Omega''] in units of k_B.
double specific_heat(const DensityOfStates& d, double energy, Side side = Side::left,
                     bool negative_branch = false);

/// Equilibrium energies are [e_min, e_star] where Omega' >= 0; beyond e_star
/// temperatures are negative. Spectra whose Omega decreases from E_min have an
/// empty interior and are reported as frozen rather than rejected.
AccessibleRange accessible_range(const DensityOfStates& d);

/// Residual quantum energy spread of the microcanonical state; vanishes at
/// both support endpoints.
double energy_uncertainty(const DensityOfStates& d, double energy);

/// Diagonal of the microcanonical density matrix in the energy eigenbasis:
/// n+1 weights, one per eigenstate, summing to 1 with mean energy E. Computed
/// as conditional simplex-coordinate expectations, a ratio of two divided
/// difference densities with the level's knot repeated once more on top.
std::vector<double> microcanonical_weights(const DensityOfStates& d, double energy);

/// Interior knots strictly inside the equilibrium range, with one-sided
/// specific heats and the transition order derived from the smoothness report.
std::vector<CriticalPoint> critical_points(const DensityOfStates& d);

/// Samples (E, S, T, C, dH) on a knot-avoiding half-offset grid over the
/// equilibrium range; with negative_branch also over (e_star, e_max).
ThermoCurve thermo_curve(const DensityOfStates& d, int count,
                         bool negative_branch = false);

/// Energy transfer maximizing the joint entropy S1(E1+eps) + S2(E2-eps);
/// at an interior optimum the two temperatures agree.
EquilibrateResult equilibrate(const DensityOfStates& d1, double e1,
                              const DensityOfStates& d2, double e2);

/// Probability bound for the relative deviation of the composite energy of N
/// weakly coupled constituents: min(1, variance / (N x^2 mean^2)).
double chebyshev_bound(long long n_constituents, double x, double mean,
                       double variance);

}  // namespace qmicro
