#pragma once

#include <complex>
#include <vector>

#include "qmicro/rational.hpp"

namespace qmicro {

struct SpectrumLevel {
    Rational energy;
    int multiplicity = 1;
};

/// Finite quantum spectrum: strictly increasing distinct energies with
/// multiplicities, total dimension >= 2. Energies are kept as exact rationals
/// (every finite double is one); immutable after construction.
class Spectrum {
public:
    static Spectrum from_levels(std::vector<SpectrumLevel> levels,
                                bool prefer_rational = false);

    const std::vector<SpectrumLevel>& levels() const { return levels_; }
    int distinct_count() const { return static_cast<int>(levels_.size()); }
    int dimension() const { return dimension_; }  // n+1
    int n() const { return dimension_ - 1; }

    const Rational& energy_exact(int j) const { return levels_[j].energy; }
    double energy(int j) const { return to_double(levels_[j].energy); }
    int multiplicity(int j) const { return levels_[j].multiplicity; }
    double e_min() const { return energy(0); }
    double e_max() const { return energy(distinct_count() - 1); }

    /// Eigenvalues repeated by multiplicity, ascending.
    std::vector<Rational> expanded_exact() const;
    std::vector<double> expanded() const;

    Rational mean_energy_exact() const;

    /// True when the spectrum came from a closed-form builder whose levels are
    /// small exact rationals, making the exact backing the natural default.
    bool prefer_rational() const { return prefer_rational_; }

private:
    Spectrum() = default;
    std::vector<SpectrumLevel> levels_;
    int dimension_ = 0;
    bool prefer_rational_ = false;
};

/// Equally spaced nondegenerate levels {0, eps, ..., n*eps}.
Spectrum build_uniform_ladder(int n, double epsilon);

/// Cyclic three-spin Ising chain: enumerates the 8 spin configurations of
/// H = -J sum s_k s_{k+1} - B sum s_k and merges equal energies.
Spectrum build_ising_chain(double coupling_j, double field_b);

/// Sorts the values and merges adjacent gaps <= multiplicity_tolerance into a
/// single level at the group mean. A negative tolerance selects the default
/// rule 1e-9 * (max - min).
Spectrum from_eigenvalues(const std::vector<double>& values,
                          double multiplicity_tolerance = -1.0);
Spectrum from_eigenvalues_exact(std::vector<Rational> values,
                                const Rational& multiplicity_tolerance,
                                bool prefer_rational = false);

/// Uniform average of the eigenvalues, tr(H)/(n+1).
double mean_energy(const Spectrum& s);

/// Dense Hermitian matrix, row-major complex entries.
class HermitianMatrix {
public:
    HermitianMatrix(int dimension, std::vector<std::complex<double>> entries);
    static HermitianMatrix diagonal(const std::vector<double>& diag);

    int dimension() const { return dim_; }
    const std::complex<double>& at(int i, int j) const {
        return entries_[static_cast<std::size_t>(i) * dim_ + j];
    }

private:
    int dim_;
    std::vector<std::complex<double>> entries_;
};

/// Spectrum of a small Hermitian matrix via cyclic complex Jacobi rotations;
/// dimensions above the cap are rejected as unsupported.
Spectrum eigenvalues_of_hermitian(const HermitianMatrix& h,
                                  double multiplicity_tolerance = -1.0,
                                  int dimension_cap = 64);

}  // namespace qmicro
