#include "qmicro/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qmicro/errors.hpp"

namespace qmicro {

Spectrum Spectrum::from_levels(std::vector<SpectrumLevel> levels, bool prefer_rational) {
    if (levels.empty()) throw std::invalid_argument("spectrum: no levels");
    for (auto& lv : levels) lv.energy.canonicalize();
    int dim = 0;
    for (std::size_t j = 0; j < levels.size(); ++j) {
        if (levels[j].multiplicity < 1) {
            throw std::invalid_argument("spectrum: multiplicity must be >= 1");
        }
        if (j > 0 && !(levels[j].energy > levels[j - 1].energy)) {
            throw std::invalid_argument("spectrum: energies must be strictly increasing");
        }
        dim += levels[j].multiplicity;
    }
    if (dim < 2) throw std::invalid_argument("spectrum: dimension must be >= 2");
    Spectrum s;
    s.levels_ = std::move(levels);
    s.dimension_ = dim;
    s.prefer_rational_ = prefer_rational;
    return s;
}

std::vector<Rational> Spectrum::expanded_exact() const {
    std::vector<Rational> out;
    out.reserve(dimension_);
    for (const auto& lv : levels_) {
        for (int k = 0; k < lv.multiplicity; ++k) out.push_back(lv.energy);
    }
    return out;
}

std::vector<double> Spectrum::expanded() const {
    std::vector<double> out;
    out.reserve(dimension_);
    for (const auto& lv : levels_) {
        for (int k = 0; k < lv.multiplicity; ++k) out.push_back(to_double(lv.energy));
    }
    return out;
}

Rational Spectrum::mean_energy_exact() const {
    Rational acc(0);
    for (const auto& lv : levels_) {
        acc += lv.energy * Rational(lv.multiplicity);
    }
    return Rational(acc / Rational(dimension_));
}

double mean_energy(const Spectrum& s) { return to_double(s.mean_energy_exact()); }

Spectrum build_uniform_ladder(int n, double epsilon) {
    if (n < 1) throw std::invalid_argument("uniform ladder: n must be >= 1");
    if (!(epsilon > 0.0)) throw std::invalid_argument("uniform ladder: epsilon must be > 0");
    Rational eps = rational_from_double(epsilon);
    std::vector<SpectrumLevel> levels;
    levels.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
        levels.push_back(SpectrumLevel{Rational(Rational(k) * eps), 1});
    }
    return Spectrum::from_levels(std::move(levels), /*prefer_rational=*/true);
}

Spectrum build_ising_chain(double coupling_j, double field_b) {
    Rational j = rational_from_double(coupling_j);
    Rational b = rational_from_double(field_b);
    std::vector<Rational> energies;
    energies.reserve(8);
    for (int bits = 0; bits < 8; ++bits) {
        int s[3];
        for (int k = 0; k < 3; ++k) s[k] = (bits >> k) & 1 ? 1 : -1;
        int bond = s[0] * s[1] + s[1] * s[2] + s[2] * s[0];  // cyclic
        int mag = s[0] + s[1] + s[2];
        energies.push_back(Rational(-j * Rational(bond) - b * Rational(mag)));
    }
    return from_eigenvalues_exact(std::move(energies), Rational(0),
                                  /*prefer_rational=*/true);
}

Spectrum from_eigenvalues_exact(std::vector<Rational> values,
                                const Rational& multiplicity_tolerance,
                                bool prefer_rational) {
    if (values.size() < 2) {
        throw std::invalid_argument("from_eigenvalues: need at least two values");
    }
    if (multiplicity_tolerance < 0) {
        throw std::invalid_argument("from_eigenvalues: negative tolerance");
    }
    std::sort(values.begin(), values.end());
    std::vector<SpectrumLevel> levels;
    std::size_t i = 0;
    while (i < values.size()) {
        std::size_t j = i + 1;
        Rational sum = values[i];
        while (j < values.size() && values[j] - values[j - 1] <= multiplicity_tolerance) {
            sum += values[j];
            ++j;
        }
        Rational mean(sum / Rational(static_cast<long>(j - i)));
        levels.push_back(SpectrumLevel{mean, static_cast<int>(j - i)});
        i = j;
    }
    return Spectrum::from_levels(std::move(levels), prefer_rational);
}

Spectrum from_eigenvalues(const std::vector<double>& values, double multiplicity_tolerance) {
    if (values.size() < 2) {
        throw std::invalid_argument("from_eigenvalues: need at least two values");
    }
    std::vector<Rational> exact;
    exact.reserve(values.size());
    for (double v : values) exact.push_back(rational_from_double(v));
    double tol = multiplicity_tolerance;
    if (tol < 0.0) {
        auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        tol = 1e-9 * (*hi - *lo);
    }
    return from_eigenvalues_exact(std::move(exact), rational_from_double(tol),
                                  /*prefer_rational=*/false);
}

HermitianMatrix::HermitianMatrix(int dimension, std::vector<std::complex<double>> entries)
    : dim_(dimension), entries_(std::move(entries)) {
    if (dim_ < 1) throw std::invalid_argument("hermitian: dimension must be >= 1");
    if (entries_.size() != static_cast<std::size_t>(dim_) * dim_) {
        throw std::invalid_argument("hermitian: entry count does not match dimension");
    }
    double scale = 0.0;
    for (const auto& e : entries_) scale = std::max(scale, std::abs(e));
    const double tol = 1e-12 * std::max(scale, 1.0);
    for (int i = 0; i < dim_; ++i) {
        for (int j = i; j < dim_; ++j) {
            std::complex<double> a = entries_[static_cast<std::size_t>(i) * dim_ + j];
            std::complex<double> b = entries_[static_cast<std::size_t>(j) * dim_ + i];
            if (std::abs(a - std::conj(b)) > tol) {
                throw std::invalid_argument("hermitian: matrix is not Hermitian");
            }
        }
    }
    // Symmetrize exactly so the eigensolver sees a true Hermitian matrix.
    for (int i = 0; i < dim_; ++i) {
        for (int j = i + 1; j < dim_; ++j) {
            std::complex<double> a = entries_[static_cast<std::size_t>(i) * dim_ + j];
            std::complex<double> b = entries_[static_cast<std::size_t>(j) * dim_ + i];
            std::complex<double> avg = 0.5 * (a + std::conj(b));
            entries_[static_cast<std::size_t>(i) * dim_ + j] = avg;
            entries_[static_cast<std::size_t>(j) * dim_ + i] = std::conj(avg);
        }
        entries_[static_cast<std::size_t>(i) * dim_ + i] =
            entries_[static_cast<std::size_t>(i) * dim_ + i].real();
    }
}

HermitianMatrix HermitianMatrix::diagonal(const std::vector<double>& diag) {
    const int d = static_cast<int>(diag.size());
    std::vector<std::complex<double>> entries(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i) entries[static_cast<std::size_t>(i) * d + i] = diag[i];
    return HermitianMatrix(d, std::move(entries));
}

namespace {

double offdiag_norm(const std::vector<std::complex<double>>& a, int d) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (i != j) acc += std::norm(a[static_cast<std::size_t>(i) * d + j]);
        }
    }
    return std::sqrt(acc);
}

}  // namespace

Spectrum eigenvalues_of_hermitian(const HermitianMatrix& h, double multiplicity_tolerance,
                                  int dimension_cap) {
    const int d = h.dimension();
    if (d > dimension_cap) {
        throw unsupported_error("eigenvalues_of_hermitian: dimension exceeds cap");
    }
    if (d < 2) {
        throw std::invalid_argument("eigenvalues_of_hermitian: dimension must be >= 2");
    }
    std::vector<std::complex<double>> a(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) a[static_cast<std::size_t>(i) * d + j] = h.at(i, j);
    }
    auto A = [&](int i, int j) -> std::complex<double>& {
        return a[static_cast<std::size_t>(i) * d + j];
    };

    const double off0 = offdiag_norm(a, d);
    const double target = 1e-14 * off0;
    for (int sweep = 0; sweep < 100 && offdiag_norm(a, d) > target && off0 > 0.0; ++sweep) {
        for (int p = 0; p < d - 1; ++p) {
            for (int q = p + 1; q < d; ++q) {
                std::complex<double> hpq = A(p, q);
                double mag = std::abs(hpq);
                if (mag == 0.0) continue;
                double app = A(p, p).real();
                double aqq = A(q, q).real();
                // Unitary 2x2 rotation annihilating the (p,q) entry.
                double tau = (app - aqq) / (2.0 * mag);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                std::complex<double> w = hpq / mag;
                for (int k = 0; k < d; ++k) {
                    if (k == p || k == q) continue;
                    std::complex<double> akp = A(k, p);
                    std::complex<double> akq = A(k, q);
                    A(k, p) = akp * c + akq * s * std::conj(w);
                    A(k, q) = -akp * s * w + akq * c;
                    A(p, k) = std::conj(A(k, p));
                    A(q, k) = std::conj(A(k, q));
                }
                double npp = app * c * c + 2.0 * mag * c * s + aqq * s * s;
                double nqq = app * s * s - 2.0 * mag * c * s + aqq * c * c;
                A(p, p) = npp;
                A(q, q) = nqq;
                A(p, q) = 0.0;
                A(q, p) = 0.0;
            }
        }
    }

    std::vector<double> eigen(d);
    for (int i = 0; i < d; ++i) eigen[i] = A(i, i).real();
    return from_eigenvalues(eigen, multiplicity_tolerance);
}

}  // namespace qmicro
