#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmicro/spectrum.hpp"

namespace qmicro {

/// Counter-based generator name recorded in oracle metadata. Every sample's
/// randomness is derived from (seed, sample index), so results do not depend
/// on how samples are partitioned across workers.
inline constexpr const char* kGeneratorName = "splitmix64-counter";

/// Squared amplitudes of unit vectors drawn uniformly on the sphere of an
/// (n+1)-dimensional Hilbert space: rows are flat-Dirichlet simplex points.
struct SampleBatch {
    int n_plus_1 = 0;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::vector<double> simplex;  // row-major, count x n_plus_1

    const double* row(std::size_t i) const { return simplex.data() + i * n_plus_1; }
};

SampleBatch sample_pure_states(int n_plus_1, std::size_t count, std::uint64_t seed,
                               int workers = 1);

/// Histogram of H(psi) under the uniform measure, with per-bin expectations
/// integrated from the analytic density and a pooled chi-square statistic.
struct DosHistogram {
    std::vector<double> edges;            // bins + 1
    std::vector<std::uint64_t> observed;  // bins
    std::vector<double> expected;         // bins
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 0.0;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::string generator = kGeneratorName;
};

DosHistogram empirical_dos(const Spectrum& s, std::size_t count, int bins,
                           std::uint64_t seed, int workers = 1);

/// Conditional estimates on the hard window |H(psi) - E| <= window/2.
struct MicrocanonicalEstimate {
    std::vector<double> weights;     // conditional mean of each p_k
    std::vector<double> weight_se;   // standard errors of the means
    double dh = 0.0;                 // sqrt of the mean per-state quantum variance
    double dh_se = 0.0;
    double statistical_spread = 0.0;  // sd of H(psi) inside the window
    std::size_t kept = 0;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::string generator = kGeneratorName;
};

MicrocanonicalEstimate empirical_microcanonical(const Spectrum& s, double energy,
                                                double window, std::size_t count,
                                                std::uint64_t seed, int workers = 1);

}  // namespace qmicro
