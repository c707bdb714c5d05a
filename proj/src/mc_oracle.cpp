#include "qmicro/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "qmicro/dos.hpp"
#include "qmicro/errors.hpp"
#include "qmicro/stats.hpp"

namespace qmicro {

namespace {

struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

SplitMix64 sample_stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g{seed ^ (0xD1B54A32D192ED03ull * (index + 1))};
    g.next();
    return g;
}

double uniform01(SplitMix64& g) { return (g.next() >> 11) * 0x1.0p-53; }

/// Flat Dirichlet row via normalized exponential spacings.
void simplex_row(std::uint64_t seed, std::uint64_t index, int dim, double* out) {
    SplitMix64 g = sample_stream(seed, index);
    double sum = 0.0;
    for (int k = 0; k < dim; ++k) {
        double e = -std::log1p(-uniform01(g));
        out[k] = e;
        sum += e;
    }
    if (sum == 0.0) {
        out[0] = 1.0;
        sum = 1.0;
    }
    for (int k = 0; k < dim; ++k) out[k] /= sum;
}

constexpr std::size_t kBlock = 4096;

/// Runs fn(block_index, sample_begin, sample_end) over all blocks. Blocks are
/// striped across workers; per-sample randomness is index-keyed, so any
/// block-indexed reduction is independent of the worker count.
template <class Fn>
void for_each_block(std::size_t count, int workers, Fn fn) {
    const std::size_t blocks = (count + kBlock - 1) / kBlock;
    workers = std::max(1, std::min<int>(workers, static_cast<int>(blocks)));
    if (workers == 1) {
        for (std::size_t b = 0; b < blocks; ++b) {
            fn(b, b * kBlock, std::min(count, (b + 1) * kBlock));
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t b = w; b < blocks; b += workers) {
                fn(b, b * kBlock, std::min(count, (b + 1) * kBlock));
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

SampleBatch sample_pure_states(int n_plus_1, std::size_t count, std::uint64_t seed,
                               int workers) {
    if (n_plus_1 < 2) throw std::invalid_argument("sample_pure_states: dimension must be >= 2");
    if (count < 1) throw std::invalid_argument("sample_pure_states: count must be >= 1");
    SampleBatch batch;
    batch.n_plus_1 = n_plus_1;
    batch.count = count;
    batch.seed = seed;
    batch.simplex.resize(count * static_cast<std::size_t>(n_plus_1));
    for_each_block(count, workers, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            simplex_row(seed, i, n_plus_1, batch.simplex.data() + i * n_plus_1);
        }
    });
    return batch;
}

DosHistogram empirical_dos(const Spectrum& s, std::size_t count, int bins,
                           std::uint64_t seed, int workers) {
    if (bins < 10) throw std::invalid_argument("empirical_dos: need at least 10 bins");
    if (count < 10000) throw std::invalid_argument("empirical_dos: need at least 1e4 samples");

    const int dim = s.dimension();
    const std::vector<double> energies = s.expanded();
    const double lo = s.e_min();
    const double hi = s.e_max();
    const double width = (hi - lo) / bins;

    DosHistogram h;
    h.count = count;
    h.seed = seed;
    h.edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) h.edges[b] = lo + b * width;
    h.edges[bins] = hi;

    const std::size_t blocks = (count + kBlock - 1) / kBlock;
    std::vector<std::vector<std::uint64_t>> partial(blocks);
    for_each_block(count, workers, [&](std::size_t b, std::size_t first, std::size_t last) {
        std::vector<std::uint64_t> local(bins, 0);
        std::vector<double> p(dim);
        for (std::size_t i = first; i < last; ++i) {
            simplex_row(seed, i, dim, p.data());
            double energy = 0.0;
            for (int k = 0; k < dim; ++k) energy += p[k] * energies[k];
            int idx = static_cast<int>((energy - lo) / width);
            idx = std::clamp(idx, 0, bins - 1);
            ++local[idx];
        }
        partial[b] = std::move(local);
    });
    h.observed.assign(bins, 0);
    for (const auto& local : partial) {
        for (int b = 0; b < bins; ++b) h.observed[b] += local[b];
    }

    // Per-bin expectations from the analytic density: Omega integrates to the
    // phase-space volume, so n! * reduced is the probability density of H.
    DensityOfStates d = density_of_states(s);
    double nfact = 1.0;
    for (int k = 2; k <= s.n(); ++k) nfact *= k;
    h.expected.resize(bins);
    for (int b = 0; b < bins; ++b) {
        double mass = nfact * d.float_poly().moment(h.edges[b], h.edges[b + 1], 0);
        h.expected[b] = static_cast<double>(count) * mass;
    }

    // Pool adjacent cells below the usual expectation cutoff.
    const double cutoff = 5.0;
    double chi2 = 0.0;
    int cells = 0;
    double acc_obs = 0.0, acc_exp = 0.0;
    double pend_obs = 0.0, pend_exp = 0.0;
    for (int b = 0; b < bins; ++b) {
        acc_obs += static_cast<double>(h.observed[b]);
        acc_exp += h.expected[b];
        if (acc_exp >= cutoff) {
            if (pend_exp > 0.0) {
                chi2 += (pend_obs - pend_exp) * (pend_obs - pend_exp) / pend_exp;
                ++cells;
            }
            pend_obs = acc_obs;
            pend_exp = acc_exp;
            acc_obs = 0.0;
            acc_exp = 0.0;
        }
    }
    pend_obs += acc_obs;
    pend_exp += acc_exp;
    if (pend_exp > 0.0) {
        chi2 += (pend_obs - pend_exp) * (pend_obs - pend_exp) / pend_exp;
        ++cells;
    }
    h.chi2 = chi2;
    h.dof = std::max(1, cells - 1);
    h.p_value = chi2_pvalue(h.chi2, h.dof);
    return h;
}

MicrocanonicalEstimate empirical_microcanonical(const Spectrum& s, double energy,
                                                double window, std::size_t count,
                                                std::uint64_t seed, int workers) {
    if (!(window > 0.0)) throw std::invalid_argument("empirical_microcanonical: window must be > 0");
    if (count < 1) throw std::invalid_argument("empirical_microcanonical: count must be >= 1");

    const int dim = s.dimension();
    const std::vector<double> energies = s.expanded();
    const double half = 0.5 * window;

    struct Accum {
        std::size_t kept = 0;
        std::vector<double> psum, psq;
        double qsum = 0.0, qsq = 0.0;
        double hsum = 0.0, hsq = 0.0;
    };
    const std::size_t blocks = (count + kBlock - 1) / kBlock;
    std::vector<Accum> partial(blocks);
    for_each_block(count, workers, [&](std::size_t b, std::size_t first, std::size_t last) {
        Accum acc;
        acc.psum.assign(dim, 0.0);
        acc.psq.assign(dim, 0.0);
        std::vector<double> p(dim);
        for (std::size_t i = first; i < last; ++i) {
            simplex_row(seed, i, dim, p.data());
            double h1 = 0.0, h2 = 0.0;
            for (int k = 0; k < dim; ++k) {
                h1 += p[k] * energies[k];
                h2 += p[k] * energies[k] * energies[k];
            }
            if (std::abs(h1 - energy) > half) continue;
            ++acc.kept;
            for (int k = 0; k < dim; ++k) {
                acc.psum[k] += p[k];
                acc.psq[k] += p[k] * p[k];
            }
            double qvar = h2 - h1 * h1;
            acc.qsum += qvar;
            acc.qsq += qvar * qvar;
            acc.hsum += h1;
            acc.hsq += h1 * h1;
        }
        partial[b] = std::move(acc);
    });

    Accum total;
    total.psum.assign(dim, 0.0);
    total.psq.assign(dim, 0.0);
    for (const auto& acc : partial) {
        if (acc.psum.empty()) continue;
        total.kept += acc.kept;
        for (int k = 0; k < dim; ++k) {
            total.psum[k] += acc.psum[k];
            total.psq[k] += acc.psq[k];
        }
        total.qsum += acc.qsum;
        total.qsq += acc.qsq;
        total.hsum += acc.hsum;
        total.hsq += acc.hsq;
    }

    if (total.kept < 1000) {
        throw insufficient_statistics_error(
            "empirical_microcanonical: only " + std::to_string(total.kept) +
                " samples inside the window (need 1000)",
            total.kept);
    }

    const double nk = static_cast<double>(total.kept);
    MicrocanonicalEstimate out;
    out.kept = total.kept;
    out.count = count;
    out.seed = seed;
    out.weights.resize(dim);
    out.weight_se.resize(dim);
    for (int k = 0; k < dim; ++k) {
        double mean = total.psum[k] / nk;
        double var = std::max(0.0, (total.psq[k] - nk * mean * mean) / (nk - 1.0));
        out.weights[k] = mean;
        out.weight_se[k] = std::sqrt(var / nk);
    }
    double qmean = total.qsum / nk;
    double qvar = std::max(0.0, (total.qsq - nk * qmean * qmean) / (nk - 1.0));
    out.dh = std::sqrt(std::max(0.0, qmean));
    out.dh_se = out.dh > 0.0 ? std::sqrt(qvar / nk) / (2.0 * out.dh) : 0.0;
    double hmean = total.hsum / nk;
    out.statistical_spread =
        std::sqrt(std::max(0.0, (total.hsq - nk * hmean * hmean) / (nk - 1.0)));
    return out;
}

}  // namespace qmicro
