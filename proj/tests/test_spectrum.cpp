#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <random>

#include "qmicro/errors.hpp"
#include "qmicro/spectrum.hpp"
#include "test_support.hpp"

using namespace qmicro;

TEST_CASE("uniform ladder") {
    Spectrum s = build_uniform_ladder(3, 1.0);
    REQUIRE(s.distinct_count() == 4);
    CHECK(s.dimension() == 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(s.energy(k) == static_cast<double>(k));
        CHECK(s.multiplicity(k) == 1);
    }
    CHECK(s.prefer_rational());

    Spectrum tiny = build_uniform_ladder(1, 1.0);
    CHECK(tiny.dimension() == 2);
    CHECK(tiny.e_max() == 1.0);

    Spectrum scaled = build_uniform_ladder(5, 0.5);
    CHECK(scaled.dimension() == 6);
    CHECK(scaled.energy(1) == 0.5);
    CHECK(scaled.e_max() == 2.5);

    CHECK_THROWS_AS(build_uniform_ladder(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_uniform_ladder(3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_uniform_ladder(3, -1.0), std::invalid_argument);
}

TEST_CASE("ising chain closed forms") {
    Spectrum s = build_ising_chain(0.25, 1.0);
    REQUIRE(s.distinct_count() == 4);
    CHECK(s.dimension() == 8);
    CHECK(s.energy(0) == -3.75);
    CHECK(s.multiplicity(0) == 1);
    CHECK(s.energy(1) == -0.75);
    CHECK(s.multiplicity(1) == 3);
    CHECK(s.energy(2) == 1.25);
    CHECK(s.multiplicity(2) == 3);
    CHECK(s.energy(3) == 2.25);
    CHECK(s.multiplicity(3) == 1);

    Spectrum zero = build_ising_chain(0.0, 0.0);
    REQUIRE(zero.distinct_count() == 1);
    CHECK(zero.energy(0) == 0.0);
    CHECK(zero.multiplicity(0) == 8);

    Spectrum nofield = build_ising_chain(1.0, 0.0);
    REQUIRE(nofield.distinct_count() == 2);
    CHECK(nofield.energy(0) == -3.0);
    CHECK(nofield.multiplicity(0) == 2);
    CHECK(nofield.energy(1) == 1.0);
    CHECK(nofield.multiplicity(1) == 6);

    Spectrum nocoupling = build_ising_chain(0.0, 1.0);
    REQUIRE(nocoupling.distinct_count() == 4);
    CHECK(nocoupling.energy(0) == -3.0);
    CHECK(nocoupling.multiplicity(1) == 3);
    CHECK(nocoupling.energy(3) == 3.0);

    Spectrum balanced = build_ising_chain(1.0, 1.0);  // J = B merges two levels
    REQUIRE(balanced.distinct_count() == 3);
    CHECK(balanced.energy(0) == -6.0);
    CHECK(balanced.energy(1) == 0.0);
    CHECK(balanced.multiplicity(1) == 4);
    CHECK(balanced.energy(2) == 2.0);
    CHECK(balanced.multiplicity(2) == 3);
}

TEST_CASE("ising chain generic parameters match the four closed-form levels") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> par(-2.0, 2.0);
    int checked = 0;
    while (checked < 50) {
        double j = par(rng), b = par(rng);
        if (b == 0.0 || j == 0.0 || j == b || j == -b) continue;
        Spectrum s = build_ising_chain(j, b);
        REQUIRE(s.distinct_count() == 4);
        std::vector<double> expected = {-3 * j - 3 * b, j - b, j + b, -3 * j + 3 * b};
        std::vector<int> mult = {1, 3, 3, 1};
        // sort expectation jointly
        std::vector<std::pair<double, int>> ref;
        for (int k = 0; k < 4; ++k) ref.emplace_back(expected[k], mult[k]);
        std::sort(ref.begin(), ref.end());
        for (int k = 0; k < 4; ++k) {
            CHECK(s.energy(k) == doctest::Approx(ref[k].first).epsilon(1e-15));
            CHECK(s.multiplicity(k) == ref[k].second);
        }
        ++checked;
    }
}

TEST_CASE("from_eigenvalues sorting and merging") {
    Spectrum fig2 = from_eigenvalues({0, 1, 1, 2, 3}, 0.0);
    REQUIRE(fig2.distinct_count() == 4);
    CHECK(fig2.multiplicity(1) == 2);
    CHECK(fig2.dimension() == 5);

    Spectrum sorted = from_eigenvalues({3, 0, 1, 2}, 0.0);
    for (int k = 0; k < 4; ++k) CHECK(sorted.energy(k) == k);

    Spectrum merged = from_eigenvalues({0.0, 1e-13, 1.0}, 1e-9);
    REQUIRE(merged.distinct_count() == 2);
    CHECK(merged.energy(0) == doctest::Approx(5e-14).epsilon(1e-12));
    CHECK(merged.multiplicity(0) == 2);
    CHECK(merged.energy(1) == 1.0);

    CHECK_THROWS_AS(from_eigenvalues({1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("from_eigenvalues is idempotent on expanded spectra") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        Spectrum s = qmicro::testing::random_spectrum(rng);
        Spectrum again = from_eigenvalues(s.expanded(), 0.0);
        REQUIRE(again.distinct_count() == s.distinct_count());
        for (int j = 0; j < s.distinct_count(); ++j) {
            CHECK(again.energy_exact(j) == s.energy_exact(j));
            CHECK(again.multiplicity(j) == s.multiplicity(j));
        }
    }
}

TEST_CASE("mean energy") {
    CHECK(mean_energy(build_uniform_ladder(3, 1.0)) == 1.5);
    Spectrum degen = Spectrum::from_levels({{Rational(0), 2}, {Rational(1), 1}});
    CHECK(mean_energy(degen) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(mean_energy(build_ising_chain(0.25, 1.0)) == 0.0);
}

TEST_CASE("mean energy respects input order and affine shifts") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Spectrum s = qmicro::testing::random_spectrum(rng);
        std::vector<double> vals = s.expanded();
        std::shuffle(vals.begin(), vals.end(), rng);
        CHECK(mean_energy(from_eigenvalues(vals, 0.0)) ==
              doctest::Approx(mean_energy(s)).epsilon(1e-14));

        std::vector<double> shifted;
        for (double v : vals) shifted.push_back(v + 2.5);
        CHECK(mean_energy(from_eigenvalues(shifted, 0.0)) ==
              doctest::Approx(mean_energy(s) + 2.5).epsilon(1e-13));
    }
}

namespace {

using cmat = std::vector<std::complex<double>>;

cmat matmul(const cmat& a, const cmat& b, int d) {
    cmat out(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            std::complex<double> acc = 0.0;
            for (int k = 0; k < d; ++k) {
                acc += a[static_cast<std::size_t>(i) * d + k] * b[static_cast<std::size_t>(k) * d + j];
            }
            out[static_cast<std::size_t>(i) * d + j] = acc;
        }
    }
    return out;
}

cmat adjoint(const cmat& a, int d) {
    cmat out(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            out[static_cast<std::size_t>(i) * d + j] =
                std::conj(a[static_cast<std::size_t>(j) * d + i]);
        }
    }
    return out;
}

// Unitary from a chain of complex Givens rotations.
cmat random_unitary(int d, std::mt19937_64& rng) {
    cmat u(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i) u[static_cast<std::size_t>(i) * d + i] = 1.0;
    std::uniform_real_distribution<double> ang(0.0, 6.28318530717958648);
    for (int p = 0; p < d - 1; ++p) {
        for (int q = p + 1; q < d; ++q) {
            double th = ang(rng), ph = ang(rng);
            cmat g(static_cast<std::size_t>(d) * d);
            for (int i = 0; i < d; ++i) g[static_cast<std::size_t>(i) * d + i] = 1.0;
            g[static_cast<std::size_t>(p) * d + p] = std::cos(th);
            g[static_cast<std::size_t>(p) * d + q] =
                -std::sin(th) * std::exp(std::complex<double>(0, ph));
            g[static_cast<std::size_t>(q) * d + p] =
                std::sin(th) * std::exp(std::complex<double>(0, -ph));
            g[static_cast<std::size_t>(q) * d + q] = std::cos(th);
            u = matmul(u, g, d);
        }
    }
    return u;
}

}  // namespace

TEST_CASE("hermitian eigenvalues: diagonal and pauli-x") {
    Spectrum diag = eigenvalues_of_hermitian(HermitianMatrix::diagonal({0, 1, 2, 3}), 0.0);
    REQUIRE(diag.distinct_count() == 4);
    for (int k = 0; k < 4; ++k) CHECK(diag.energy(k) == doctest::Approx(k).epsilon(1e-14));

    HermitianMatrix px(2, {0.0, 1.0, 1.0, 0.0});
    Spectrum flip = eigenvalues_of_hermitian(px);
    REQUIRE(flip.distinct_count() == 2);
    CHECK(flip.energy(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(flip.energy(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hermitian eigenvalues: ising diagonal matches the builder") {
    Spectrum ising = build_ising_chain(0.25, 1.0);
    std::vector<double> diag;
    for (int bits = 0; bits < 8; ++bits) {
        int s[3];
        for (int k = 0; k < 3; ++k) s[k] = (bits >> k) & 1 ? 1 : -1;
        diag.push_back(-0.25 * (s[0] * s[1] + s[1] * s[2] + s[2] * s[0]) -
                       1.0 * (s[0] + s[1] + s[2]));
    }
    Spectrum viaH = eigenvalues_of_hermitian(HermitianMatrix::diagonal(diag));
    REQUIRE(viaH.distinct_count() == ising.distinct_count());
    for (int j = 0; j < ising.distinct_count(); ++j) {
        CHECK(viaH.energy(j) == doctest::Approx(ising.energy(j)).epsilon(1e-14));
        CHECK(viaH.multiplicity(j) == ising.multiplicity(j));
    }
}

TEST_CASE("hermitian eigenvalues survive a unitary conjugation") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        Spectrum s = qmicro::testing::random_spectrum(rng, 8);
        std::vector<double> eig = s.expanded();
        const int d = static_cast<int>(eig.size());
        cmat dm(static_cast<std::size_t>(d) * d);
        for (int i = 0; i < d; ++i) dm[static_cast<std::size_t>(i) * d + i] = eig[i];
        cmat u = random_unitary(d, rng);
        cmat h = matmul(matmul(u, dm, d), adjoint(u, d), d);
        Spectrum back = eigenvalues_of_hermitian(HermitianMatrix(d, h), 1e-8);
        REQUIRE(back.distinct_count() == s.distinct_count());
        const double scale = std::max(std::abs(s.e_min()), std::abs(s.e_max()));
        for (int j = 0; j < s.distinct_count(); ++j) {
            CHECK(back.energy(j) ==
                  doctest::Approx(s.energy(j)).epsilon(1e-10).scale(scale));
            CHECK(back.multiplicity(j) == s.multiplicity(j));
        }
    }
}

TEST_CASE("hermitian round trip on random spectra") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 20; ++trial) {
        Spectrum s = qmicro::testing::random_spectrum(rng);
        Spectrum back =
            eigenvalues_of_hermitian(HermitianMatrix::diagonal(s.expanded()), 0.0);
        REQUIRE(back.distinct_count() == s.distinct_count());
        for (int j = 0; j < s.distinct_count(); ++j) {
            CHECK(back.energy(j) == doctest::Approx(s.energy(j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("hermitian validation") {
    CHECK_THROWS_AS(HermitianMatrix(2, {0.0, 1.0, 2.0, 0.0}), std::invalid_argument);
    std::vector<std::complex<double>> big(static_cast<std::size_t>(65) * 65);
    for (int i = 0; i < 65; ++i) big[static_cast<std::size_t>(i) * 65 + i] = i;
    CHECK_THROWS_AS(eigenvalues_of_hermitian(HermitianMatrix(65, big)), unsupported_error);
}

TEST_CASE("spectrum invariants are enforced") {
    CHECK_THROWS_AS(Spectrum::from_levels({{Rational(0), 1}}), std::invalid_argument);
    CHECK_THROWS_AS(Spectrum::from_levels({{Rational(0), 1}, {Rational(0), 1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Spectrum::from_levels({{Rational(0), 0}, {Rational(1), 2}}),
                    std::invalid_argument);
}
