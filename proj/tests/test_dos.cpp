#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qmicro/dos.hpp"
#include "qmicro/errors.hpp"
#include "qmicro/io.hpp"
#include "test_support.hpp"

using namespace qmicro;

namespace {

constexpr double kPi = std::numbers::pi;

Spectrum degenerate_ground() {
    return Spectrum::from_levels({{Rational(0), 2}, {Rational(1), 1}},
                                 /*prefer_rational=*/true);
}

}  // namespace

TEST_CASE("two-level system has constant density pi") {
    DensityOfStates d = density_of_states(build_uniform_ladder(1, 1.0));
    CHECK(d.backing() == Backing::rational);
    CHECK(d.evaluate(0.5) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(d.evaluate(0.999) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(d.evaluate(-1.0) == 0.0);
    CHECK(d.phase_space_volume() == doctest::Approx(kPi).epsilon(1e-15));
}

TEST_CASE("three-level tent") {
    DensityOfStates d = density_of_states(build_uniform_ladder(2, 1.0));
    CHECK(d.evaluate(0.5) == doctest::Approx(kPi * kPi / 4).epsilon(1e-14));
    CHECK(d.evaluate_left(1.0) == doctest::Approx(kPi * kPi / 2).epsilon(1e-14));
    CHECK(d.evaluate_right(1.0) == doctest::Approx(kPi * kPi / 2).epsilon(1e-14));
    CHECK(d.evaluate(1.5) == doctest::Approx(kPi * kPi / 4).epsilon(1e-14));
}

TEST_CASE("four-level cubic values and exact first piece") {
    DensityOfStates d = density_of_states(build_uniform_ladder(3, 1.0));
    CHECK(d.evaluate(1.5) == doctest::Approx(kPi * kPi * kPi / 8).epsilon(1e-14));
    const auto* ex = d.exact_poly();
    REQUIRE(ex != nullptr);
    // reduced density E^2/12 on the first interval
    CHECK(ex->pieces[0] == Poly<Rational>{Rational(0), Rational(0), rational(1, 12)});
    // second derivative pi^3/6 on the first interval
    CHECK(d.evaluate(0.5, 2) == doctest::Approx(std::pow(kPi, 3) / 6).epsilon(1e-14));
    CHECK(d.evaluate(0.5, 1) == doctest::Approx(std::pow(kPi, 3) / 12).epsilon(1e-14));
    CHECK_THROWS_AS(d.evaluate(0.5, 3), std::invalid_argument);
    CHECK(d.evaluate(-1.0) == 0.0);
    CHECK(d.evaluate(5.0) == 0.0);
}

TEST_CASE("degenerate ground state goes through the confluent path") {
    DensityOfStates d = density_of_states(degenerate_ground());
    // Omega = pi^2 (1 - E) on [0, 1]
    CHECK(d.evaluate(0.25) == doctest::Approx(kPi * kPi * 0.75).epsilon(1e-14));
    CHECK(d.evaluate(0.0) == doctest::Approx(kPi * kPi).epsilon(1e-14));
    const auto* ex = d.exact_poly();
    REQUIRE(ex != nullptr);
    CHECK(ex->pieces[0] == Poly<Rational>{Rational(1), Rational(-1)});
}

TEST_CASE("single distinct level is rejected") {
    CHECK_THROWS_AS(density_of_states(build_ising_chain(0.0, 0.0)),
                    degenerate_spectrum_error);
}

TEST_CASE("moment integrals") {
    DensityOfStates d = density_of_states(build_uniform_ladder(3, 1.0));
    const double vol = std::pow(kPi, 3) / 6;
    CHECK(d.integrate_moment(0, 3, 0) == doctest::Approx(vol).epsilon(1e-13));
    CHECK(d.integrate_moment(0, 3, 1) == doctest::Approx(vol * 1.5).epsilon(1e-13));
    CHECK(d.integrate_moment(-100, 100, 0) == doctest::Approx(vol).epsilon(1e-13));
    CHECK_THROWS_AS(d.integrate_moment(1, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(d.integrate_moment(0, 3, 3), std::invalid_argument);
    CHECK(d.reduced_moment_exact(Rational(0), Rational(3), 0) == rational(1, 6));

    DensityOfStates flat = density_of_states(build_uniform_ladder(1, 1.0));
    CHECK(flat.integrate_moment(0, 0.5, 0) == doctest::Approx(kPi / 2).epsilon(1e-15));
}

TEST_CASE("smoothness report on ladders and the degenerate five-level system") {
    auto ladder = density_of_states(build_uniform_ladder(3, 1.0)).smoothness_report();
    REQUIRE(ladder.size() == 4);
    for (const auto& k : ladder) {
        CHECK(k.continuity_order == 1);
        CHECK(k.jump_next_derivative != 0.0);
    }

    auto tent = density_of_states(build_uniform_ladder(2, 1.0)).smoothness_report();
    CHECK(tent[1].continuity_order == 0);
    CHECK(tent[1].jump_next_derivative ==
          doctest::Approx(-kPi * kPi).epsilon(1e-14));

    Spectrum five = from_eigenvalues({0, 1, 1, 2, 3}, 0.0);
    auto rep = density_of_states(
                   Spectrum::from_levels(
                       {{Rational(0), 1}, {Rational(1), 2}, {Rational(2), 1}, {Rational(3), 1}},
                       true))
                   .smoothness_report();
    REQUIRE(rep.size() == 4);
    CHECK(rep[0].continuity_order == 2);  // simple edge knot
    CHECK(rep[1].continuity_order == 1);  // double knot
    CHECK(rep[2].continuity_order == 2);
    CHECK(rep[3].continuity_order == 2);
    // float path agrees
    auto repf = density_of_states(five).smoothness_report();
    for (std::size_t i = 0; i < rep.size(); ++i) {
        CHECK(repf[i].continuity_order == rep[i].continuity_order);
    }
}

TEST_CASE("normalization and first moment, exact and floating") {
    std::mt19937_64 rng(321);
    for (int trial = 0; trial < 40; ++trial) {
        Spectrum s = qmicro::testing::random_spectrum(rng);
        if (s.distinct_count() < 2) continue;
        const int n = s.n();
        DensityOfStates d = density_of_states(s, Backing::rational);
        Rational lo = s.energy_exact(0);
        Rational hi = s.energy_exact(s.distinct_count() - 1);
        Rational fact(factorial_z(static_cast<unsigned>(n)));
        CHECK(d.reduced_moment_exact(lo, hi, 0) == Rational(1 / fact));
        CHECK(d.reduced_moment_exact(lo, hi, 1) ==
              Rational(s.mean_energy_exact() / fact));

        DensityOfStates fd = density_of_states(s, Backing::floating);
        double vol = fd.phase_space_volume();
        CHECK(fd.integrate_moment(fd.e_min(), fd.e_max(), 0) ==
              doctest::Approx(vol).epsilon(1e-10));
        CHECK(fd.integrate_moment(fd.e_min(), fd.e_max(), 1) ==
              doctest::Approx(vol * mean_energy(s)).epsilon(1e-10));
    }
}

TEST_CASE("nonnegativity at sampled points") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Spectrum s = qmicro::testing::random_spectrum(rng);
        DensityOfStates d = density_of_states(s, Backing::floating);
        double peak = 0.0;
        for (int i = 0; i < 1000; ++i) {
            double e = d.e_min() + unif(rng) * (d.e_max() - d.e_min());
            peak = std::max(peak, d.evaluate(e));
        }
        for (int i = 0; i < 1000; ++i) {
            double e = d.e_min() + unif(rng) * (d.e_max() - d.e_min());
            CHECK(d.evaluate(e) >= -1e-10 * peak);
        }
    }
}

namespace {

Rational reduced_exact_at(const DensityOfStates& d, const Rational& e) {
    return d.exact_poly()->value(e);
}

}  // namespace

TEST_CASE("reflection covariance is exact") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 15; ++trial) {
        Spectrum s = qmicro::testing::random_spectrum(rng);
        std::vector<SpectrumLevel> reflected;
        for (int j = s.distinct_count() - 1; j >= 0; --j) {
            reflected.push_back(SpectrumLevel{Rational(-s.energy_exact(j)), s.multiplicity(j)});
        }
        Spectrum sr = Spectrum::from_levels(std::move(reflected), true);
        DensityOfStates d = density_of_states(s, Backing::rational);
        DensityOfStates dr = density_of_states(sr, Backing::rational);
        std::uniform_int_distribution<int> num(1, 63);
        for (int i = 0; i < 40; ++i) {
            // sixteenth-grid points with odd numerators never hit quarter knots
            Rational e(s.energy_exact(0) +
                       (s.energy_exact(s.distinct_count() - 1) - s.energy_exact(0)) *
                           rational(2 * num(rng) - 1, 128));
            CHECK(reduced_exact_at(dr, Rational(-e)) == reduced_exact_at(d, e));
        }
    }
}

TEST_CASE("affine covariance is exact") {
    std::mt19937_64 rng(56);
    const Rational a = rational(3, 2);
    const Rational b = rational(-7, 4);
    for (int trial = 0; trial < 15; ++trial) {
        Spectrum s = qmicro::testing::random_spectrum(rng);
        std::vector<SpectrumLevel> mapped;
        for (int j = 0; j < s.distinct_count(); ++j) {
            mapped.push_back(SpectrumLevel{Rational(a * s.energy_exact(j) + b),
                                           s.multiplicity(j)});
        }
        Spectrum sm = Spectrum::from_levels(std::move(mapped), true);
        DensityOfStates d = density_of_states(s, Backing::rational);
        DensityOfStates dm = density_of_states(sm, Backing::rational);
        std::uniform_int_distribution<int> num(1, 63);
        for (int i = 0; i < 40; ++i) {
            Rational e(s.energy_exact(0) +
                       (s.energy_exact(s.distinct_count() - 1) - s.energy_exact(0)) *
                           rational(2 * num(rng) - 1, 128));
            CHECK(Rational(reduced_exact_at(dm, Rational(a * e + b)) * a) ==
                  reduced_exact_at(d, e));
        }
    }
}

TEST_CASE("direct alternating sum agrees with the divided-difference build") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> dim_dist(3, 8);
    std::uniform_int_distribution<int> tick(-10, 20);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const int dim = dim_dist(rng);
        std::vector<int> ticks;
        while (static_cast<int>(ticks.size()) < dim) {
            int t = tick(rng);
            bool dup = false;
            for (int u : ticks) dup = dup || u == t;
            if (!dup) ticks.push_back(t);
        }
        std::sort(ticks.begin(), ticks.end());
        std::vector<double> eig(ticks.begin(), ticks.end());
        DensityOfStates d = density_of_states(from_eigenvalues(eig, 0.0));
        CHECK(d.backing() == Backing::floating);
        double peak = 0.0;
        for (int i = 0; i < 200; ++i) {
            peak = std::max(peak, d.evaluate(d.e_min() + unif(rng) * (d.e_max() - d.e_min())));
        }
        for (int i = 0; i < 1000; ++i) {
            double e = d.e_min() + unif(rng) * (d.e_max() - d.e_min());
            double direct = qmicro::testing::direct_nondegenerate_omega(eig, e);
            CHECK(d.evaluate(e) == doctest::Approx(direct).epsilon(1e-8).scale(peak));
        }
    }
}

TEST_CASE("uniform ladder matches the closed-form alternating sum symbolically") {
    for (int n = 2; n <= 6; ++n) {
        DensityOfStates d = density_of_states(build_uniform_ladder(n, 1.0));
        const auto* ex = d.exact_poly();
        REQUIRE(ex != nullptr);
        const Rational nfact(factorial_z(static_cast<unsigned>(n)));
        const Rational nm1fact(factorial_z(static_cast<unsigned>(n - 1)));
        for (int j = 0; j < n; ++j) {
            // reduced closed form on [j, j+1): (-1)^n/(n-1)! *
            //   sum_{k=j+1}^{n} (-1)^k C(n,k)/n! * (k - E)^{n-1}, in t = E - j
            Poly<Rational> expect(static_cast<std::size_t>(n), Rational(0));
            for (int k = j + 1; k <= n; ++k) {
                Rational w(Rational(binomial_z(n, k)) / nfact);
                if (k % 2 == 1) w = -w;
                for (int s = 0; s <= n - 1; ++s) {
                    Rational term(w * Rational(binomial_z(n - 1, s)));
                    Rational base(k - j);
                    Rational pw(1);
                    for (int e = 0; e < n - 1 - s; ++e) pw *= base;
                    term = term * pw;
                    if (s % 2 == 1) term = -term;
                    expect[s] += term;
                }
            }
            Rational sign((n % 2 == 0) ? 1 : -1);
            for (auto& c : expect) c = Rational(c * sign / nm1fact);
            CHECK(ex->pieces[j] == expect);
        }
    }
}

TEST_CASE("vanishing order at the support edges") {
    std::mt19937_64 rng(91);
    for (int trial = 0; trial < 25; ++trial) {
        Spectrum s = qmicro::testing::random_spectrum(rng);
        if (s.distinct_count() < 2) continue;
        const int n = s.n();
        DensityOfStates d = density_of_states(s, Backing::rational);
        const auto* ex = d.exact_poly();
        const int d1 = s.multiplicity(0);
        const auto& first = ex->pieces.front();
        for (int c = 0; c < n - d1; ++c) CHECK(first[c] == Rational(0));
        CHECK(first[n - d1] != Rational(0));
        if (d1 == 1) {
            // degree bound forces the pure power c * (E - E_min)^{n-1}
            for (int c = 0; c < n - 1; ++c) CHECK(first[c] == Rational(0));
        }
        const int dm = s.multiplicity(s.distinct_count() - 1);
        const auto& last = ex->pieces.back();
        Rational w(ex->knots.back() - ex->knots[ex->knots.size() - 2]);
        for (int c = 0; c < n - dm; ++c) CHECK(poly_deriv_eval(last, w, c) == Rational(0));
        CHECK(poly_deriv_eval(last, w, n - dm) != Rational(0));
    }
}

TEST_CASE("smoothness class equals n-1-delta at every knot") {
    std::mt19937_64 rng(92);
    for (int trial = 0; trial < 25; ++trial) {
        Spectrum s = qmicro::testing::random_spectrum(rng);
        if (s.distinct_count() < 2) continue;
        const int n = s.n();
        DensityOfStates d = density_of_states(s, Backing::rational);
        auto rep = d.smoothness_report();
        for (const auto& k : rep) {
            CHECK(k.continuity_order == n - 1 - k.multiplicity);
            CHECK(k.jump_next_derivative != 0.0);
        }
    }
}

TEST_CASE("large ladder: exact normalization and smoothness survive high orders") {
    DensityOfStates d = density_of_states(build_uniform_ladder(24, 1.0));
    const auto* ex = d.exact_poly();
    REQUIRE(ex != nullptr);
    Rational fact(factorial_z(24));
    CHECK(d.reduced_moment_exact(Rational(0), Rational(24), 0) == Rational(1 / fact));
    auto rep = d.smoothness_report();
    for (const auto& k : rep) {
        CHECK(k.continuity_order == 22);
    }
    CHECK(d.evaluate(12.0) > 0.0);
}

TEST_CASE("serialization round trip is bit exact") {
    DensityOfStates d = density_of_states(build_ising_chain(0.25, 1.0));
    nlohmann::json j = dos_to_json(d);
    std::string text = j.dump();
    DensityOfStates back = dos_from_json(nlohmann::json::parse(text));
    REQUIRE(back.backing() == Backing::rational);
    const auto* a = d.exact_poly();
    const auto* b = back.exact_poly();
    REQUIRE(a != nullptr);
    REQUIRE(b != nullptr);
    REQUIRE(a->knots.size() == b->knots.size());
    for (std::size_t i = 0; i < a->knots.size(); ++i) CHECK(a->knots[i] == b->knots[i]);
    REQUIRE(a->pieces.size() == b->pieces.size());
    for (std::size_t i = 0; i < a->pieces.size(); ++i) {
        CHECK(a->pieces[i] == b->pieces[i]);
    }

    DensityOfStates f = density_of_states(from_eigenvalues({0.0, 0.3, 1.7, 2.2}, 0.0));
    nlohmann::json jf = dos_to_json(f);
    DensityOfStates backf = dos_from_json(nlohmann::json::parse(jf.dump()));
    REQUIRE(backf.backing() == Backing::floating);
    for (std::size_t i = 0; i < f.float_poly().pieces.size(); ++i) {
        CHECK(f.float_poly().pieces[i] == backf.float_poly().pieces[i]);
    }
}
