#include <doctest.h>

#include <array>
#include <boost/math/special_functions/ellint_1.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "plate/errors.hpp"
#include "plate/floquet.hpp"
#include "duffing_oracle.hpp"

using namespace plate;

namespace {

const PlateConfig kDefaults;
constexpr std::array<double, 10> kLongitudinal = {0.96001, 3.84015, 8.64076, 15.3624, 24.0058,
                                                  34.5720, 47.0622, 61.4776, 77.8200, 96.0909};
constexpr double kTorsional2 = 10946.4548;

double duffing_period_elliptic(double mu, double E) {
    const double root = std::sqrt(mu * mu + 4.0 * E);
    const double tm = root - mu, tp = root + mu;
    const double k = std::sqrt(tm / (tm + tp));
    return 4.0 * std::numbers::sqrt2 * boost::math::ellint_1(k) / std::sqrt(tm + tp);
}

TwoModeSystem longitudinal_over_torsional(int m) {
    return TwoModeSystem({m, Parity::Longitudinal, 1}, kLongitudinal[m - 1], {2, Parity::Torsional, 1},
                         kTorsional2, kDefaults);
}

}  // namespace

TEST_CASE("nondimensionalization") {
    const TwoModeSystem sys({6, Parity::Longitudinal, 1}, 34.57, {2, Parity::Torsional, 1}, 10946.5,
                            kDefaults);
    const auto r = nondimensionalize(sys, 3.0 * 1234.5);
    CHECK(r.mu == doctest::Approx(34.09 / 3).epsilon(1e-14));
    CHECK(r.nu == doctest::Approx(10946.02 / 3).epsilon(1e-14));
    CHECK(r.gamma == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
    CHECK(r.E0 == doctest::Approx(1234.5).epsilon(1e-15));
    CHECK(r.b_star == doctest::Approx(std::sqrt(2 * 1234.5)).epsilon(1e-15));
    CHECK(r.epsilon * r.b_star == doctest::Approx(r.mu).epsilon(1e-15));

    const TwoModeSystem g({2, Parity::Longitudinal, 1}, 3.84, {3, Parity::Longitudinal, 1}, 8.64, kDefaults);
    CHECK(nondimensionalize(g, 1.0).gamma == 2.25);

    const PlateConfig heavy(PlateConfig::kDefaultHalfWidth, 0.2, 5.0, 3.0);
    const TwoModeSystem bad({1, Parity::Longitudinal, 1}, 0.96, {2, Parity::Longitudinal, 1}, 3.84, heavy);
    CHECK_THROWS_AS(nondimensionalize(bad, 1.0), NonPositiveStiffnessParameters);
}

TEST_CASE("interval classifier") {
    auto check = [](double g, GammaClass::Kind kind, int j) {
        const auto c = classify_gamma(g);
        CHECK_MESSAGE(c.kind == kind, "gamma = " << g);
        CHECK_MESSAGE(c.j == j, "gamma = " << g);
        if (kind != GammaClass::Kind::Boundary) {
            CHECK(c.lo < g);
            CHECK(g < c.hi);
        }
    };
    check(2.25, GammaClass::Kind::InstabilityInterval, 0);
    check(4.0, GammaClass::Kind::StabilityInterval, 1);
    check(12.25, GammaClass::Kind::StabilityInterval, 2);
    check(1.0 / 9, GammaClass::Kind::StabilityInterval, 0);
    check(6.25, GammaClass::Kind::InstabilityInterval, 1);
    check(9.0, GammaClass::Kind::InstabilityInterval, 1);
    check(20.25, GammaClass::Kind::InstabilityInterval, 2);
    check(25.0, GammaClass::Kind::StabilityInterval, 3);
    for (double e : {1.0, 3.0, 6.0, 10.0, 15.0, 21.0, 28.0, 36.0})
        CHECK(classify_gamma(e).kind == GammaClass::Kind::Boundary);
    // The intervals tile (0, inf): consecutive classes share endpoints.
    // The intervals tile (0, inf): each class ends where the next begins.
    double edge = 0.0;
    for (int k = 0; k < 12; ++k) {
        const auto c = classify_gamma(edge + 0.5);
        CHECK(c.kind != GammaClass::Kind::Boundary);
        CHECK(c.lo == edge);
        CHECK(c.kind == (k % 2 == 0 ? GammaClass::Kind::StabilityInterval
                                    : GammaClass::Kind::InstabilityInterval));
        CHECK(c.j == k / 2);
        edge = c.hi;
    }
    CHECK_THROWS_AS(classify_gamma(0.0), DomainError);
}

TEST_CASE("Duffing amplitude and period") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> logu(-3.0, 3.0);
    for (int k = 0; k < 50; ++k) {
        const double mu = std::pow(10.0, logu(rng)), alpha = std::pow(10.0, logu(rng));
        CHECK(duffing_amplitude(mu, duffing_energy(mu, alpha)) == doctest::Approx(alpha).epsilon(1e-12));
    }
    CHECK(duffing_amplitude(1.0, 0.0) == 0.0);
    CHECK(duffing_amplitude(1.0, 1e-20) == doctest::Approx(std::sqrt(2e-20)).epsilon(1e-10));

    CHECK(duffing_period(1.0, 1e-14) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-12));
    CHECK(duffing_period(4.0, 0.0) == doctest::Approx(std::numbers::pi).epsilon(1e-14));

    // First-order expansion of the frequency: error is second order in E / mu^2.
    for (double mu : {0.16, 1.0, 11.36}) {
        for (double r : {1e-4, 1e-5, 1e-6}) {
            const double E = r * mu * mu;
            const double w2 = std::pow(2.0 * std::numbers::pi / duffing_period(mu, E), 2);
            CHECK(std::abs(w2 / mu - (1.0 + 1.5 * r)) < 2.0 * r * r);
        }
    }

    // Zero-crossing and elliptic-integral oracles on a 5 x 5 grid.
    for (double mu : {0.16, 0.5, 1.0, 11.36, 3648.7}) {
        for (double E : {1e-3, 0.1, 1.0, 1e3, 9e4}) {
            const double T = duffing_period(mu, E);
            CHECK_MESSAGE(std::abs(T / oracle::duffing_period_by_crossings(mu, E) - 1.0) < 1e-6,
                          "mu = " << mu << " E = " << E);
            CHECK(std::abs(T / duffing_period_elliptic(mu, E) - 1.0) < 1e-12);
        }
    }

    double prev = duffing_period(2.0, 1e-3);
    for (double E = 2e-3; E < 1e6; E *= 1.9) {
        const double T = duffing_period(2.0, E);
        CHECK(T < prev);
        prev = T;
    }
    CHECK_THROWS_AS(duffing_period(0.0, 1.0), NonPositiveStiffnessParameters);
}

TEST_CASE("Hill coefficient has half the Duffing period") {
    const auto hill = hill_problem(RescaledSystem::make(1.5, 2.0, 4.0, 30.0));
    CHECK(hill.a_min == doctest::Approx(8.0));
    CHECK(hill.coefficient(0.0) == doctest::Approx(hill.a_min).epsilon(1e-14));
    for (double t : {0.1, 0.37, 0.8}) {
        CHECK(hill.coefficient(t + hill.T_half) == doctest::Approx(hill.coefficient(t)).epsilon(1e-9));
        CHECK(hill.coefficient(t) >= hill.a_min);
        CHECK(hill.coefficient(t) <= hill.a_max * (1 + 1e-12));
    }
    CHECK(hill.coefficient(0.5 * hill.T_half) == doctest::Approx(hill.a_max).epsilon(1e-9));
}

TEST_CASE("monodromy invariants") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> logu(-1.0, 3.0);
    std::uniform_real_distribution<double> gam(0.05, 30.0);
    for (int k = 0; k < 60; ++k) {
        const auto r = RescaledSystem::make(std::pow(10.0, logu(rng)), std::pow(10.0, logu(rng)),
                                            gam(rng), std::pow(10.0, logu(rng) + 1.0));
        const auto M = monodromy(r);
        CHECK(M.det_residual < 1e-9);
        CHECK(M.half_period_residual < 1e-8);
        const auto [l1, l2] = M.multipliers;
        CHECK(std::abs(l1 * l2 - 1.0) < 1e-9);
        CHECK(std::abs((l1 + l2).real() - M.trace) < 1e-9 * (1 + std::abs(M.trace)));
        if (M.verdict == Stability::Stable) {
            CHECK(std::abs(std::abs(l1) - 1.0) < 1e-9);
            CHECK(std::abs(std::abs(l2) - 1.0) < 1e-9);
        } else if (M.verdict == Stability::Unstable) {
            CHECK(std::max(std::abs(l1), std::abs(l2)) > 1.0);
            CHECK(std::min(std::abs(l1), std::abs(l2)) < 1.0);
        }
    }
}

TEST_CASE("large energy: I intervals stable, K intervals unstable") {
    for (double eps : {1e-3, 5e-4}) {
        for (double g : {1.0 / 9, 4.0, 12.25}) {
            const double mu = 1.0;
            const auto r = RescaledSystem::make(mu, 1.0, g, 0.5 * std::pow(mu / eps, 2));
            CHECK(monodromy(r).verdict == Stability::Stable);
        }
        for (double g : {2.25, 6.25, 9.0, 20.25}) {
            const auto r = RescaledSystem::make(1.0, 1.0, g, 0.5 * std::pow(1.0 / eps, 2));
            CHECK(monodromy(r).verdict == Stability::Unstable);
            CHECK(zhukovskii_check(1.0, 1.0, g, r.E0) == Certificate::Inconclusive);
        }
    }
}

TEST_CASE("Zhukovskii certificate") {
    for (int m = 3; m <= 10; ++m) {
        const auto sys = longitudinal_over_torsional(m);
        CHECK(zhukovskii_check(sys.mu(), sys.nu(), sys.gamma(), 1e-6) == Certificate::StableCertified);
        const double Es = zhukovskii_energy_limit(sys.mu(), sys.nu(), sys.gamma());
        CHECK(Es > 0.0);
        for (double f : {1e-6, 1e-3, 0.1, 0.5, 1.0}) {
            const auto r = RescaledSystem::make(sys.mu(), sys.nu(), sys.gamma(), f * Es);
            CHECK(monodromy(r).verdict == Stability::Stable);
        }
    }
    // Certified implies stable on random draws.
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> logu(-1.0, 3.0);
    std::uniform_real_distribution<double> gam(0.05, 30.0);
    int certified = 0;
    for (int k = 0; k < 300; ++k) {
        const double mu = std::pow(10.0, logu(rng)), nu = std::pow(10.0, logu(rng)), g = gam(rng);
        const double E = std::pow(10.0, logu(rng) - 1.0);
        if (zhukovskii_check(mu, nu, g, E) != Certificate::StableCertified) continue;
        ++certified;
        CHECK(monodromy(RescaledSystem::make(mu, nu, g, E)).verdict != Stability::Unstable);
    }
    CHECK(certified > 20);
    // 4 n^2 >= 3 m^2 with a resonant ratio is not certified at any energy.
    CHECK_THROWS_AS(zhukovskii_energy_limit(1.0, 1.0, 4.0), PreconditionFailed);
}

TEST_CASE("rescaled verdict matches the original-variable linearization") {
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<int> pick(1, 10);
    std::uniform_real_distribution<double> logE(0.0, 5.0);
    int compared = 0;
    for (int k = 0; k < 40 && compared < 10; ++k) {
        const int m = pick(rng);
        int n = pick(rng);
        if (n == m) n = m % 10 + 1;
        const TwoModeSystem sys({m, Parity::Longitudinal, 1}, kLongitudinal[m - 1],
                                {n, Parity::Longitudinal, 1}, kLongitudinal[n - 1], kDefaults);
        const double E_orig = std::pow(10.0, logE(rng));
        const auto M = monodromy(nondimensionalize(sys, E_orig));
        if (std::abs(std::abs(M.trace) - 2.0) < 1e-5) continue;  // too close to call

        const double m2 = m * m, n2 = n * n, P = 0.48, S = 3.0;
        const double Lm = kLongitudinal[m - 1], Ln = kLongitudinal[n - 1];
        auto f = [&](const oracle::State6& y, oracle::State6& dy) {
            const double a = n2 * (Ln - P) + S * m2 * n2 * y[0] * y[0];
            dy = {y[1], -m2 * (Lm - P) * y[0] - S * m2 * m2 * y[0] * y[0] * y[0],
                  y[3], -a * y[2], y[5], -a * y[4]};
        };
        const auto [t_half, y] =
            oracle::first_downward_zero(f, {0.0, std::sqrt(2.0 * E_orig), 1.0, 0.0, 0.0, 1.0}, 1e-6);
        const double trace = y[2] + y[5];
        CHECK_MESSAGE((std::abs(trace) < 2.0) == (M.verdict == Stability::Stable),
                      "m = " << m << " n = " << n << " E = " << E_orig << " traces " << trace
                             << " vs " << M.trace);
        ++compared;
    }
    CHECK(compared == 10);
}

TEST_CASE("stability over energy") {
    const auto sys = longitudinal_over_torsional(6);
    std::vector<double> grid;
    for (double E = 60000; E <= 125000; E += 2500) grid.push_back(E);
    const auto rows = stability_over_energy(sys, grid);
    REQUIRE(rows.size() == grid.size());
    CHECK(rows.front().verdict == Stability::Stable);
    CHECK(rows.back().verdict == Stability::Stable);
    for (const auto& r : rows) {
        if (r.E >= 87500 && r.E <= 95000) CHECK(r.verdict == Stability::Unstable);
        CHECK(r.gamma == doctest::Approx(1.0 / 9));
    }
    std::ostringstream os;
    write_stability_csv(os, rows);
    CHECK(os.str().rfind("E,mu,nu,gamma,trace,verdict\n", 0) == 0);

    CHECK(stability_over_energy(sys, {1e-6})[0].verdict == Stability::Stable);
    CHECK_THROWS_AS(stability_over_energy(sys, {}), DomainError);
    CHECK_THROWS_AS(stability_over_energy(sys, {2.0, 1.0}), DomainError);
}
