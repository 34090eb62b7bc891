#include <doctest.h>

#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "plate/errors.hpp"
#include "plate/spectrum.hpp"

using namespace plate;

namespace {

const PlateConfig kDefaults;

constexpr std::array<double, 10> kLongitudinalReference = {0.96,  3.84,  6.64,  15.36, 24.00,
                                            34.57, 47.06, 61.48, 77.82, 96.09};
constexpr std::array<double, 10> kTorsionalReference = {10943.6, 10946.5, 10951.2, 10957.8, 10966.2,
                                            10976.6, 10988.8, 11003.0, 11019.0, 11036.9};

double leading(int m, Parity p) { return find_eigenvalues(m, p, 1, kDefaults, 2e4)[0].Lambda; }

double integrate(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

}  // namespace

TEST_CASE("longitudinal leading eigenvalues match reference values") {
    for (int m = 1; m <= 10; ++m) {
        const double L = leading(m, Parity::Longitudinal);
        if (m == 3) {
            // The reference third entry is not reproducible; compare with the oracle.
            const double oracle = oracle_extrapolated(m, Parity::Longitudinal, 256, 1, kDefaults)[0];
            CHECK(std::abs(L - oracle) < 1e-3 * oracle);
            CHECK(std::abs(L - 8.64) < 1e-2);
        } else {
            CHECK_MESSAGE(std::abs(L - kLongitudinalReference[m - 1]) < 1e-2, "m = " << m << " Lambda = " << L);
        }
    }
}

TEST_CASE("torsional leading eigenvalues match reference values") {
    for (int m = 1; m <= 10; ++m) {
        const double L = leading(m, Parity::Torsional);
        CHECK_MESSAGE(std::abs(L - kTorsionalReference[m - 1]) < 1e-1, "m = " << m << " Lambda = " << L);
    }
}

TEST_CASE("characteristic determinant vanishes at reference eigenvalues") {
    const double root = leading(1, Parity::Longitudinal);
    CHECK(std::abs(characteristic_det(1, root, Parity::Longitudinal, kDefaults).value) < 1e-9);
    // The 2-digit reference values sit within 5e-3 of the root; the slope bounds the value.
    const double slope = std::abs(characteristic_det(5, 24.01, Parity::Longitudinal, kDefaults).value -
                                  characteristic_det(5, 23.99, Parity::Longitudinal, kDefaults).value) /
                         0.02;
    CHECK(std::abs(characteristic_det(5, 24.00, Parity::Longitudinal, kDefaults).value) <
          slope * 1e-2);
    CHECK(std::abs(characteristic_det(1, 0.96, Parity::Longitudinal, kDefaults).value) <
          std::abs(characteristic_det(1, 0.9, Parity::Longitudinal, kDefaults).value));
}

TEST_CASE("determinant sign alternates across oracle eigenvalues") {
    for (Parity p : {Parity::Longitudinal, Parity::Torsional}) {
        const auto o = oracle_extrapolated(1, p, 256, 3, kDefaults);
        REQUIRE(o.size() == 3);
        const double a = characteristic_det(1, 0.5 * (o[0] + o[1]), p, kDefaults).value;
        const double b = characteristic_det(1, 0.5 * (o[1] + o[2]), p, kDefaults).value;
        CHECK(a != 0.0);
        CHECK(b != 0.0);
        CHECK((a < 0.0) != (b < 0.0));
    }
}

TEST_CASE("determinant is bounded and continuous across the critical point") {
    for (int m : {1, 4, 9}) {
        const double crit = static_cast<double>(m) * m;
        for (Parity p : {Parity::Longitudinal, Parity::Torsional}) {
            const auto at = characteristic_det(m, crit, p, kDefaults);
            CHECK(at.branch_boundary);
            const double below = characteristic_det(m, crit * (1 - 1e-7), p, kDefaults).value;
            const double above = characteristic_det(m, crit * (1 + 1e-7), p, kDefaults).value;
            CHECK_FALSE(characteristic_det(m, crit * (1 - 1e-7), p, kDefaults).branch_boundary);
            CHECK(std::abs(at.value - below) < 1e-5);
            CHECK(std::abs(at.value - above) < 1e-5);
        }
        for (double L = 0.1; L < 1e6; L *= 1.7) {
            const double v = characteristic_det(m, L, Parity::Torsional, kDefaults).value;
            CHECK(std::isfinite(v));
            CHECK(std::abs(v) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("first three eigenvalues of each family agree with the oracle") {
    for (int m = 1; m <= 10; ++m) {
        for (Parity p : {Parity::Longitudinal, Parity::Torsional}) {
            const auto o = oracle_extrapolated(m, p, 256, 3, kDefaults);
            REQUIRE(o.size() == 3);
            const auto pairs = find_eigenvalues(m, p, 3, kDefaults, o[2] * 1.01);
            for (int k = 0; k < 3; ++k)
                CHECK_MESSAGE(std::abs(pairs[k].Lambda - o[k]) < 1e-3 * o[k],
                              "m = " << m << " " << to_string(p) << " i = " << k + 1 << ": "
                                     << pairs[k].Lambda << " vs " << o[k]);
            CHECK(pairs[0].Lambda < pairs[1].Lambda);
            CHECK(pairs[1].Lambda < pairs[2].Lambda);
        }
    }
}

TEST_CASE("oracle converges under grid refinement") {
    const double a = oracle_eigensolve(1, Parity::Longitudinal, 256, kDefaults)[0];
    const double b = oracle_eigensolve(1, Parity::Longitudinal, 512, kDefaults)[0];
    CHECK(std::abs(a - b) < 1e-4 * b);
    const double t = oracle_eigensolve(1, Parity::Torsional, 256, kDefaults)[0];
    CHECK(std::abs(t - 10943.6) < 0.5);
    CHECK(std::abs(t - leading(1, Parity::Torsional)) < 1e-3 * t);
    CHECK_THROWS_AS(oracle_eigensolve(1, Parity::Torsional, 32, kDefaults), DomainError);
}

TEST_CASE("eigenpair invariants: residual, normalization, boundary conditions") {
    const double l = kDefaults.half_width();
    const double sigma = kDefaults.sigma();
    for (int m : {1, 2, 5, 10}) {
        for (Parity p : {Parity::Longitudinal, Parity::Torsional}) {
            const double ceiling = p == Parity::Longitudinal ? 3e4 : 2e5;
            for (const auto& e : eigenvalues_below(m, p, kDefaults, ceiling)) {
                CHECK(e.lambda == static_cast<double>(m) * m * e.Lambda);
                CHECK(e.residual < 1e-9);
                const double mass = integrate([&](double y) { return std::pow(e.profile(y), 2); }, -l, l);
                CHECK(std::abs(mass / (2.0 / std::numbers::pi) - 1.0) < 1e-8);
                // ||w_x||^2 = m^2 ||w||^2 by integrating cos^2(mx) over (0, pi).
                const double wx = integrate([&](double y) { return std::pow(e.profile(y), 2); }, -l, l) *
                                  m * m * std::numbers::pi / 2.0;
                CHECK(std::abs(wx / (m * m) - 1.0) < 1e-8);
                const double m2 = static_cast<double>(m) * m;
                const double scale2 = std::abs(e.profile(l, 2)) + m2 * std::abs(e.profile(l)) + 1.0;
                const double scale3 = std::abs(e.profile(l, 3)) + m2 * std::abs(e.profile(l, 1)) + 1.0;
                CHECK(std::abs(e.profile(l, 2) - sigma * m2 * e.profile(l)) < 1e-7 * scale2);
                CHECK(std::abs(e.profile(l, 3) - (2 - sigma) * m2 * e.profile(l, 1)) < 1e-7 * scale3);
                CHECK(e.profile(l) > 0.0);
                if (p == Parity::Torsional) CHECK(e.profile(0.0) == 0.0);
                else CHECK(std::abs(e.profile(0.3 * l) - e.profile(-0.3 * l)) < 1e-12 * (1 + std::abs(e.profile(l))));
            }
        }
    }
}

TEST_CASE("eigenfunction evaluation") {
    const auto e = find_eigenvalues(1, Parity::Longitudinal, 1, kDefaults, 10)[0];
    const auto t = find_eigenvalues(3, Parity::Torsional, 1, kDefaults, 2e4)[0];
    CHECK(eigenfunction_eval(e, 0.0, 0.001) == 0.0);
    CHECK(std::abs(eigenfunction_eval(t, 1.0, 0.0)) == 0.0);
    CHECK(std::abs(eigenfunction_eval(t, std::numbers::pi, 0.01)) < 1e-12);
    CHECK_THROWS_AS(eigenfunction_eval(e, -0.1, 0.0), DomainError);
    CHECK_THROWS_AS(eigenfunction_eval(e, 1.0, 0.03), DomainError);

    const auto coarse = oracle_leading_profile(1, Parity::Longitudinal, 256, kDefaults);
    const auto fine = oracle_leading_profile(1, Parity::Longitudinal, 512, kDefaults);
    const double oracle_mid = (4.0 * fine.phi[0] - coarse.phi[0]) / 3.0;
    CHECK(std::abs(eigenfunction_eval(e, std::numbers::pi / 2, 0.0) - oracle_mid) < 1e-6);
}

TEST_CASE("global ordering") {
    const auto g = global_ordering(kDefaults, 100);
    REQUIRE(g.entries.size() >= 10);
    for (std::size_t k = 0; k < 10; ++k) {
        CHECK(g.entries[k].mode.parity == Parity::Longitudinal);
        CHECK(g.entries[k].mode.m == static_cast<int>(k) + 1);
        if (k != 2) CHECK(std::abs(g.entries[k].Lambda - kLongitudinalReference[k]) < 1e-2);
    }
    CHECK_FALSE(g.first_torsional_index.has_value());

    const auto h = global_ordering(kDefaults, 11040);
    REQUIRE(h.first_torsional_index.has_value());
    const auto& first = h.entries[*h.first_torsional_index - 1];
    CHECK(first.mode.m == 1);
    CHECK(std::abs(first.Lambda - 10943.6) < 0.1);
    for (std::size_t k = 1; k < h.entries.size(); ++k)
        CHECK(h.entries[k - 1].Lambda <= h.entries[k].Lambda);

    CHECK(global_ordering(kDefaults, 0.5).entries.empty());
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(characteristic_det(1, 0.0, Parity::Longitudinal, kDefaults), DomainError);
    CHECK_THROWS_AS(characteristic_det(1, -1.0, Parity::Torsional, kDefaults), DomainError);
    CHECK_THROWS_AS(find_eigenvalues(1, Parity::Torsional, 1, kDefaults, 100), BracketingFailure);
    CHECK_THROWS_AS(find_eigenvalues(1, Parity::Longitudinal, 0, kDefaults, 100), DomainError);
    CHECK_THROWS_AS(PlateConfig(0.02, 0.5, 0.48, 3), DomainError);
    CHECK_THROWS_AS(PlateConfig(-1, 0.2, 0.48, 3), DomainError);
}
