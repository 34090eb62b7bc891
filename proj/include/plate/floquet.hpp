#pragma once

// Linear stability of simple modes. In rescaled variables the simple mode
// solves the Duffing equation  w'' + mu w + w^3 = 0  and a perturbing mode
// obeys the Hill equation  z'' + gamma (nu + w^2) z = 0, whose coefficient has
// half the Duffing period.

#include <array>
#include <complex>
#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

#include "plate/modal_dynamics.hpp"

namespace plate {

struct RescaledSystem {
    double mu = 0.0, nu = 0.0, gamma = 0.0;
    double E0 = 0.0;       ///< energy of the rescaled system
    double b_star = 0.0;   ///< sqrt(2 E0), initial velocity of w
    double epsilon = 0.0;  ///< mu / b_star

    /// Throws NonPositiveStiffnessParameters unless mu, nu > 0, and
    /// DomainError unless gamma, E0 > 0.
    static RescaledSystem make(double mu, double nu, double gamma, double E0);
};

/// Rescales phi -> m phi, psi -> n psi, t -> m sqrt(S) t; E0 = E0_original / S.
RescaledSystem nondimensionalize(const TwoModeSystem& sys, double E0_original);

/// Turning point sqrt(sqrt(mu^2 + 4E) - mu), evaluated without cancellation.
double duffing_amplitude(double mu, double E);

/// mu alpha^2 / 2 + alpha^4 / 4, the inverse of duffing_amplitude.
double duffing_energy(double mu, double alpha);

/// Period of the Duffing solution with energy E, by adaptive quadrature of
/// 4 sqrt(2) int_0^{pi/2} dtheta / sqrt(Theta_- sin^2 theta + Theta_+).
double duffing_period(double mu, double E);

struct HillProblem {
    RescaledSystem system;
    double T_half = 0.0;  ///< coefficient period
    double a_min = 0.0;   ///< gamma nu
    double a_max = 0.0;   ///< gamma (nu + alpha^2)

    /// a(t) = gamma (nu + w(t)^2), w integrated from w(0) = 0, w'(0) = b*.
    double coefficient(double t) const;
};

HillProblem hill_problem(const RescaledSystem& resc);

enum class Stability { Stable, Unstable, Marginal };

std::string_view to_string(Stability s);

struct MonodromyOptions {
    double rel_tol = 1e-13;
    double abs_tol = 1e-15;
    double marginal_band = 1e-7;    ///< ||trace| - 2| below this is Marginal
    double half_period_tol = 1e-8;  ///< |w(T/2)| allowed, relative to b*
};

struct MonodromyResult {
    std::array<std::array<double, 2>, 2> matrix{};  ///< columns: z from (1,0) and (0,1)
    double trace = 0.0;
    std::pair<std::complex<double>, std::complex<double>> multipliers;
    double det_residual = 0.0;       ///< |det - 1|
    double half_period_residual = 0.0;  ///< |w(T/2)| / b*
    Stability verdict = Stability::Stable;
};

/// Throws PeriodMismatch when w does not return to zero at T/2.
MonodromyResult monodromy(const RescaledSystem& resc, const MonodromyOptions& opts = {});

struct GammaClass {
    enum class Kind { StabilityInterval, InstabilityInterval, Boundary };
    double gamma = 0.0;
    Kind kind = Kind::Boundary;
    int j = 0;  ///< interval index (for Boundary: index of the interval to the right)
    double lo = 0.0, hi = 0.0;
};

/// I_j = (j(2j+1), (j+1)(2j+1)) and K_j = ((j+1)(2j+1), (j+1)(2j+3)).
GammaClass classify_gamma(double gamma);

std::string_view to_string(GammaClass::Kind k);

enum class Certificate { StableCertified, Inconclusive };

std::string_view to_string(Certificate c);

/// Sufficient stability test: some integer h >= 0 with
/// h^2 omega^2 <= a_min and a_max <= (h+1)^2 omega^2, omega = 2 pi / T(E).
Certificate zhukovskii_check(double mu, double nu, double gamma, double E);

/// Largest E (to relative width 1e-6) such that zhukovskii_check certifies
/// every sampled energy in (0, E]. Throws PreconditionFailed when even tiny
/// energies are not certified.
double zhukovskii_energy_limit(double mu, double nu, double gamma);

struct EnergyVerdict {
    double E = 0.0;  ///< rescaled energy
    double mu = 0.0, nu = 0.0, gamma = 0.0;
    double trace = 0.0;
    Stability verdict = Stability::Stable;
};

/// Monodromy over an increasing grid of rescaled energies (grid points run concurrently).
std::vector<EnergyVerdict> stability_over_energy(const TwoModeSystem& sys,
                                                 const std::vector<double>& E_grid,
                                                 const MonodromyOptions& opts = {});

void write_stability_csv(std::ostream& os, const std::vector<EnergyVerdict>& rows);

}  // namespace plate
