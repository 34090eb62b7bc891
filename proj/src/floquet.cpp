#include "plate/floquet.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "plate/errors.hpp"
#include "plate/format.hpp"
#include "plate/ode.hpp"
#include "plate/parallel.hpp"

namespace plate {

RescaledSystem RescaledSystem::make(double mu, double nu, double gamma, double E0) {
    if (!(mu > 0.0) || !(nu > 0.0))
        throw NonPositiveStiffnessParameters("rescaled stiffnesses must be positive (mu = " +
                                             sci(mu) + ", nu = " + sci(nu) + ")");
    if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
    if (!(E0 > 0.0) || !std::isfinite(E0)) throw DomainError("energy must be positive and finite");
    RescaledSystem r;
    r.mu = mu;
    r.nu = nu;
    r.gamma = gamma;
    r.E0 = E0;
    r.b_star = std::sqrt(2.0 * E0);
    r.epsilon = mu / r.b_star;
    return r;
}

RescaledSystem nondimensionalize(const TwoModeSystem& sys, double E0_original) {
    return RescaledSystem::make(sys.mu(), sys.nu(), sys.gamma(), E0_original / sys.S());
}

namespace {

// Theta_- = sqrt(mu^2 + 4E) - mu and Theta_+ = sqrt(mu^2 + 4E) + mu.
std::pair<double, double> thetas(double mu, double E) {
    const double root = std::sqrt(mu * mu + 4.0 * E);
    return {4.0 * E / (root + mu), root + mu};
}

void check_duffing_args(double mu, double E) {
    if (!(mu > 0.0)) throw NonPositiveStiffnessParameters("mu must be positive");
    if (!(E >= 0.0) || !std::isfinite(E)) throw DomainError("energy must be nonnegative and finite");
}

}  // namespace

double duffing_amplitude(double mu, double E) {
    check_duffing_args(mu, E);
    return std::sqrt(thetas(mu, E).first);
}

double duffing_energy(double mu, double alpha) {
    const double a2 = alpha * alpha;
    return 0.5 * mu * a2 + 0.25 * a2 * a2;
}

double duffing_period(double mu, double E) {
    check_duffing_args(mu, E);
    const auto [tm, tp] = thetas(mu, E);
    double err = 0.0;
    const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double th) {
            const double s = std::sin(th);
            return 1.0 / std::sqrt(tm * s * s + tp);
        },
        0.0, std::numbers::pi / 2, 15, 1e-14, &err);
    if (!(err <= 1e-10 * I)) throw NonConvergence("period quadrature did not converge");
    return 4.0 * std::numbers::sqrt2 * I;
}

namespace {

ode::StepControl control(const MonodromyOptions& opts) {
    ode::StepControl c;
    c.rel_tol = opts.rel_tol;
    c.abs_tol = opts.abs_tol;
    return c;
}

}  // namespace

HillProblem hill_problem(const RescaledSystem& resc) {
    HillProblem h;
    h.system = resc;
    h.T_half = 0.5 * duffing_period(resc.mu, resc.E0);
    h.a_min = resc.gamma * resc.nu;
    h.a_max = resc.gamma * (resc.nu + thetas(resc.mu, resc.E0).first);
    return h;
}

double HillProblem::coefficient(double t) const {
    const double tt = std::fmod(t, 2.0 * T_half);
    const double tr = tt < 0.0 ? tt + 2.0 * T_half : tt;
    double w = 0.0;
    if (tr > 0.0) {
        const double mu = system.mu;
        auto rhs = [mu](double, std::span<const double> y, std::span<double> dy) {
            dy[0] = y[1];
            dy[1] = -(mu + y[0] * y[0]) * y[0];
        };
        w = ode::solve(rhs, 0.0, {0.0, system.b_star}, tr, control({}))[0];
    }
    return system.gamma * (system.nu + w * w);
}

std::string_view to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::Marginal: return "marginal";
    }
    return "?";
}

MonodromyResult monodromy(const RescaledSystem& resc, const MonodromyOptions& opts) {
    const HillProblem hill = hill_problem(resc);
    const double mu = resc.mu, nu = resc.nu, gamma = resc.gamma;
    auto rhs = [=](double, std::span<const double> y, std::span<double> dy) {
        const double w2 = y[0] * y[0];
        const double a = gamma * (nu + w2);
        dy[0] = y[1];
        dy[1] = -(mu + w2) * y[0];
        dy[2] = y[3];
        dy[3] = -a * y[2];
        dy[4] = y[5];
        dy[5] = -a * y[4];
    };
    const auto y = ode::solve(rhs, 0.0, {0.0, resc.b_star, 1.0, 0.0, 0.0, 1.0}, hill.T_half,
                              control(opts));

    MonodromyResult r;
    r.half_period_residual = std::abs(y[0]) / resc.b_star;
    if (r.half_period_residual > opts.half_period_tol)
        throw PeriodMismatch("w(T/2) = " + sci(y[0]) + " does not vanish (b* = " +
                             sci(resc.b_star) + ")");
    r.matrix = {{{y[2], y[4]}, {y[3], y[5]}}};
    r.trace = y[2] + y[5];
    const double det = y[2] * y[5] - y[4] * y[3];
    r.det_residual = std::abs(det - 1.0);
    // Roots of x^2 - trace x + 1, the smaller one taken as the reciprocal.
    const double half = 0.5 * r.trace;
    const double disc = half * half - 1.0;
    if (disc >= 0.0) {
        const double big = half + std::copysign(std::sqrt(disc), half);
        r.multipliers = {big, 1.0 / big};
    } else {
        const double im = std::sqrt(-disc);
        r.multipliers = {{half, im}, {half, -im}};
    }
    const double gap = std::abs(r.trace) - 2.0;
    if (std::abs(gap) < opts.marginal_band) r.verdict = Stability::Marginal;
    else r.verdict = gap < 0.0 ? Stability::Stable : Stability::Unstable;
    return r;
}

GammaClass classify_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive");
    // Endpoints in increasing order: j(2j+1) < (j+1)(2j+1) < (j+1)(2j+3).
    int j = 0;
    while ((j + 1.0) * (2.0 * j + 3.0) <= gamma) ++j;
    const double a = j * (2.0 * j + 1.0), b = (j + 1.0) * (2.0 * j + 1.0),
                 c = (j + 1.0) * (2.0 * j + 3.0);
    auto near = [&](double e) { return std::abs(gamma - e) <= 1e-12 * std::max(1.0, e); };
    GammaClass g;
    g.gamma = gamma;
    if (near(a) || near(b) || near(c)) {
        const double e = near(a) ? a : (near(b) ? b : c);
        g.kind = GammaClass::Kind::Boundary;
        g.j = near(c) ? j + 1 : j;
        g.lo = g.hi = e;
        return g;
    }
    g.j = j;
    if (gamma < b) {
        g.kind = GammaClass::Kind::StabilityInterval;
        g.lo = a;
        g.hi = b;
    } else {
        g.kind = GammaClass::Kind::InstabilityInterval;
        g.lo = b;
        g.hi = c;
    }
    return g;
}

std::string_view to_string(GammaClass::Kind k) {
    switch (k) {
        case GammaClass::Kind::StabilityInterval: return "I";
        case GammaClass::Kind::InstabilityInterval: return "K";
        case GammaClass::Kind::Boundary: return "boundary";
    }
    return "?";
}

std::string_view to_string(Certificate c) {
    return c == Certificate::StableCertified ? "stable-certified" : "inconclusive";
}

Certificate zhukovskii_check(double mu, double nu, double gamma, double E) {
    if (!(mu > 0.0) || !(nu > 0.0))
        throw NonPositiveStiffnessParameters("zhukovskii_check needs mu, nu > 0");
    if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
    const double omega = 2.0 * std::numbers::pi / duffing_period(mu, E);
    const double a_min = gamma * nu;
    const double a_max = gamma * (nu + thetas(mu, E).first);
    const double h = std::floor(std::sqrt(a_min) / omega);
    const bool ok = h * h * omega * omega <= a_min && a_max <= (h + 1.0) * (h + 1.0) * omega * omega;
    return ok ? Certificate::StableCertified : Certificate::Inconclusive;
}

double zhukovskii_energy_limit(double mu, double nu, double gamma) {
    auto ok = [&](double E) {
        return zhukovskii_check(mu, nu, gamma, E) == Certificate::StableCertified;
    };
    double lo = 1e-12 * std::max(1.0, mu * mu);
    if (!ok(lo))
        throw PreconditionFailed("the Zhukovskii bounds fail even at vanishing energy");
    const double cap = 1e12 * std::max(1.0, mu * mu);
    double hi = lo;
    while (ok(hi)) {
        lo = hi;
        hi *= 1.25;
        if (hi > cap) return lo;
    }
    while (hi - lo > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

std::vector<EnergyVerdict> stability_over_energy(const TwoModeSystem& sys,
                                                 const std::vector<double>& E_grid,
                                                 const MonodromyOptions& opts) {
    if (E_grid.empty()) throw DomainError("energy grid is empty");
    for (std::size_t k = 0; k < E_grid.size(); ++k) {
        if (!(E_grid[k] > 0.0)) throw DomainError("energies must be positive");
        if (k > 0 && !(E_grid[k] > E_grid[k - 1])) throw DomainError("energy grid must increase");
    }
    std::vector<EnergyVerdict> out(E_grid.size());
    parallel_for(E_grid.size(), [&](std::size_t k) {
        const auto resc = RescaledSystem::make(sys.mu(), sys.nu(), sys.gamma(), E_grid[k]);
        const auto r = monodromy(resc, opts);
        out[k] = {E_grid[k], resc.mu, resc.nu, resc.gamma, r.trace, r.verdict};
    });
    return out;
}

void write_stability_csv(std::ostream& os, const std::vector<EnergyVerdict>& rows) {
    os << "E,mu,nu,gamma,trace,verdict\n";
    for (const auto& r : rows)
        os << sci(r.E) << ',' << sci(r.mu) << ',' << sci(r.nu) << ',' << sci(r.gamma) << ','
           << sci(r.trace) << ',' << to_string(r.verdict) << '\n';
}

}  // namespace plate
