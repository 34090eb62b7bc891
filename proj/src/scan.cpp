#include "plate/scan.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "plate/errors.hpp"
#include "plate/floquet.hpp"
#include "plate/format.hpp"
#include "plate/ode.hpp"
#include "plate/parallel.hpp"

namespace plate {

std::string_view to_string(EnergyConvention c) {
    return c == EnergyConvention::Rescaled ? "rescaled" : "table-fit";
}

EnergyConvention parse_energy_convention(std::string_view s) {
    if (s == "rescaled") return EnergyConvention::Rescaled;
    if (s == "table-fit" || s == "tablefit") return EnergyConvention::TableFit;
    throw DomainError("unknown energy convention '" + std::string(s) + "'");
}

void ScanSpec::validate() const {
    if (!(u0_lo > 0.0) || !(u0_hi > u0_lo)) throw DomainError("u0 range must satisfy 0 < lo < hi");
    if (grid_points < 2) throw DomainError("a scan needs at least 2 grid points");
    if (!(perturbation_ratio > 0.0 && perturbation_ratio <= 0.1))
        throw DomainError("perturbation ratio must lie in (0, 0.1]");
    if (!(horizon_T > 0.0)) throw DomainError("horizon must be positive");
    if (!(growth_threshold > 1.0)) throw DomainError("growth threshold must exceed 1");
    if (!(endpoint_width > 0.0)) throw DomainError("endpoint width must be positive");
}

double rescaled_energy(const TwoModeSystem& sys, double phi, double phi_dot, double psi,
                       double psi_dot) {
    const double r2 = phi * phi + psi * psi;
    return 0.5 * phi_dot * phi_dot + 0.5 * psi_dot * psi_dot / sys.gamma() +
           0.5 * sys.mu() * phi * phi + 0.5 * sys.nu() * psi * psi + 0.25 * r2 * r2;
}

double energy_for_amplitude(const TwoModeSystem& sys, double u0, double ratio,
                            EnergyConvention convention) {
    if (convention == EnergyConvention::Rescaled)
        return rescaled_energy(sys, u0, 0.0, ratio * u0, 0.0);
    const double u2 = u0 * u0;
    return 0.25 * (sys.Lambda_primary() - sys.P()) * u2 + 0.25 * u2 * u2;
}

double amplitude_for_energy(const TwoModeSystem& sys, double E, double ratio,
                            EnergyConvention convention) {
    if (!(E > 0.0)) throw DomainError("energy must be positive");
    // Both conventions read  c4 x^2 + c2 x = E  in x = u0^2.
    double c4, c2;
    if (convention == EnergyConvention::Rescaled) {
        c4 = 0.25 * std::pow(1.0 + ratio * ratio, 2);
        c2 = 0.5 * (sys.mu() + sys.nu() * ratio * ratio);
    } else {
        c4 = 0.25;
        c2 = 0.25 * (sys.Lambda_primary() - sys.P());
    }
    if (!(c2 > 0.0)) throw NonPositiveStiffnessParameters("carrier stiffness must be positive");
    const double x = 2.0 * E / (c2 + std::sqrt(c2 * c2 + 4.0 * c4 * E));
    return std::sqrt(x);
}

namespace {

double max_growth(const TwoModeSystem& sys, double u0, const ScanSpec& spec, double horizon) {
    const double mu = sys.mu(), nu = sys.nu(), gamma = sys.gamma(), delta = sys.delta();
    if (!(mu > 0.0) || !(nu > 0.0))
        throw NonPositiveStiffnessParameters("scan needs P below both eigenvalues");
    auto rhs = [=](double, std::span<const double> y, std::span<double> dy) {
        const double r2 = y[0] * y[0] + y[2] * y[2];
        dy[0] = y[1];
        dy[1] = -delta * y[1] - (mu + r2) * y[0];
        dy[2] = y[3];
        dy[3] = -delta * y[3] - gamma * (nu + r2) * y[2];
    };
    const double psi0 = spec.perturbation_ratio * u0;
    double peak = psi0;
    auto observer = [&](const ode::Segment& seg) {
        peak = std::max(peak, std::abs(seg.y1()[2]));
        // Between step ends the extremum can sit mid-step; the dense output catches it.
        peak = std::max(peak, std::abs(seg.eval(0.5 * (seg.t0() + seg.t1()), 2)));
    };
    ode::StepControl ctl;
    ctl.rel_tol = spec.rel_tol;
    ctl.abs_tol = spec.abs_tol;
    ode::Dopri5 solver(rhs, 4, ctl);
    std::vector<double> y{u0, 0.0, psi0, 0.0};
    solver.integrate(0.0, y, horizon, observer);
    return peak / psi0;
}

}  // namespace

GrowthResult growth_factor(const TwoModeSystem& sys, double u0, const ScanSpec& spec) {
    if (!(u0 > 0.0)) throw DomainError("u0 must be positive");
    spec.validate();
    GrowthResult r;
    r.G = max_growth(sys, u0, spec, spec.horizon_T);
    r.E = energy_for_amplitude(sys, u0, spec.perturbation_ratio, spec.convention);
    r.unstable = r.G >= spec.growth_threshold;
    return r;
}

namespace {

std::vector<double> linear_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) g[k] = lo + (hi - lo) * k / (n - 1);
    return g;
}

std::vector<ScanSample> sample_grid(const TwoModeSystem& sys, const ScanSpec& spec,
                                    const std::vector<double>& grid) {
    std::vector<ScanSample> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t k) {
        const auto g = growth_factor(sys, grid[k], spec);
        out[k] = {grid[k], g.E, g.G, g.unstable};
    });
    return out;
}

// Shrinks [stable_u, unstable_u] (either order) to the given width.
double refine_edge(const TwoModeSystem& sys, const ScanSpec& spec, double stable_u,
                   double unstable_u) {
    while (std::abs(unstable_u - stable_u) > spec.endpoint_width) {
        const double mid = 0.5 * (stable_u + unstable_u);
        (growth_factor(sys, mid, spec).unstable ? unstable_u : stable_u) = mid;
    }
    return 0.5 * (stable_u + unstable_u);
}

}  // namespace

ScanReport find_instability_intervals(const ScanSpec& spec) {
    spec.validate();
    const auto& sys = spec.system;
    ScanReport report;
    report.samples = sample_grid(sys, spec, linear_grid(spec.u0_lo, spec.u0_hi, spec.grid_points));
    report.convention_note =
        spec.convention == EnergyConvention::Rescaled
            ? "energy of the rescaled system at the initial data (original energy divided by S)"
            : "(Lambda - P) u0^2 / 4 + u0^4 / 4 of the carrier";

    const auto& s = report.samples;
    for (std::size_t k = 0; k < s.size();) {
        if (!s[k].unstable) {
            ++k;
            continue;
        }
        std::size_t end = k;
        while (end + 1 < s.size() && s[end + 1].unstable) ++end;
        InstabilityInterval iv;
        iv.clipped_lo = k == 0;
        iv.clipped_hi = end + 1 == s.size();
        iv.u0_lo = iv.clipped_lo ? s[k].u0 : refine_edge(sys, spec, s[k - 1].u0, s[k].u0);
        iv.u0_hi = iv.clipped_hi ? s[end].u0 : refine_edge(sys, spec, s[end + 1].u0, s[end].u0);
        iv.E_lo = energy_for_amplitude(sys, iv.u0_lo, spec.perturbation_ratio, spec.convention);
        iv.E_hi = energy_for_amplitude(sys, iv.u0_hi, spec.perturbation_ratio, spec.convention);
        report.intervals.push_back(iv);
        k = end + 1;
    }
    return report;
}

OnsetResult instability_onset(const TwoModeSystem& sys, const ScanSpec& spec, double search_ceiling) {
    spec.validate();
    if (sys.primary().parity != Parity::Torsional)
        throw PreconditionFailed("onset search needs a torsional carrier");
    const auto cls = classify_gamma(sys.gamma());
    if (cls.kind != GammaClass::Kind::InstabilityInterval)
        throw NotInstabilityClass("gamma = " + sci(sys.gamma()) +
                                  " is not inside any instability interval K_j");
    if (!(search_ceiling > spec.u0_lo)) throw DomainError("search ceiling must exceed u0_lo");

    const auto s = sample_grid(sys, spec, linear_grid(spec.u0_lo, search_ceiling, spec.grid_points));
    if (!s.back().unstable)
        throw NoOnsetFound("no persistent instability below u0 = " + sci(search_ceiling));
    std::size_t first = s.size() - 1;
    while (first > 0 && s[first - 1].unstable) --first;
    OnsetResult r;
    r.u0 = first == 0 ? s[0].u0 : refine_edge(sys, spec, s[first - 1].u0, s[first].u0);
    r.E = energy_for_amplitude(sys, r.u0, spec.perturbation_ratio, spec.convention);
    return r;
}

DampingResult damping_threshold(const TwoModeSystem& sys, double u0, const ScanSpec& spec,
                                double delta_hi, double long_horizon) {
    spec.validate();
    if (!(u0 > 0.0)) throw DomainError("u0 must be positive");
    if (!(delta_hi > 0.0)) throw DomainError("delta_hi must be positive");
    auto growth = [&](double delta) { return growth_factor(sys.with_damping(delta), u0, spec).G; };
    if (growth(0.0) < spec.growth_threshold)
        throw PreconditionFailed("the undamped run at u0 = " + sci(u0) + " is stable");
    double hi = delta_hi;
    if (growth(hi) >= spec.growth_threshold)
        throw PreconditionFailed("delta_hi = " + sci(delta_hi) + " does not stabilize");

    // Geometric descent for an unstable lower bracket, then bisection.
    double lo = 0.5 * hi;
    while (growth(lo) < spec.growth_threshold) {
        hi = lo;
        lo *= 0.5;
        if (lo < 1e-12 * delta_hi) {
            lo = 0.0;
            break;
        }
    }
    while (hi - lo > 1e-2 * hi) {
        const double mid = 0.5 * (lo + hi);
        (growth(mid) >= spec.growth_threshold ? lo : hi) = mid;
    }
    DampingResult r;
    r.delta = hi;
    r.G = growth(hi);
    r.G_long = max_growth(sys.with_damping(hi), u0, spec, long_horizon);
    r.long_horizon_stable = r.G_long < spec.growth_threshold;
    return r;
}

Trajectory rescaled_trajectory(const TwoModeSystem& sys, double u0, const ScanSpec& spec,
                               double sample_interval) {
    spec.validate();
    if (!(u0 > 0.0)) throw DomainError("u0 must be positive");
    if (!(sample_interval >= 0.0)) throw DomainError("sample interval must be nonnegative");
    const double mu = sys.mu(), nu = sys.nu(), gamma = sys.gamma(), delta = sys.delta();
    if (!(mu > 0.0) || !(nu > 0.0))
        throw NonPositiveStiffnessParameters("rescaling needs P below both eigenvalues");
    // State plus the dissipated energy delta * int (phi'^2 + psi'^2 / gamma).
    auto rhs = [=](double, std::span<const double> y, std::span<double> dy) {
        const double r2 = y[0] * y[0] + y[2] * y[2];
        dy[0] = y[1];
        dy[1] = -delta * y[1] - (mu + r2) * y[0];
        dy[2] = y[3];
        dy[3] = -delta * y[3] - gamma * (nu + r2) * y[2];
        dy[4] = delta * (y[1] * y[1] + y[3] * y[3] / gamma);
    };
    Trajectory traj;
    const double e0 = rescaled_energy(sys, u0, 0.0, spec.perturbation_ratio * u0, 0.0);
    auto record = [&](double t, const double* y) {
        LedgerEntry e{rescaled_energy(sys, y[0], y[1], y[2], y[3]), y[4], 0.0};
        traj.max_drift = std::max(traj.max_drift,
                                  std::abs(e.energy + e.dissipated - e0) / std::max(e0, 1.0));
        traj.t.push_back(t);
        traj.states.emplace_back(y, y + 4);
        traj.ledger.push_back(e);
    };
    std::vector<double> y{u0, 0.0, spec.perturbation_ratio * u0, 0.0, 0.0};
    record(0.0, y.data());
    std::size_t next = 1;
    std::vector<double> buf(5);
    auto observer = [&](const ode::Segment& seg) {
        if (sample_interval == 0.0) {
            record(seg.t1(), seg.y1().data());
            return;
        }
        for (double ts = next * sample_interval; ts <= seg.t1() && ts < spec.horizon_T;
             ts = ++next * sample_interval) {
            seg.eval(ts, buf);
            record(ts, buf.data());
        }
        if (seg.t1() == spec.horizon_T) record(seg.t1(), seg.y1().data());
    };
    ode::StepControl ctl;
    ctl.rel_tol = spec.rel_tol;
    ctl.abs_tol = spec.abs_tol;
    ode::Dopri5 solver(rhs, 5, ctl);
    solver.integrate(0.0, y, spec.horizon_T, observer);
    traj.stats = solver.stats();
    return traj;
}

void write_scan_csv(std::ostream& os, const ScanReport& report) {
    os << "u0,E,G,unstable\n";
    for (const auto& s : report.samples)
        os << sci(s.u0) << ',' << sci(s.E) << ',' << sci(s.G) << ',' << (s.unstable ? 1 : 0) << '\n';
}

}  // namespace plate
