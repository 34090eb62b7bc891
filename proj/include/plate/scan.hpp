#pragma once

// Amplitude and damping sweeps of the rescaled two-mode system
//
//     phi'' + delta phi' + (mu + phi^2 + psi^2) phi = 0,
//     psi'' + delta psi' + gamma (nu + phi^2 + psi^2) psi = 0,
//
// started from phi(0) = u0, psi(0) = u0 * ratio, zero velocities. The carrier
// is the primary mode of the TwoModeSystem, the perturbation the secondary.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "plate/modal_dynamics.hpp"

namespace plate {

/// How amplitudes map to reported energies.
///   Rescaled: energy of the rescaled system at the initial data (the
///             original energy divided by S).
///   TableFit: (Lambda - P) u0^2 / 4 + u0^4 / 4, the carrier-only expression.
enum class EnergyConvention { Rescaled, TableFit };

std::string_view to_string(EnergyConvention c);
EnergyConvention parse_energy_convention(std::string_view s);

struct ScanSpec {
    explicit ScanSpec(TwoModeSystem sys) : system(std::move(sys)) {}

    TwoModeSystem system;
    double u0_lo = 1.0, u0_hi = 100.0;
    int grid_points = 200;
    double perturbation_ratio = 1e-3;
    double horizon_T = 60.0;
    double growth_threshold = 10.0;
    double endpoint_width = 1e-2;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    EnergyConvention convention = EnergyConvention::Rescaled;

    /// Throws DomainError on an empty range, fewer than 2 points or a ratio outside (0, 0.1].
    void validate() const;
};

/// phi'^2/2 + psi'^2/(2 gamma) + mu phi^2/2 + nu psi^2/2 + (phi^2 + psi^2)^2/4.
double rescaled_energy(const TwoModeSystem& sys, double phi, double phi_dot, double psi,
                       double psi_dot);

/// Energy attached to amplitude u0 under the given convention.
double energy_for_amplitude(const TwoModeSystem& sys, double u0, double perturbation_ratio,
                            EnergyConvention convention);

/// Inverse of energy_for_amplitude (both are increasing in u0).
double amplitude_for_energy(const TwoModeSystem& sys, double E, double perturbation_ratio,
                            EnergyConvention convention);

struct GrowthResult {
    double G = 0.0;  ///< max |psi| / |psi(0)| over [0, horizon]
    double E = 0.0;  ///< energy of the initial data under spec.convention
    bool unstable = false;
};

/// Uses sys.delta() as the damping of the rescaled system.
GrowthResult growth_factor(const TwoModeSystem& sys, double u0, const ScanSpec& spec);

struct ScanSample {
    double u0 = 0.0, E = 0.0, G = 0.0;
    bool unstable = false;
};

struct InstabilityInterval {
    double u0_lo = 0.0, u0_hi = 0.0;
    double E_lo = 0.0, E_hi = 0.0;
    bool clipped_lo = false, clipped_hi = false;  ///< run touches the scanned range
};

struct ScanReport {
    std::vector<ScanSample> samples;
    std::vector<InstabilityInterval> intervals;
    std::string convention_note;
};

ScanReport find_instability_intervals(const ScanSpec& spec);

struct OnsetResult {
    double u0 = 0.0;
    double E = 0.0;
};

/// Least u0 in [spec.u0_lo, search_ceiling] above which every grid point is
/// unstable. Throws PreconditionFailed unless the carrier is torsional,
/// NotInstabilityClass unless gamma lies in some K_j, NoOnsetFound when the
/// top of the range is stable.
OnsetResult instability_onset(const TwoModeSystem& sys, const ScanSpec& spec, double search_ceiling);

struct DampingResult {
    double delta = 0.0;      ///< least stabilizing damping (relative width 1e-2)
    double G = 0.0;          ///< growth at delta
    double G_long = 0.0;     ///< growth at delta over the long horizon
    bool long_horizon_stable = false;
};

/// Bisection on delta in [0, delta_hi]. Throws PreconditionFailed when the
/// undamped run is stable or delta_hi does not stabilize.
DampingResult damping_threshold(const TwoModeSystem& sys, double u0, const ScanSpec& spec,
                                double delta_hi, double long_horizon = 150.0);

/// Samples of the rescaled run from u0 (columns phi, phi', psi, psi'), with
/// the rescaled energy in the ledger. sample_interval 0 keeps every step.
Trajectory rescaled_trajectory(const TwoModeSystem& sys, double u0, const ScanSpec& spec,
                               double sample_interval = 0.0);

void write_scan_csv(std::ostream& os, const ScanReport& report);

}  // namespace plate
