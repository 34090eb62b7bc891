#pragma once

// Nonlinear modal dynamics of the plate: the coupled two-mode system and the
// K-mode Galerkin truncation, with damping, forcing and an energy ledger.
//
// With U = sum_i u_i(t) w_i and Phi = -P + S sum_j m_j^2 u_j^2,
//
//     u_i'' + delta u_i' + lambda_i u_i + Phi m_i^2 u_i = F_i(t),
//
// and the two-mode system is the K = 2 case written in (phi, psi).

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "plate/config.hpp"
#include "plate/ode.hpp"
#include "plate/spectrum.hpp"

namespace plate {

class TwoModeSystem {
public:
    /// Throws DomainError when the two modes coincide or an eigenvalue is not positive.
    TwoModeSystem(ModeIndex primary, double Lambda_primary, ModeIndex secondary,
                  double Lambda_secondary, const PlateConfig& config);
    TwoModeSystem(const Eigenpair& primary, const Eigenpair& secondary, const PlateConfig& config);

    const ModeIndex& primary() const { return primary_; }
    const ModeIndex& secondary() const { return secondary_; }
    double Lambda_primary() const { return Lp_; }
    double Lambda_secondary() const { return Ls_; }
    int m() const { return primary_.m; }
    int n() const { return secondary_.m; }
    double P() const { return P_; }
    double S() const { return S_; }
    double delta() const { return delta_; }

    double mu() const { return (Lp_ - P_) / S_; }
    double nu() const { return (Ls_ - P_) / S_; }
    double gamma() const { return static_cast<double>(n()) * n() / (static_cast<double>(m()) * m()); }

    TwoModeSystem with_damping(double delta) const;

private:
    ModeIndex primary_, secondary_;
    double Lp_, Ls_, P_, S_, delta_;
};

struct ModalState {
    double t = 0.0;
    double phi = 0.0, phi_dot = 0.0;
    double psi = 0.0, psi_dot = 0.0;
};

/// (phi', phi'', psi', psi'').
std::array<double, 4> two_mode_rhs(const ModalState& state, const TwoModeSystem& sys);

double two_mode_energy(const ModalState& state, const TwoModeSystem& sys);

struct GalerkinState {
    double t = 0.0;
    std::vector<double> u, u_dot;
};

/// Per-mode forcing coefficients F_i(t); an empty list means F = 0.
using Forcing = std::vector<std::function<double(double)>>;

/// Returns (u_1', u_1'', ..., u_K', u_K''). Throws DimensionMismatch when the
/// state, modes and forcing disagree in size.
std::vector<double> galerkin_rhs(const GalerkinState& state, const std::vector<Eigenpair>& modes,
                                 const PlateConfig& config, const Forcing& forcing = {});

/// Mechanical energy of the truncation (without forcing potential).
double galerkin_energy(const GalerkinState& state, const std::vector<Eigenpair>& modes,
                       const PlateConfig& config);

struct LedgerEntry {
    double energy = 0.0;
    double dissipated = 0.0;    ///< delta * integral of sum u_i'^2
    double forcing_work = 0.0;  ///< integral of sum F_i u_i'
};

/// Time samples in the layout (u_1, u_1', u_2, u_2', ...); for the two-mode
/// system that is (phi, phi', psi, psi').
struct Trajectory {
    enum class Kind { TwoMode, Galerkin };

    Kind kind = Kind::TwoMode;
    std::vector<double> t;
    std::vector<std::vector<double>> states;
    std::vector<LedgerEntry> ledger;
    ode::Stats stats;
    /// max over samples of |E + dissipated - work - E(0)| / max(|E(0)|, 1).
    double max_drift = 0.0;

    std::size_t size() const { return t.size(); }
    std::size_t coordinates() const { return states.empty() ? 0 : states.front().size() / 2; }
    ModalState modal(std::size_t k) const;
};

/// rel_tol and abs_tol state the accuracy wanted over the whole run. A plain
/// local-error controller accumulates up to 1e4 rel_tol of energy drift over
/// t = 60 on these systems, so the step controller runs at
/// local_tol_factor times the requested tolerances.
struct IntegrateOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double local_tol_factor = 1e-3;
    /// Uniform output spacing; 0 records every accepted step.
    double sample_interval = 0.0;
    /// Relative drift of the balanced energy that raises EnergyDriftExceeded.
    double drift_ceiling = 1e-6;
};

/// Throws DomainError for tolerances outside [1e-14, 1e-3] or t_end <= t0,
/// StepSizeUnderflow, and EnergyDriftExceeded.
Trajectory integrate(const TwoModeSystem& sys, const ModalState& initial, double t_end,
                     const IntegrateOptions& opts = {});

Trajectory integrate_galerkin(const std::vector<Eigenpair>& modes, const PlateConfig& config,
                              const GalerkinState& initial, double t_end,
                              const Forcing& forcing = {}, const IntegrateOptions& opts = {});

/// sqrt((P - Lambda1) / S) when P > Lambda1, else 0.
double steady_state_lambda_plus(double P, double Lambda1, double S);

struct AsymptoticVerdict {
    enum class Kind { ConvergedTo, Oscillating, Undecided };
    Kind kind = Kind::Undecided;
    std::size_t target = 0;  ///< meaningful for ConvergedTo

    friend bool operator==(const AsymptoticVerdict&, const AsymptoticVerdict&) = default;
};

/// Classifies the trailing `window` of a trajectory against candidate limits
/// (coordinate vectors u, one per target). ConvergedTo(j) when every sample
/// of the window lies within tol of target j with velocity norm below tol;
/// Oscillating when the phase-space distance to every target stays above
/// 10 tol throughout the window; Undecided otherwise. Throws WindowTooLong.
AsymptoticVerdict asymptotic_verdict(const Trajectory& traj,
                                     const std::vector<std::vector<double>>& targets,
                                     double window, double tol);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace plate
