#include "plate/modal_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "plate/errors.hpp"
#include "plate/format.hpp"

namespace plate {

TwoModeSystem::TwoModeSystem(ModeIndex primary, double Lambda_primary, ModeIndex secondary,
                             double Lambda_secondary, const PlateConfig& config)
    : primary_(primary),
      secondary_(secondary),
      Lp_(Lambda_primary),
      Ls_(Lambda_secondary),
      P_(config.prestress()),
      S_(config.stiffness()),
      delta_(config.damping()) {
    validate(primary);
    validate(secondary);
    if (primary == secondary) throw DomainError("the two modes of a pairing must differ");
    if (!(Lambda_primary > 0.0) || !(Lambda_secondary > 0.0))
        throw DomainError("modal eigenvalues must be positive");
}

TwoModeSystem::TwoModeSystem(const Eigenpair& primary, const Eigenpair& secondary,
                             const PlateConfig& config)
    : TwoModeSystem(primary.mode, primary.Lambda, secondary.mode, secondary.Lambda, config) {}

TwoModeSystem TwoModeSystem::with_damping(double delta) const {
    if (!(delta >= 0.0)) throw DomainError("damping must be nonnegative");
    TwoModeSystem s = *this;
    s.delta_ = delta;
    return s;
}

std::array<double, 4> two_mode_rhs(const ModalState& s, const TwoModeSystem& sys) {
    const double m2 = static_cast<double>(sys.m()) * sys.m();
    const double n2 = static_cast<double>(sys.n()) * sys.n();
    const double coupling = sys.S() * (m2 * s.phi * s.phi + n2 * s.psi * s.psi);
    const double phi_acc = -sys.delta() * s.phi_dot - m2 * (sys.Lambda_primary() - sys.P()) * s.phi -
                           m2 * coupling * s.phi;
    const double psi_acc = -sys.delta() * s.psi_dot -
                           n2 * (sys.Lambda_secondary() - sys.P()) * s.psi - n2 * coupling * s.psi;
    return {s.phi_dot, phi_acc, s.psi_dot, psi_acc};
}

double two_mode_energy(const ModalState& s, const TwoModeSystem& sys) {
    const double m2 = static_cast<double>(sys.m()) * sys.m();
    const double n2 = static_cast<double>(sys.n()) * sys.n();
    const double q = m2 * s.phi * s.phi + n2 * s.psi * s.psi;
    return 0.5 * (s.phi_dot * s.phi_dot + s.psi_dot * s.psi_dot) +
           0.5 * m2 * (sys.Lambda_primary() - sys.P()) * s.phi * s.phi +
           0.5 * n2 * (sys.Lambda_secondary() - sys.P()) * s.psi * s.psi + 0.25 * sys.S() * q * q;
}

namespace {

void check_galerkin_sizes(std::size_t state_u, std::size_t state_v, std::size_t modes,
                          std::size_t forcing) {
    if (modes == 0) throw DimensionMismatch("a Galerkin truncation needs at least one mode");
    if (state_u != modes || state_v != modes)
        throw DimensionMismatch("state has " + std::to_string(state_u) + " coordinates for " +
                                std::to_string(modes) + " modes");
    if (forcing != 0 && forcing != modes)
        throw DimensionMismatch("forcing has " + std::to_string(forcing) + " entries for " +
                                std::to_string(modes) + " modes");
}

// Interleaved (u_1, u_1', ..., u_K, u_K') form shared by both systems.
struct Model {
    std::size_t K;
    std::vector<double> lambda;  // lambda_i = m_i^2 Lambda_i
    std::vector<double> m2;      // m_i^2
    double P, S, delta;
    const Forcing* forcing;

    void accel(double t, const double* y, double* dy) const {
        double q = 0.0;
        for (std::size_t i = 0; i < K; ++i) q += m2[i] * y[2 * i] * y[2 * i];
        const double Phi = -P + S * q;
        for (std::size_t i = 0; i < K; ++i) {
            const double u = y[2 * i], v = y[2 * i + 1];
            double a = -delta * v - lambda[i] * u - Phi * m2[i] * u;
            if (forcing && !forcing->empty()) a += (*forcing)[i](t);
            dy[2 * i] = v;
            dy[2 * i + 1] = a;
        }
    }

    double energy(const double* y) const {
        double q = 0.0, e = 0.0;
        for (std::size_t i = 0; i < K; ++i) {
            const double u = y[2 * i], v = y[2 * i + 1];
            q += m2[i] * u * u;
            e += 0.5 * v * v + 0.5 * (lambda[i] - P * m2[i]) * u * u;
        }
        return e + 0.25 * S * q * q;
    }
};

Model two_mode_model(const TwoModeSystem& sys) {
    const double m2 = static_cast<double>(sys.m()) * sys.m();
    const double n2 = static_cast<double>(sys.n()) * sys.n();
    return {2, {m2 * sys.Lambda_primary(), n2 * sys.Lambda_secondary()}, {m2, n2},
            sys.P(), sys.S(), sys.delta(), nullptr};
}

Model galerkin_model(const std::vector<Eigenpair>& modes, const PlateConfig& cfg,
                     const Forcing* forcing) {
    Model md{modes.size(), {}, {}, cfg.prestress(), cfg.stiffness(), cfg.damping(), forcing};
    for (const auto& e : modes) {
        md.lambda.push_back(e.lambda);
        md.m2.push_back(static_cast<double>(e.mode.m) * e.mode.m);
    }
    return md;
}

Trajectory run(const Model& md, Trajectory::Kind kind, double t0, std::vector<double> y0,
               double t_end, const IntegrateOptions& opts) {
    for (double tol : {opts.rel_tol, opts.abs_tol})
        if (!(tol >= 1e-14 && tol <= 1e-3))
            throw DomainError("integration tolerances must lie in [1e-14, 1e-3]");
    if (!(opts.local_tol_factor > 0.0 && opts.local_tol_factor <= 1.0))
        throw DomainError("local tolerance factor must lie in (0, 1]");
    if (!(t_end > t0)) throw DomainError("t_end must exceed the initial time");
    if (!(opts.sample_interval >= 0.0)) throw DomainError("sample interval must be nonnegative");
    for (double v : y0)
        if (!std::isfinite(v)) throw DomainError("initial state must be finite");

    const std::size_t dim = 2 * md.K;
    y0.resize(dim + 2, 0.0);  // + dissipated, forcing work
    const bool forced = md.forcing && !md.forcing->empty();
    auto rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
        md.accel(t, y.data(), dy.data());
        double diss = 0.0, work = 0.0;
        for (std::size_t i = 0; i < md.K; ++i) {
            const double v = y[2 * i + 1];
            diss += v * v;
            if (forced) work += (*md.forcing)[i](t) * v;
        }
        dy[dim] = md.delta * diss;
        dy[dim + 1] = work;
    };

    Trajectory traj;
    traj.kind = kind;
    const double e0 = md.energy(y0.data());
    const double scale = std::max(std::abs(e0), 1.0);

    auto record = [&](double t, const double* y) {
        LedgerEntry entry{md.energy(y), y[dim], y[dim + 1]};
        const double drift = std::abs(entry.energy + entry.dissipated - entry.forcing_work - e0) / scale;
        traj.max_drift = std::max(traj.max_drift, drift);
        if (drift > opts.drift_ceiling)
            throw EnergyDriftExceeded("energy balance drifted by " + sci(drift) + " at t = " +
                                      sci(t));
        traj.t.push_back(t);
        traj.states.emplace_back(y, y + dim);
        traj.ledger.push_back(entry);
    };
    record(t0, y0.data());

    std::size_t next_sample = 1;
    std::vector<double> buf(dim + 2);
    auto observer = [&](const ode::Segment& seg) {
        if (opts.sample_interval == 0.0) {
            record(seg.t1(), seg.y1().data());
            return;
        }
        for (;;) {
            const double ts = t0 + static_cast<double>(next_sample) * opts.sample_interval;
            if (ts > seg.t1() || ts >= t_end) break;
            seg.eval(ts, buf);
            record(ts, buf.data());
            ++next_sample;
        }
        if (seg.t1() == t_end) record(t_end, seg.y1().data());
    };

    ode::StepControl ctl;
    ctl.rel_tol = opts.rel_tol * opts.local_tol_factor;
    ctl.abs_tol = opts.abs_tol * opts.local_tol_factor;
    ode::Dopri5 solver(rhs, dim + 2, ctl);
    solver.integrate(t0, y0, t_end, observer);
    traj.stats = solver.stats();
    return traj;
}

}  // namespace

std::vector<double> galerkin_rhs(const GalerkinState& state, const std::vector<Eigenpair>& modes,
                                 const PlateConfig& config, const Forcing& forcing) {
    check_galerkin_sizes(state.u.size(), state.u_dot.size(), modes.size(), forcing.size());
    const Model md = galerkin_model(modes, config, &forcing);
    std::vector<double> y(2 * md.K), dy(2 * md.K);
    for (std::size_t i = 0; i < md.K; ++i) {
        y[2 * i] = state.u[i];
        y[2 * i + 1] = state.u_dot[i];
    }
    md.accel(state.t, y.data(), dy.data());
    return dy;
}

double galerkin_energy(const GalerkinState& state, const std::vector<Eigenpair>& modes,
                       const PlateConfig& config) {
    check_galerkin_sizes(state.u.size(), state.u_dot.size(), modes.size(), 0);
    const Model md = galerkin_model(modes, config, nullptr);
    std::vector<double> y(2 * md.K);
    for (std::size_t i = 0; i < md.K; ++i) {
        y[2 * i] = state.u[i];
        y[2 * i + 1] = state.u_dot[i];
    }
    return md.energy(y.data());
}

ModalState Trajectory::modal(std::size_t k) const {
    if (coordinates() != 2) throw DimensionMismatch("modal view needs a two-coordinate trajectory");
    const auto& s = states.at(k);
    return {t[k], s[0], s[1], s[2], s[3]};
}

Trajectory integrate(const TwoModeSystem& sys, const ModalState& initial, double t_end,
                     const IntegrateOptions& opts) {
    return run(two_mode_model(sys), Trajectory::Kind::TwoMode, initial.t,
               {initial.phi, initial.phi_dot, initial.psi, initial.psi_dot}, t_end, opts);
}

Trajectory integrate_galerkin(const std::vector<Eigenpair>& modes, const PlateConfig& config,
                              const GalerkinState& initial, double t_end, const Forcing& forcing,
                              const IntegrateOptions& opts) {
    check_galerkin_sizes(initial.u.size(), initial.u_dot.size(), modes.size(), forcing.size());
    const Model md = galerkin_model(modes, config, &forcing);
    std::vector<double> y(2 * md.K);
    for (std::size_t i = 0; i < md.K; ++i) {
        y[2 * i] = initial.u[i];
        y[2 * i + 1] = initial.u_dot[i];
    }
    return run(md, Trajectory::Kind::Galerkin, initial.t, std::move(y), t_end, opts);
}

double steady_state_lambda_plus(double P, double Lambda1, double S) {
    if (!(S > 0.0)) throw DomainError("stiffness S must be positive");
    return P > Lambda1 ? std::sqrt((P - Lambda1) / S) : 0.0;
}

AsymptoticVerdict asymptotic_verdict(const Trajectory& traj,
                                     const std::vector<std::vector<double>>& targets,
                                     double window, double tol) {
    if (traj.size() < 2) throw WindowTooLong("trajectory has fewer than two samples");
    if (!(window > 0.0) || !(tol > 0.0)) throw DomainError("window and tolerance must be positive");
    const double t_last = traj.t.back();
    if (window > t_last - traj.t.front())
        throw WindowTooLong("window " + sci(window) + " exceeds the trajectory span");
    const std::size_t K = traj.coordinates();
    for (const auto& target : targets)
        if (target.size() != K) throw DimensionMismatch("target dimension differs from trajectory");

    const auto begin = std::lower_bound(traj.t.begin(), traj.t.end(), t_last - window) - traj.t.begin();
    std::vector<double> worst_position(targets.size(), 0.0);
    std::vector<double> closest_phase(targets.size(), std::numeric_limits<double>::infinity());
    double worst_velocity = 0.0;
    for (auto k = static_cast<std::size_t>(begin); k < traj.size(); ++k) {
        const auto& s = traj.states[k];
        double v2 = 0.0;
        for (std::size_t i = 0; i < K; ++i) v2 += s[2 * i + 1] * s[2 * i + 1];
        worst_velocity = std::max(worst_velocity, std::sqrt(v2));
        for (std::size_t j = 0; j < targets.size(); ++j) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < K; ++i) d2 += std::pow(s[2 * i] - targets[j][i], 2);
            worst_position[j] = std::max(worst_position[j], std::sqrt(d2));
            closest_phase[j] = std::min(closest_phase[j], std::sqrt(d2 + v2));
        }
    }
    for (std::size_t j = 0; j < targets.size(); ++j)
        if (worst_position[j] < tol && worst_velocity < tol)
            return {AsymptoticVerdict::Kind::ConvergedTo, j};
    if (std::all_of(closest_phase.begin(), closest_phase.end(),
                    [&](double d) { return d > 10.0 * tol; }))
        return {AsymptoticVerdict::Kind::Oscillating, 0};
    return {AsymptoticVerdict::Kind::Undecided, 0};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    if (traj.kind == Trajectory::Kind::TwoMode) {
        os << "t,phi,phi_dot,psi,psi_dot,energy\n";
    } else {
        os << "t";
        for (std::size_t i = 1; i <= traj.coordinates(); ++i) os << ",u_" << i << ",u_" << i << "_dot";
        os << ",energy\n";
    }
    for (std::size_t k = 0; k < traj.size(); ++k) {
        os << sci(traj.t[k]);
        for (double v : traj.states[k]) os << ',' << sci(v);
        os << ',' << sci(traj.ledger[k].energy) << '\n';
    }
}

}  // namespace plate
