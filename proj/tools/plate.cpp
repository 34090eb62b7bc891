// Command-line front end: eigen, simulate, floquet, scan-amplitude, scan-damping.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "plate/errors.hpp"
#include "plate/floquet.hpp"
#include "plate/format.hpp"
#include "plate/modal_dynamics.hpp"
#include "plate/scan.hpp"
#include "plate/spectrum.hpp"

#ifndef PLATE_VERSION
#define PLATE_VERSION "0.0.0"
#endif

namespace {

using json = nlohmann::ordered_json;
using namespace plate;

struct PlateArgs {
    double l = PlateConfig::kDefaultHalfWidth;
    double sigma = PlateConfig::kDefaultSigma;
    double P = PlateConfig::kDefaultPrestress;
    double S = PlateConfig::kDefaultStiffness;
    double delta = 0.0;
    std::string out = ".";
    std::string format = "csv";
};

struct PairArgs {
    int m = 6, i = 1, n = 2, k = 1;
    std::string carrier = "longitudinal";
    std::string perturbation = "torsional";
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

PlateConfig make_config(const PlateArgs& a) {
    try {
        return PlateConfig(a.l, a.sigma, a.P, a.S, a.delta);
    } catch (const plate::Error& e) {
        throw ConfigError(e.what());
    }
}

double resolve_eigenvalue(const ModeIndex& mode, const PlateConfig& cfg) {
    validate(mode);
    for (double ceiling = 50.0 * mode.m * mode.m;; ceiling *= 4.0) {
        try {
            return find_eigenvalues(mode.m, mode.parity, mode.i, cfg, ceiling).back().Lambda;
        } catch (const BracketingFailure&) {
            if (ceiling > 1e9) throw;
        }
    }
}

TwoModeSystem make_pair(const PairArgs& p, const PlateConfig& cfg) {
    const ModeIndex a{p.m, parse_parity(p.carrier), p.i};
    const ModeIndex b{p.n, parse_parity(p.perturbation), p.k};
    return TwoModeSystem(a, resolve_eigenvalue(a, cfg), b, resolve_eigenvalue(b, cfg), cfg);
}

void add_plate_options(CLI::App& app, PlateArgs& a) {
    app.add_option("--l", a.l, "half width of the plate")->capture_default_str();
    app.add_option("--sigma", a.sigma, "Poisson ratio, in (0, 1/2)")->capture_default_str();
    app.add_option("--P", a.P, "prestress")->capture_default_str();
    app.add_option("--S", a.S, "nonlinear stiffness")->capture_default_str();
    app.add_option("--delta", a.delta, "damping")->capture_default_str();
    app.add_option("--out", a.out, "output directory")->capture_default_str();
    app.add_option("--format", a.format, "report format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

void add_pair_options(CLI::App& app, PairArgs& p) {
    app.add_option("--m", p.m, "carrier mode index m")->capture_default_str();
    app.add_option("--i", p.i, "carrier branch index")->capture_default_str();
    app.add_option("--n", p.n, "perturbation mode index n")->capture_default_str();
    app.add_option("--k", p.k, "perturbation branch index")->capture_default_str();
    app.add_option("--carrier", p.carrier, "carrier parity")->capture_default_str();
    app.add_option("--perturbation", p.perturbation, "perturbation parity")->capture_default_str();
}

class Reporter {
public:
    Reporter(const CLI::App& root, const PlateArgs& args) : args_(args) {
        // keep global keys and those of the subcommand that ran
        std::string active;
        if (!root.get_subcommands().empty()) active = root.get_subcommands().front()->get_name() + ".";
        std::istringstream lines(root.config_to_str(true, false));
        for (std::string line; std::getline(lines, line);) {
            const auto eq = line.find('=');
            const auto key = line.substr(0, eq);
            if (key.find('.') == std::string::npos || key.rfind(active, 0) == 0) config_ += line + '\n';
        }
        std::filesystem::create_directories(args.out);
    }

    bool json_format() const { return args_.format == "json"; }

    json header() const {
        json j;
        j["version"] = PLATE_VERSION;
        j["config"] = config_;
        return j;
    }

    void write(const std::string& name, const std::string& body, bool with_provenance) const {
        const auto path = std::filesystem::path(args_.out) / name;
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write " + path.string());
        if (with_provenance) {
            os << "# plate " << PLATE_VERSION << '\n';
            std::istringstream lines(config_);
            for (std::string line; std::getline(lines, line);)
                if (!line.empty()) os << "# " << line << '\n';
        }
        os << body;
        std::cout << "wrote " << path.string() << '\n';
    }

    void write_json(const std::string& name, const json& j) const { write(name, j.dump(2) + "\n", false); }

private:
    const PlateArgs& args_;
    std::string config_;
};

json pair_json(const TwoModeSystem& s) {
    return {{"m", s.m()},
            {"carrier_parity", std::string(to_string(s.primary().parity))},
            {"i", s.primary().i},
            {"n", s.n()},
            {"perturbation_parity", std::string(to_string(s.secondary().parity))},
            {"k", s.secondary().i},
            {"Lambda_carrier", s.Lambda_primary()},
            {"Lambda_perturbation", s.Lambda_secondary()},
            {"mu", s.mu()},
            {"nu", s.nu()},
            {"gamma", s.gamma()}};
}

// ---- eigen ----------------------------------------------------------------

void run_eigen(const CLI::App& root, const PlateArgs& args, double ceiling) {
    const PlateConfig cfg = make_config(args);
    const auto g = global_ordering(cfg, ceiling);
    Reporter rep(root, args);
    if (rep.json_format()) {
        json j = rep.header();
        j["ceiling"] = ceiling;
        j["entries"] = json::array();
        for (std::size_t k = 0; k < g.entries.size(); ++k) {
            const auto& e = g.entries[k];
            j["entries"].push_back({{"index", k + 1},
                                    {"m", e.mode.m},
                                    {"parity", std::string(to_string(e.mode.parity))},
                                    {"i", e.mode.i},
                                    {"Lambda", e.Lambda},
                                    {"lambda", e.lambda},
                                    {"regime", std::string(to_string(e.regime))},
                                    {"A", e.coefficients.first},
                                    {"B", e.coefficients.second},
                                    {"residual", e.residual}});
        }
        j["first_torsional_index"] =
            g.first_torsional_index ? json(*g.first_torsional_index) : json(nullptr);
        rep.write_json("eigen.json", j);
    } else {
        std::ostringstream os;
        os << "index,m,parity,i,Lambda,lambda,regime,A,B,residual\n";
        for (std::size_t k = 0; k < g.entries.size(); ++k) {
            const auto& e = g.entries[k];
            os << k + 1 << ',' << e.mode.m << ',' << to_string(e.mode.parity) << ',' << e.mode.i << ','
               << sci(e.Lambda) << ',' << sci(e.lambda) << ',' << to_string(e.regime) << ','
               << sci(e.coefficients.first) << ',' << sci(e.coefficients.second) << ','
               << sci(e.residual) << '\n';
        }
        rep.write("eigen.csv", os.str(), true);
    }
    std::cout << g.entries.size() << " eigenvalues below " << sci(ceiling) << "; first torsional index: "
              << (g.first_torsional_index ? std::to_string(*g.first_torsional_index) : "none") << '\n';
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
    std::string variables = "rescaled";
    double u0 = 24.3, ratio = 1e-3, horizon = 60.0, sample = 0.01;
    double phi0 = 0.0, phidot0 = 0.0, psi0 = 0.0, psidot0 = 0.0;
};

void run_simulate(const CLI::App& root, const PlateArgs& args, const PairArgs& pair,
                  const SimulateArgs& sim) {
    const PlateConfig cfg = make_config(args);
    const TwoModeSystem sys = make_pair(pair, cfg);
    Trajectory traj;
    double G = 0.0;
    if (sim.variables == "rescaled") {
        ScanSpec spec(sys);
        spec.perturbation_ratio = sim.ratio;
        spec.horizon_T = sim.horizon;
        traj = rescaled_trajectory(sys, sim.u0, spec, sim.sample);
        double peak = 0.0;
        for (const auto& s : traj.states) peak = std::max(peak, std::abs(s[2]));
        G = peak / (sim.ratio * sim.u0);
    } else {
        IntegrateOptions opts;
        opts.sample_interval = sim.sample;
        traj = integrate(sys, {0.0, sim.phi0, sim.phidot0, sim.psi0, sim.psidot0}, sim.horizon, opts);
        double peak = 0.0;
        for (const auto& s : traj.states) peak = std::max(peak, std::abs(s[2]));
        G = sim.psi0 != 0.0 ? peak / std::abs(sim.psi0) : 0.0;
    }
    Reporter rep(root, args);
    std::ostringstream os, phi, psi;
    write_trajectory_csv(os, traj);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        phi << sci(traj.t[k]) << ' ' << sci(traj.states[k][0]) << '\n';
        psi << sci(traj.t[k]) << ' ' << sci(traj.states[k][2]) << '\n';
    }
    rep.write("trajectory.csv", os.str(), true);
    rep.write("phi.dat", phi.str(), false);
    rep.write("psi.dat", psi.str(), false);

    json summary = rep.header();
    summary["system"] = pair_json(sys);
    summary["variables"] = sim.variables;
    summary["samples"] = traj.size();
    summary["growth_factor"] = G;
    summary["initial_energy"] = traj.ledger.front().energy;
    summary["final_energy"] = traj.ledger.back().energy;
    summary["dissipated"] = traj.ledger.back().dissipated;
    summary["max_balance_drift"] = traj.max_drift;
    summary["steps_accepted"] = traj.stats.accepted;
    summary["steps_rejected"] = traj.stats.rejected;
    rep.write_json("simulate.json", summary);
    std::cout << "growth factor " << sci(G) << ", energy " << sci(traj.ledger.front().energy) << " -> "
              << sci(traj.ledger.back().energy) << '\n';
}

// ---- floquet --------------------------------------------------------------

struct FloquetArgs {
    double E_min = 1.0, E_max = 1e5;
    int points = 50;
    bool log_grid = false;
};

void run_floquet(const CLI::App& root, const PlateArgs& args, const PairArgs& pair,
                 const FloquetArgs& fa) {
    const PlateConfig cfg = make_config(args);
    const TwoModeSystem sys = make_pair(pair, cfg);
    if (fa.points < 1) throw DomainError("--points must be positive");
    if (!(fa.E_min > 0.0) || fa.E_max < fa.E_min) throw DomainError("need 0 < E-min <= E-max");
    std::vector<double> grid;
    for (int k = 0; k < fa.points; ++k) {
        const double s = fa.points == 1 ? 0.0 : static_cast<double>(k) / (fa.points - 1);
        grid.push_back(fa.log_grid ? fa.E_min * std::pow(fa.E_max / fa.E_min, s)
                                   : fa.E_min + s * (fa.E_max - fa.E_min));
    }
    const auto rows = stability_over_energy(sys, grid);
    const auto cls = classify_gamma(sys.gamma());
    std::optional<double> e_small;
    try {
        e_small = zhukovskii_energy_limit(sys.mu(), sys.nu(), sys.gamma());
    } catch (const PreconditionFailed&) {
    }

    Reporter rep(root, args);
    if (rep.json_format()) {
        json j = rep.header();
        j["system"] = pair_json(sys);
        j["gamma_class"] = {{"kind", std::string(to_string(cls.kind))}, {"j", cls.j}, {"lo", cls.lo}, {"hi", cls.hi}};
        j["zhukovskii_energy_limit"] = e_small ? json(*e_small) : json(nullptr);
        j["rows"] = json::array();
        for (const auto& r : rows)
            j["rows"].push_back({{"E", r.E}, {"mu", r.mu}, {"nu", r.nu}, {"gamma", r.gamma},
                                 {"trace", r.trace}, {"verdict", std::string(to_string(r.verdict))}});
        rep.write_json("stability.json", j);
    } else {
        std::ostringstream os;
        write_stability_csv(os, rows);
        rep.write("stability.csv", os.str(), true);
    }
    std::cout << "gamma = " << sci(sys.gamma()) << " in " << to_string(cls.kind) << "_" << cls.j << " ("
              << sci(cls.lo) << ", " << sci(cls.hi) << ")\n";
    std::cout << "Zhukovskii energy limit: " << (e_small ? sci(*e_small) : std::string("none")) << '\n';
    std::size_t unstable = 0;
    for (const auto& r : rows) unstable += r.verdict == Stability::Unstable;
    std::cout << unstable << " of " << rows.size() << " energies unstable\n";
}

// ---- scans ----------------------------------------------------------------

struct ScanArgs {
    double u0_min = 1.0, u0_max = 100.0;
    int grid = 200;
    double threshold = 10.0, horizon = 60.0, ratio = 1e-3;
    std::string convention = "rescaled";
    double onset_ceiling = 0.0;
    // damping
    double u0 = 0.0, energy = 0.0, delta_hi = 0.5, long_horizon = 150.0;
};

ScanSpec make_spec(const TwoModeSystem& sys, const ScanArgs& a) {
    ScanSpec spec(sys);
    spec.u0_lo = a.u0_min;
    spec.u0_hi = a.u0_max;
    spec.grid_points = a.grid;
    spec.growth_threshold = a.threshold;
    spec.horizon_T = a.horizon;
    spec.perturbation_ratio = a.ratio;
    spec.convention = parse_energy_convention(a.convention);
    spec.validate();
    return spec;
}

json spec_json(const ScanSpec& s) {
    return {{"u0_range", {s.u0_lo, s.u0_hi}},
            {"grid_points", s.grid_points},
            {"perturbation_ratio", s.perturbation_ratio},
            {"horizon_T", s.horizon_T},
            {"growth_threshold", s.growth_threshold},
            {"endpoint_width", s.endpoint_width},
            {"energy_convention", std::string(to_string(s.convention))}};
}

void run_scan_amplitude(const CLI::App& root, const PlateArgs& args, const PairArgs& pair,
                        const ScanArgs& sa) {
    const PlateConfig cfg = make_config(args);
    const TwoModeSystem sys = make_pair(pair, cfg);
    const ScanSpec spec = make_spec(sys, sa);
    Reporter rep(root, args);
    json j = rep.header();
    j["system"] = pair_json(sys);
    j["spec"] = spec_json(spec);

    if (sa.onset_ceiling > 0.0) {
        const auto onset = instability_onset(sys, spec, sa.onset_ceiling);
        j["onset"] = {{"u0", onset.u0}, {"E", onset.E}};
        rep.write_json("onset.json", j);
        std::cout << "instability onset u0 = " << sci(onset.u0) << ", E = " << sci(onset.E) << '\n';
        return;
    }
    const auto report = find_instability_intervals(spec);
    j["convention_note"] = report.convention_note;
    j["intervals"] = json::array();
    for (const auto& iv : report.intervals)
        j["intervals"].push_back({{"u0_lo", iv.u0_lo}, {"u0_hi", iv.u0_hi}, {"E_lo", iv.E_lo},
                                  {"E_hi", iv.E_hi}, {"clipped_lo", iv.clipped_lo},
                                  {"clipped_hi", iv.clipped_hi}});
    if (rep.json_format()) {
        j["samples"] = json::array();
        for (const auto& s : report.samples)
            j["samples"].push_back({{"u0", s.u0}, {"E", s.E}, {"G", s.G}, {"unstable", s.unstable}});
        rep.write_json("scan.json", j);
    } else {
        std::ostringstream os;
        write_scan_csv(os, report);
        rep.write("scan.csv", os.str(), true);
        rep.write_json("scan-intervals.json", j);
    }
    if (report.intervals.empty()) std::cout << "no instability detected\n";
    for (const auto& iv : report.intervals)
        std::cout << "unstable u0 in (" << sci(iv.u0_lo) << ", " << sci(iv.u0_hi) << "), E in ("
                  << sci(iv.E_lo) << ", " << sci(iv.E_hi) << ")\n";
}

void run_scan_damping(const CLI::App& root, const PlateArgs& args, const PairArgs& pair,
                      const ScanArgs& sa) {
    const PlateConfig cfg = make_config(args);
    const TwoModeSystem sys = make_pair(pair, cfg);
    ScanArgs a = sa;
    a.u0_max = std::max(a.u0_max, a.u0_min * 2.0);
    const ScanSpec spec = make_spec(sys, a);
    if ((sa.u0 > 0.0) == (sa.energy > 0.0)) throw DomainError("give exactly one of --u0 and --energy");
    const double u0 = sa.u0 > 0.0 ? sa.u0
                                  : amplitude_for_energy(sys, sa.energy, spec.perturbation_ratio,
                                                         spec.convention);
    const auto r = damping_threshold(sys, u0, spec, sa.delta_hi, sa.long_horizon);
    Reporter rep(root, args);
    json j = rep.header();
    j["system"] = pair_json(sys);
    j["spec"] = spec_json(spec);
    j["u0"] = u0;
    j["energy"] = energy_for_amplitude(sys, u0, spec.perturbation_ratio, spec.convention);
    j["delta_threshold"] = r.delta;
    j["growth_at_threshold"] = r.G;
    j["long_horizon"] = sa.long_horizon;
    j["growth_long_horizon"] = r.G_long;
    j["long_horizon_stable"] = r.long_horizon_stable;
    rep.write_json("damping.json", j);
    std::cout << "damping threshold delta = " << sci(r.delta) << " at u0 = " << sci(u0) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectrum, modal dynamics and stability of a partially hinged plate"};
    app.set_version_flag("--version", PLATE_VERSION);
    app.set_config("--config", "", "key = value configuration file with [section] headers");
    app.require_subcommand(1);

    PlateArgs plate_args;
    add_plate_options(app, plate_args);
    PairArgs pair;
    SimulateArgs sim;
    FloquetArgs fa;
    ScanArgs sa;
    double ceiling = 100.0;

    auto* eigen = app.add_subcommand("eigen", "global ordering of the buckling eigenvalues");
    eigen->add_option("--ceiling", ceiling, "largest Lambda reported")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "integrate a two-mode system");
    add_pair_options(*simulate, pair);
    simulate->add_option("--variables", sim.variables, "rescaled or original")
        ->check(CLI::IsMember({"rescaled", "original"}))
        ->capture_default_str();
    simulate->add_option("--u0", sim.u0, "carrier amplitude (rescaled)")->capture_default_str();
    simulate->add_option("--ratio", sim.ratio, "psi(0) / phi(0) (rescaled)")->capture_default_str();
    simulate->add_option("--horizon", sim.horizon, "final time")->capture_default_str();
    simulate->add_option("--sample", sim.sample, "output spacing (0: every step)")->capture_default_str();
    simulate->add_option("--phi0", sim.phi0, "phi(0) (original)")->capture_default_str();
    simulate->add_option("--phidot0", sim.phidot0, "phi'(0) (original)")->capture_default_str();
    simulate->add_option("--psi0", sim.psi0, "psi(0) (original)")->capture_default_str();
    simulate->add_option("--psidot0", sim.psidot0, "psi'(0) (original)")->capture_default_str();

    auto* floquet = app.add_subcommand("floquet", "monodromy verdicts over rescaled energies");
    add_pair_options(*floquet, pair);
    floquet->add_option("--E-min", fa.E_min, "smallest energy")->capture_default_str();
    floquet->add_option("--E-max", fa.E_max, "largest energy")->capture_default_str();
    floquet->add_option("--points", fa.points, "grid points")->capture_default_str();
    floquet->add_flag("--log", fa.log_grid, "geometric energy grid");

    auto add_scan_options = [&](CLI::App& sub) {
        add_pair_options(sub, pair);
        sub.add_option("--u0-min", sa.u0_min, "lower end of the amplitude range")->capture_default_str();
        sub.add_option("--u0-max", sa.u0_max, "upper end of the amplitude range")->capture_default_str();
        sub.add_option("--grid", sa.grid, "grid points")->capture_default_str();
        sub.add_option("--threshold", sa.threshold, "growth factor flagging instability")->capture_default_str();
        sub.add_option("--horizon", sa.horizon, "integration horizon")->capture_default_str();
        sub.add_option("--ratio", sa.ratio, "psi(0) / u0")->capture_default_str();
        sub.add_option("--convention", sa.convention, "energy convention: rescaled or table-fit")
            ->check(CLI::IsMember({"rescaled", "table-fit"}))
            ->capture_default_str();
    };
    auto* scan_amp = app.add_subcommand("scan-amplitude", "instability intervals or onset in u0");
    add_scan_options(*scan_amp);
    scan_amp->add_option("--onset-ceiling", sa.onset_ceiling,
                         "search the instability onset up to this u0 instead of intervals");
    auto* scan_damp = app.add_subcommand("scan-damping", "least damping that removes the instability");
    add_scan_options(*scan_damp);
    scan_damp->add_option("--u0", sa.u0, "carrier amplitude");
    scan_damp->add_option("--energy", sa.energy, "energy level (converted with --convention)");
    scan_damp->add_option("--delta-hi", sa.delta_hi, "upper damping bracket")->capture_default_str();
    scan_damp->add_option("--long-horizon", sa.long_horizon, "confirmation horizon")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (eigen->parsed()) run_eigen(app, plate_args, ceiling);
        else if (simulate->parsed()) run_simulate(app, plate_args, pair, sim);
        else if (floquet->parsed()) run_floquet(app, plate_args, pair, fa);
        else if (scan_amp->parsed()) run_scan_amplitude(app, plate_args, pair, sa);
        else if (scan_damp->parsed()) run_scan_damping(app, plate_args, pair, sa);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 1;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition failed: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
