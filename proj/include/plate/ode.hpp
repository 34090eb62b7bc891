#pragma once

// Embedded Dormand-Prince 5(4) integrator with the standard fourth-order
// continuous extension (Hairer, Norsett & Wanner, "Solving ODEs I", II.6).

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace plate::ode {

using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct StepControl {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  // 0 selects a step automatically
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 100'000'000;
};

struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
};

/// One accepted step [t0, t1] with dense output over it.
class Segment {
public:
    double t0() const { return t0_; }
    double t1() const { return t1_; }
    std::span<const double> y0() const { return y0_; }
    std::span<const double> y1() const { return y1_; }

    /// Interpolated state at t in [t0, t1].
    void eval(double t, std::span<double> out) const;
    double eval(double t, std::size_t component) const;

private:
    friend class Dopri5;
    double t0_ = 0.0, t1_ = 0.0;
    std::vector<double> y0_, y1_;
    std::vector<double> r2_, r3_, r4_, r5_;
};

using Observer = std::function<void(const Segment&)>;

class Dopri5 {
public:
    Dopri5(Rhs rhs, std::size_t dim, StepControl control = {});

    /// Advances y from t0 to exactly t_end (t_end > t0). The observer, when
    /// given, sees every accepted step. Throws StepSizeUnderflow when the step
    /// collapses below roundoff and NonConvergence past max_steps.
    void integrate(double t0, std::span<double> y, double t_end, const Observer& observer = {});

    const Stats& stats() const { return stats_; }
    std::size_t dim() const { return dim_; }

private:
    double initial_step(double t0, std::span<const double> y, std::span<const double> f0,
                        double span) const;
    double error_norm(std::span<const double> y0, std::span<const double> y1,
                      std::span<const double> err) const;

    Rhs rhs_;
    std::size_t dim_;
    StepControl ctl_;
    Stats stats_;
};

/// Convenience: integrate and return the final state.
std::vector<double> solve(const Rhs& rhs, double t0, std::vector<double> y0, double t_end,
                          const StepControl& control = {});

}  // namespace plate::ode
