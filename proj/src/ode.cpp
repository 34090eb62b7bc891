#include "plate/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plate/errors.hpp"

namespace plate::ode {
namespace {

constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;
constexpr double kBeta = 0.04;

}  // namespace

void Segment::eval(double t, std::span<double> out) const {
    const double h = t1_ - t0_;
    const double s = h > 0.0 ? (t - t0_) / h : 1.0;
    const double s1 = 1.0 - s;
    for (std::size_t i = 0; i < y0_.size(); ++i)
        out[i] = y0_[i] + s * (r2_[i] + s1 * (r3_[i] + s * (r4_[i] + s1 * r5_[i])));
}

double Segment::eval(double t, std::size_t i) const {
    const double h = t1_ - t0_;
    const double s = h > 0.0 ? (t - t0_) / h : 1.0;
    const double s1 = 1.0 - s;
    return y0_[i] + s * (r2_[i] + s1 * (r3_[i] + s * (r4_[i] + s1 * r5_[i])));
}

Dopri5::Dopri5(Rhs rhs, std::size_t dim, StepControl control)
    : rhs_(std::move(rhs)), dim_(dim), ctl_(control) {
    if (!(ctl_.rel_tol > 0.0) || !(ctl_.abs_tol > 0.0))
        throw DomainError("integrator tolerances must be positive");
}

double Dopri5::error_norm(std::span<const double> y0, std::span<const double> y1,
                          std::span<const double> err) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double sc = ctl_.abs_tol + ctl_.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = err[i] / sc;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(dim_));
}

double Dopri5::initial_step(double t0, std::span<const double> y, std::span<const double> f0,
                            double span) const {
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double sk = ctl_.abs_tol + ctl_.rel_tol * std::abs(y[i]);
        dnf += (f0[i] / sk) * (f0[i] / sk);
        dny += (y[i] / sk) * (y[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min({h, ctl_.max_step, span});

    std::vector<double> y1(dim_), f1(dim_);
    for (std::size_t i = 0; i < dim_; ++i) y1[i] = y[i] + h * f0[i];
    rhs_(t0 + h, y1, f1);
    double der2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double sk = ctl_.abs_tol + ctl_.rel_tol * std::abs(y[i]);
        const double d = (f1[i] - f0[i]) / sk;
        der2 += d * d;
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3)
                                     : std::pow(0.01 / der12, 1.0 / 5.0);
    return std::min({100.0 * h, h1, ctl_.max_step, span});
}

void Dopri5::integrate(double t0, std::span<double> y, double t_end, const Observer& observer) {
    if (y.size() != dim_) throw DimensionMismatch("state size does not match integrator dimension");
    if (!(t_end > t0)) return;

    const std::size_t n = dim_;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n),
        err(n);

    rhs_(t0, y, k1);
    ++stats_.rhs_evals;

    double t = t0;
    double h = ctl_.initial_step > 0.0 ? std::min(ctl_.initial_step, t_end - t0)
                                       : initial_step(t0, y, k1, t_end - t0);
    if (ctl_.initial_step <= 0.0) ++stats_.rhs_evals;
    double facold = 1e-4;
    bool last_rejected = false;
    std::size_t steps = 0;

    Segment seg;
    if (observer) {
        seg.y0_.resize(n);
        seg.y1_.resize(n);
        seg.r2_.resize(n);
        seg.r3_.resize(n);
        seg.r4_.resize(n);
        seg.r5_.resize(n);
    }

    while (t < t_end) {
        if (++steps > ctl_.max_steps)
            throw NonConvergence("step budget exhausted at t = " + std::to_string(t));
        if (0.1 * std::abs(h) <= std::abs(t) * std::numeric_limits<double>::epsilon() ||
            h < 1e-300)
            throw StepSizeUnderflow("step size underflow at t = " + std::to_string(t));

        bool final_step = false;
        if (t + 1.01 * h >= t_end) {
            h = t_end - t;
            final_step = true;
        }

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs_(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs_(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs_(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs_(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] =
                y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs_(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] =
                y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        rhs_(t + h, ynew, k7);
        stats_.rhs_evals += 6;

        for (std::size_t i = 0; i < n; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);
        const double e = error_norm(y, ynew, err);

        const double fac11 = std::pow(std::max(e, 1e-300), 0.2 - kBeta * 0.75);
        double fac = fac11 / std::pow(facold, kBeta);
        fac = std::clamp(fac / kSafety, 1.0 / kFacMax, 1.0 / kFacMin);
        double hnew = h / fac;

        if (e <= 1.0 && std::isfinite(e)) {
            facold = std::max(e, 1e-4);
            ++stats_.accepted;
            if (observer) {
                seg.t0_ = t;
                seg.t1_ = final_step ? t_end : t + h;
                for (std::size_t i = 0; i < n; ++i) {
                    seg.y0_[i] = y[i];
                    seg.y1_[i] = ynew[i];
                    const double dy = ynew[i] - y[i];
                    const double bspl = h * k1[i] - dy;
                    seg.r2_[i] = dy;
                    seg.r3_[i] = bspl;
                    seg.r4_[i] = dy - h * k7[i] - bspl;
                    seg.r5_[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                      d6 * k6[i] + d7 * k7[i]);
                }
            }
            std::copy(ynew.begin(), ynew.end(), y.begin());
            std::swap(k1, k7);
            t = final_step ? t_end : t + h;
            if (observer) observer(seg);
            if (std::abs(hnew) > ctl_.max_step) hnew = ctl_.max_step;
            if (last_rejected) hnew = std::min(hnew, h);
            last_rejected = false;
            h = hnew;
        } else {
            if (!std::isfinite(e)) hnew = 0.1 * h;
            else hnew = h / std::min(1.0 / kFacMin, fac11 / kSafety);
            ++stats_.rejected;
            last_rejected = true;
            h = hnew;
        }
    }
}

std::vector<double> solve(const Rhs& rhs, double t0, std::vector<double> y0, double t_end,
                          const StepControl& control) {
    Dopri5 stepper(rhs, y0.size(), control);
    stepper.integrate(t0, y0, t_end);
    return y0;
}

}  // namespace plate::ode
