#include "plate/config.hpp"

#include <cmath>
#include <string>

#include "plate/errors.hpp"

namespace plate {

PlateConfig::PlateConfig(double half_width_l, double poisson_sigma, double prestress_P,
                         double stiffness_S, double damping_delta)
    : l_(half_width_l), sigma_(poisson_sigma), P_(prestress_P), S_(stiffness_S),
      delta_(damping_delta) {
    if (!(std::isfinite(l_) && l_ > 0.0))
        throw DomainError("half width l must be positive, got " + std::to_string(l_));
    if (!(sigma_ > 0.0 && sigma_ < 0.5))
        throw DomainError("Poisson ratio sigma must lie in (0, 1/2), got " +
                          std::to_string(sigma_));
    if (!(std::isfinite(P_) && P_ >= 0.0))
        throw DomainError("prestress P must be nonnegative, got " + std::to_string(P_));
    if (!(std::isfinite(S_) && S_ > 0.0))
        throw DomainError("stiffness S must be positive, got " + std::to_string(S_));
    if (!(std::isfinite(delta_) && delta_ >= 0.0))
        throw DomainError("damping delta must be nonnegative, got " + std::to_string(delta_));
}

PlateConfig PlateConfig::with_prestress(double P) const {
    return PlateConfig(l_, sigma_, P, S_, delta_);
}

PlateConfig PlateConfig::with_damping(double delta) const {
    return PlateConfig(l_, sigma_, P_, S_, delta);
}

std::string_view to_string(Parity p) {
    return p == Parity::Longitudinal ? "longitudinal" : "torsional";
}

Parity parse_parity(std::string_view s) {
    if (s == "longitudinal" || s == "L" || s == "even") return Parity::Longitudinal;
    if (s == "torsional" || s == "T" || s == "odd") return Parity::Torsional;
    throw DomainError("unknown parity '" + std::string(s) + "'");
}

void validate(const ModeIndex& mode) {
    if (mode.m < 1 || mode.i < 1)
        throw DomainError("mode indices must be positive (m=" + std::to_string(mode.m) +
                          ", i=" + std::to_string(mode.i) + ")");
}

}  // namespace plate
