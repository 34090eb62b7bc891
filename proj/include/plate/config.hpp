#pragma once

#include <numbers>
#include <string_view>

namespace plate {

/// Geometry and physics of the partially hinged plate (0, pi) x (-l, l).
///
/// Construction validates the parameters; a PlateConfig that exists is always
/// usable by the spectrum and dynamics routines.
class PlateConfig {
public:
    static constexpr double kDefaultHalfWidth = std::numbers::pi / 150.0;
    static constexpr double kDefaultSigma = 0.2;
    static constexpr double kDefaultPrestress = 0.48;
    static constexpr double kDefaultStiffness = 3.0;

    PlateConfig() = default;
    PlateConfig(double half_width_l, double poisson_sigma, double prestress_P,
                double stiffness_S, double damping_delta = 0.0);

    double half_width() const { return l_; }
    double sigma() const { return sigma_; }
    double prestress() const { return P_; }
    double stiffness() const { return S_; }
    double damping() const { return delta_; }

    PlateConfig with_prestress(double P) const;
    PlateConfig with_damping(double delta) const;

private:
    double l_ = kDefaultHalfWidth;
    double sigma_ = kDefaultSigma;
    double P_ = kDefaultPrestress;
    double S_ = kDefaultStiffness;
    double delta_ = 0.0;
};

enum class Parity { Longitudinal, Torsional };

std::string_view to_string(Parity p);
Parity parse_parity(std::string_view s);

/// (m, parity, i): m nodal sets in x, branch i within the parity family.
struct ModeIndex {
    int m = 1;
    Parity parity = Parity::Longitudinal;
    int i = 1;

    friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

/// Throws DomainError unless m >= 1 and i >= 1.
void validate(const ModeIndex& mode);

}  // namespace plate
