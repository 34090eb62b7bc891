#pragma once

// Eigenvalues and eigenfunctions of the partially hinged plate.
//
// Separating w(x, y) = phi(y) sin(m x) in  Delta^2 w + Lambda w_xx = 0  gives
//
//     phi'''' - 2 m^2 phi'' + (m^4 - m^2 Lambda) phi = 0   on (-l, l),
//     phi'' - sigma m^2 phi = 0,  phi''' - (2 - sigma) m^2 phi' = 0   at y = +-l,
//
// whose characteristic roots are r^2 = m^2 +- m sqrt(Lambda). Longitudinal
// modes use the even solutions, torsional modes the odd ones. The same w is an
// eigenfunction of Delta^2 w = lambda w with lambda = m^2 Lambda.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "plate/config.hpp"

namespace plate {

enum class ProfileRegime { SubCritical, Critical, SuperCritical };

std::string_view to_string(ProfileRegime r);

/// Relative width of the band |lambda - m^4| < tol * m^4 treated as critical.
inline constexpr double kDefaultDegeneracyTol = 1e-8;

struct CharacteristicValue {
    double value = 0.0;
    /// True when Lambda sat inside the degeneracy band and the degenerate
    /// basis {cosh(alpha y), 1} / {sinh(alpha y), y} was used.
    bool branch_boundary = false;
};

/// Boundary determinant of the two-function y-basis for the given parity,
/// with every column scaled to unit length. The value lies in [-1, 1], is
/// continuous in Lambda (including across lambda = m^4) and vanishes exactly
/// at eigenvalues.
CharacteristicValue characteristic_det(int m, double Lambda, Parity parity,
                                       const PlateConfig& config,
                                       double degeneracy_tol = kDefaultDegeneracyTol);

/// One separated mode w(x, y) = phi(y) sin(m x), normalized so ||w||_{L2} = 1.
struct Eigenpair {
    ModeIndex mode;
    double Lambda = 0.0;  ///< buckling eigenvalue
    double lambda = 0.0;  ///< m^2 Lambda
    ProfileRegime regime = ProfileRegime::SubCritical;
    /// Weights of the two scaled basis functions (hyperbolic first).
    std::pair<double, double> coefficients{0.0, 0.0};
    double residual = 0.0;  ///< |characteristic_det| at Lambda

    double half_width = PlateConfig::kDefaultHalfWidth;
    double alpha = 0.0;  ///< sqrt(m^2 + m sqrt(Lambda))
    double beta = 0.0;   ///< sqrt(|m^2 - m sqrt(Lambda)|)

    /// phi^{(order)}(y) for order in 0..3.
    double profile(double y, int order = 0) const;
};

/// w_mi(x, y). Throws DomainError outside the closed rectangle.
double eigenfunction_eval(const Eigenpair& pair, double x, double y);

/// Builds the normalized eigenpair for an already located root Lambda.
Eigenpair make_eigenpair(const ModeIndex& mode, double Lambda, const PlateConfig& config,
                         double degeneracy_tol = kDefaultDegeneracyTol);

struct RootSearchOptions {
    double grid_ratio = 1.05;       ///< geometric scan ratio
    double bracket_width = 1e-6;    ///< relative width reached by bisection before Newton
    double rel_tol = 1e-10;         ///< Newton stopping tolerance (relative)
    double fd_step = 1e-6;          ///< relative central-difference step
    int max_iterations = 200;
    double degeneracy_tol = kDefaultDegeneracyTol;
};

/// First `count` eigenvalues of the (m, parity) family, increasing.
/// Throws BracketingFailure when fewer than `count` roots lie below
/// search_ceiling and NonConvergence when refinement stalls.
std::vector<Eigenpair> find_eigenvalues(int m, Parity parity, int count,
                                        const PlateConfig& config, double search_ceiling,
                                        const RootSearchOptions& opts = {});

/// Every eigenvalue of the (m, parity) family below ceiling.
std::vector<Eigenpair> eigenvalues_below(int m, Parity parity, const PlateConfig& config,
                                         double ceiling, const RootSearchOptions& opts = {});

/// Lower end of the scan window. No eigenvalue of the m-family lies below
/// (1 - sigma)^2 m^2; the scan starts at half of that.
double scan_floor(int m, const PlateConfig& config);

struct GlobalSpectrum {
    std::vector<Eigenpair> entries;  ///< nondecreasing in Lambda
    /// 1-based position of the first torsional entry, if any is below the ceiling.
    std::optional<std::size_t> first_torsional_index;
};

/// Merges all families below ceiling into the single sequence (Lambda_k).
GlobalSpectrum global_ordering(const PlateConfig& config, double ceiling,
                               const RootSearchOptions& opts = {});

/// Independent finite-difference eigensolver for the y-problem (second-order
/// central differences on the half interval, ghost-point boundary conditions,
/// operator split into two second-order factors). Returns estimates of Lambda
/// in increasing order. Requires grid_points >= 64.
std::vector<double> oracle_eigensolve(int m, Parity parity, int grid_points,
                                      const PlateConfig& config);

/// Richardson extrapolation of oracle_eigensolve over grids N and 2N
/// (second-order scheme, so (4 L_2N - L_N) / 3). `count` leading values.
std::vector<double> oracle_extrapolated(int m, Parity parity, int grid_points, int count,
                                        const PlateConfig& config);

/// Leading oracle eigenvector on y_j = j l / N, j = 0..N, normalized so that
/// the trapezoidal estimate of the integral of phi^2 over (-l, l) is 2/pi and
/// phi(l) > 0.
struct OracleProfile {
    double Lambda = 0.0;
    std::vector<double> y;
    std::vector<double> phi;
};
OracleProfile oracle_leading_profile(int m, Parity parity, int grid_points,
                                     const PlateConfig& config);

}  // namespace plate
