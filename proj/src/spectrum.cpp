#include "plate/spectrum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "plate/errors.hpp"
#include "plate/parallel.hpp"

namespace plate {
namespace {

enum class BasisKind {
    CoshScaled,         // cosh(r y) / cosh(r l)
    SinhScaled,         // sinh(r y) / cosh(r l)
    SinhOverRScaled,    // sinh(r y) / (r cosh(r l))
    Cos,                // cos(r y)
    SinOverR,           // sin(r y) / r
    Constant,           // 1
    Linear,             // y
};

// cosh(r y)/cosh(r l) and sinh(r y)/cosh(r l) without overflow for r l >> 1.
double cosh_ratio(double r, double y, double l) {
    const double ay = r * std::abs(y), al = r * l;
    return std::exp(ay - al) * (1.0 + std::exp(-2.0 * ay)) / (1.0 + std::exp(-2.0 * al));
}

double sinh_ratio(double r, double y, double l) {
    const double ay = r * std::abs(y), al = r * l;
    const double v = std::exp(ay - al) * -std::expm1(-2.0 * ay) / (1.0 + std::exp(-2.0 * al));
    return y < 0.0 ? -v : v;
}

double basis_derivative(BasisKind kind, double r, double l, double y, int k) {
    switch (kind) {
        case BasisKind::CoshScaled:
            return std::pow(r, k) * (k % 2 == 0 ? cosh_ratio(r, y, l) : sinh_ratio(r, y, l));
        case BasisKind::SinhScaled:
            return std::pow(r, k) * (k % 2 == 0 ? sinh_ratio(r, y, l) : cosh_ratio(r, y, l));
        case BasisKind::SinhOverRScaled:
            if (k == 0) return sinh_ratio(r, y, l) / r;
            return std::pow(r, k - 1) * (k % 2 == 0 ? sinh_ratio(r, y, l) : cosh_ratio(r, y, l));
        case BasisKind::Cos:
            switch (k) {
                case 0: return std::cos(r * y);
                case 1: return -r * std::sin(r * y);
                case 2: return -r * r * std::cos(r * y);
                default: return r * r * r * std::sin(r * y);
            }
        case BasisKind::SinOverR:
            switch (k) {
                case 0: return std::sin(r * y) / r;
                case 1: return std::cos(r * y);
                case 2: return -r * std::sin(r * y);
                default: return -r * r * std::cos(r * y);
            }
        case BasisKind::Constant:
            return k == 0 ? 1.0 : 0.0;
        case BasisKind::Linear:
            return k == 0 ? y : (k == 1 ? 1.0 : 0.0);
    }
    return 0.0;
}

struct Basis {
    ProfileRegime regime;
    double alpha, beta;
    BasisKind first, second;
};

Basis make_basis(int m, double Lambda, Parity parity, double degeneracy_tol) {
    const double m2 = static_cast<double>(m) * m;
    const double s = m * std::sqrt(Lambda);
    const double lambda = m2 * Lambda;
    Basis b{};
    b.alpha = std::sqrt(m2 + s);
    const bool even = parity == Parity::Longitudinal;
    b.first = even ? BasisKind::CoshScaled : BasisKind::SinhScaled;
    if (std::abs(lambda - m2 * m2) < degeneracy_tol * m2 * m2) {
        b.regime = ProfileRegime::Critical;
        b.beta = 0.0;
        b.second = even ? BasisKind::Constant : BasisKind::Linear;
    } else if (s < m2) {
        b.regime = ProfileRegime::SubCritical;
        b.beta = std::sqrt(m2 - s);
        b.second = even ? BasisKind::CoshScaled : BasisKind::SinhOverRScaled;
    } else {
        b.regime = ProfileRegime::SuperCritical;
        b.beta = std::sqrt(s - m2);
        b.second = even ? BasisKind::Cos : BasisKind::SinOverR;
    }
    return b;
}

struct Column {
    double bending, shear;  // phi'' - sigma m^2 phi,  phi''' - (2 - sigma) m^2 phi'
};

Column boundary_column(BasisKind kind, double r, double l, int m, double sigma) {
    const double m2 = static_cast<double>(m) * m;
    const double f0 = basis_derivative(kind, r, l, l, 0);
    const double f1 = basis_derivative(kind, r, l, l, 1);
    const double f2 = basis_derivative(kind, r, l, l, 2);
    const double f3 = basis_derivative(kind, r, l, l, 3);
    return {f2 - sigma * m2 * f0, f3 - (2.0 - sigma) * m2 * f1};
}

struct Assembled {
    Basis basis;
    double c1[2], c2[2];  // unit columns
    double n1, n2;        // original column norms
};

Assembled assemble(int m, double Lambda, Parity parity, const PlateConfig& cfg, double tol) {
    Assembled a{};
    a.basis = make_basis(m, Lambda, parity, tol);
    const double l = cfg.half_width();
    const Column k1 = boundary_column(a.basis.first, a.basis.alpha, l, m, cfg.sigma());
    const Column k2 = boundary_column(a.basis.second, a.basis.beta, l, m, cfg.sigma());
    a.n1 = std::hypot(k1.bending, k1.shear);
    a.n2 = std::hypot(k2.bending, k2.shear);
    if (!(a.n1 > 0.0) || !(a.n2 > 0.0))
        throw NumericError("degenerate boundary column at Lambda = " + std::to_string(Lambda));
    a.c1[0] = k1.bending / a.n1;
    a.c1[1] = k1.shear / a.n1;
    a.c2[0] = k2.bending / a.n2;
    a.c2[1] = k2.shear / a.n2;
    return a;
}

double det_of(const Assembled& a) { return a.c1[0] * a.c2[1] - a.c1[1] * a.c2[0]; }

double eval_det(int m, double Lambda, Parity parity, const PlateConfig& cfg, double tol) {
    return det_of(assemble(m, Lambda, parity, cfg, tol));
}

double refine_root(int m, Parity parity, const PlateConfig& cfg, double a, double b, double fa,
                   const RootSearchOptions& opts) {
    auto f = [&](double x) { return eval_det(m, x, parity, cfg, opts.degeneracy_tol); };
    int iter = 0;
    while (b - a > opts.bracket_width * b) {
        if (++iter > opts.max_iterations)
            throw NonConvergence("bisection stalled near Lambda = " + std::to_string(a));
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    double x = 0.5 * (a + b);
    bool converged = false;
    for (int k = 0; k < opts.max_iterations; ++k) {
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx < 0.0) == (fa < 0.0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        const double h = opts.fd_step * x;
        const double d = (f(x + h) - f(x - h)) / (2.0 * h);
        double next = (d != 0.0 && std::isfinite(d)) ? x - fx / d : 0.5 * (a + b);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        const double step = std::abs(next - x);
        x = next;
        if (converged) return x;  // one extra Newton step past the tolerance
        if (step <= opts.rel_tol * x || b - a <= 4.0 * std::numeric_limits<double>::epsilon() * b)
            converged = true;
    }
    throw NonConvergence("Newton refinement did not converge near Lambda = " + std::to_string(x));
}

std::vector<double> roots_below(int m, Parity parity, const PlateConfig& cfg, double ceiling,
                                const RootSearchOptions& opts, std::size_t max_roots) {
    std::vector<double> grid;
    const double crit = static_cast<double>(m) * m;
    for (double x = scan_floor(m, cfg); x < ceiling; x *= opts.grid_ratio) grid.push_back(x);
    grid.push_back(ceiling);
    // Straddle the critical point so the grid never samples the degeneracy band itself.
    if (crit > grid.front() && crit < ceiling) {
        grid.push_back(crit * (1.0 - 1e-6));
        grid.push_back(crit * (1.0 + 1e-6));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<double> roots;
    double prev_x = grid.front();
    double prev_f = eval_det(m, prev_x, parity, cfg, opts.degeneracy_tol);
    for (std::size_t k = 1; k < grid.size() && roots.size() < max_roots; ++k) {
        const double x = grid[k];
        const double fx = eval_det(m, x, parity, cfg, opts.degeneracy_tol);
        if (prev_f == 0.0) {
            roots.push_back(prev_x);
        } else if ((fx < 0.0) != (prev_f < 0.0) && fx != 0.0) {
            roots.push_back(refine_root(m, parity, cfg, prev_x, x, prev_f, opts));
        } else if (fx == 0.0 && k + 1 == grid.size()) {
            roots.push_back(x);
        }
        prev_x = x;
        prev_f = fx;
    }
    return roots;
}

}  // namespace

std::string_view to_string(ProfileRegime r) {
    switch (r) {
        case ProfileRegime::SubCritical: return "subcritical";
        case ProfileRegime::Critical: return "critical";
        case ProfileRegime::SuperCritical: return "supercritical";
    }
    return "?";
}

CharacteristicValue characteristic_det(int m, double Lambda, Parity parity,
                                       const PlateConfig& config, double degeneracy_tol) {
    if (m < 1) throw DomainError("m must be positive");
    if (!(Lambda > 0.0) || !std::isfinite(Lambda))
        throw DomainError("characteristic determinant needs Lambda > 0, got " +
                          std::to_string(Lambda));
    const Assembled a = assemble(m, Lambda, parity, config, degeneracy_tol);
    return {det_of(a), a.basis.regime == ProfileRegime::Critical};
}

double scan_floor(int m, const PlateConfig& config) {
    const double q = 1.0 - config.sigma();
    return 0.5 * q * q * static_cast<double>(m) * m;
}

double Eigenpair::profile(double y, int order) const {
    const bool even = mode.parity == Parity::Longitudinal;
    const BasisKind first = even ? BasisKind::CoshScaled : BasisKind::SinhScaled;
    BasisKind second;
    switch (regime) {
        case ProfileRegime::Critical:
            second = even ? BasisKind::Constant : BasisKind::Linear;
            break;
        case ProfileRegime::SubCritical:
            second = even ? BasisKind::CoshScaled : BasisKind::SinhOverRScaled;
            break;
        default:
            second = even ? BasisKind::Cos : BasisKind::SinOverR;
            break;
    }
    return coefficients.first * basis_derivative(first, alpha, half_width, y, order) +
           coefficients.second * basis_derivative(second, beta, half_width, y, order);
}

double eigenfunction_eval(const Eigenpair& pair, double x, double y) {
    const double slack = 1e-12;
    const double l = pair.half_width;
    if (!(x >= -slack && x <= std::numbers::pi + slack && std::abs(y) <= l * (1.0 + slack)))
        throw DomainError("point (" + std::to_string(x) + ", " + std::to_string(y) +
                          ") lies outside the plate");
    return pair.profile(y) * std::sin(pair.mode.m * x);
}

Eigenpair make_eigenpair(const ModeIndex& mode, double Lambda, const PlateConfig& config,
                         double degeneracy_tol) {
    validate(mode);
    const Assembled a = assemble(mode.m, Lambda, mode.parity, config, degeneracy_tol);

    Eigenpair p;
    p.mode = mode;
    p.Lambda = Lambda;
    p.lambda = static_cast<double>(mode.m) * mode.m * Lambda;
    p.regime = a.basis.regime;
    p.residual = std::abs(det_of(a));
    p.half_width = config.half_width();
    p.alpha = a.basis.alpha;
    p.beta = a.basis.beta;

    // Null vector of the unit-column matrix from its better conditioned row.
    const int row = std::max(std::abs(a.c1[0]), std::abs(a.c2[0])) >=
                            std::max(std::abs(a.c1[1]), std::abs(a.c2[1]))
                        ? 0
                        : 1;
    p.coefficients = {a.c2[row] / a.n1, -a.c1[row] / a.n2};

    const double l = config.half_width();
    using boost::math::quadrature::gauss_kronrod;
    const double mass = gauss_kronrod<double, 31>::integrate(
        [&](double y) {
            const double v = p.profile(y);
            return v * v;
        },
        -l, l, 15, 1e-12);
    if (!(mass > 0.0)) throw NumericError("eigenfunction has zero norm");
    double scale = std::sqrt(2.0 / std::numbers::pi / mass);
    if (p.profile(l) < 0.0) scale = -scale;
    p.coefficients.first *= scale;
    p.coefficients.second *= scale;
    return p;
}

std::vector<Eigenpair> eigenvalues_below(int m, Parity parity, const PlateConfig& config,
                                         double ceiling, const RootSearchOptions& opts) {
    if (m < 1) throw DomainError("m must be positive");
    std::vector<Eigenpair> out;
    if (!(ceiling > scan_floor(m, config))) return out;
    const auto roots = roots_below(m, parity, config, ceiling, opts, static_cast<std::size_t>(-1));
    out.reserve(roots.size());
    for (std::size_t k = 0; k < roots.size(); ++k)
        out.push_back(make_eigenpair({m, parity, static_cast<int>(k) + 1}, roots[k], config,
                                     opts.degeneracy_tol));
    return out;
}

std::vector<Eigenpair> find_eigenvalues(int m, Parity parity, int count, const PlateConfig& config,
                                        double search_ceiling, const RootSearchOptions& opts) {
    if (count < 1) throw DomainError("count must be at least 1");
    if (m < 1) throw DomainError("m must be positive");
    std::vector<double> roots;
    if (search_ceiling > scan_floor(m, config))
        roots = roots_below(m, parity, config, search_ceiling, opts,
                            static_cast<std::size_t>(count));
    if (roots.size() < static_cast<std::size_t>(count))
        throw BracketingFailure("only " + std::to_string(roots.size()) + " of " +
                                std::to_string(count) + " " + std::string(to_string(parity)) +
                                " eigenvalues for m = " + std::to_string(m) + " lie below " +
                                std::to_string(search_ceiling));
    std::vector<Eigenpair> out;
    for (int k = 0; k < count; ++k)
        out.push_back(make_eigenpair({m, parity, k + 1}, roots[k], config, opts.degeneracy_tol));
    return out;
}

GlobalSpectrum global_ordering(const PlateConfig& config, double ceiling,
                               const RootSearchOptions& opts) {
    struct Family {
        int m;
        Parity parity;
    };
    std::vector<Family> families;
    for (int m = 1; scan_floor(m, config) < ceiling; ++m) {
        families.push_back({m, Parity::Longitudinal});
        families.push_back({m, Parity::Torsional});
    }
    std::vector<std::vector<Eigenpair>> found(families.size());
    parallel_for(families.size(), [&](std::size_t k) {
        found[k] = eigenvalues_below(families[k].m, families[k].parity, config, ceiling, opts);
    });

    GlobalSpectrum g;
    for (auto& f : found)
        for (auto& p : f) g.entries.push_back(std::move(p));
    std::stable_sort(g.entries.begin(), g.entries.end(),
                     [](const Eigenpair& a, const Eigenpair& b) { return a.Lambda < b.Lambda; });
    for (std::size_t k = 0; k < g.entries.size(); ++k) {
        if (g.entries[k].mode.parity == Parity::Torsional) {
            g.first_torsional_index = k + 1;
            break;
        }
    }
    return g;
}

namespace {

// Dense operator g -> phi solving (D2 - a)^2 phi = g with the free-edge
// conditions, in the scaled variable eta = y / l on [0, 1]. Unknowns are phi
// and v = l^2 (phi'' - m^2 phi) at the nodes; `first` is 0 (even) or 1 (odd,
// where phi_0 = v_0 = 0).
Eigen::MatrixXd oracle_inverse_operator(int m, Parity parity, int N, const PlateConfig& cfg) {
    const int first = parity == Parity::Longitudinal ? 0 : 1;
    const int n = N + 1 - first;
    const double a = std::pow(m * cfg.half_width(), 2);
    const double sigma = cfg.sigma();
    const double n2 = static_cast<double>(N) * N;

    // Columns 0..n-1: phi_{first..N}; n..2n-1: v_{first..N}.
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    auto phi = [&](int j) { return j - first; };
    auto v = [&](int j) { return n + j - first; };

    // Adds coef * (node value of field at index j) to row r, resolving ghosts.
    auto add_phi = [&](int r, int j, double coef) {
        if (j < 0) {  // even only: phi_{-1} = phi_1
            S(r, phi(-j)) += coef;
            return;
        }
        if (j < first) return;  // phi_0 = 0 (odd)
        if (j <= N) {
            S(r, phi(j)) += coef;
            return;
        }
        // phi_{N+1} = (2 + sigma a / N^2) phi_N - phi_{N-1}
        S(r, phi(N)) += coef * (2.0 + sigma * a / n2);
        S(r, phi(N - 1)) -= coef;
    };
    auto add_v = [&](int r, int j, double coef) {
        if (j < 0) {
            S(r, v(-j)) += coef;
            return;
        }
        if (j < first) return;
        if (j <= N) {
            S(r, v(j)) += coef;
            return;
        }
        // v_{N+1} = v_{N-1} + (1 - sigma) a (phi_{N+1} - phi_{N-1})
        S(r, v(N - 1)) += coef;
        const double c = coef * (1.0 - sigma) * a;
        S(r, phi(N)) += c * (2.0 + sigma * a / n2);
        S(r, phi(N - 1)) -= 2.0 * c;
    };

    for (int j = first; j <= N; ++j) {
        const int r1 = phi(j);
        add_phi(r1, j + 1, n2);
        add_phi(r1, j, -2.0 * n2 - a);
        add_phi(r1, j - 1, n2);
        add_v(r1, j, -1.0);
        const int r2 = v(j);
        add_v(r2, j + 1, n2);
        add_v(r2, j, -2.0 * n2 - a);
        add_v(r2, j - 1, n2);
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(S);
    if (!(lu.rcond() > 0.0)) throw NumericError("oracle operator is numerically singular");
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(2 * n, n);
    for (int k = 0; k < n; ++k) rhs(n + k, k) = 1.0;
    const Eigen::MatrixXd sol = lu.solve(rhs);
    return sol.topRows(n);
}

}  // namespace

std::vector<double> oracle_eigensolve(int m, Parity parity, int grid_points,
                                      const PlateConfig& config) {
    if (grid_points < 64) throw DomainError("oracle needs at least 64 grid points");
    if (m < 1) throw DomainError("m must be positive");
    const Eigen::MatrixXd M = oracle_inverse_operator(m, parity, grid_points, config);
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    if (es.info() != Eigen::Success) throw NumericError("oracle eigensolver failed");
    const double l4 = std::pow(config.half_width(), 4);
    const double m2 = static_cast<double>(m) * m;
    std::vector<double> out;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const auto mu = es.eigenvalues()[k];
        if (mu.real() <= 0.0 || std::abs(mu.imag()) > 1e-8 * std::abs(mu.real())) continue;
        out.push_back(1.0 / (mu.real() * l4 * m2));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> oracle_extrapolated(int m, Parity parity, int grid_points, int count,
                                        const PlateConfig& config) {
    const auto coarse = oracle_eigensolve(m, parity, grid_points, config);
    const auto fine = oracle_eigensolve(m, parity, 2 * grid_points, config);
    const std::size_t k = std::min({coarse.size(), fine.size(), static_cast<std::size_t>(count)});
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    return out;
}

OracleProfile oracle_leading_profile(int m, Parity parity, int grid_points,
                                     const PlateConfig& config) {
    if (grid_points < 64) throw DomainError("oracle needs at least 64 grid points");
    const int N = grid_points;
    const Eigen::MatrixXd M = oracle_inverse_operator(m, parity, N, config);
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, true);
    if (es.info() != Eigen::Success) throw NumericError("oracle eigensolver failed");
    Eigen::Index best = -1;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const auto mu = es.eigenvalues()[k];
        if (mu.real() <= 0.0 || std::abs(mu.imag()) > 1e-8 * std::abs(mu.real())) continue;
        if (best < 0 || mu.real() > es.eigenvalues()[best].real()) best = k;
    }
    if (best < 0) throw NumericError("oracle found no positive eigenvalue");

    const int first = parity == Parity::Longitudinal ? 0 : 1;
    const double l = config.half_width();
    OracleProfile out;
    out.Lambda = 1.0 / (es.eigenvalues()[best].real() * std::pow(l, 4) * m * m);
    out.y.resize(N + 1);
    out.phi.assign(N + 1, 0.0);
    const Eigen::VectorXd vec = es.eigenvectors().col(best).real();
    for (int j = 0; j <= N; ++j) {
        out.y[j] = l * j / N;
        if (j >= first) out.phi[j] = vec(j - first);
    }
    // Trapezoid on [0, l], doubled by symmetry of phi^2.
    const double h = l / N;
    double half = 0.0;
    for (int j = 0; j <= N; ++j) {
        const double w = (j == 0 || j == N) ? 0.5 : 1.0;
        half += w * out.phi[j] * out.phi[j];
    }
    half *= h;
    double scale = std::sqrt(2.0 / std::numbers::pi / (2.0 * half));
    if (out.phi[N] < 0.0) scale = -scale;
    for (auto& p : out.phi) p *= scale;
    return out;
}

}  // namespace plate
