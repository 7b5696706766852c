// Electron-proton self-consistent bound state.
//
// Each particle solves a radial ground-state problem in the electrostatic
// potential generated by the other; the size/mass ratio b couples the two
// grids.  In electron coordinates y and proton coordinates z:
//
//     electron:  V_1(y) = -(1/b) phi_2(y / b),
//     proton:    V_2(z) = -b phi_1(b z),
//
// where phi_k is the free-space potential of |Psi_k|^2 (unit charge).  As
// b -> 0 the electron sees the point-charge tail -1/y and decouples, while
// the proton potential flattens to a constant and its state tends to the
// free Gaussian of the logarithmic law (frequency 0).
//
// The proton-smearing deviation
//
//     D = int |Psi_1(y)|^2 [ 1/y - (1/b) phi_2(y/b) ] dy   (>= 0)
//
// is reported twice: summed on the electron grid (needs h_e to resolve the
// smearing scale ~ b/kappa_p), and as a reduced double integral
//
//     D = 16 pi^2 int y rho_1(y) [ A(y/b) - (y/b) B(y/b) ] dy,
//     A(z) = int_z^inf t^2 rho_2 dt,   B(z) = int_z^inf t rho_2 dt,
//
// evaluated with right-cumulative moments on the proton grid and log-spaced
// quadrature in y, which stays accurate for arbitrarily small b.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "internal.hpp"
#include "wavecorpuscle/constants.hpp"
#include "wavecorpuscle/eigensolver.hpp"
#include "wavecorpuscle/errors.hpp"
#include "wavecorpuscle/poisson.hpp"

namespace wc {

namespace {

using detail::RadialOperator;

// Electrostatic potential of a normalized radial state, sampled on its grid
// and interpolable everywhere: linear between nodes, linear down to phi(0),
// and the solver's own point-charge tail past the last node.
struct PotentialTable {
    std::vector<double> phi;
    double phi0 = 0;
    double h = 0;
    double r_last = 0;
    double mass = 0;

    double eval(double x) const {
        if (x >= r_last) return mass / x;
        double t = x / h;  // nodes sit at (i+1) h
        if (t <= 1.0) return phi0 + (phi[0] - phi0) * t;
        int i = static_cast<int>(t) - 1;
        double frac = t - (i + 1);
        return phi[i] + (phi[i + 1] - phi[i]) * frac;
    }
};

PotentialTable potential_table(const RadialGrid& grid,
                               const std::vector<double>& u) {
    RadialField density;
    density.grid = grid;
    density.v.resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        double psi = u[i] / grid.r[i];
        density.v[i] = psi * psi;
    }
    PotentialTable t;
    t.phi = poisson_radial(density, 1.0).v;
    t.phi0 = poisson_radial_origin(density, 1.0);
    t.h = detail::grid_h(grid);
    t.r_last = grid.r.back();
    t.mass = t.phi.back() * t.r_last;  // tail continues the sampled field
    return t;
}

void validate_two_particle(const TwoParticleConfig& cfg) {
    if (!(cfg.b > 0) || !(cfg.b <= 0.1))
        throw ConfigError("b", "size/mass ratio b must lie in (0, 0.1]");
    if (!(cfg.kappa_e > 0) || !(cfg.kappa_e <= 0.5))
        throw ConfigError("kappa_e", "electron kappa must lie in (0, 0.5]");
    if (!(cfg.kappa_p > 0) || !std::isfinite(cfg.kappa_p))
        throw ConfigError("kappa_p", "proton kappa must be positive and finite");
    if (std::isnan(cfg.xi) || cfg.xi > 0)
        throw ConfigError("xi", "cutoff must be <= 0 or -inf");
    if (cfg.grid_n_e < 64 || cfg.grid_n_p < 64)
        throw ConfigError("grid_n_e", "need at least 64 radial nodes per grid");
    if (!(cfg.r_max_e > 0) || !std::isfinite(cfg.r_max_e) ||
        cfg.r_max_e < 10.0 / cfg.kappa_e - 1e-12)
        throw ConfigError("r_max_e",
                          "electron grid must cover its soliton scale: "
                          "r_max_e >= 10/kappa_e = " +
                              std::to_string(10.0 / cfg.kappa_e));
    if (!(cfg.r_max_p > 0) || !std::isfinite(cfg.r_max_p) ||
        cfg.r_max_p < 10.0 / cfg.kappa_p - 1e-12)
        throw ConfigError("r_max_p",
                          "proton grid must cover its soliton scale: "
                          "r_max_p >= 10/kappa_p = " +
                              std::to_string(10.0 / cfg.kappa_p));
    double h_p = cfg.r_max_p / cfg.grid_n_p;
    if (h_p > 1.0 / (50.0 * cfg.kappa_p) * (1.0 + 1e-12))
        throw ConfigError("grid_n_p",
                          "proton grid too coarse for its soliton scale: need "
                          "h_p <= (1/kappa_p)/50 = " +
                              std::to_string(1.0 / (50.0 * cfg.kappa_p)));
    if (!(cfg.tol > 0))
        throw ConfigError("tol", "tolerance must be positive");
    if (cfg.max_outer < 1)
        throw ConfigError("max_outer", "max_outer must be >= 1");
    if (!(cfg.mixing > 0) || !(cfg.mixing <= 1.0))
        throw ConfigError("mixing", "potential mixing must lie in (0, 1]");
}

// D via the reduced double integral; exact in b (no electron-grid resolution
// of the smearing scale needed).
double direct_deviation(const RadialGrid& grid_p, const std::vector<double>& u_p,
                        const RadialGrid& grid_e, const std::vector<double>& u_e,
                        double b) {
    const int np = grid_p.size();
    const double hp = detail::grid_h(grid_p);

    // Right-cumulative moments: t^2 rho_2 = u_p^2 and t rho_2 = u_p^2 / t.
    std::vector<double> A(np, 0.0), B(np, 0.0);
    for (int i = np - 2; i >= 0; --i) {
        double f1 = u_p[i] * u_p[i], f2 = u_p[i + 1] * u_p[i + 1];
        A[i] = A[i + 1] + 0.5 * hp * (f1 + f2);
        B[i] = B[i + 1] + 0.5 * hp * (f1 / grid_p.r[i] + f2 / grid_p.r[i + 1]);
    }
    // First cell [0, h]: rho_2 is flat there, so t^2 rho integrates to
    // h^3 rho / 3 and t rho to h^2 rho / 2.
    double A0 = A[0] + u_p[0] * u_p[0] * hp / 3.0;
    double B0 = B[0] + 0.5 * u_p[0] * u_p[0];

    auto moment = [&](double z, const std::vector<double>& M, double M0) {
        if (z >= grid_p.r.back()) return 0.0;
        double t = z / hp;
        if (t <= 1.0) return M0 + (M[0] - M0) * t;
        int i = static_cast<int>(t) - 1;
        double frac = t - (i + 1);
        return M[i] + (M[i + 1] - M[i]) * frac;
    };

    // Electron amplitude, linearly extrapolated through the first two nodes
    // at the origin (Psi_1 is smooth there).
    const double he = detail::grid_h(grid_e);
    const double Psi0 = u_e[0] / grid_e.r[0];
    const double Psi1 = u_e[1] / grid_e.r[1];
    auto psi_e = [&](double y) {
        double t = y / he;
        if (t <= 1.0) return Psi0 + (Psi0 - Psi1) * (1.0 - t);
        int i = static_cast<int>(t) - 1;
        if (i + 1 >= grid_e.size()) return u_e.back() / grid_e.r.back();
        double frac = t - (i + 1);
        double a = u_e[i] / grid_e.r[i], c = u_e[i + 1] / grid_e.r[i + 1];
        return a + (c - a) * frac;
    };

    auto integrand = [&](double y) {
        double z = y / b;
        double psi = psi_e(y);
        return y * psi * psi * (moment(z, A, A0) - z * moment(z, B, B0));
    };

    // Log-spaced trapezoid from far below the first sampled proton node out
    // to where the moments vanish; the integrand falls linearly to 0 at 0.
    const double y_lo = 0.01 * b * grid_p.r[0];
    const double y_hi = b * grid_p.r.back();
    const int K = 2000;
    double acc = 0.5 * integrand(y_lo) * y_lo;
    double y_prev = y_lo, f_prev = integrand(y_lo);
    for (int k = 1; k < K; ++k) {
        double y = y_lo * std::pow(y_hi / y_lo, k / static_cast<double>(K - 1));
        double f = integrand(y);
        acc += 0.5 * (f_prev + f) * (y - y_prev);
        y_prev = y;
        f_prev = f;
    }
    return 16.0 * constants::pi * constants::pi * acc;
}

}  // namespace

TwoParticleResult two_particle_scf(const TwoParticleConfig& cfg) {
    validate_two_particle(cfg);

    RadialGrid grid_e = RadialGrid::uniform(cfg.grid_n_e, cfg.r_max_e);
    RadialGrid grid_p = RadialGrid::uniform(cfg.grid_n_p, cfg.r_max_p);

    EigenConfig cfg_e;
    cfg_e.kappa = cfg.kappa_e;
    cfg_e.xi = cfg.xi;
    cfg_e.grid_n = cfg.grid_n_e;
    cfg_e.r_max = cfg.r_max_e;

    EigenConfig cfg_p;
    cfg_p.kappa = cfg.kappa_p;
    cfg_p.xi = cfg.xi;
    cfg_p.grid_n = cfg.grid_n_p;
    cfg_p.r_max = cfg.r_max_p;

    FormFactorSpec spec_e =
        detail::spec_for(cfg.kappa_e, cfg.xi, FormFactorKind::LogGaussian);
    FormFactorSpec spec_p =
        detail::spec_for(cfg.kappa_p, cfg.xi, FormFactorKind::LogGaussian);

    // Starting states: the linear Coulomb ground for the electron, the free
    // Gaussian of the logarithmic law for the proton.
    auto lin = linear_hydrogen_spectrum(grid_e, 1);
    std::vector<double> u_e = lin[0].u;

    std::vector<double> u_p(grid_p.size(), 0.0);
    double amp_p = std::pow(cfg.kappa_p, 1.5) * constants::C_g();
    for (int i = 0; i < grid_p.size() - 1; ++i) {
        double z = grid_p.r[i];
        u_p[i] = z * amp_p * std::exp(-0.5 * cfg.kappa_p * cfg.kappa_p * z * z);
    }
    detail::normalize(grid_p, u_p);

    auto V1_from = [&](const PotentialTable& tp) {
        std::vector<double> V(grid_e.size());
        for (int i = 0; i < grid_e.size(); ++i)
            V[i] = -tp.eval(grid_e.r[i] / cfg.b) / cfg.b;
        return V;
    };
    auto V2_from = [&](const PotentialTable& te) {
        std::vector<double> V(grid_p.size());
        for (int i = 0; i < grid_p.size(); ++i)
            V[i] = -cfg.b * te.eval(cfg.b * grid_p.r[i]);
        return V;
    };

    std::vector<double> V1 = V1_from(potential_table(grid_p, u_p));
    std::vector<double> V2;

    TwoParticleResult res;
    double mix = cfg.mixing;
    double prev_w1 = 0, prev_w2 = 0, prev_d1 = 0;
    bool have_prev = false, converged = false;
    int outer = 0;
    while (outer < cfg.max_outer) {
        ++outer;

        RadialOperator op_e(grid_e, V1, &spec_e);
        res.electron = detail::run_ground_flow(cfg_e, op_e, u_e, lin[0].omega);
        if (!res.electron.converged)
            throw NumericalError("electron ground flow stalled in sweep " +
                                 std::to_string(outer));
        u_e = res.electron.u;

        auto V2_new = V2_from(potential_table(grid_e, u_e));
        if (V2.empty()) {
            V2 = std::move(V2_new);
        } else {
            for (std::size_t i = 0; i < V2.size(); ++i)
                V2[i] += mix * (V2_new[i] - V2[i]);
        }

        RadialOperator op_p(grid_p, V2, &spec_p);
        res.proton = detail::run_ground_flow(cfg_p, op_p, u_p, 0.0);
        if (!res.proton.converged)
            throw NumericalError("proton ground flow stalled in sweep " +
                                 std::to_string(outer));
        u_p = res.proton.u;

        auto V1_new = V1_from(potential_table(grid_p, u_p));
        for (std::size_t i = 0; i < V1.size(); ++i)
            V1[i] += mix * (V1_new[i] - V1[i]);

        if (have_prev) {
            double d1 = res.electron.omega - prev_w1;
            double d2 = res.proton.omega - prev_w2;
            if (std::abs(d1) <= cfg.tol && std::abs(d2) <= cfg.tol) {
                converged = true;
                break;
            }
            // Oscillating and growing: damp the potential updates.
            if (prev_d1 != 0 && d1 * prev_d1 < 0 && std::abs(d1) > std::abs(prev_d1))
                mix = std::max(0.5 * mix, 1e-3);
            prev_d1 = d1;
        }
        prev_w1 = res.electron.omega;
        prev_w2 = res.proton.omega;
        have_prev = true;
    }
    if (!converged)
        throw NumericalError(
            "two-particle alternation did not converge within " +
            std::to_string(cfg.max_outer) + " sweeps");
    res.outer_iterations = outer;

    // Smearing deviation, both paths, from the final states.
    auto tp = potential_table(grid_p, u_p);
    double D = 0;
    for (int i = 0; i < grid_e.size(); ++i) {
        double y = grid_e.r[i];
        double bracket = tp.eval(y / cfg.b) / cfg.b - 1.0 / y;
        D -= bracket * u_e[i] * u_e[i];
    }
    res.D_prot = 4.0 * constants::pi * detail::grid_h(grid_e) * D;
    res.D_prot_direct = direct_deviation(grid_p, u_p, grid_e, u_e, cfg.b);
    return res;
}

}  // namespace wc
