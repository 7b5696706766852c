// Radial nonlinear eigensolver: u = r Psi finite differences with Dirichlet
// ends, LAPACK tridiagonal kernels (dstevr for the linear spectrum, dgtsv /
// dgttrf+dgttrs for the implicit flows and Newton steps).
//
// All energies/eigenvalues are assembled from one set of discrete forms
// (kinetic quadratic form, potential sums, G / G' sums), so identities that
// hold for the continuum functional -- E - omega = kappa^2/2 for the pure
// log law, the variational pairing, Pohozaev at free critical points --
// carry over to the discrete level up to rounding.

#include "wavecorpuscle/eigensolver.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "internal.hpp"
#include "wavecorpuscle/constants.hpp"
#include "wavecorpuscle/errors.hpp"

namespace wc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_uniform(const RadialGrid& grid) {
    if (grid.spacing != RadialSpacing::Uniform)
        throw ConfigError("grid", "the radial eigensolver needs a uniform grid");
    if (grid.size() < 64)
        throw ConfigError("grid", "need at least 64 radial nodes");
}

std::vector<double> coulomb_potential(const RadialGrid& grid) {
    std::vector<double> V(grid.size());
    for (int i = 0; i < grid.size(); ++i) V[i] = -1.0 / grid.r[i];
    return V;
}

double decay_rate_or_zero(const EigenSolution& sol) {
    try {
        return decay_fit(sol).exp_rate;
    } catch (const ConfigError&) {
        return 0.0;  // tail does not span enough decades on this grid
    }
}

}  // namespace

// ---- shared internal machinery ----------------------------------------------

namespace detail {

FormFactorSpec spec_for(double kappa, double xi, FormFactorKind kind) {
    FormFactorSpec spec;
    spec.kind = kind;
    spec.a = 1.0 / kappa;
    spec.xi = (kind == FormFactorKind::LogGaussian) ? xi : -kInf;
    spec.extension = (kind == FormFactorKind::Exponential)
                         ? Extension::ConstantAbovePeak
                         : Extension::ClosedFormEverywhere;
    return spec;
}

void validate_config(const EigenConfig& cfg) {
    if (!(cfg.kappa >= 0) || !std::isfinite(cfg.kappa))
        throw ConfigError("kappa", "kappa must be a finite value >= 0");
    if (cfg.kappa > 1.0)
        throw ConfigError("kappa", "kappa must be <= 1");
    if (std::isnan(cfg.xi) || cfg.xi > 0)
        throw ConfigError("xi", "cutoff must be <= 0 or -inf");
    if (cfg.grid_n < 64)
        throw ConfigError("grid_n", "need at least 64 radial nodes");
    if (!(cfg.r_max > 0) || !std::isfinite(cfg.r_max))
        throw ConfigError("r_max", "r_max must be positive and finite");
    if (cfg.kappa > 0 && cfg.r_max < 10.0 / cfg.kappa - 1e-12)
        throw ConfigError("r_max",
                          "grid must cover the soliton scale: r_max >= 10/kappa = " +
                              std::to_string(10.0 / cfg.kappa));
    if (!(cfg.tol_residual > 0) || !(cfg.tol_omega > 0))
        throw ConfigError("tol_residual", "tolerances must be positive");
    if (cfg.max_iter < 1)
        throw ConfigError("max_iter", "max_iter must be >= 1");
    if (!(cfg.mixing > 0) || !std::isfinite(cfg.mixing))
        throw ConfigError("mixing", "mixing must be positive and finite");
}

double norm_sq_radial(const RadialGrid& grid, const std::vector<double>& u) {
    double s = 0;
    for (double x : u) s += x * x;
    return 4.0 * constants::pi * grid_h(grid) * s;
}

void normalize(const RadialGrid& grid, std::vector<double>& u) {
    double n2 = norm_sq_radial(grid, u);
    if (!(n2 > 0) || !std::isfinite(n2))
        throw NumericalError("radial state lost normalizability");
    double c = 1.0 / std::sqrt(n2);
    for (double& x : u) x *= c;
}

double dot_radial(const RadialGrid& grid, const std::vector<double>& a,
                  const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return 4.0 * constants::pi * grid_h(grid) * s;
}

int count_nodes(const std::vector<double>& u) {
    double peak = 0;
    for (double x : u) peak = std::max(peak, std::abs(x));
    double thr = 1e-9 * peak;
    int flips = 0, last_sign = 0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {  // skip the Dirichlet end
        if (std::abs(u[i]) <= thr) continue;
        int s = (u[i] > 0) ? 1 : -1;
        if (last_sign != 0 && s != last_sign) ++flips;
        last_sign = s;
    }
    return flips;
}

void fix_sign(std::vector<double>& u) {
    double peak = 0;
    for (double x : u) peak = std::max(peak, std::abs(x));
    for (double x : u) {
        if (std::abs(x) > 0.1 * peak) {
            if (x < 0)
                for (double& y : u) y = -y;
            break;
        }
    }
}

void solve_tridiag(std::vector<double>& dl, std::vector<double>& d,
                   std::vector<double>& du, std::vector<double>& b) {
    lapack_int n = static_cast<lapack_int>(d.size());
    lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, n, 1, dl.data(), d.data(),
                                    du.data(), b.data(), n);
    if (info != 0)
        throw NumericalError("tridiagonal solve failed (info=" +
                             std::to_string(info) + ")");
}

StateReport state_report(const RadialOperator& op, const std::vector<double>& u) {
    std::vector<double> Hu(u.size());
    op.apply(u, Hu);
    double omega = dot_radial(op.grid, u, Hu) / norm_sq_radial(op.grid, u);
    double r2 = 0;
    for (int i = 0; i < op.n_int; ++i) {
        double d = Hu[i] - omega * u[i];
        r2 += d * d;
    }
    return {omega, std::sqrt(4.0 * constants::pi * op.h * r2)};
}

EigenSolution package_solution(const EigenConfig& cfg, const RadialOperator& op,
                               std::vector<double> u, bool converged,
                               double omega_linear) {
    EigenSolution sol;
    sol.grid = op.grid;
    normalize(sol.grid, u);
    auto rep = state_report(op, u);
    sol.u = std::move(u);
    sol.Psi.resize(sol.u.size());
    for (int i = 0; i < sol.grid.size(); ++i) sol.Psi[i] = sol.u[i] / sol.grid.r[i];
    sol.omega = rep.omega;
    sol.residual = rep.residual;
    sol.node_count = count_nodes(sol.u);
    sol.converged = converged;
    sol.kappa = cfg.kappa;
    sol.xi = cfg.xi;
    sol.omega_linear = omega_linear;
    double pot = 0;
    for (int i = 0; i < sol.grid.size(); ++i) pot += op.V[i] * sol.u[i] * sol.u[i];
    pot *= 4.0 * constants::pi * op.h;
    sol.energy = kinetic_form(sol.grid, sol.u) + pot +
                 nonlinear_G_form(sol.grid, sol.u, cfg);
    sol.decay_rate = decay_rate_or_zero(sol);
    return sol;
}

// One backward-Euler step of the normalized gradient flow:
//   (I + dtau (H[u] - omega)) u* = u,  u <- u*/||u*||.
// The matrix is a symmetric Z-matrix; whenever it is positive definite its
// inverse is entrywise nonnegative, so positivity of u is preserved.  If a
// step ever produces a sign flip (matrix lost definiteness), it is retried
// with a halved dtau.
static void flow_step(const RadialOperator& op, std::vector<double>& u,
                      double omega, double dtau, bool preserve_sign) {
    const auto& r = op.grid.r;
    for (int attempt = 0; attempt < 60; ++attempt) {
        std::vector<double> dl(op.n_int - 1, -0.5 * dtau * op.inv_h2);
        std::vector<double> du(op.n_int - 1, -0.5 * dtau * op.inv_h2);
        std::vector<double> diag(op.n_int), rhs(u.begin(), u.begin() + op.n_int);
        for (int i = 0; i < op.n_int; ++i)
            diag[i] = 1.0 + dtau * (op.inv_h2 + op.V[i] +
                                    op.gp_half(u[i], r[i]) - omega);
        solve_tridiag(dl, diag, du, rhs);
        bool ok = true;
        double peak = 0;
        for (double x : rhs) peak = std::max(peak, std::abs(x));
        if (!(peak > 0) || !std::isfinite(peak)) ok = false;
        if (ok && preserve_sign) {
            for (double x : rhs)
                if (x < -1e-12 * peak) { ok = false; break; }
        }
        if (ok) {
            // Any surviving negatives sit below 1e-12 * peak (pure rounding);
            // flush them so the positivity claim holds exactly.
            for (int i = 0; i < op.n_int; ++i)
                u[i] = (preserve_sign && rhs[i] < 0.0) ? 0.0 : rhs[i];
            u[op.n_int] = 0.0;
            normalize(op.grid, u);
            return;
        }
        dtau *= 0.5;
    }
    throw NumericalError("imaginary-time step failed to preserve positivity");
}

// The entropy bound is checked on every normalized iterate.  The discrete
// kinetic form underestimates the continuum one by (h^2/24) ||u''||^2 +
// O(h^4), which shifts the right-hand side down by 1.5x that relative
// amount -- near the Gaussian equality case this exceeds 1e-8, so the
// discrete check carries the quadrature allowance explicitly.
static double log_sobolev_allowance(const RadialGrid& grid,
                                    const std::vector<double>& u) {
    double h = grid_h(grid);
    double inv_h2 = 1.0 / (h * h);
    int n_int = grid.size() - 1;
    double lap_sq = 0;
    for (int i = 0; i < n_int; ++i) {
        double left = (i > 0) ? u[i - 1] : 0.0;
        double lap = (u[i + 1] - 2.0 * u[i] + left) * inv_h2;
        lap_sq += lap * lap;
    }
    lap_sq *= 4.0 * constants::pi * h;
    double grad_sq = 2.0 * kinetic_form(grid, u);
    return 1e-8 + 0.25 * h * h * lap_sq / grad_sq;
}

EigenSolution run_ground_flow(const EigenConfig& cfg, const RadialOperator& op,
                              std::vector<double> u, double omega_linear) {
    normalize(op.grid, u);
    bool converged = false;
    double prev_omega = kInf;
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        auto rep = state_report(op, u);
        if (log_sobolev_gap(op.grid, u) < -log_sobolev_allowance(op.grid, u))
            throw NumericalError("normalized iterate violates the log-Sobolev bound");
        if (rep.residual <= cfg.tol_residual) { converged = true; break; }
        if (std::abs(rep.omega - prev_omega) <= cfg.tol_omega &&
            rep.residual <= 100.0 * cfg.tol_residual) {
            converged = true;
            break;
        }
        prev_omega = rep.omega;
        flow_step(op, u, rep.omega, cfg.mixing, /*preserve_sign=*/true);
    }
    return package_solution(cfg, op, std::move(u), converged, omega_linear);
}

}  // namespace detail

using detail::RadialOperator;
using detail::grid_h;
using detail::kAmpSqFloor;
using detail::spec_for;

// ---- public discrete forms ------------------------------------------------

double kinetic_form(const RadialGrid& grid, const std::vector<double>& u) {
    require_uniform(grid);
    double inv_h2 = 1.0 / (grid_h(grid) * grid_h(grid));
    int n_int = grid.size() - 1;
    double acc = 0;
    for (int i = 0; i < n_int; ++i) {
        double left = (i > 0) ? u[i - 1] : 0.0;
        double right = u[i + 1];
        acc += u[i] * (-0.5 * (right - 2.0 * u[i] + left) * inv_h2);
    }
    return 4.0 * constants::pi * grid_h(grid) * acc;
}

double coulomb_form(const RadialGrid& grid, const std::vector<double>& u) {
    require_uniform(grid);
    double acc = 0;
    for (int i = 0; i < grid.size(); ++i) acc -= u[i] * u[i] / grid.r[i];
    return 4.0 * constants::pi * grid_h(grid) * acc;
}

double nonlinear_G_form(const RadialGrid& grid, const std::vector<double>& u,
                        const EigenConfig& cfg) {
    require_uniform(grid);
    if (cfg.kappa == 0) return 0.0;
    FormFactorSpec spec = spec_for(cfg.kappa, cfg.xi, cfg.kind);
    double acc = 0;
    for (int i = 0; i < grid.size(); ++i) {
        double r = grid.r[i];
        double s = (u[i] / r) * (u[i] / r);
        if (s <= kAmpSqFloor) continue;  // s ln s -> 0 continuation
        acc += 0.5 * eval_G(spec, s) * r * r;
    }
    return 4.0 * constants::pi * grid_h(grid) * acc;
}

double nonlinear_Gp_form(const RadialGrid& grid, const std::vector<double>& u,
                         const EigenConfig& cfg) {
    require_uniform(grid);
    if (cfg.kappa == 0) return 0.0;
    FormFactorSpec spec = spec_for(cfg.kappa, cfg.xi, cfg.kind);
    double acc = 0;
    for (int i = 0; i < grid.size(); ++i) {
        double s = (u[i] / grid.r[i]) * (u[i] / grid.r[i]);
        if (s <= kAmpSqFloor) continue;
        acc += 0.5 * eval_Gprime(spec, s) * u[i] * u[i];
    }
    return 4.0 * constants::pi * grid_h(grid) * acc;
}

double omega_from_state(const RadialGrid& grid, const std::vector<double>& u,
                        const EigenConfig& cfg) {
    return kinetic_form(grid, u) + coulomb_form(grid, u) +
           nonlinear_Gp_form(grid, u, cfg);
}

double coulomb_energy_functional(const RadialGrid& grid,
                                 const std::vector<double>& u,
                                 const EigenConfig& cfg) {
    double n2 = detail::norm_sq_radial(grid, u);
    if (std::abs(n2 - 1.0) > 1e-6)
        throw ConfigError("Psi", "state must be normalized (|Psi|^2 integrates to " +
                                     std::to_string(n2) + ")");
    return kinetic_form(grid, u) + coulomb_form(grid, u) +
           nonlinear_G_form(grid, u, cfg);
}

double free_energy_functional(const RadialGrid& grid,
                              const std::vector<double>& u,
                              const EigenConfig& cfg) {
    double n2 = detail::norm_sq_radial(grid, u);
    if (std::abs(n2 - 1.0) > 1e-6)
        throw ConfigError("Psi", "state must be normalized");
    return kinetic_form(grid, u) + nonlinear_G_form(grid, u, cfg);
}

// ---- linear reference spectrum ---------------------------------------------

std::vector<LinearLevel> linear_hydrogen_spectrum(const RadialGrid& grid,
                                                  int n_max) {
    require_uniform(grid);
    if (n_max < 1 || n_max > 6)
        throw ConfigError("n_max", "level count must be in [1, 6]");

    const int n_int = grid.size() - 1;
    const double h = grid_h(grid);
    std::vector<double> d(n_int), e(std::max(0, n_int - 1), -0.5 / (h * h));
    for (int i = 0; i < n_int; ++i) d[i] = 1.0 / (h * h) - 1.0 / grid.r[i];

    std::vector<double> w(n_int), z(static_cast<std::size_t>(n_int) * n_max);
    std::vector<lapack_int> isuppz(2 * std::max(1, n_max));
    lapack_int found = 0;
    lapack_int info = LAPACKE_dstevr(
        LAPACK_COL_MAJOR, 'V', 'I', n_int, d.data(), e.data(), 0.0, 0.0, 1,
        n_max, 0.0, &found, w.data(), z.data(), n_int, isuppz.data());
    if (info != 0 || found < n_max)
        throw NumericalError("tridiagonal eigensolve failed (info=" +
                             std::to_string(info) + ")");

    std::vector<LinearLevel> levels(n_max);
    for (int k = 0; k < n_max; ++k) {
        if (!(w[k] < 0))
            throw ConfigError("r_max", "level " + std::to_string(k + 1) +
                                           " is not bound on this box; enlarge r_max");
        LinearLevel& lv = levels[k];
        lv.omega = w[k];
        lv.u.assign(grid.size(), 0.0);
        for (int i = 0; i < n_int; ++i)
            lv.u[i] = z[static_cast<std::size_t>(k) * n_int + i];
        detail::normalize(grid, lv.u);
        detail::fix_sign(lv.u);
        double peak = 0;
        for (double x : lv.u) peak = std::max(peak, std::abs(x));
        if (std::abs(lv.u[n_int - 1]) > 1e-6 * peak)
            throw ConfigError("r_max",
                              "insufficient r_max: boundary amplitude " +
                                  std::to_string(std::abs(lv.u[n_int - 1]) / peak) +
                                  " of level " + std::to_string(k + 1) +
                                  " exceeds 1e-6");
        lv.node_count = detail::count_nodes(lv.u);
        if (lv.node_count != k)
            throw NumericalError("linear level " + std::to_string(k + 1) +
                                 " has " + std::to_string(lv.node_count) +
                                 " nodes, expected " + std::to_string(k));
    }
    return levels;
}

// ---- analytic ground-state family ------------------------------------------

ProductStateConstants product_state_constants(double kappa) {
    if (!(kappa > 0) || !std::isfinite(kappa))
        throw ConfigError("kappa", "kappa must be positive and finite");
    boost::math::quadrature::exp_sinh<double> integrator;
    double k2 = kappa * kappa;
    double I2 = integrator.integrate(
        [k2](double r) { return r * r * std::exp(-k2 * r * r - 2.0 * r); }, 1e-13);
    ProductStateConstants c;
    c.C_sq = std::sqrt(constants::pi) / (4.0 * kappa * kappa * kappa * I2);
    c.ln_C_sq = std::log(c.C_sq);
    c.omega = -0.5 - 0.5 * kappa * kappa * c.ln_C_sq;
    return c;
}

EigenSolution analytic_ground_state(const EigenConfig& cfg) {
    detail::validate_config(cfg);
    if (!(cfg.kappa > 0))
        throw ConfigError("kappa", "the product family needs kappa > 0");
    RadialGrid grid = RadialGrid::uniform(cfg.grid_n, cfg.r_max);
    auto c = product_state_constants(cfg.kappa);
    double amp = std::pow(cfg.kappa, 1.5) * constants::C_g() * std::sqrt(c.C_sq);
    std::vector<double> u(grid.size(), 0.0);
    for (int i = 0; i < grid.size() - 1; ++i) {
        double r = grid.r[i];
        u[i] = r * amp * std::exp(-0.5 * cfg.kappa * cfg.kappa * r * r - r);
    }
    FormFactorSpec spec = spec_for(cfg.kappa, cfg.xi, cfg.kind);
    RadialOperator op(grid, coulomb_potential(grid), &spec);
    return detail::package_solution(cfg, op, std::move(u), true, -0.5);
}

// ---- ground state ------------------------------------------------------------

EigenSolution solve_ground(const EigenConfig& cfg) {
    detail::validate_config(cfg);
    if (cfg.kappa > 0.5)
        throw ConfigError("kappa", "ground solver is validated for kappa <= 0.5");
    RadialGrid grid = RadialGrid::uniform(cfg.grid_n, cfg.r_max);
    auto lin = linear_hydrogen_spectrum(grid, 1);
    if (cfg.kappa == 0) {
        RadialOperator op(grid, coulomb_potential(grid), nullptr);
        return detail::package_solution(cfg, op, lin[0].u, true, lin[0].omega);
    }
    FormFactorSpec spec = spec_for(cfg.kappa, cfg.xi, cfg.kind);
    RadialOperator op(grid, coulomb_potential(grid), &spec);
    EigenSolution sol = detail::run_ground_flow(cfg, op, lin[0].u, lin[0].omega);
    if (sol.converged && sol.node_count != 0)
        throw NumericalError("ground flow converged to a sign-changing state");
    return sol;
}

// ---- excited states: bordered-Newton with kappa continuation ----------------

namespace {

// d/du_i of the nonlinear term 1/2 G'(s_i) u_i equals
// 1/2 G'(s_i) + s_i G''(s_i); the second factor is taken by a centered
// secant in s (exact to O(1e-12) for the log law, adequate for Newton).
double gp_plus_sgpp(const FormFactorSpec& spec, double s) {
    double gp = eval_Gprime(spec, s);
    double delta = 1e-6;
    double sgpp = (eval_Gprime(spec, s * (1.0 + delta)) -
                   eval_Gprime(spec, s * (1.0 - delta))) /
                  (2.0 * delta);
    return 0.5 * gp + sgpp;
}

struct NewtonResult {
    std::vector<double> u;
    double omega;
    bool ok;
};

// Damped Newton on F(u, omega) = {H[u]u - omega u, ||u||^2 - 1}.
// The bordered tridiagonal system is solved with one dgttrf factorization
// and two dgttrs back-substitutions per step.
NewtonResult newton_solve(const RadialOperator& op, std::vector<double> u0,
                          double omega0, double tol, int max_steps) {
    const auto& r = op.grid.r;
    const int n = op.n_int;
    const double four_pi_h = 4.0 * constants::pi * op.h;

    auto eval_F = [&](const std::vector<double>& u, double omega,
                      std::vector<double>& F1) -> double {
        std::vector<double> Hu(u.size());
        op.apply(u, Hu);
        double acc = 0;
        for (int i = 0; i < n; ++i) {
            F1[i] = Hu[i] - omega * u[i];
            acc += F1[i] * F1[i];
        }
        double F2 = detail::norm_sq_radial(op.grid, u) - 1.0;
        return std::sqrt(four_pi_h * acc + F2 * F2);
    };

    std::vector<double> u = std::move(u0);
    double omega = omega0;
    std::vector<double> F1(n);
    double normF = eval_F(u, omega, F1);

    for (int step = 0; step < max_steps; ++step) {
        if (normF <= tol) return {u, omega, true};

        std::vector<double> dl(n - 1, -0.5 * op.inv_h2), du(n - 1, -0.5 * op.inv_h2);
        std::vector<double> diag(n), du2(n >= 2 ? n - 2 : 0);
        for (int i = 0; i < n; ++i) {
            double nl = 0.0;
            if (op.spec) {
                double s = std::max((u[i] / r[i]) * (u[i] / r[i]), kAmpSqFloor);
                nl = gp_plus_sgpp(*op.spec, s);
            }
            diag[i] = op.inv_h2 + op.V[i] + nl - omega;
        }
        std::vector<lapack_int> ipiv(n);
        lapack_int info = LAPACKE_dgttrf(n, dl.data(), diag.data(), du.data(),
                                         du2.data(), ipiv.data());
        if (info != 0) return {u, omega, false};

        // x = J^{-1} F1, y = J^{-1} u  (columns for the bordered solve).
        std::vector<double> x(F1), y(u.begin(), u.begin() + n);
        if (LAPACKE_dgttrs(LAPACK_COL_MAJOR, 'N', n, 1, dl.data(), diag.data(),
                           du.data(), du2.data(), ipiv.data(), x.data(), n) != 0)
            return {u, omega, false};
        if (LAPACKE_dgttrs(LAPACK_COL_MAJOR, 'N', n, 1, dl.data(), diag.data(),
                           du.data(), du2.data(), ipiv.data(), y.data(), n) != 0)
            return {u, omega, false};

        double F2 = detail::norm_sq_radial(op.grid, u) - 1.0;
        double ux = 0, uy = 0;
        for (int i = 0; i < n; ++i) { ux += u[i] * x[i]; uy += u[i] * y[i]; }
        ux *= 2.0 * four_pi_h;
        uy *= 2.0 * four_pi_h;
        if (std::abs(uy) < 1e-300) return {u, omega, false};
        double domega = (ux - F2) / uy;

        // delta u = -x + domega * y; damped line search on ||F||.
        bool accepted = false;
        for (double alpha = 1.0; alpha >= 1e-6; alpha *= 0.5) {
            std::vector<double> u_try(u);
            for (int i = 0; i < n; ++i) u_try[i] += alpha * (-x[i] + domega * y[i]);
            double omega_try = omega + alpha * domega;
            std::vector<double> F1_try(n);
            double normF_try = eval_F(u_try, omega_try, F1_try);
            if (std::isfinite(normF_try) && normF_try < (1.0 - 0.25 * alpha) * normF) {
                u = std::move(u_try);
                omega = omega_try;
                F1 = std::move(F1_try);
                normF = normF_try;
                accepted = true;
                break;
            }
        }
        if (!accepted) return {u, omega, false};
    }
    return {u, omega, normF <= tol};
}

}  // namespace

EigenSolution solve_excited(const EigenConfig& cfg, int n) {
    detail::validate_config(cfg);
    if (n < 2 || n > 5)
        throw ConfigError("n", "excited levels cover n in [2, 5]");
    RadialGrid grid = RadialGrid::uniform(cfg.grid_n, cfg.r_max);
    auto lin = linear_hydrogen_spectrum(grid, n);
    double omega_lin = lin[n - 1].omega;

    if (cfg.kappa == 0) {
        RadialOperator op(grid, coulomb_potential(grid), nullptr);
        return detail::package_solution(cfg, op, lin[n - 1].u, true, omega_lin);
    }

    // Level-separation gate: the nonlinear shift is downward (for small
    // kappa it behaves like (kappa^2/2)(3 ln kappa + O(1)) < 0), so the
    // branch must stay well clear of the level below; crossings from above
    // are caught by the node-count check after convergence.
    // The nonlinear level sits below its linear anchor by at most
    // ~5 kappa^2 (1 + |ln kappa|) (the same envelope constant the shift
    // bound uses); require that envelope to fit inside the gap below so
    // the continuation cannot cross the next level down.
    double shift_scale =
        cfg.kappa * cfg.kappa * (1.0 + std::abs(std::log(cfg.kappa)));
    double gap_below = omega_lin - lin[n - 2].omega;
    if (5.0 * shift_scale >= gap_below)
        throw ConfigError("kappa",
                          "kappa too large for level " + std::to_string(n) +
                              ": 5 kappa^2 (1+|ln kappa|) = " +
                              std::to_string(5.0 * shift_scale) +
                              " exceeds the linear gap below, " +
                              std::to_string(gap_below));

    // Geometric continuation kappa_target / 2^k -> kappa_target.
    std::vector<double> schedule{cfg.kappa};
    while (schedule.front() > 0.02)
        schedule.insert(schedule.begin(), schedule.front() * 0.5);

    std::vector<double> u = lin[n - 1].u;
    double omega = omega_lin;
    int refinements = 0;
    double kappa_prev = 0.0;
    for (std::size_t k = 0; k < schedule.size();) {
        double kappa_k = schedule[k];
        FormFactorSpec spec = spec_for(kappa_k, cfg.xi, cfg.kind);
        RadialOperator op(grid, coulomb_potential(grid), &spec);
        auto res = newton_solve(op, u, omega, cfg.tol_residual, 60);
        if (res.ok) {
            u = std::move(res.u);
            omega = res.omega;
            kappa_prev = kappa_k;
            ++k;
            continue;
        }
        // Refine the homotopy: insert the midpoint between the last success
        // and the failed target.
        if (++refinements > 40)
            throw NumericalError("continuation in kappa stalled at kappa = " +
                                 std::to_string(kappa_k));
        schedule.insert(schedule.begin() + k, 0.5 * (kappa_prev + kappa_k));
    }

    FormFactorSpec spec = spec_for(cfg.kappa, cfg.xi, cfg.kind);
    RadialOperator op(grid, coulomb_potential(grid), &spec);
    EigenSolution sol = detail::package_solution(cfg, op, std::move(u), true, omega_lin);
    if (sol.node_count != n - 1)
        throw NumericalError("level crossing: converged state has " +
                             std::to_string(sol.node_count) +
                             " nodes, expected " + std::to_string(n - 1));
    return sol;
}

// ---- residual / identity checks ---------------------------------------------

double eigen_residual(const EigenSolution& sol, const EigenConfig& cfg) {
    FormFactorSpec spec;
    if (cfg.kappa > 0) spec = spec_for(cfg.kappa, cfg.xi, cfg.kind);
    RadialOperator op(sol.grid, coulomb_potential(sol.grid),
                      cfg.kappa > 0 ? &spec : nullptr);
    std::vector<double> Hu(sol.u.size());
    op.apply(sol.u, Hu);
    double acc = 0;
    for (int i = 0; i < op.n_int; ++i) {
        double d = Hu[i] - sol.omega * sol.u[i];
        acc += d * d;
    }
    return std::sqrt(4.0 * constants::pi * op.h * acc);
}

double eom_deviation(const EigenSolution& sol, const EigenConfig& cfg) {
    double E = coulomb_energy_functional(sol.grid, sol.u, cfg);
    double omega = omega_from_state(sol.grid, sol.u, cfg);
    return std::abs(E - omega - 0.5 * cfg.kappa * cfg.kappa);
}

double planck_einstein_check(const std::vector<EigenSolution>& sols,
                             double chi, double m, double a) {
    if (sols.empty()) throw ConfigError("solutions", "need at least one solution");
    if (!(chi > 0) || !(m > 0) || !(a > 0))
        throw ConfigError("chi", "chi, m, a must be positive");
    for (const auto& s : sols) {
        if (!(s.kappa > 0))
            throw ConfigError("solutions", "offset identity needs kappa > 0 states");
        if (std::abs(1.0 / s.kappa - a) > 1e-9 * std::max(1.0, std::abs(a)))
            throw ConfigError("a", "size parameter a must equal 1/kappa = " +
                                       std::to_string(1.0 / s.kappa));
    }
    // Physical scale: omega_phys = (chi/m) omega, E0 = (chi^2/m) E, so both
    // checks reduce to the dimensionless combinations times chi^2/m.
    double pref = chi * chi / m;
    double dev = 0;
    for (std::size_t i = 0; i < sols.size(); ++i) {
        double offset =
            pref * std::abs(sols[i].energy - sols[i].omega -
                            0.5 * sols[i].kappa * sols[i].kappa);
        dev = std::max(dev, offset);
        for (std::size_t j = i + 1; j < sols.size(); ++j) {
            double pair = pref * std::abs((sols[i].omega - sols[j].omega) -
                                          (sols[i].energy - sols[j].energy));
            dev = std::max(dev, pair);
        }
    }
    return dev;
}

// ---- gap scan ---------------------------------------------------------------

namespace {

// Fixed-omega inverse iteration u <- (H[u] - omega)^{-1} u, normalized;
// returns the smallest residual of the equation at the scan frequency,
// ||(H[u] - omega) u||, seen along the way.  The Rayleigh-quotient
// residual is deliberately not used here: the iteration drifts onto a
// nearby true level whose own residual is tiny and says nothing about
// whether a state exists at omega itself.
double residual_floor(const RadialOperator& op, std::vector<double> u,
                      double omega, double tol) {
    std::vector<double> Hu(static_cast<std::size_t>(op.grid.size()), 0.0);
    auto fixed_residual = [&](const std::vector<double>& v) {
        op.apply(v, Hu);
        double s = 0;
        for (int i = 0; i < op.n_int; ++i) {
            double d = Hu[i] - omega * v[i];
            s += d * d;
        }
        return std::sqrt(4.0 * constants::pi * op.h * s);
    };
    detail::normalize(op.grid, u);
    double best = fixed_residual(u);
    double prev_best = kInf;
    int stagnant = 0;
    const auto& r = op.grid.r;
    for (int iter = 0; iter < 400; ++iter) {
        std::vector<double> dl(op.n_int - 1, -0.5 * op.inv_h2);
        std::vector<double> du(op.n_int - 1, -0.5 * op.inv_h2);
        std::vector<double> diag(op.n_int), rhs(u.begin(), u.begin() + op.n_int);
        for (int i = 0; i < op.n_int; ++i)
            diag[i] = op.inv_h2 + op.V[i] + op.gp_half(u[i], r[i]) - omega;
        try {
            detail::solve_tridiag(dl, diag, du, rhs);
        } catch (const NumericalError&) {
            break;  // exact singularity: keep the best residual found
        }
        bool finite = true;
        for (double x : rhs)
            if (!std::isfinite(x)) { finite = false; break; }
        if (!finite) break;
        for (int i = 0; i < op.n_int; ++i) u[i] = rhs[i];
        u[op.n_int] = 0.0;
        detail::normalize(op.grid, u);
        double res = fixed_residual(u);
        best = std::min(best, res);
        if (best <= tol) break;
        if (best > prev_best * (1.0 - 1e-8)) {
            if (++stagnant > 20) break;
        } else {
            stagnant = 0;
        }
        prev_best = best;
    }
    return best;
}

}  // namespace

std::vector<GapPoint> gap_scan(const EigenConfig& cfg, int n_gap, double delta,
                               int n_omega, double C4, int n_starts) {
    detail::validate_config(cfg);
    if (n_gap < 1 || n_gap > 5) throw ConfigError("n_gap", "gap index in [1, 5]");
    if (n_omega < 1) throw ConfigError("n_omega", "need at least one omega");
    if (n_starts < 1) throw ConfigError("n_starts", "need at least one start");
    if (!(C4 > 0)) throw ConfigError("C4", "C4 must be positive");
    if (!(cfg.kappa > 0))
        throw ConfigError("kappa", "gap scan needs a nonlinear configuration");

    double required =
        C4 * cfg.kappa * cfg.kappa * (1.0 + std::abs(std::log(cfg.kappa)));
    if (delta < required) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "delta = %.6g below the safe margin; required delta >= "
                      "C4 kappa^2 (1+|ln kappa|) = %.6g",
                      delta, required);
        throw ConfigError("delta", buf);
    }

    RadialGrid grid = RadialGrid::uniform(cfg.grid_n, cfg.r_max);
    auto lin = linear_hydrogen_spectrum(grid, n_gap + 1);
    double lo = lin[n_gap - 1].omega + delta;
    double hi = lin[n_gap].omega - delta;
    if (!(lo < hi))
        throw ConfigError("delta", "delta leaves an empty scan interval");

    // Start states: the bracketing linear levels, their mixtures, and a
    // broad off-eigenvector bump.
    std::vector<std::vector<double>> starts;
    starts.push_back(lin[n_gap - 1].u);
    starts.push_back(lin[n_gap].u);
    {
        std::vector<double> mix_p(grid.size()), mix_m(grid.size());
        for (int i = 0; i < grid.size(); ++i) {
            mix_p[i] = lin[n_gap - 1].u[i] + lin[n_gap].u[i];
            mix_m[i] = lin[n_gap - 1].u[i] - lin[n_gap].u[i];
        }
        starts.push_back(std::move(mix_p));
        starts.push_back(std::move(mix_m));
    }
    {
        std::vector<double> bump(grid.size(), 0.0);
        double rc = 3.0 * n_gap * n_gap, width = std::max(1.0, 1.0 * n_gap);
        for (int i = 0; i < grid.size() - 1; ++i) {
            double r = grid.r[i];
            double d = (r - rc) / width;
            bump[i] = r * std::exp(-0.5 * d * d);
        }
        starts.push_back(std::move(bump));
    }
    if (static_cast<int>(starts.size()) > n_starts) starts.resize(n_starts);

    FormFactorSpec spec = spec_for(cfg.kappa, cfg.xi, cfg.kind);
    RadialOperator op(grid, coulomb_potential(grid), &spec);

    std::vector<GapPoint> out;
    out.reserve(n_omega);
    for (int k = 0; k < n_omega; ++k) {
        double omega = (n_omega == 1)
                           ? 0.5 * (lo + hi)
                           : lo + (hi - lo) * k / static_cast<double>(n_omega - 1);
        double floor = kInf;
        for (const auto& s : starts)
            floor = std::min(floor, residual_floor(op, s, omega, cfg.tol_residual));
        out.push_back({omega, floor});
    }
    return out;
}

// ---- tail diagnostics ---------------------------------------------------------

DecayFit decay_fit(const EigenSolution& sol, double window_lo, double window_hi) {
    if (!(window_lo > 0) || !(window_hi > window_lo) || window_hi > 1.0)
        throw ConfigError("window", "need 0 < window_lo < window_hi <= 1");
    const auto& r = sol.grid.r;
    const double h = grid_h(sol.grid);
    double peak = 0;
    double r_peak = 0;
    for (std::size_t i = 0; i < sol.Psi.size(); ++i) {
        if (std::abs(sol.Psi[i]) > peak) { peak = std::abs(sol.Psi[i]); r_peak = r[i]; }
    }
    if (!(peak > 0)) throw ConfigError("Psi", "state vanishes identically");

    // Collect the tail inside the window; skip the last few nodes (the
    // Dirichlet end forces an artificial dip).
    double r_cut = sol.grid.r_max - 10.0 * h;
    std::vector<double> xs, ys;
    double amp_max = 0, amp_min = kInf;
    for (std::size_t i = 0; i < sol.Psi.size(); ++i) {
        if (r[i] <= r_peak || r[i] > r_cut) continue;
        double amp = std::abs(sol.Psi[i]) / peak;
        if (amp < window_lo || amp > window_hi) continue;
        xs.push_back(r[i]);
        ys.push_back(std::log(std::abs(sol.Psi[i])));
        amp_max = std::max(amp_max, amp);
        amp_min = std::min(amp_min, amp);
    }
    if (xs.size() < 8)
        throw ConfigError("window", "tail window holds fewer than 8 grid nodes");
    double decades = std::log10(amp_max / amp_min);
    if (decades < 4.0) {
        char buf[120];
        std::snprintf(buf, sizeof buf,
                      "tail spans %.2f decades inside the window; need >= 4",
                      decades);
        throw ConfigError("window", buf);
    }

    // Two-parameter fits ln|Psi| = c - p x with x = r or x = r^2.
    auto fit_line = [&](bool quadratic_abscissa) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double x = quadratic_abscissa ? xs[i] * xs[i] : xs[i];
            sx += x; sy += ys[i]; sxx += x * x; sxy += x * ys[i];
        }
        double n = static_cast<double>(xs.size());
        return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    };

    // Joint fit ln|Psi| = c - p r - q r^2 (3x3 normal equations).
    double S[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double b[3] = {0, 0, 0};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double base[3] = {1.0, xs[i], xs[i] * xs[i]};
        for (int a = 0; a < 3; ++a) {
            b[a] += base[a] * ys[i];
            for (int c = 0; c < 3; ++c) S[a][c] += base[a] * base[c];
        }
    }
    // Gaussian elimination with partial pivoting on the 3x3 system.
    for (int col = 0; col < 2; ++col) {
        int piv = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(S[row][col]) > std::abs(S[piv][col])) piv = row;
        std::swap(S[col], S[piv]);
        std::swap(b[col], b[piv]);
        for (int row = col + 1; row < 3; ++row) {
            double f = S[row][col] / S[col][col];
            for (int c = col; c < 3; ++c) S[row][c] -= f * S[col][c];
            b[row] -= f * b[col];
        }
    }
    double coef[3];
    for (int row = 2; row >= 0; --row) {
        double acc = b[row];
        for (int c = row + 1; c < 3; ++c) acc -= S[row][c] * coef[c];
        coef[row] = acc / S[row][row];
    }

    DecayFit fit;
    fit.exp_rate = fit_line(false);
    fit.gauss_rate_pure = fit_line(true);
    fit.exp_rate_joint = -coef[1];
    fit.gauss_coef = -coef[2];
    fit.r_lo = xs.front();
    fit.r_hi = xs.back();
    fit.decades = decades;
    double lin_drop = fit.exp_rate_joint * (fit.r_hi - fit.r_lo);
    double quad_drop = fit.gauss_coef * (fit.r_hi * fit.r_hi - fit.r_lo * fit.r_lo);
    fit.dominance = (quad_drop > lin_drop) ? TailDominance::Gaussian
                                           : TailDominance::Exponential;
    return fit;
}

// ---- invariants ----------------------------------------------------------------

double pohozaev_deviation(const RadialGrid& grid, const std::vector<double>& u,
                          const EigenConfig& cfg) {
    double G_half = nonlinear_G_form(grid, u, cfg);  // 1/2 int G
    double kin = kinetic_form(grid, u);              // 1/2 int |grad|^2
    double n2 = detail::norm_sq_radial(grid, u);
    double lambda = (kin + nonlinear_Gp_form(grid, u, cfg)) / n2;
    return std::abs(G_half - lambda * n2 + kin / 3.0);
}

double log_sobolev_gap(const RadialGrid& grid, const std::vector<double>& u) {
    double grad_sq = 2.0 * kinetic_form(grid, u);
    double entropy = 0;  // int Psi^2 ln Psi^2
    for (int i = 0; i < grid.size(); ++i) {
        double s = (u[i] / grid.r[i]) * (u[i] / grid.r[i]);
        if (s <= kAmpSqFloor) continue;
        entropy += u[i] * u[i] * std::log(s);
    }
    entropy *= 4.0 * constants::pi * grid_h(grid);
    double rhs = 1.5 * std::log(2.0 * grad_sq /
                                (3.0 * constants::pi * std::exp(1.0)));
    return rhs - entropy;
}

double minmax_level2_estimate(const EigenSolution& ground,
                              const EigenSolution& excited,
                              const EigenConfig& cfg) {
    if (ground.grid.size() != excited.grid.size() ||
        ground.grid.r_max != excited.grid.r_max)
        throw ConfigError("grid", "states must share one grid");
    // Orthonormalize the pair in the discrete inner product and take the
    // maximum of the functional over the circle they span.
    std::vector<double> a = ground.u, b = excited.u;
    detail::normalize(ground.grid, a);
    double proj = detail::dot_radial(ground.grid, a, b);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= proj * a[i];
    detail::normalize(ground.grid, b);
    double best = -kInf;
    const int n_theta = 181;
    std::vector<double> mix(a.size());
    for (int k = 0; k < n_theta; ++k) {
        double theta = constants::pi * k / (n_theta - 1);
        double ca = std::cos(theta), cb = std::sin(theta);
        for (std::size_t i = 0; i < a.size(); ++i) mix[i] = ca * a[i] + cb * b[i];
        best = std::max(best, coulomb_energy_functional(ground.grid, mix, cfg));
    }
    return best;
}

}  // namespace wc
