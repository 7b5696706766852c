// Radial nonlinear eigensolver tests: linear reference spectrum, the
// analytic product ground family and its frozen constants, ground/excited
// solvers, gap scan, tail fits, invariants, and the two-particle
// self-consistent reduction.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "wavecorpuscle/constants.hpp"
#include "wavecorpuscle/eigensolver.hpp"
#include "wavecorpuscle/errors.hpp"
#include "wavecorpuscle/nonlin.hpp"

using namespace wc;

namespace {

EigenConfig make_cfg(double kappa, int grid_n, double r_max) {
    EigenConfig c;
    c.kappa = kappa;
    c.grid_n = grid_n;
    c.r_max = r_max;
    return c;
}

double norm_sq_u(const RadialGrid& grid, const std::vector<double>& u) {
    double s = 0;
    for (double x : u) s += x * x;
    return 4.0 * constants::pi * (grid.r_max / grid.size()) * s;
}

double l2_dist_u(const RadialGrid& grid, const std::vector<double>& a,
                 const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(4.0 * constants::pi * (grid.r_max / grid.size()) * s);
}

std::vector<double> free_gausson_u(const RadialGrid& grid, double kappa) {
    std::vector<double> u(grid.size(), 0.0);
    double amp = std::pow(kappa, 1.5) * constants::C_g();
    for (int i = 0; i < grid.size() - 1; ++i) {
        double r = grid.r[i];
        u[i] = r * amp * std::exp(-0.5 * kappa * kappa * r * r);
    }
    double c = 1.0 / std::sqrt(norm_sq_u(grid, u));
    for (double& x : u) x *= c;
    return u;
}

}  // namespace

TEST_CASE("linear reference levels match -1/(2 n^2)") {
    RadialGrid grid = RadialGrid::uniform(50000, 100.0);
    auto levels = linear_hydrogen_spectrum(grid, 3);
    REQUIRE(levels.size() == 3);
    const double targets[3] = {-0.5, -0.125, -1.0 / 18.0};
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(levels[k].omega - targets[k]) <= 1e-5);
        CHECK(levels[k].node_count == k);
        CHECK(std::abs(norm_sq_u(grid, levels[k].u) - 1.0) <= 1e-12);
    }
    CHECK(levels[0].omega < levels[1].omega);
    CHECK(levels[1].omega < levels[2].omega);

    // Ground eigenfunction matches pi^{-1/2} e^{-r}.
    std::vector<double> exact(grid.size(), 0.0);
    double amp = 1.0 / std::sqrt(constants::pi);
    for (int i = 0; i < grid.size() - 1; ++i)
        exact[i] = grid.r[i] * amp * std::exp(-grid.r[i]);
    double c = 1.0 / std::sqrt(norm_sq_u(grid, exact));
    for (double& x : exact) x *= c;
    CHECK(l2_dist_u(grid, levels[0].u, exact) <= 1e-3);

    // A box too small for level 3 is rejected via the boundary amplitude.
    RadialGrid small = RadialGrid::uniform(3000, 30.0);
    CHECK_THROWS_AS((void)linear_hydrogen_spectrum(small, 3), ConfigError);
}

TEST_CASE("product-family constants: frozen values and the displayed rounding") {
    auto c1 = product_state_constants(1.0);
    CHECK(std::abs(c1.ln_C_sq - 1.868392846362) <= 1e-9);
    // The widely quoted constant 1.868 coincides with the FULL ln C^2 at
    // kappa = 1; the half-log at kappa = 1 is 0.934, and the constant is
    // not kappa-independent (it grows as kappa decreases).
    CHECK(std::abs(c1.ln_C_sq - 1.868) <= 5e-4);
    CHECK(std::abs(0.5 * c1.ln_C_sq - 0.934196423181) <= 1e-9);

    auto c01 = product_state_constants(0.1);
    CHECK(std::abs(c01.ln_C_sq - 7.5094715156) <= 1e-8);
    CHECK(std::abs(c01.omega - (-0.537547357578)) <= 1e-9);

    auto c005 = product_state_constants(0.05);
    CHECK(std::abs(c005.omega - (-0.511958775005)) <= 1e-9);

    CHECK_THROWS_AS((void)product_state_constants(0.0), ConfigError);
}

TEST_CASE("analytic ground state solves the eigenvalue equation to the grid floor") {
    EigenConfig cfg = make_cfg(0.1, 100000, 100.0);
    EigenSolution sol = analytic_ground_state(cfg);
    double res = eigen_residual(sol, cfg);
    CHECK(res <= 1e-6);
    CHECK(sol.node_count == 0);
    CHECK(std::abs(norm_sq_u(sol.grid, sol.u) - 1.0) <= 1e-12);
    CHECK(std::abs(sol.omega - (-0.537547357578)) <= 1e-5);

    double dev = eom_deviation(sol, cfg);
    CHECK(dev <= 1e-12);

    // A perturbed state (bump added to Psi, renormalized) is far from the
    // equation: the residual is a real sensitivity probe.
    EigenSolution bad = sol;
    for (int i = 0; i < bad.grid.size() - 1; ++i) {
        double r = bad.grid.r[i];
        bad.Psi[i] += 0.01 * std::exp(-(r - 3.0) * (r - 3.0));
        bad.u[i] = r * bad.Psi[i];
    }
    double cnorm = 1.0 / std::sqrt(norm_sq_u(bad.grid, bad.u));
    for (int i = 0; i < bad.grid.size(); ++i) {
        bad.u[i] *= cnorm;
        bad.Psi[i] *= cnorm;
    }
    CHECK(eigen_residual(bad, cfg) > 1e-3);
}

TEST_CASE("linear eigenfunction has machine-level residual at kappa = 0") {
    EigenConfig cfg = make_cfg(0.0, 20000, 100.0);
    EigenSolution sol = solve_ground(cfg);
    CHECK(sol.converged);
    CHECK(sol.node_count == 0);
    CHECK(std::abs(sol.omega - sol.omega_linear) <= 1e-10);
    double res = eigen_residual(sol, cfg);
    CHECK(res <= 1e-6);
    // Without the log term the energy equals the eigenvalue.
    CHECK(std::abs(sol.energy - sol.omega) <= 1e-12);
}

TEST_CASE("ground solver reproduces the analytic product family") {
    EigenConfig cfg = make_cfg(0.1, 50000, 100.0);
    EigenSolution sol = solve_ground(cfg);
    CHECK(sol.converged);
    CHECK(sol.node_count == 0);
    CHECK(std::abs(norm_sq_u(sol.grid, sol.u) - 1.0) <= 1e-10);
    CHECK(std::abs(sol.omega - (-0.537547357578)) <= 2e-5);

    EigenSolution exact = analytic_ground_state(cfg);
    double dist = l2_dist_u(sol.grid, sol.u, exact.u);
    CHECK(dist <= 1e-3);

    // Reported energy obeys the exact offset E = omega + kappa^2/2.
    CHECK(std::abs(sol.energy - sol.omega - 0.005) <= 1e-12);
    CHECK(eom_deviation(sol, cfg) <= 1e-12);
    CHECK(sol.decay_rate > 0.0);

    // Psi and u are consistent.
    for (int i : {0, 100, 25000, 49998})
        CHECK(sol.Psi[i] == doctest::Approx(sol.u[i] / sol.grid.r[i]).epsilon(1e-14));

    EigenConfig cfg5 = make_cfg(0.05, 40000, 200.0);
    EigenSolution sol5 = solve_ground(cfg5);
    CHECK(std::abs(sol5.omega - (-0.511958775005)) <= 2e-5);
    CHECK(std::abs(sol5.energy - sol5.omega - 0.00125) <= 1e-12);
}

TEST_CASE("energy functional: linear value, free Gaussian value, cutoff robustness") {
    // Linear limit on the Coulomb ground state.
    {
        RadialGrid grid = RadialGrid::uniform(50000, 100.0);
        auto lin = linear_hydrogen_spectrum(grid, 1);
        EigenConfig cfg = make_cfg(0.0, 50000, 100.0);
        double E = coulomb_energy_functional(grid, lin[0].u, cfg);
        CHECK(std::abs(E - (-0.5)) <= 1e-5);
    }
    // Free part on the kappa = 1 Gaussian: kinetic + log term = 1/2.
    {
        RadialGrid grid = RadialGrid::uniform(4000, 20.0);
        std::vector<double> u = free_gausson_u(grid, 1.0);
        EigenConfig cfg = make_cfg(1.0, 4000, 20.0);
        double F = free_energy_functional(grid, u, cfg);
        CHECK(std::abs(F - 0.5) <= 1e-5);
    }
    // Cutoff at xi = -40 is indistinguishable on the kappa = 0.1 ground state.
    {
        EigenConfig cfg = make_cfg(0.1, 20000, 100.0);
        EigenSolution sol = analytic_ground_state(cfg);
        double E_inf = coulomb_energy_functional(sol.grid, sol.u, cfg);
        EigenConfig cut = cfg;
        cut.xi = -40.0;
        double E_cut = coulomb_energy_functional(sol.grid, sol.u, cut);
        CHECK(std::abs(E_inf - E_cut) <= 1e-8);
    }
}

TEST_CASE("frequency-energy pairing and offset identities") {
    EigenConfig cfg = make_cfg(0.05, 40000, 200.0);
    EigenSolution g = solve_ground(cfg);
    EigenSolution e2 = solve_excited(cfg, 2);
    double dev = planck_einstein_check({g, e2}, 1.0, 1.0, 20.0);
    CHECK(dev <= 1e-6);
    CHECK(planck_einstein_check({g}, 1.0, 1.0, 20.0) <= 1e-6);

    // Off the logarithmic family the offset identity fails.
    EigenConfig pw = make_cfg(0.1, 20000, 100.0);
    pw.kind = FormFactorKind::PowerLaw;
    EigenSolution gp = solve_ground(pw);
    double dev_pw = planck_einstein_check({gp}, 1.0, 1.0, 10.0);
    CHECK(dev_pw > 1e-3);

    CHECK_THROWS_AS((void)planck_einstein_check({g}, 1.0, 1.0, 19.0), ConfigError);
    CHECK_THROWS_AS((void)planck_einstein_check({}, 1.0, 1.0, 20.0), ConfigError);
}

TEST_CASE("excited level 2: shift bound and node structure") {
    EigenConfig cfg = make_cfg(0.05, 40000, 200.0);
    EigenSolution e2 = solve_excited(cfg, 2);
    CHECK(e2.converged);
    CHECK(e2.node_count == 1);
    CHECK(std::abs(norm_sq_u(e2.grid, e2.u) - 1.0) <= 1e-10);
    double shift = std::abs(e2.omega - (-0.125));
    double bound = 5.0 * 0.05 * 0.05 * (1.0 + std::abs(std::log(0.05)));
    CHECK(shift <= bound);
    CHECK(e2.omega < e2.omega_linear);  // the log term lowers the level
    CHECK(std::abs(e2.energy - e2.omega - 0.00125) <= 1e-10);
}

TEST_CASE("excited solver at kappa = 0 reproduces the linear level") {
    EigenConfig cfg = make_cfg(0.0, 20000, 100.0);
    EigenSolution e2 = solve_excited(cfg, 2);
    RadialGrid grid = RadialGrid::uniform(20000, 100.0);
    auto lin = linear_hydrogen_spectrum(grid, 2);
    CHECK(std::abs(e2.omega - lin[1].omega) <= 1e-10);
    CHECK(e2.node_count == 1);
}

TEST_CASE("excited level 3 approaches the linear value monotonically") {
    const double kappas[3] = {0.005, 0.01, 0.02};
    double omegas[3];
    for (int k = 0; k < 3; ++k) {
        EigenConfig cfg = make_cfg(kappas[k], 200000, 2000.0);
        EigenSolution e3 = solve_excited(cfg, 3);
        CHECK(e3.node_count == 2);
        omegas[k] = e3.omega;
    }
    CHECK(omegas[2] < omegas[1]);
    CHECK(omegas[1] < omegas[0]);
    CHECK(omegas[0] < -1.0 / 18.0 + 1e-6);
    CHECK(std::abs(omegas[0] - (-1.0 / 18.0)) <= 1e-3);
}

TEST_CASE("eigenvalue ordering at fixed kappa and the min-max cross-check") {
    EigenConfig cfg = make_cfg(0.02, 100000, 500.0);
    EigenSolution g = solve_ground(cfg);
    EigenSolution e2 = solve_excited(cfg, 2);
    EigenSolution e3 = solve_excited(cfg, 3);
    EigenSolution e4 = solve_excited(cfg, 4);
    CHECK(g.omega < e2.omega);
    CHECK(e2.omega < e3.omega);
    CHECK(e3.omega < e4.omega);
    CHECK(g.node_count == 0);
    CHECK(e2.node_count == 1);
    CHECK(e3.node_count == 2);
    CHECK(e4.node_count == 3);

    double est = minmax_level2_estimate(g, e2, cfg);
    CHECK(est >= e2.energy - 1e-3);
    CHECK(est <= e2.energy + 0.05);
}

TEST_CASE("gap scan: residual floor mid-gap, control point, delta gate") {
    EigenConfig cfg = make_cfg(0.05, 40000, 200.0);

    // Mid-gap between levels 2 and 3 (omega near -0.09): no states.  The
    // margin delta must clear the nonlinear levels themselves, which sit
    // below their linear anchors (level 3 at kappa=0.05 is ~0.004 down).
    auto pts = gap_scan(cfg, 2, 0.02, 3, 1.0, 5);
    REQUIRE(pts.size() == 3);
    for (const auto& p : pts) {
        CHECK(p.omega > -0.125);
        CHECK(p.omega < -1.0 / 18.0);
        CHECK(p.floor_residual >= 1e-2);
    }

    // Control: put a scan endpoint exactly on the nonlinear level 2.
    EigenSolution e2 = solve_excited(cfg, 2);
    double delta_ctl = e2.omega_linear - e2.omega;
    EigenConfig ctl = cfg;
    ctl.tol_residual = 1e-6;
    auto ctrl = gap_scan(ctl, 1, delta_ctl, 2, 0.5, 5);
    REQUIRE(ctrl.size() == 2);
    CHECK(std::abs(ctrl[1].omega - e2.omega) <= 1e-9);
    CHECK(ctrl[1].floor_residual <= 1e-6);

    // Too-small delta is refused with the required margin reported.
    try {
        (void)gap_scan(cfg, 2, 0.004, 3, 1.0, 5);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.field()) == "delta");
        CHECK(std::string(e.what()).find("required") != std::string::npos);
    }
}

TEST_CASE("tail fits: exponential, Gaussian coefficient, cutoff rate, dominance") {
    // Linear ground: pure exponential, rate 1.
    {
        EigenConfig cfg = make_cfg(0.0, 50000, 100.0);
        EigenSolution sol = solve_ground(cfg);
        DecayFit fit = decay_fit(sol);
        CHECK(std::abs(fit.exp_rate - 1.0) <= 0.02);
        CHECK(fit.dominance == TailDominance::Exponential);
        CHECK(fit.decades >= 4.0);
    }
    // Nonlinear ground at kappa=0.1: joint fit recovers the kappa^2/2
    // quadratic coefficient.
    {
        EigenConfig cfg = make_cfg(0.1, 50000, 100.0);
        EigenSolution sol = solve_ground(cfg);
        DecayFit fit = decay_fit(sol);
        CHECK(std::abs(fit.gauss_coef - 0.005) <= 0.0005);
    }
    // Finite cutoff xi=-25: below the cut the tail is exponential with a
    // rate far above (kappa/3)|xi|^{1/2} ~ 0.167.
    {
        EigenConfig cfg = make_cfg(0.1, 50000, 100.0);
        cfg.xi = -25.0;
        EigenSolution sol = solve_ground(cfg);
        DecayFit fit = decay_fit(sol, 1e-13, 1e-8);
        CHECK(fit.exp_rate >= 0.167);
    }
    // Dominance flips from exponential (shallow window) to Gaussian (deep
    // window) at kappa=0.3, where the crossover radius ~ 2/kappa^2 = 22 is
    // reachable on the grid.
    {
        EigenConfig cfg = make_cfg(0.3, 25000, 50.0);
        EigenSolution sol = solve_ground(cfg);
        DecayFit shallow = decay_fit(sol, 1e-8, 1e-3);
        DecayFit deep = decay_fit(sol, 1e-20, 1e-8);
        CHECK(shallow.dominance == TailDominance::Exponential);
        CHECK(deep.dominance == TailDominance::Gaussian);
        CHECK(std::abs(deep.gauss_coef - 0.045) <= 0.0045);

        // One-decade window cannot support a fit.
        CHECK_THROWS_AS((void)decay_fit(sol, 1e-4, 1e-3), ConfigError);
    }
}

TEST_CASE("Pohozaev identity at the free critical point") {
    RadialGrid grid = RadialGrid::uniform(12000, 60.0);
    std::vector<double> u = free_gausson_u(grid, 0.2);
    EigenConfig cfg = make_cfg(0.2, 12000, 60.0);
    double dev = pohozaev_deviation(grid, u, cfg);
    CHECK(dev <= 1e-5);
}

TEST_CASE("entropy bound: positive gap generically, near-equality at Gaussians") {
    RadialGrid grid = RadialGrid::uniform(50000, 100.0);
    auto lin = linear_hydrogen_spectrum(grid, 1);
    double gap_h = log_sobolev_gap(grid, lin[0].u);
    CHECK(gap_h >= 1e-8);
    CHECK(gap_h == doctest::Approx(0.3183).epsilon(0.01));

    RadialGrid gg = RadialGrid::uniform(12000, 60.0);
    std::vector<double> u = free_gausson_u(gg, 0.2);
    double gap_g = log_sobolev_gap(gg, u);
    CHECK(std::abs(gap_g) <= 1e-6);
}

TEST_CASE("cutoff robustness of the ground frequency") {
    EigenConfig cfg = make_cfg(0.1, 20000, 100.0);
    EigenSolution ref = solve_ground(cfg);
    double d[3];
    const double xis[3] = {-10.0, -20.0, -40.0};
    for (int k = 0; k < 3; ++k) {
        EigenConfig c = cfg;
        c.xi = xis[k];
        d[k] = std::abs(solve_ground(c).omega - ref.omega);
    }
    CHECK(d[0] > d[1]);
    CHECK(d[1] >= d[2] - 1e-11);
    CHECK(d[2] <= 1e-7);
}

TEST_CASE("directional derivative of the energy matches the equation pairing") {
    EigenConfig cfg = make_cfg(0.1, 20000, 100.0);
    EigenSolution sol = analytic_ground_state(cfg);
    const RadialGrid& grid = sol.grid;
    const int n = grid.size();
    const double h = grid.r_max / n;
    const double four_pi_h = 4.0 * constants::pi * h;

    FormFactorSpec spec;
    spec.kind = FormFactorKind::LogGaussian;
    spec.a = 1.0 / cfg.kappa;
    spec.extension = Extension::ClosedFormEverywhere;

    // (H u)_i with the same three-point stencil and Dirichlet ends.
    std::vector<double> Hu(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        double left = (i > 0) ? sol.u[i - 1] : 0.0;
        double lap = (sol.u[i + 1] - 2.0 * sol.u[i] + left) / (h * h);
        double s = std::max((sol.u[i] / grid.r[i]) * (sol.u[i] / grid.r[i]),
                            1e-290);
        Hu[i] = -0.5 * lap - sol.u[i] / grid.r[i] +
                0.5 * eval_Gprime(spec, s) * sol.u[i];
    }

    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const double eps = 1e-5;
    double worst = 0;
    for (int trial = 0; trial < 10; ++trial) {
        // Relative tangent, projected to the normalization sphere.
        std::vector<double> phi(n, 0.0);
        for (int i = 0; i + 1 < n; ++i) phi[i] = dist(rng) * sol.u[i];
        double proj = 0;
        for (int i = 0; i < n; ++i) proj += sol.u[i] * phi[i];
        proj *= four_pi_h;
        for (int i = 0; i < n; ++i) phi[i] -= proj * sol.u[i];

        std::vector<double> up(sol.u), um(sol.u);
        for (int i = 0; i < n; ++i) {
            up[i] += eps * phi[i];
            um[i] -= eps * phi[i];
        }
        double fd = (coulomb_energy_functional(grid, up, cfg) -
                     coulomb_energy_functional(grid, um, cfg)) /
                    (2.0 * eps);
        double pair = 0;
        for (int i = 0; i < n; ++i) pair += Hu[i] * phi[i];
        pair *= 2.0 * four_pi_h;
        worst = std::max(worst, std::abs(fd - pair) / std::max(1.0, std::abs(pair)));
    }
    CHECK(worst <= 1e-7);
}

TEST_CASE("two-particle reduction decouples as b -> 0") {
    TwoParticleConfig cfg;
    cfg.b = 1e-5;
    cfg.kappa_e = 0.1;
    cfg.kappa_p = 1.0;
    cfg.grid_n_e = 20000;
    cfg.r_max_e = 100.0;
    cfg.grid_n_p = 1000;
    cfg.r_max_p = 10.0;
    TwoParticleResult res = two_particle_scf(cfg);

    EigenSolution ref = solve_ground(make_cfg(0.1, 20000, 100.0));
    CHECK(std::abs(res.electron.omega - ref.omega) <= 1e-6);
    CHECK(std::abs(res.proton.omega) <= 1e-4);

    RadialGrid grid_p = RadialGrid::uniform(1000, 10.0);
    std::vector<double> gausson = free_gausson_u(grid_p, 1.0);
    CHECK(l2_dist_u(grid_p, res.proton.u, gausson) <= 1e-3);

    CHECK(res.D_prot_direct >= 0.0);
    CHECK(res.D_prot_direct <= 1e-8);
    CHECK(std::abs(res.D_prot) <= 1e-6);
    CHECK(res.outer_iterations <= 10);
}

TEST_CASE("two-particle smearing deviation scales as b^2") {
    TwoParticleConfig cfg;
    cfg.kappa_e = 0.1;
    cfg.kappa_p = 1.0;
    cfg.grid_n_e = 20000;
    cfg.r_max_e = 100.0;
    cfg.grid_n_p = 1200;
    cfg.r_max_p = 12.0;

    cfg.b = 0.01;
    TwoParticleResult r1 = two_particle_scf(cfg);
    cfg.b = 0.02;
    TwoParticleResult r2 = two_particle_scf(cfg);

    REQUIRE(r1.D_prot_direct > 0.0);
    double ratio_direct = r2.D_prot_direct / r1.D_prot_direct;
    CHECK(ratio_direct >= 3.0);
    CHECK(ratio_direct <= 5.0);

    REQUIRE(r1.D_prot > 0.0);
    double ratio_interp = r2.D_prot / r1.D_prot;
    CHECK(ratio_interp >= 3.0);
    CHECK(ratio_interp <= 5.0);

    // The two evaluation paths agree where the electron grid resolves the
    // smearing scale.
    CHECK(r2.D_prot == doctest::Approx(r2.D_prot_direct).epsilon(0.1));
}

TEST_CASE("two-particle deviation is negligible at the physical mass ratio") {
    TwoParticleConfig cfg;
    cfg.b = 1.0 / 1837.0;
    cfg.kappa_e = 0.1;
    cfg.kappa_p = 10.0;
    cfg.grid_n_e = 20000;
    cfg.r_max_e = 100.0;
    cfg.grid_n_p = 1000;
    cfg.r_max_p = 2.0;
    TwoParticleResult res = two_particle_scf(cfg);
    CHECK(res.D_prot_direct >= 0.0);
    CHECK(res.D_prot_direct <= 1e-4);
    CHECK(std::abs(res.D_prot) <= 1e-4);
}

TEST_CASE("two-particle configuration gates") {
    TwoParticleConfig ok;
    ok.b = 0.01;
    ok.kappa_e = 0.1;
    ok.kappa_p = 1.0;
    ok.grid_n_e = 8000;
    ok.r_max_e = 100.0;
    ok.grid_n_p = 1000;
    ok.r_max_p = 10.0;

    auto expect_field = [](TwoParticleConfig c, const char* field) {
        try {
            (void)two_particle_scf(c);
            FAIL_CHECK("expected ConfigError for " << field);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.field()) == field);
        }
    };

    TwoParticleConfig c = ok;
    c.b = 0.0;
    expect_field(c, "b");
    c = ok;
    c.b = 0.2;
    expect_field(c, "b");
    c = ok;
    c.kappa_e = 0.6;
    expect_field(c, "kappa_e");
    c = ok;
    c.r_max_p = 5.0;  // below 10/kappa_p
    expect_field(c, "r_max_p");
    c = ok;
    c.grid_n_p = 400;  // h_p = 0.025 > (1/kappa_p)/50
    expect_field(c, "grid_n_p");
    c = ok;
    c.mixing = 0.0;
    expect_field(c, "mixing");
}

TEST_CASE("solver configuration gates") {
    auto expect_field = [](EigenConfig c, const char* field, int n = 0) {
        try {
            if (n > 0)
                (void)solve_excited(c, n);
            else
                (void)solve_ground(c);
            FAIL_CHECK("expected ConfigError for " << field);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.field()) == field);
        }
    };

    EigenConfig ok = make_cfg(0.1, 8000, 100.0);
    EigenConfig c = ok;
    c.kappa = 1.5;
    expect_field(c, "kappa");
    c = ok;
    c.kappa = -0.1;
    expect_field(c, "kappa");
    c = ok;
    c.xi = 0.5;
    expect_field(c, "xi");
    c = ok;
    c.grid_n = 32;
    expect_field(c, "grid_n");
    c = ok;
    c.r_max = 50.0;  // below 10/kappa
    expect_field(c, "r_max");
    c = ok;
    c.tol_residual = 0.0;
    expect_field(c, "tol_residual");
    c = ok;
    c.mixing = -1.0;
    expect_field(c, "mixing");
    c = make_cfg(0.6, 8000, 100.0);
    expect_field(c, "kappa");  // ground solver validated range

    // Excited levels: index range and the separation gate.
    CHECK_THROWS_AS((void)solve_excited(ok, 1), ConfigError);
    CHECK_THROWS_AS((void)solve_excited(ok, 6), ConfigError);
    EigenConfig tight = make_cfg(0.2, 8000, 100.0);
    expect_field(tight, "kappa", 2);  // shift scale exceeds the gap below

    // Gap scan guards.
    CHECK_THROWS_AS((void)gap_scan(make_cfg(0.0, 8000, 100.0), 2, 0.01, 3, 1.0, 5),
                    ConfigError);
    CHECK_THROWS_AS((void)gap_scan(ok, 0, 0.01, 3, 1.0, 5), ConfigError);
}
