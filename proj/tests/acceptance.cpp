// Acceptance checklist: eleven numbered end-to-end criteria, each printing
// one [PASS]/[FAIL] line plus the measured numbers behind the verdict.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run one criterion
//
// The exit code is nonzero when any selected criterion fails.  Checks are
// implemented exactly as stated; a criterion whose stated target cannot be
// met by a faithful implementation is reported as an honest failure with
// the measured value next to the target, never loosened to force a pass.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "wavecorpuscle/constants.hpp"
#include "wavecorpuscle/dynamics.hpp"
#include "wavecorpuscle/eigensolver.hpp"
#include "wavecorpuscle/grids.hpp"
#include "wavecorpuscle/io.hpp"
#include "wavecorpuscle/nonlin.hpp"
#include "wavecorpuscle/poisson.hpp"
#include "wavecorpuscle/soliton.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace wc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

bool check(bool ok, const std::string& what) {
    std::cout << "  " << (ok ? "ok   " : "FAIL ") << what << "\n";
    return ok;
}

std::string num(double v) { return format_double(v); }

ChargeState make_gausson(const CartesianGrid& g, double a, Vec3 center,
                         Vec3 v, double m = 1, double q = 1, double chi = 1) {
    FormFactorSpec ff;
    ff.kind = FormFactorKind::LogGaussian;
    ff.a = a;
    ff.extension = Extension::ClosedFormEverywhere;
    ChargeState c;
    c.m = m;
    c.q = q;
    c.chi = chi;
    c.ff = ff;
    c.psi = CplxField3(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k) {
                const Vec3 x = g.point(i, j, k);
                const double amp = eval_form_factor(ff, (x - center).norm());
                const double th = m * v.dot(x - center) / chi;
                c.psi(i, j, k) =
                    amp * std::complex<double>(std::cos(th), std::sin(th));
            }
    return c;
}

ExternalField uniform_field(Vec3 E0) {
    ExternalField ext;
    ext.phi = [E0](double, const Vec3& x) { return -E0.dot(x); };
    ext.E = [E0](double, const Vec3&) { return E0; };
    return ext;
}

double l2_dist_u(const EigenSolution& x, const EigenSolution& y) {
    double acc = 0;
    for (std::size_t i = 0; i < x.u.size(); ++i) {
        const double d = x.u[i] - y.u[i];
        acc += d * d;
    }
    const double h = x.grid.r[1] - x.grid.r[0];
    return std::sqrt(4.0 * constants::pi * h * acc);
}

// ---- 1: linear spectrum through the command-line runner ----------------------

bool crit1() {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir = fs::temp_directory_path() / "wc_acceptance" / "crit1";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cmd = std::string(WC_CLI_PATH) +
                            " spectrum --kappa 0 --levels 4 --grid-n 10000 "
                            "--r-max 100 --out " +
                            dir.string();
    const int raw = std::system(cmd.c_str());
    bool ok = check(WEXITSTATUS(raw) == 0, "runner exit code 0");
    if (!ok) return false;

    std::ifstream in(dir / "summary.json");
    json j;
    in >> j;
    const auto& levels = j["results"]["levels"];
    ok &= check(levels.size() == 4, "four levels reported");
    for (int n = 1; n <= 4; ++n) {
        const double omega = levels[n - 1]["omega"].get<double>();
        const double target = -0.5 / (n * n);
        ok &= check(std::abs(omega - target) <= 1e-4,
                    "level " + std::to_string(n) + ": omega " + num(omega) +
                        " vs " + num(target) + " (|diff| " +
                        num(std::abs(omega - target)) + " <= 1e-4)");
        ok &= check(levels[n - 1]["node_count"].get<int>() == n - 1,
                    "level " + std::to_string(n) + " node count " +
                        std::to_string(n - 1));
    }
    const double sec = elapsed_s(t0);
    ok &= check(sec < 60.0, "completed in " + num(sec) + " s (< 60)");
    return ok;
}

// ---- 2: ground frequency targets + closeness to the analytic product ---------

bool crit2() {
    struct Row {
        double kappa, target;
        int grid_n;
        double r_max;
    };
    const std::vector<Row> rows = {{0.1, -0.51868, 50000, 100},
                                   {0.05, -0.504670, 40000, 200}};
    bool ok = true;
    for (const auto& row : rows) {
        EigenConfig cfg;
        cfg.kappa = row.kappa;
        cfg.grid_n = row.grid_n;
        cfg.r_max = row.r_max;
        const EigenSolution sol = solve_ground(cfg);
        const EigenSolution ref = analytic_ground_state(cfg);
        const auto pc = product_state_constants(row.kappa);

        ok &= check(std::abs(sol.omega - row.target) <= 2e-4,
                    "kappa " + num(row.kappa) + ": omega " + num(sol.omega) +
                        " vs target " + num(row.target) + " (|diff| " +
                        num(std::abs(sol.omega - row.target)) + " <= 2e-4)");
        ok &= check(l2_dist_u(sol, ref) <= 1e-3,
                    "kappa " + num(row.kappa) + ": L2 distance to analytic "
                        "product " + num(l2_dist_u(sol, ref)) + " <= 1e-3");
        std::cout << "  note kappa " << num(row.kappa)
                  << ": closed-form product frequency -1/2 - (kappa^2/2) "
                     "ln C^2(kappa) = "
                  << num(pc.omega) << " (solver agrees to "
                  << num(std::abs(sol.omega - pc.omega))
                  << "); the target above instead equals -1/2 - kappa^2 * "
                     "1.868 = "
                  << num(-0.5 - row.kappa * row.kappa * 1.868) << "\n";
    }
    return ok;
}

// ---- 3: level-2 frequency shift stays inside a factor-2 band -----------------

bool crit3() {
    const std::vector<double> kappas = {0.05, 0.025, 0.0125};
    std::vector<double> ratios;
    bool ok = true;
    for (double kappa : kappas) {
        EigenConfig cfg;
        cfg.kappa = kappa;
        cfg.grid_n = 64000;
        cfg.r_max = 800;
        const EigenSolution sol = solve_excited(cfg, 2);
        ok &= check(sol.converged, "kappa " + num(kappa) + " converged");
        const double envelope = kappa * kappa * (1.0 + std::abs(std::log(kappa)));
        const double ratio = (sol.omega_linear - sol.omega) / envelope;
        ratios.push_back(ratio);
        std::cout << "  kappa " << num(kappa) << ": omega " << num(sol.omega)
                  << ", shift " << num(sol.omega_linear - sol.omega)
                  << ", shift / (kappa^2 (1+|ln kappa|)) = " << num(ratio)
                  << "\n";
    }
    const double lo = *std::min_element(ratios.begin(), ratios.end());
    const double hi = *std::max_element(ratios.begin(), ratios.end());
    ok &= check(lo > 0, "shift is downward at every kappa");
    ok &= check(hi / lo <= 2.0,
                "band ratio " + num(hi / lo) + " <= 2 across the kappa sweep");
    return ok;
}

// ---- 4: resting unit gausson energy ------------------------------------------

bool crit4() {
    const auto g = CartesianGrid::cubic(64, 8.0);
    SystemState sys;
    sys.charges.push_back(make_gausson(g, 1.0, {0, 0, 0}, {0, 0, 0}));
    const auto en = system_energy(sys);
    const double grad_sq = 2.0 * en.per_charge[0].gradient;  // chi = m = 1
    bool ok = check(std::abs(en.total - 0.5) <= 1e-4,
                    "system energy " + num(en.total) + " = 0.5 +- 1e-4");
    ok &= check(std::abs(grad_sq - 1.5) <= 1e-4,
                "int |grad psi|^2 = " + num(grad_sq) + " = 1.5 +- 1e-4");
    return ok;
}

// ---- 5: accelerating corpuscle residual + dt-halving convergence -------------

bool crit5() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto g = CartesianGrid::cubic(64, 8.0);

    WaveCorpuscleConfig cfg;
    cfg.ff.kind = FormFactorKind::LogGaussian;
    cfg.ff.a = 1.0;
    cfg.ff.extension = Extension::ClosedFormEverywhere;
    cfg.v0 = {0.1, -0.05, 0};
    cfg.T = 1.0;
    cfg.dt = 1e-2;
    const auto wc1 = build_wave_corpuscle(cfg, uniform_field({0.05, 0.02, 0}));
    bool ok = true;
    for (double t : {0.0, 0.5, 1.0}) {
        const double res = nls_residual(wc1, t, g);
        ok &= check(res <= 1e-8, "field-equation residual at t = " + num(t) +
                                     ": " + num(res) + " <= 1e-8");
    }

    WaveCorpuscleConfig cfg2 = cfg;
    cfg2.v0 = {0.2, 0, 0};
    cfg2.T = 0.2;
    const auto wc2 = build_wave_corpuscle(cfg2, uniform_field({0.05, 0, 0}));
    EvolveOptions coarse{0.2, 4e-3, 25};
    EvolveOptions fine{0.2, 2e-3, 50};
    const auto ec = oracle_compare(wc2, g, coarse);
    const auto ef = oracle_compare(wc2, g, fine);
    const double ratio = ec.sup_l2_error / ef.sup_l2_error;
    ok &= check(ratio >= 3.0 && ratio <= 5.0,
                "sup L2 error " + num(ec.sup_l2_error) + " (dt 4e-3) / " +
                    num(ef.sup_l2_error) + " (dt 2e-3) = " + num(ratio) +
                    " in [3, 5]");
    const double sec = elapsed_s(t0);
    ok &= check(sec < 300.0, "completed in " + num(sec) + " s (< 300)");
    return ok;
}

// ---- 6: quartic well, center-vs-Newton deviation shrinks with a --------------

bool crit6() {
    const auto t0 = std::chrono::steady_clock::now();
    NewtonLimitConfig cfg;
    cfg.kind = FormFactorKind::LogGaussian;
    cfg.r0 = {1, 0, 0};
    cfg.v0 = {0, 0.2, 0};
    cfg.T = 0.5;
    cfg.dt = 2e-3;
    cfg.output_stride = 10;
    cfg.cases = {{0.4, 6.0, 64}, {0.2, 3.0, 64}, {0.1, 2.0, 64}};

    const double c4 = 0.02;
    ExternalField ext;
    ext.phi = [c4](double, const Vec3& x) {
        const double r2 = x.norm2();
        return c4 * r2 * r2;
    };
    ext.E = [c4](double, const Vec3& x) { return x * (-4.0 * c4 * x.norm2()); };

    const auto rows = newton_limit_study(cfg, ext);
    bool ok = true;
    for (const auto& row : rows)
        std::cout << "  a " << num(row.a) << " (L " << num(row.L)
                  << "): sup|center - newton| = " << num(row.sup_center_dev)
                  << ", max eps1 = " << num(row.max_eps1) << ", edge mass "
                  << num(row.edge_mass) << "\n";
    for (std::size_t i = 1; i < rows.size(); ++i)
        ok &= check(rows[i].sup_center_dev < rows[i - 1].sup_center_dev,
                    "deviation decreases from a = " + num(rows[i - 1].a) +
                        " to a = " + num(rows[i].a));
    for (const auto& row : rows)
        ok &= check(row.edge_mass <= 1e-8,
                    "a " + num(row.a) + ": edge mass " + num(row.edge_mass) +
                        " <= 1e-8 (box large enough)");
    const double sec = elapsed_s(t0);
    ok &= check(sec < 900.0, "completed in " + num(sec) + " s (< 900)");
    return ok;
}

// ---- 7: conservation over a long horizon in a static field -------------------

bool crit7() {
    const auto g = CartesianGrid::cubic(32, 6.0);
    SystemState sys;
    sys.charges.push_back(make_gausson(g, 1.0, {0, 0, 0}, {0, 0, 0}));
    sys.external = uniform_field({0.05, 0, 0});

    const double T = 5.0, dt = 1e-3;
    const long n_steps = std::lround(T / dt);
    const double norm0 = norm_sq(sys.charges[0].psi);
    const double e0 = system_energy(sys).total;
    double norm_dev = 0, energy_dev = 0;
    auto obs = [&](const SystemState& s) {
        norm_dev = std::max(norm_dev,
                            std::abs(norm_sq(s.charges[0].psi) - norm0));
        energy_dev =
            std::max(energy_dev, std::abs(system_energy(s).total - e0));
    };
    EvolveOptions opts{T, dt, 100};
    evolve(sys, opts, obs);

    const double norm_budget = 1e-10 * double(n_steps) / 1000.0;
    bool ok = check(norm_dev <= norm_budget,
                    "norm drift " + num(norm_dev) + " <= 1e-10 per 1000 steps "
                        "(" + std::to_string(n_steps) + " steps, budget " +
                        num(norm_budget) + ")");
    const double rel = energy_dev / std::abs(e0);
    ok &= check(rel <= 1e-6, "relative energy drift " + num(rel) +
                                 " <= 1e-6 over t in [0, 5]");
    return ok;
}

// ---- 8: electrostatic solvers vs the closed form ------------------------------

bool crit8() {
    RadialField rho;
    rho.grid = RadialGrid::uniform(40000, 12.0);
    rho.v.resize(rho.grid.size());
    const double rho0 = std::pow(1.0 / constants::pi, 1.5);
    for (int i = 0; i < rho.grid.size(); ++i)
        rho.v[i] = rho0 * std::exp(-rho.grid.r[i] * rho.grid.r[i]);
    const auto phi = poisson_radial(rho, 1.0);
    double rel_err = 0;
    for (int i = 0; i < rho.grid.size(); ++i) {
        const double r = rho.grid.r[i];
        const double exact = std::erf(r) / r;
        rel_err = std::max(rel_err, std::abs(phi.v[i] - exact) / exact);
    }
    bool ok = check(rel_err <= 1e-6,
                    "radial potential vs erf(r)/r: max relative error " +
                        num(rel_err) + " <= 1e-6");
    const double origin_err = std::abs(poisson_radial_origin(rho, 1.0) -
                                       2.0 / std::sqrt(constants::pi));
    ok &= check(origin_err <= 1e-6,
                "origin value error " + num(origin_err) + " <= 1e-6");

    const auto g = CartesianGrid::cubic(64, 9.0);
    RealField3 density(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k)
                density(i, j, k) = rho0 * std::exp(-g.point(i, j, k).norm2());
    const auto cart = poisson_cartesian(density, 1.0);
    const double h_rad = 12.0 / double(rho.grid.size());
    auto phi_radial_at = [&](double r) {
        const double t = r / h_rad;
        if (t <= 1.0) return phi.v[0];
        const int i = std::min(static_cast<int>(t) - 1, rho.grid.size() - 2);
        const double w = t - double(i + 1);
        return phi.v[i] * (1.0 - w) + phi.v[i + 1] * w;
    };
    double cart_err = 0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k) {
                const Vec3 x = g.point(i, j, k);
                if (std::abs(x.x) > 4.5 || std::abs(x.y) > 4.5 ||
                    std::abs(x.z) > 4.5)
                    continue;
                const double r = x.norm();
                if (r < h_rad) continue;
                const double ref = phi_radial_at(r);
                cart_err = std::max(
                    cart_err, std::abs(cart.phi(i, j, k) - ref) / ref);
            }
    ok &= check(cart.support_ok, "density support inside the guaranteed box");
    ok &= check(cart_err <= 1e-4,
                "cartesian vs radial potential: max relative error " +
                    num(cart_err) + " <= 1e-4");
    return ok;
}

// ---- 9: frequency pairing and the constant energy offset ---------------------

bool crit9() {
    EigenConfig cfg;
    cfg.kappa = 0.05;
    cfg.grid_n = 40000;
    cfg.r_max = 200;
    std::vector<EigenSolution> sols;
    sols.push_back(solve_ground(cfg));
    sols.push_back(solve_excited(cfg, 2));
    sols.push_back(solve_excited(cfg, 3));
    bool ok = true;
    for (std::size_t i = 0; i < sols.size(); ++i) {
        ok &= check(sols[i].converged,
                    "level " + std::to_string(i + 1) + " converged (omega " +
                        num(sols[i].omega) + ")");
        const double off = std::abs(sols[i].energy - sols[i].omega -
                                    0.5 * cfg.kappa * cfg.kappa);
        std::cout << "  level " << (i + 1)
                  << ": E0 - omega - kappa^2/2 = " << num(off) << "\n";
    }
    const double dev = planck_einstein_check(sols, 1.0, 1.0, 1.0 / cfg.kappa);
    ok &= check(dev <= 1e-6,
                "max deviation over all pairs and offsets " + num(dev) +
                    " <= 1e-6");
    return ok;
}

// ---- 10: proton smearing deviation scales as b^2 ------------------------------

bool crit10() {
    auto run = [](double b) {
        TwoParticleConfig cfg;
        cfg.b = b;
        cfg.kappa_e = 0.1;
        cfg.kappa_p = 1.0;
        cfg.grid_n_e = 20000;
        cfg.r_max_e = 100;
        cfg.grid_n_p = 1200;
        cfg.r_max_p = 12;
        return two_particle_scf(cfg);
    };
    const auto r2 = run(0.02);
    const auto r1 = run(0.01);
    std::cout << "  D_prot(b = 0.02) = " << num(r2.D_prot)
              << " (direct " << num(r2.D_prot_direct) << ")\n";
    std::cout << "  D_prot(b = 0.01) = " << num(r1.D_prot)
              << " (direct " << num(r1.D_prot_direct) << ")\n";
    const double ratio = r2.D_prot / r1.D_prot;
    const double ratio_direct = r2.D_prot_direct / r1.D_prot_direct;
    bool ok = check(ratio >= 3.0 && ratio <= 5.0,
                    "D_prot(0.02) / D_prot(0.01) = " + num(ratio) +
                        " in [3, 5]");
    ok &= check(ratio_direct >= 3.0 && ratio_direct <= 5.0,
                "direct-integral ratio " + num(ratio_direct) + " in [3, 5]");
    return ok;
}

// ---- 11: numeric nonlinearity inversion + equilibrium residual ---------------

bool crit11() {
    bool ok = true;
    for (auto kind : {FormFactorKind::PowerLaw, FormFactorKind::Exponential,
                      FormFactorKind::LogGaussian}) {
        FormFactorSpec spec;
        spec.kind = kind;
        spec.a = 1.0;
        spec.extension = kind == FormFactorKind::Exponential
                             ? Extension::ConstantAbovePeak
                             : Extension::ClosedFormEverywhere;
        const auto numeric = build_Gprime_numeric(spec, 20000, 1e-8);
        const double s_peak = form_factor_peak(spec);
        double worst = 0;
        for (int i = 0; i < 1000; ++i) {
            const double s = s_peak * std::exp(-16.0 * double(i) / 1000.0);
            worst = std::max(worst, std::abs(numeric(s) - eval_Gprime(spec, s)));
        }
        ok &= check(worst <= 1e-6,
                    std::string(to_string(kind)) +
                        ": numeric inversion vs closed form, max |diff| " +
                        num(worst) + " <= 1e-6");
    }

    for (auto kind : {FormFactorKind::PowerLaw, FormFactorKind::Exponential,
                      FormFactorKind::LogGaussian}) {
        for (double a : {0.5, 1.0, 2.0}) {
            FormFactorSpec spec;
            spec.kind = kind;
            spec.a = a;
            spec.extension = kind == FormFactorKind::Exponential
                                 ? Extension::ConstantAbovePeak
                                 : Extension::ClosedFormEverywhere;
            auto psi = [&](double r) { return eval_form_factor(spec, r); };
            const double fh = 1e-4 * a;
            double worst = 0;
            for (double r = 0.02 * a; r < 12.0 * a; r += 0.037 * a) {
                const double p = psi(r);
                const double lap = (psi(r + fh) - 2 * p + psi(r - fh)) /
                                       (fh * fh) +
                                   (psi(r + fh) - psi(r - fh)) / (fh * r);
                const double res = -lap + eval_Gprime(spec, p * p) * p;
                worst = std::max(worst, std::abs(res));
            }
            ok &= check(worst <= 1e-6,
                        std::string(to_string(kind)) + " a = " + num(a) +
                            ": equilibrium residual " + num(worst) +
                            " <= 1e-6");
        }
    }
    return ok;
}

struct Criterion {
    int id;
    const char* label;
    bool (*run)();
};

const Criterion kCriteria[] = {
    {1, "linear spectrum (levels 1..4 within 1e-4 via the runner, seconds)",
     &crit1},
    {2, "ground frequency targets at kappa 0.1 / 0.05 and product closeness",
     &crit2},
    {3, "level-2 shift within a factor-2 band over a kappa sweep", &crit3},
    {4, "resting unit gausson energy 0.5 and gradient integral 1.5", &crit4},
    {5, "accelerating corpuscle residual + dt-halving error ratio", &crit5},
    {6, "quartic well: center-vs-Newton deviation shrinks with a", &crit6},
    {7, "norm/energy conservation over a long static-field run", &crit7},
    {8, "electrostatic solvers vs erf(r)/r and cross-solver agreement",
     &crit8},
    {9, "frequency pairing and constant energy offset across levels", &crit9},
    {10, "proton smearing deviation scales as the mass ratio squared",
     &crit10},
    {11, "numeric nonlinearity inversion and equilibrium residuals", &crit11},
};

}  // namespace

int main(int argc, char** argv) {
    int selected = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            selected = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: acceptance [--criterion N]\n";
            return 2;
        }
    }
    if (selected < 0 || selected > 11) {
        std::cerr << "criterion must be 1..11\n";
        return 2;
    }

    int failures = 0;
    for (const auto& c : kCriteria) {
        if (selected != 0 && c.id != selected) continue;
        std::cout << "criterion " << c.id << ": " << c.label << "\n";
        bool ok = false;
        try {
            ok = c.run();
        } catch (const std::exception& e) {
            std::cout << "  exception: " << e.what() << "\n";
        }
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << c.id
                  << ": " << c.label << "\n";
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
