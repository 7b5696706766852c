// Experiment runner.
//
// Each subcommand maps a flat KEY = VALUE config onto one library study and
// writes deterministic artifacts into --out: always a summary.json (sorted
// keys, schema_version, every consumed parameter echoed, the relations the
// numbers target in paper_refs), plus per-study CSV/binary outputs.  Values
// come from --config FILE first, then command-line flags override; every
// subcommand rejects unknown keys, so a typo cannot silently change an
// experiment.  No timestamps, fixed iteration orders and FFTW_ESTIMATE
// planning keep reruns byte-identical.
//
// Exit codes: 0 success; 2 invalid configuration (message names the
// offending field); 3 numerical failure (non-convergence, guards).
//
// JSON cannot represent infinities, so the log-cutoff xi = -inf is
// serialized as the string "-inf" in results (params echo key strings
// verbatim anyway).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wavecorpuscle/config.hpp"
#include "wavecorpuscle/constants.hpp"
#include "wavecorpuscle/dynamics.hpp"
#include "wavecorpuscle/eigensolver.hpp"
#include "wavecorpuscle/errors.hpp"
#include "wavecorpuscle/io.hpp"
#include "wavecorpuscle/nonlin.hpp"
#include "wavecorpuscle/poisson.hpp"
#include "wavecorpuscle/soliton.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace wc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

FormFactorKind kind_from_string(const std::string& s) {
    if (s == "PowerLaw") return FormFactorKind::PowerLaw;
    if (s == "Exponential") return FormFactorKind::Exponential;
    if (s == "LogGaussian") return FormFactorKind::LogGaussian;
    throw ConfigError("kind",
                      "unknown form-factor kind '" + s +
                          "' (PowerLaw | Exponential | LogGaussian)");
}

// The closed forms stay valid for every s >= 0 except for the exponential
// family, which only supports the constant continuation above its peak.
Extension default_extension(FormFactorKind kind) {
    return kind == FormFactorKind::Exponential ? Extension::ConstantAbovePeak
                                               : Extension::ClosedFormEverywhere;
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& raw) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(raw);
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            while (pos < item.size() && std::isspace((unsigned char)item[pos]))
                ++pos;
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(key, "not a number in list: '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError(key, "empty list");
    return out;
}

json json_double_or_string(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

struct RunContext {
    fs::path out_dir;
    long seed = 0;
    long threads = 1;
};

RunContext common_context(const Config& cfg) {
    RunContext rc;
    rc.out_dir = cfg.get_string("out", ".");
    rc.seed = cfg.get_int("seed", 0);
    rc.threads = cfg.get_int("threads", 1);
    if (rc.threads < 1) throw ConfigError("threads", "need at least 1");
    std::error_code ec;
    fs::create_directories(rc.out_dir, ec);
    if (ec)
        throw ConfigError("out", "cannot create directory " +
                                     rc.out_dir.string() + ": " + ec.message());
    return rc;
}

void write_summary(const RunContext& rc, const std::string& sub,
                   const Config& cfg, std::vector<std::string> artifacts,
                   const json& results, const json& refs) {
    json j;
    j["schema_version"] = 1;
    j["subcommand"] = sub;
    json params = json::object();
    for (const auto& [k, v] : cfg.effective_values()) params[k] = v;
    j["params"] = params;
    std::sort(artifacts.begin(), artifacts.end());
    j["artifacts"] = artifacts;
    j["results"] = results;
    j["paper_refs"] = refs;
    const fs::path path = rc.out_dir / "summary.json";
    std::ofstream out(path);
    out << j.dump(2) << '\n';
    if (!out) throw ConfigError("out", "write failed: " + path.string());
}

void write_radial_csv(const fs::path& path, const RadialGrid& grid,
                      const std::vector<double>& Psi) {
    std::vector<std::vector<double>> rows;
    rows.reserve(grid.size());
    for (int i = 0; i < grid.size(); ++i)
        rows.push_back({grid.r[i], Psi[i]});
    write_csv(path, {"r", "Psi"}, rows);
}

// Shared eigensolver parameter block.  The box default scales with the
// state (r_max >= 10/kappa) and the node default keeps h = 0.0125.
EigenConfig eigen_config_common(const Config& cfg, double default_kappa) {
    EigenConfig e;
    e.kappa = cfg.get_double("kappa", default_kappa);
    double r_dflt =
        e.kappa > 0 ? std::max(100.0, 10.0 / e.kappa) : 100.0;
    e.r_max = cfg.get_double("r_max", r_dflt);
    e.grid_n = static_cast<int>(
        cfg.get_int("grid_n", std::lround(80.0 * e.r_max)));
    e.xi = cfg.get_double("xi", -kInf);
    e.tol_residual = cfg.get_double("tol_residual", e.tol_residual);
    e.tol_omega = cfg.get_double("tol_omega", e.tol_omega);
    e.max_iter = static_cast<int>(cfg.get_int("max_iter", e.max_iter));
    e.mixing = cfg.get_double("mixing", e.mixing);
    return e;
}

json eigen_level_json(int n, const EigenSolution& sol) {
    json j;
    j["n"] = n;
    j["kappa"] = sol.kappa;
    j["xi"] = json_double_or_string(sol.xi);
    j["omega"] = sol.omega;
    j["E"] = sol.energy;
    j["residual"] = sol.residual;
    j["node_count"] = sol.node_count;
    j["decay_rate"] = sol.decay_rate;
    j["omega0"] = -1.0 / (2.0 * n * n);
    return j;
}

ChargeState sampled_corpuscle(const CartesianGrid& g, const FormFactorSpec& ff,
                              double m, double q, double chi, Vec3 r0,
                              Vec3 v0) {
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
                const double amp = eval_form_factor(ff, (x - r0).norm());
                const double th = m * v0.dot(x - r0) / chi;
                c.psi(i, j, k) =
                    amp * std::complex<double>(std::cos(th), std::sin(th));
            }
    return c;
}

ExternalField linear_field(Vec3 E0) {
    ExternalField ext;
    ext.phi = [E0](double, const Vec3& x) { return -E0.dot(x); };
    ext.E = [E0](double, const Vec3&) { return E0; };
    return ext;
}

// ---- ground -------------------------------------------------------------------

void cmd_ground(const Config& cfg) {
    RunContext rc = common_context(cfg);
    EigenConfig e = eigen_config_common(cfg, 0.1);
    e.kind = kind_from_string(cfg.get_string("kind", "LogGaussian"));
    const bool analytic = cfg.get_bool("analytic", false);
    if (analytic && e.kind != FormFactorKind::LogGaussian)
        throw ConfigError("analytic",
                          "the analytic product family exists only for the "
                          "LogGaussian law");

    EigenSolution sol = analytic ? analytic_ground_state(e) : solve_ground(e);
    if (!sol.converged)
        throw NumericalError(
            "ground solve did not converge within max_iter (residual " +
            format_double(sol.residual) + ")");

    write_radial_csv(rc.out_dir / "state.csv", sol.grid, sol.Psi);

    json results;
    results["omega"] = sol.omega;
    results["energy"] = sol.energy;
    results["residual"] = sol.residual;
    results["node_count"] = sol.node_count;
    results["decay_rate"] = sol.decay_rate;
    results["omega_linear"] = sol.omega_linear;
    results["converged"] = sol.converged;
    results["eom_deviation"] = eom_deviation(sol, e);
    if (e.kappa > 0 && e.kind == FormFactorKind::LogGaussian) {
        const auto pc = product_state_constants(e.kappa);
        results["analytic_omega"] = pc.omega;
        results["ln_C_sq"] = pc.ln_C_sq;
        results["omega_minus_analytic"] = sol.omega - pc.omega;
    }
    write_summary(rc, "ground", cfg, {"state.csv"}, results,
                  json::array({"omega = -1/2 - (kappa^2/2) ln C^2",
                               "Psi = kappa^{3/2} C_g C e^{-kappa^2 r^2/2 - r}",
                               "E = omega + kappa^2/2"}));
}

// ---- spectrum -----------------------------------------------------------------

void cmd_spectrum(const Config& cfg) {
    RunContext rc = common_context(cfg);
    EigenConfig e = eigen_config_common(cfg, 0.05);
    const long levels = cfg.get_int("levels", 3);
    if (levels < 1 || levels > 5)
        throw ConfigError("levels", "need 1 <= levels <= 5");

    std::vector<EigenSolution> sols;
    for (int n = 1; n <= levels; ++n) {
        EigenSolution s = n == 1 ? solve_ground(e) : solve_excited(e, n);
        if (!s.converged)
            throw NumericalError("level " + std::to_string(n) +
                                 " did not converge (residual " +
                                 format_double(s.residual) + ")");
        sols.push_back(std::move(s));
    }

    std::vector<std::string> artifacts;
    json jlevels = json::array();
    std::vector<std::vector<double>> rows;
    for (int n = 1; n <= levels; ++n) {
        const EigenSolution& s = sols[n - 1];
        jlevels.push_back(eigen_level_json(n, s));
        rows.push_back({double(n), s.omega, s.energy, s.residual,
                        double(s.node_count), s.decay_rate,
                        -1.0 / (2.0 * n * n)});
        std::string name = "level_" + std::to_string(n) + ".csv";
        write_radial_csv(rc.out_dir / name, s.grid, s.Psi);
        artifacts.push_back(name);
    }
    write_csv(rc.out_dir / "levels.csv",
              {"n", "omega", "E", "residual", "node_count", "decay_rate",
               "omega0"},
              rows);
    artifacts.push_back("levels.csv");

    json results;
    results["levels"] = jlevels;
    if (e.kappa > 0)
        results["pairing_deviation"] =
            planck_einstein_check(sols, 1.0, 1.0, 1.0 / e.kappa);
    write_summary(rc, "spectrum", cfg, artifacts, results,
                  json::array({"omega0_n = -1/(2 n^2)",
                               "chi (omega_i - omega_j) = E0_i - E0_j",
                               "E0 - chi omega = chi^2/(2 a^2 m)"}));
}

// ---- gap-scan -----------------------------------------------------------------

void cmd_gap_scan(const Config& cfg) {
    RunContext rc = common_context(cfg);
    EigenConfig e = eigen_config_common(cfg, 0.05);
    const long n_gap = cfg.get_int("n_gap", 2);
    const double delta = cfg.get_double("delta", 0.02);
    const long n_omega = cfg.get_int("n_omega", 5);
    const double c4 = cfg.get_double("c4", 1.0);
    const long n_starts = cfg.get_int("n_starts", 5);

    const auto pts = gap_scan(e, static_cast<int>(n_gap), delta,
                              static_cast<int>(n_omega), c4,
                              static_cast<int>(n_starts));

    std::vector<std::vector<double>> rows;
    json jpts = json::array();
    double min_floor = kInf;
    for (const auto& p : pts) {
        rows.push_back({p.omega, p.floor_residual});
        jpts.push_back({{"omega", p.omega}, {"floor_residual", p.floor_residual}});
        min_floor = std::min(min_floor, p.floor_residual);
    }
    write_csv(rc.out_dir / "scan.csv", {"omega", "floor_residual"}, rows);

    json results;
    results["points"] = jpts;
    results["min_floor_residual"] = min_floor;
    write_summary(
        rc, "gap-scan", cfg, {"scan.csv"}, results,
        json::array(
            {"no radial eigenvalues inside (omega0_n + delta, omega0_{n+1} - "
             "delta) for delta >= C4 kappa^2 (1 + |ln kappa|)"}));
}

// ---- dynamics -----------------------------------------------------------------

void cmd_dynamics(const Config& cfg) {
    RunContext rc = common_context(cfg);
    FormFactorSpec ff;
    ff.kind = kind_from_string(cfg.get_string("kind", "LogGaussian"));
    ff.a = cfg.get_double("a", 1.0);
    ff.xi = cfg.get_double("xi", -kInf);
    ff.extension = default_extension(ff.kind);
    const double m = cfg.get_double("m", 1.0);
    const double q = cfg.get_double("q", 1.0);
    const double chi = cfg.get_double("chi", 1.0);
    const long n = cfg.get_int("n", 32);
    const double box = cfg.get_double("box", 8.0);
    const double t_end = cfg.get_double("t_end", 0.25);
    const double dt = cfg.get_double("dt", 5e-3);
    const long stride = cfg.get_int("output_stride", 5);
    const long snap_stride = cfg.get_int("snapshot_stride", 0);
    const Vec3 r0 = cfg.get_vec3("r0", {0, 0, 0});
    const Vec3 v0 = cfg.get_vec3("v0", {0, 0, 0});
    const std::string ext_kind = cfg.get_string("ext", "none");
    const Vec3 E0 = cfg.get_vec3("e0", {0.05, 0, 0});

    if (!(ff.a > 0)) throw ConfigError("a", "size parameter must be positive");
    if (!(m > 0)) throw ConfigError("m", "mass must be positive");
    if (!(chi > 0)) throw ConfigError("chi", "chi must be positive");
    if (!(t_end > 0)) throw ConfigError("t_end", "horizon must be positive");
    if (!(dt > 0)) throw ConfigError("dt", "time step must be positive");
    if (stride < 1) throw ConfigError("output_stride", "need at least 1");
    if (snap_stride < 0)
        throw ConfigError("snapshot_stride", "need >= 0 (0 disables)");

    const auto g = CartesianGrid::cubic(static_cast<int>(n), box);
    SystemState sys;
    sys.charges.push_back(sampled_corpuscle(g, ff, m, q, chi, r0, v0));
    if (ext_kind == "linear")
        sys.external = linear_field(E0);
    else if (ext_kind != "none")
        throw ConfigError("ext", "unknown external field '" + ext_kind +
                                     "' (none | linear)");

    std::vector<std::vector<double>> rows;
    std::vector<std::string> artifacts{"trajectory.csv"};
    long event = 0;
    auto obs = [&](const SystemState& s) {
        const ChargeState& c = s.charges[0];
        const Vec3 ctr = charge_center(c);
        const Kinematics kin = velocity_and_momentum(c);
        const auto en = system_energy(s);
        rows.push_back({s.t, ctr.x, ctr.y, ctr.z, kin.v.x, kin.v.y, kin.v.z,
                        kin.P.x, kin.P.y, kin.P.z, norm_sq(c.psi), en.total});
        if (snap_stride > 0 && event % snap_stride == 0) {
            char name[32];
            std::snprintf(name, sizeof name, "psi_%06ld.wcf", event);
            write_snapshot(rc.out_dir / name, c.psi);
            artifacts.emplace_back(name);
        }
        ++event;
    };

    EvolveOptions opts;
    opts.T = t_end;
    opts.dt = dt;
    opts.output_stride = static_cast<int>(stride);
    evolve(sys, opts, obs);

    write_csv(rc.out_dir / "trajectory.csv",
              {"t", "rx", "ry", "rz", "vx", "vy", "vz", "Px", "Py", "Pz",
               "norm", "energy"},
              rows);

    json results;
    results["observations"] = rows.size();
    results["norm_initial"] = rows.front()[10];
    results["norm_final"] = rows.back()[10];
    results["norm_drift"] = std::abs(rows.back()[10] - rows.front()[10]);
    results["energy_initial"] = rows.front()[11];
    results["energy_final"] = rows.back()[11];
    results["energy_drift_rel"] =
        std::abs(rows.back()[11] - rows.front()[11]) /
        std::max(1e-12, std::abs(rows.front()[11]));
    results["final_center"] =
        json::array({rows.back()[1], rows.back()[2], rows.back()[3]});
    write_summary(
        rc, "dynamics", cfg, artifacts, results,
        json::array({"i chi d_t psi = -(chi^2/2m) lap psi + q (phi_other + "
                     "phi_ex) psi + (chi^2/2m) G'(|psi|^2) psi",
                     "norm and energy conserved for static external fields",
                     "d<x>/dt = v,  m dv/dt = q E (center motion)"}));
}

// ---- soliton-verify -----------------------------------------------------------

void cmd_soliton_verify(const Config& cfg) {
    RunContext rc = common_context(cfg);
    WaveCorpuscleConfig wcfg;
    wcfg.ff.kind = kind_from_string(cfg.get_string("kind", "LogGaussian"));
    wcfg.ff.a = cfg.get_double("a", 1.0);
    wcfg.ff.extension = default_extension(wcfg.ff.kind);
    wcfg.m = cfg.get_double("m", 1.0);
    wcfg.q = cfg.get_double("q", 1.0);
    wcfg.chi = cfg.get_double("chi", 1.0);
    wcfg.r0 = cfg.get_vec3("r0", {0, 0, 0});
    wcfg.v0 = cfg.get_vec3("v0", {0.1, -0.05, 0});
    wcfg.T = cfg.get_double("t_end", 1.0);
    wcfg.dt = cfg.get_double("mesh_dt", 1e-2);
    const long n = cfg.get_int("n", 64);
    const double box = cfg.get_double("box", 8.0);
    const double dt = cfg.get_double("dt", 2e-3);
    const Vec3 E0 = cfg.get_vec3("e0", {0.05, 0.02, 0});
    const long n_samples = cfg.get_int("n_samples", 11);
    const bool compare = cfg.get_bool("compare", false);

    if (!(wcfg.ff.a > 0)) throw ConfigError("a", "size parameter must be positive");
    if (n_samples < 2) throw ConfigError("n_samples", "need at least 2");
    if (!(wcfg.T > 0)) throw ConfigError("t_end", "horizon must be positive");
    if (!(dt > 0)) throw ConfigError("dt", "time step must be positive");

    const bool free_motion = E0.norm() == 0.0;
    const auto wc = build_wave_corpuscle(
        wcfg, free_motion ? ExternalField{} : linear_field(E0));
    const auto g = CartesianGrid::cubic(static_cast<int>(n), box);

    std::vector<std::vector<double>> rows;
    double max_res = 0, max_cerr = 0;
    for (long k = 0; k < n_samples; ++k) {
        const double t = wcfg.T * double(k) / double(n_samples - 1);
        const double res = nls_residual(wc, t, g);
        ChargeState cs;
        cs.m = wcfg.m;
        cs.q = wcfg.q;
        cs.chi = wcfg.chi;
        cs.ff = wcfg.ff;
        cs.psi = wc.sample(t, g);
        const double cerr = (charge_center(cs) - wc.r(t)).norm();
        rows.push_back({t, res, cerr});
        max_res = std::max(max_res, res);
        max_cerr = std::max(max_cerr, cerr);
    }
    write_csv(rc.out_dir / "residuals.csv",
              {"t", "residual_L2", "center_error"}, rows);

    json results;
    results["max_residual_L2"] = max_res;
    results["max_center_error"] = max_cerr;
    if (compare) {
        EvolveOptions opts;
        opts.T = wcfg.T;
        opts.dt = dt;
        opts.output_stride =
            std::max(1, static_cast<int>(std::lround(wcfg.T / dt)) / 10);
        const auto cmp = oracle_compare(wc, g, opts);
        results["sup_l2_error"] = cmp.sup_l2_error;
        results["sup_center_error"] = cmp.sup_center_error;
    }
    write_summary(
        rc, "soliton-verify", cfg, {"residuals.csv"}, results,
        json::array({"psi = e^{i S/chi} psi_a(|x - r(t)|) solves the coupled "
                     "equation exactly for phi_ex affine in x",
                     "m r'' = q E_ex(t, r)",
                     "s_p' = m |v|^2/2 - q phi_ex(t, r)"}));
}

// ---- newton-limit -------------------------------------------------------------

void cmd_newton_limit(const Config& cfg) {
    RunContext rc = common_context(cfg);
    NewtonLimitConfig nl;
    nl.kind = kind_from_string(cfg.get_string("kind", "LogGaussian"));
    nl.m = cfg.get_double("m", 1.0);
    nl.q = cfg.get_double("q", 1.0);
    nl.chi = cfg.get_double("chi", 1.0);
    nl.r0 = cfg.get_vec3("r0", {1, 0, 0});
    nl.v0 = cfg.get_vec3("v0", {0, 0.2, 0});
    nl.T = cfg.get_double("t_end", 0.5);
    nl.dt = cfg.get_double("dt", 2e-3);
    nl.output_stride = static_cast<int>(cfg.get_int("output_stride", 10));
    const double c4 = cfg.get_double("c4", 0.02);
    const auto as = parse_double_list("case_a", cfg.get_string("case_a", "0.4,0.2"));
    const auto Ls = parse_double_list("case_l", cfg.get_string("case_l", "6,6"));
    const auto ns = parse_double_list("case_n", cfg.get_string("case_n", "32,32"));
    if (Ls.size() != as.size() || ns.size() != as.size())
        throw ConfigError("case_l", "case_a, case_l, case_n need equal lengths");
    for (std::size_t i = 0; i < as.size(); ++i)
        nl.cases.push_back({as[i], Ls[i], static_cast<int>(ns[i])});

    // Quartic confining well: phi = c4 |x|^4, E = -grad phi = -4 c4 |x|^2 x.
    ExternalField ext;
    ext.phi = [c4](double, const Vec3& x) {
        const double r2 = x.norm2();
        return c4 * r2 * r2;
    };
    ext.E = [c4](double, const Vec3& x) { return x * (-4.0 * c4 * x.norm2()); };

    const auto study = newton_limit_study(nl, ext);

    std::vector<std::vector<double>> rows;
    json jrows = json::array();
    bool monotone = true;
    for (std::size_t i = 0; i < study.size(); ++i) {
        const auto& row = study[i];
        rows.push_back({row.a, row.L, ns[i], row.sup_center_dev, row.max_eps1,
                        row.norm_drift, row.edge_mass});
        jrows.push_back({{"a", row.a},
                         {"L", row.L},
                         {"n", static_cast<long>(ns[i])},
                         {"sup_center_dev", row.sup_center_dev},
                         {"max_eps1", row.max_eps1},
                         {"norm_drift", row.norm_drift},
                         {"edge_mass", row.edge_mass}});
        if (i > 0 && row.sup_center_dev >= study[i - 1].sup_center_dev)
            monotone = false;
    }
    write_csv(rc.out_dir / "newton_limit.csv",
              {"a", "L", "n", "sup_center_dev", "max_eps1", "norm_drift",
               "edge_mass"},
              rows);

    json results;
    results["cases"] = jrows;
    results["monotone_center_dev"] = monotone;
    write_summary(rc, "newton-limit", cfg, {"newton_limit.csv"}, results,
                  json::array({"center(t) -> Newton trajectory as a -> 0",
                               "eps1 = |int (E(x) - E(center)) |psi|^2 dx|"}));
}

// ---- two-particle -------------------------------------------------------------

void cmd_two_particle(const Config& cfg) {
    RunContext rc = common_context(cfg);
    TwoParticleConfig tp;
    tp.b = cfg.get_double("b", tp.b);
    tp.kappa_e = cfg.get_double("kappa_e", tp.kappa_e);
    tp.kappa_p = cfg.get_double("kappa_p", tp.kappa_p);
    tp.xi = cfg.get_double("xi", tp.xi);
    tp.grid_n_e = static_cast<int>(cfg.get_int("grid_n_e", tp.grid_n_e));
    tp.r_max_e = cfg.get_double("r_max_e", tp.r_max_e);
    tp.grid_n_p = static_cast<int>(cfg.get_int("grid_n_p", tp.grid_n_p));
    tp.r_max_p = cfg.get_double("r_max_p", tp.r_max_p);
    tp.tol = cfg.get_double("tol", tp.tol);
    tp.max_outer = static_cast<int>(cfg.get_int("max_outer", tp.max_outer));
    tp.mixing = cfg.get_double("mixing", tp.mixing);

    const auto res = two_particle_scf(tp);

    write_radial_csv(rc.out_dir / "electron.csv", res.electron.grid,
                     res.electron.Psi);
    write_radial_csv(rc.out_dir / "proton.csv", res.proton.grid,
                     res.proton.Psi);

    auto particle_json = [](const EigenSolution& s) {
        json j;
        j["omega"] = s.omega;
        j["energy"] = s.energy;
        j["residual"] = s.residual;
        j["node_count"] = s.node_count;
        return j;
    };
    json results;
    results["electron"] = particle_json(res.electron);
    results["proton"] = particle_json(res.proton);
    results["D_prot"] = res.D_prot;
    results["D_prot_direct"] = res.D_prot_direct;
    results["outer_iterations"] = res.outer_iterations;
    write_summary(
        rc, "two-particle", cfg, {"electron.csv", "proton.csv"}, results,
        json::array({"V1(y) = -(1/b) phi2(y/b),  V2(z) = -b phi1(b z)",
                     "D_prot = -int [(1/b) phi2(y/b) - 1/y] |Psi1|^2 dy = "
                     "O(b^2)"}));
}

// ---- nonlin-table -------------------------------------------------------------

void cmd_nonlin_table(const Config& cfg) {
    RunContext rc = common_context(cfg);
    FormFactorSpec spec;
    spec.kind = kind_from_string(cfg.get_string("kind", "LogGaussian"));
    spec.a = cfg.get_double("a", 1.0);
    spec.xi = cfg.get_double("xi", -kInf);
    const std::string ext = cfg.get_string("extension", "constant");
    const double s_min_rel = cfg.get_double("s_min_rel", 1e-8);
    const long n_rows = cfg.get_int("n_rows", 200);
    const long n_numeric = cfg.get_int("n_numeric", 20000);

    if (!(spec.a > 0))
        throw ConfigError("a", "size parameter a must be positive");
    if (ext == "constant")
        spec.extension = Extension::ConstantAbovePeak;
    else if (ext == "closed_form")
        spec.extension = Extension::ClosedFormEverywhere;
    else
        throw ConfigError("extension",
                          "unknown extension '" + ext +
                              "' (constant | closed_form)");
    if (n_rows < 2) throw ConfigError("n_rows", "need at least 2");
    if (!(s_min_rel > 0) || s_min_rel >= 1)
        throw ConfigError("s_min_rel", "need 0 < s_min_rel < 1");

    const double s_peak = form_factor_peak(spec);
    const double ln_lo = std::log(s_peak * s_min_rel);
    const double ln_hi = std::log(s_peak);
    std::vector<std::vector<double>> rows;
    for (long k = 0; k < n_rows; ++k) {
        const double s =
            std::exp(ln_lo + (ln_hi - ln_lo) * double(k) / double(n_rows - 1));
        rows.push_back({s, eval_Gprime(spec, s), eval_G(spec, s)});
    }
    write_csv(rc.out_dir / "table.csv", {"s", "Gprime", "G"}, rows);

    // Independent cross-check: rebuild G' by numerically inverting the form
    // factor and compare on the tabulated arguments.
    const auto numeric =
        build_Gprime_numeric(spec, static_cast<int>(n_numeric), s_min_rel);
    double worst = 0;
    for (const auto& row : rows)
        worst = std::max(worst, std::abs(numeric(row[0]) - row[1]));

    json results;
    results["s_peak"] = s_peak;
    results["rows"] = n_rows;
    results["max_numeric_gprime_deviation"] = worst;
    write_summary(rc, "nonlin-table", cfg, {"table.csv"}, results,
                  json::array({"-lap psi_a + G_a'(psi_a^2) psi_a = 0",
                               "G_a'(s) = a^{-2} G_1'(a^3 s)",
                               "G(s) = int_0^s G'(u) du"}));
}

// ---- poisson-test -------------------------------------------------------------

void cmd_poisson_test(const Config& cfg) {
    RunContext rc = common_context(cfg);
    const double alpha = cfg.get_double("alpha", 1.0);
    const long radial_n = cfg.get_int("radial_n", 20000);
    const double radial_r_max = cfg.get_double("radial_r_max", 12.0);
    const long cart_n = cfg.get_int("cart_n", 64);
    const double cart_box = cfg.get_double("cart_box", 9.0);
    const long csv_stride = cfg.get_int("csv_stride", 10);

    if (!(alpha > 0)) throw ConfigError("alpha", "need alpha > 0");
    if (radial_n < 16) throw ConfigError("radial_n", "need at least 16 nodes");
    if (!(radial_r_max > 0)) throw ConfigError("radial_r_max", "need > 0");
    if (csv_stride < 1) throw ConfigError("csv_stride", "need at least 1");

    // Radial path vs the closed form for the unit gaussian.
    const double rho0 = std::pow(alpha / constants::pi, 1.5);
    RadialField rho;
    rho.grid = RadialGrid::uniform(static_cast<int>(radial_n), radial_r_max);
    rho.v.resize(rho.grid.size());
    for (int i = 0; i < rho.grid.size(); ++i)
        rho.v[i] = rho0 * std::exp(-alpha * rho.grid.r[i] * rho.grid.r[i]);
    const auto phi = poisson_radial(rho, 1.0);
    const double sqrt_a = std::sqrt(alpha);
    double radial_err = 0;
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < rho.grid.size(); ++i) {
        const double r = rho.grid.r[i];
        const double exact = std::erf(sqrt_a * r) / r;
        radial_err = std::max(radial_err,
                              std::abs(phi.v[i] - exact) / std::abs(exact));
        if (i % csv_stride == 0) rows.push_back({r, phi.v[i], exact});
    }
    write_csv(rc.out_dir / "phi.csv", {"r", "phi", "phi_exact"}, rows);
    const double origin_err = std::abs(poisson_radial_origin(rho, 1.0) -
                                       2.0 * sqrt_a / std::sqrt(constants::pi));

    // Cartesian path vs the radial reference inside the guaranteed half-box.
    const auto g = CartesianGrid::cubic(static_cast<int>(cart_n), cart_box);
    RealField3 density(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k)
                density(i, j, k) =
                    rho0 * std::exp(-alpha * g.point(i, j, k).norm2());
    const auto cart = poisson_cartesian(density, 1.0);

    const double h_rad = radial_r_max / double(rho.grid.size());
    auto phi_radial_at = [&](double r) {
        const double t = r / h_rad;  // nodes at (i+1) h
        if (t <= 1.0) return phi.v[0];
        const int i = std::min(static_cast<int>(t) - 1, rho.grid.size() - 2);
        const double w = t - double(i + 1);
        return phi.v[i] * (1.0 - w) + phi.v[i + 1] * w;
    };
    double cart_err = 0;
    const double half = cart_box / 2.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k) {
                const Vec3 x = g.point(i, j, k);
                if (std::abs(x.x) > half || std::abs(x.y) > half ||
                    std::abs(x.z) > half)
                    continue;
                const double r = x.norm();
                if (r > radial_r_max || r < h_rad) continue;
                const double ref = phi_radial_at(r);
                cart_err = std::max(
                    cart_err, std::abs(cart.phi(i, j, k) - ref) / std::abs(ref));
            }

    json results;
    results["radial_max_rel_error"] = radial_err;
    results["origin_abs_error"] = origin_err;
    results["cartesian_vs_radial_max_rel_error"] = cart_err;
    results["leaked_mass"] = cart.leaked_mass;
    results["support_ok"] = cart.support_ok;
    write_summary(rc, "poisson-test", cfg, {"phi.csv"}, results,
                  json::array({"phi(r) = erf(sqrt(alpha) r)/r for the unit "
                               "gaussian density",
                               "phi -> q/r beyond the density support"}));
}

// ---- wiring -------------------------------------------------------------------

struct KeyDoc {
    const char* key;
    const char* help;
};

struct SubSpec {
    const char* name;
    const char* desc;
    std::vector<KeyDoc> keys;
    void (*run)(const Config&);
};

const std::vector<KeyDoc> kCommonKeys = {
    {"out", "output directory (default .)"},
    {"seed", "random seed echoed into the summary (reserved for sweeps)"},
    {"threads", "worker threads (reserved for sweeps; must be >= 1)"},
};

const std::vector<KeyDoc> kEigenKeys = {
    {"kappa", "inverse size a = 1/kappa; 0 = linear problem"},
    {"xi", "logarithm cutoff (<= 0; -inf = pure log law)"},
    {"grid_n", "radial nodes (default keeps h = 0.0125)"},
    {"r_max", "radial box (default max(100, 10/kappa))"},
    {"tol_residual", "eigen-equation residual target"},
    {"tol_omega", "frequency increment target"},
    {"max_iter", "iteration budget"},
    {"mixing", "imaginary-time step / damping floor"},
};

std::vector<SubSpec> make_subspecs() {
    std::vector<SubSpec> subs;

    SubSpec ground{"ground",
                   "radial nonlinear ground state (CSV profile + summary)",
                   kEigenKeys,
                   &cmd_ground};
    ground.keys.push_back({"kind", "PowerLaw | Exponential | LogGaussian"});
    ground.keys.push_back(
        {"analytic", "true: evaluate the analytic product family instead of "
                     "solving (LogGaussian only)"});
    subs.push_back(std::move(ground));

    SubSpec spectrum{"spectrum",
                     "levels 1..N of the radial problem with pairing checks",
                     kEigenKeys,
                     &cmd_spectrum};
    spectrum.keys.push_back({"levels", "number of levels (1..5)"});
    subs.push_back(std::move(spectrum));

    SubSpec gap{"gap-scan",
                "residual floors across the spectral gap above level n",
                kEigenKeys,
                &cmd_gap_scan};
    gap.keys.push_back({"n_gap", "scan the gap (omega0_n, omega0_{n+1})"});
    gap.keys.push_back({"delta", "margin from the linear levels"});
    gap.keys.push_back({"n_omega", "trial frequencies across the gap"});
    gap.keys.push_back({"c4", "safety constant in the delta gate"});
    gap.keys.push_back({"n_starts", "minimization starts per frequency"});
    subs.push_back(std::move(gap));

    subs.push_back(SubSpec{
        "dynamics",
        "split-step evolution of one charge (trajectory CSV + snapshots)",
        {{"kind", "PowerLaw | Exponential | LogGaussian"},
         {"a", "charge size parameter"},
         {"xi", "logarithm cutoff for the log law"},
         {"m", "mass"},
         {"q", "charge"},
         {"chi", "action scale"},
         {"n", "grid nodes per axis (power of two >= 16)"},
         {"box", "half-width L of the cubic box"},
         {"t_end", "evolution horizon"},
         {"dt", "time step"},
         {"output_stride", "observer cadence in steps"},
         {"snapshot_stride", "field snapshot cadence in observer events (0 = off)"},
         {"r0", "initial center x,y,z"},
         {"v0", "initial velocity x,y,z"},
         {"ext", "external field: none | linear"},
         {"e0", "uniform field vector for ext = linear"}},
        &cmd_dynamics});

    subs.push_back(SubSpec{
        "soliton-verify",
        "exact accelerating-corpuscle residual report (CSV: t, residual, "
        "center error)",
        {{"kind", "PowerLaw | Exponential | LogGaussian"},
         {"a", "charge size parameter"},
         {"m", "mass"},
         {"q", "charge"},
         {"chi", "action scale"},
         {"n", "grid nodes per axis"},
         {"box", "half-width L"},
         {"t_end", "trajectory horizon"},
         {"dt", "evolution step (used with compare = true)"},
         {"mesh_dt", "dense mesh spacing for the center ODE"},
         {"r0", "initial center x,y,z"},
         {"v0", "initial velocity x,y,z"},
         {"e0", "uniform field (0,0,0 = free motion)"},
         {"n_samples", "sample times across [0, t_end]"},
         {"compare", "true: also evolve numerically and report sup errors"}},
        &cmd_soliton_verify});

    subs.push_back(SubSpec{
        "newton-limit",
        "center-vs-Newton deviation for shrinking sizes in a quartic well",
        {{"kind", "PowerLaw | Exponential | LogGaussian"},
         {"m", "mass"},
         {"q", "charge"},
         {"chi", "action scale"},
         {"r0", "initial center x,y,z"},
         {"v0", "initial velocity x,y,z"},
         {"t_end", "horizon"},
         {"dt", "time step"},
         {"output_stride", "deviation sampling cadence in steps"},
         {"c4", "quartic well coefficient: phi = c4 |x|^4"},
         {"case_a", "comma list of sizes"},
         {"case_l", "comma list of box half-widths"},
         {"case_n", "comma list of grid sizes"}},
        &cmd_newton_limit});

    subs.push_back(SubSpec{
        "two-particle",
        "electron/proton self-consistent reduction and smearing deviation",
        {{"b", "mass ratio in (0, 0.1]"},
         {"kappa_e", "electron nonlinearity parameter"},
         {"kappa_p", "proton nonlinearity parameter"},
         {"xi", "logarithm cutoff"},
         {"grid_n_e", "electron radial nodes"},
         {"r_max_e", "electron box"},
         {"grid_n_p", "proton radial nodes"},
         {"r_max_p", "proton box"},
         {"tol", "successive frequency-change cutoff"},
         {"max_outer", "sweep budget"},
         {"mixing", "potential mixing factor"}},
        &cmd_two_particle});

    subs.push_back(SubSpec{
        "nonlin-table",
        "tabulate G', G and cross-check against the numeric inversion",
        {{"kind", "PowerLaw | Exponential | LogGaussian"},
         {"a", "size parameter"},
         {"xi", "logarithm cutoff for the log law"},
         {"extension", "constant | closed_form (above the peak)"},
         {"s_min_rel", "lowest tabulated s relative to the peak"},
         {"n_rows", "table rows (log-spaced in s)"},
         {"n_numeric", "samples for the numeric inversion cross-check"}},
        &cmd_nonlin_table});

    subs.push_back(SubSpec{
        "poisson-test",
        "radial solver vs erf(r)/r and cartesian-vs-radial agreement",
        {{"alpha", "gaussian density exponent"},
         {"radial_n", "radial nodes"},
         {"radial_r_max", "radial box"},
         {"cart_n", "cartesian nodes per axis"},
         {"cart_box", "cartesian half-width"},
         {"csv_stride", "write every k-th radial node to phi.csv"}},
        &cmd_poisson_test});

    for (auto& s : subs)
        s.keys.insert(s.keys.end(), kCommonKeys.begin(), kCommonKeys.end());
    return subs;
}

std::string flag_of(const std::string& key) {
    std::string f = "--" + key;
    std::replace(f.begin(), f.end(), '_', '-');
    return f;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "wave-corpuscle experiment runner: deterministic studies of "
        "equilibrium nonlinearities, coupled charge dynamics, exact "
        "accelerating solutions and the radial nonlinear eigenvalue "
        "problem.  Values: --config file first, flags override; unknown "
        "keys are rejected.  Exit codes: 0 ok, 2 bad configuration, 3 "
        "numerical failure."};
    app.require_subcommand(1);

    const auto subs = make_subspecs();
    struct Bound {
        CLI::Option* opt;
        std::string key;
        std::string* value;
    };
    std::deque<std::string> storage;
    std::vector<std::string> config_paths(subs.size());
    std::vector<std::vector<Bound>> bounds(subs.size());
    std::vector<CLI::App*> apps(subs.size());

    for (std::size_t i = 0; i < subs.size(); ++i) {
        CLI::App* sub = app.add_subcommand(subs[i].name, subs[i].desc);
        sub->add_option("--config", config_paths[i],
                        "flat KEY = VALUE config file (flags override)");
        for (const auto& kd : subs[i].keys) {
            storage.emplace_back();
            CLI::Option* opt =
                sub->add_option(flag_of(kd.key), storage.back(), kd.help);
            bounds[i].push_back({opt, kd.key, &storage.back()});
        }
        apps[i] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // flag/usage problems are config errors
    }

    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (!apps[i]->parsed()) continue;
        try {
            Config cfg = config_paths[i].empty()
                             ? Config{}
                             : Config::parse_file(config_paths[i]);
            for (const auto& b : bounds[i])
                if (b.opt->count() > 0) cfg.set(b.key, *b.value);
            std::set<std::string> allowed;
            for (const auto& kd : subs[i].keys) allowed.insert(kd.key);
            cfg.require_known_keys(allowed);
            subs[i].run(cfg);
        } catch (const ConfigError& e) {
            std::cerr << "configuration error: " << e.what() << "\n";
            return 2;
        } catch (const NumericalError& e) {
            std::cerr << "numerical error: " << e.what() << "\n";
            return 3;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 3;
        }
    }
    return 0;
}
