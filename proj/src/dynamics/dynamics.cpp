#include "wavecorpuscle/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "wavecorpuscle/constants.hpp"
#include "wavecorpuscle/errors.hpp"
#include "wavecorpuscle/fft.hpp"
#include "wavecorpuscle/poisson.hpp"

namespace wc {

namespace {

// G' evaluator with per-charge constants hoisted out of the grid loops.
// Matches eval_Gprime with the logarithm cutoff floored at kXiNumericFloor.
struct FastGprime {
    FormFactorKind kind;
    double inv_a2, a3, xi_eff, speak1, base_Cg2, base_ce2;

    explicit FastGprime(const FormFactorSpec& ff) {
        kind = ff.kind;
        inv_a2 = 1.0 / (ff.a * ff.a);
        a3 = ff.a * ff.a * ff.a;
        xi_eff = std::max(ff.xi, kXiNumericFloor);
        base_Cg2 = constants::C_g() * constants::C_g();
        base_ce2 = constants::c_e() * constants::c_e();
        FormFactorSpec probe = ff;
        probe.xi = -std::numeric_limits<double>::infinity();
        speak1 = form_factor_peak(probe) * a3;
        closed_everywhere = ff.extension == Extension::ClosedFormEverywhere;
    }

    bool closed_everywhere;

    double operator()(double s) const {
        double s1 = a3 * s;
        if (!closed_everywhere && s1 > speak1) s1 = speak1;
        switch (kind) {
            case FormFactorKind::PowerLaw: {
                const double cpw2 = 3.0 / (4.0 * constants::pi);
                const double t = std::pow(s1 / cpw2, 0.4);
                return (3.75 * t - 11.25 * t * t) * inv_a2;
            }
            case FormFactorKind::Exponential: {
                if (s1 == 0) return inv_a2;
                const double Lg = std::log(base_ce2 / s1);
                return (1.0 - 4.0 / Lg - 4.0 / (Lg * Lg) - 8.0 / (Lg * Lg * Lg)) *
                       inv_a2;
            }
            case FormFactorKind::LogGaussian: {
                const double z = s1 / base_Cg2;
                const double lp =
                    std::max(z > 0 ? std::log(z) : -std::numeric_limits<double>::infinity(),
                             xi_eff);
                return (-lp - 3.0) * inv_a2;
            }
        }
        return 0;
    }
};

void validate_system(const SystemState& sys) {
    if (sys.charges.empty())
        throw ConfigError("charges", "system has no charges");
    const auto& g = sys.charges.front().psi.grid;
    for (const auto& c : sys.charges) {
        if (!(c.psi.grid == g))
            throw ConfigError("grid", "all charges must share one grid");
        if (c.psi.v.size() != g.size())
            throw ConfigError("psi", "field/grid size mismatch");
        if (!(c.m > 0) || !(c.chi > 0))
            throw ConfigError("m", "mass and action scale must be positive");
    }
    if (sys.external.B)
        throw ConfigError("b_ex",
                          "magnetic fields act only on the Newton comparator");
}

std::vector<RealField3> coupling_potentials(const SystemState& sys) {
    std::vector<RealField3> phis;
    if (sys.charges.size() < 2) return phis;
    phis.reserve(sys.charges.size());
    for (const auto& c : sys.charges) {
        RealField3 dens(c.psi.grid);
        for (std::size_t i = 0; i < dens.v.size(); ++i)
            dens.v[i] = std::norm(c.psi.v[i]);
        phis.push_back(poisson_cartesian(dens, c.q).phi);
    }
    return phis;
}

void half_phase(SystemState& sys, const std::vector<RealField3>& phis,
                double dt_half, double t_eval) {
    const auto& g = sys.charges.front().psi.grid;
    for (std::size_t l = 0; l < sys.charges.size(); ++l) {
        auto& c = sys.charges[l];
        const FastGprime gp(c.ff);
        const double kin = c.chi * c.chi / (2.0 * c.m);
        const double pref = -dt_half / c.chi;
        std::size_t idx = 0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                for (int k = 0; k < g.n; ++k, ++idx) {
                    double pot = 0;
                    for (std::size_t l2 = 0; l2 < phis.size(); ++l2)
                        if (l2 != l) pot += phis[l2].v[idx];
                    if (sys.external.phi)
                        pot += sys.external.phi(t_eval, g.point(i, j, k));
                    const double s = std::norm(c.psi.v[idx]);
                    const double theta = pref * (c.q * pot + kin * gp(s));
                    c.psi.v[idx] *= std::complex<double>(std::cos(theta),
                                                         std::sin(theta));
                }
    }
}

void kinetic_full(SystemState& sys, double dt) {
    const auto& g = sys.charges.front().psi.grid;
    auto fft = Fft3::get(g.n);
    const auto kf = fft_freqs(g.n, g.L);
    const double inv_n3 = 1.0 / (static_cast<double>(g.n) * g.n * g.n);
    for (auto& c : sys.charges) {
        const double coef = c.chi / (2.0 * c.m) * dt;
        fft->forward(c.psi.v.data());
        std::size_t idx = 0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                for (int k = 0; k < g.n; ++k, ++idx) {
                    const double k2 =
                        kf[i] * kf[i] + kf[j] * kf[j] + kf[k] * kf[k];
                    const double theta = -coef * k2;
                    c.psi.v[idx] *= std::complex<double>(std::cos(theta),
                                                         std::sin(theta)) *
                                    inv_n3;
                }
        fft->backward(c.psi.v.data());
    }
}

}  // namespace

void step(SystemState& sys, double dt) {
    validate_system(sys);
    if (!(dt > 0) || !std::isfinite(dt))
        throw ConfigError("dt", "time step must be positive and finite");

    auto phis = coupling_potentials(sys);
    half_phase(sys, phis, 0.5 * dt, sys.t);
    kinetic_full(sys, dt);
    phis = coupling_potentials(sys);  // refresh from post-kinetic amplitudes
    half_phase(sys, phis, 0.5 * dt, sys.t + dt);
    sys.t += dt;

    for (const auto& c : sys.charges)
        for (const auto& z : c.psi.v)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw NumericalError("non-finite amplitude after step at t = " +
                                     std::to_string(sys.t));
}

void evolve(SystemState& sys, const EvolveOptions& opts, const Observer& obs) {
    if (!(opts.T > 0)) throw ConfigError("t_final", "must be positive");
    if (!(opts.dt > 0)) throw ConfigError("dt", "must be positive");
    if (opts.output_stride < 1)
        throw ConfigError("output_stride", "must be >= 1");
    const double steps_exact = opts.T / opts.dt;
    const long n_steps = std::lround(steps_exact);
    if (n_steps < 1 || std::abs(steps_exact - static_cast<double>(n_steps)) >
                           1e-6 * steps_exact)
        throw ConfigError("dt", "T must be an integer multiple of dt");

    SystemState last_good = sys;
    if (obs) obs(sys);
    for (long s = 1; s <= n_steps; ++s) {
        try {
            step(sys, opts.dt);
        } catch (const NumericalError&) {
            sys = std::move(last_good);  // last observed snapshot
            throw;
        }
        if (s % opts.output_stride == 0 || s == n_steps) {
            if (obs) obs(sys);
            last_good = sys;
        }
    }
}

Vec3 charge_center(const ChargeState& c) {
    const auto& g = c.psi.grid;
    Vec3 num{0, 0, 0};
    double den = 0;
    std::size_t idx = 0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k, ++idx) {
                const double s = std::norm(c.psi.v[idx]);
                num += g.point(i, j, k) * s;
                den += s;
            }
    if (den <= 0) throw NumericalError("charge has zero mass");
    return num / den;
}

Kinematics velocity_and_momentum(const ChargeState& c) {
    const auto grad = spectral_gradient(c.psi);
    const double h3 = c.psi.grid.h * c.psi.grid.h * c.psi.grid.h;
    Vec3 imsum{0, 0, 0};
    for (std::size_t i = 0; i < c.psi.v.size(); ++i) {
        const auto cj = std::conj(c.psi.v[i]);
        imsum.x += (cj * grad[0].v[i]).imag();
        imsum.y += (cj * grad[1].v[i]).imag();
        imsum.z += (cj * grad[2].v[i]).imag();
    }
    Kinematics kin;
    kin.P = c.chi * h3 * imsum;
    const double mass = norm_sq(c.psi);
    if (mass <= 0) throw NumericalError("charge has zero mass");
    kin.v = kin.P / (c.m * mass);
    return kin;
}

EnergyBreakdown system_energy(const SystemState& sys) {
    validate_system(sys);
    const auto& g = sys.charges.front().psi.grid;
    const double h3 = g.h * g.h * g.h;
    const auto phis = coupling_potentials(sys);

    EnergyBreakdown out;
    out.per_charge.resize(sys.charges.size());
    for (std::size_t l = 0; l < sys.charges.size(); ++l) {
        const auto& c = sys.charges[l];
        auto& e = out.per_charge[l];
        const double kin = c.chi * c.chi / (2.0 * c.m);

        e.gradient = kin * gradient_norm_sq(c.psi);

        FormFactorSpec ff = c.ff;
        if (ff.kind == FormFactorKind::LogGaussian)
            ff.xi = std::max(ff.xi, kXiNumericFloor);
        double gsum = 0, ext = 0, coup = 0;
        std::size_t idx = 0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                for (int k = 0; k < g.n; ++k, ++idx) {
                    const double s = std::norm(c.psi.v[idx]);
                    gsum += eval_G(ff, s);
                    if (sys.external.phi)
                        ext += sys.external.phi(sys.t, g.point(i, j, k)) * s;
                    for (std::size_t l2 = 0; l2 < phis.size(); ++l2)
                        if (l2 != l) coup += phis[l2].v[idx] * s;
                }
        e.nonlinear = kin * gsum * h3;
        e.external = c.q * ext * h3;
        e.coupling = c.q * coup * h3;
        e.total = e.gradient + e.nonlinear + e.external + e.coupling;
        out.coupling_half_sum += 0.5 * e.coupling;
        out.total += e.gradient + e.nonlinear + e.external;
    }
    out.total += out.coupling_half_sum;
    return out;
}

CplxField3 nls_rhs(const ChargeState& c, double t, const ExternalField& ext) {
    if (c.psi.v.size() != c.psi.grid.size())
        throw ConfigError("psi", "field/grid size mismatch");
    if (!(c.m > 0) || !(c.chi > 0))
        throw ConfigError("m", "mass and action scale must be positive");

    const auto& g = c.psi.grid;
    const CplxField3 lap = spectral_laplacian(c.psi);
    const FastGprime gp(c.ff);
    const double kin = c.chi * c.chi / (2.0 * c.m);

    CplxField3 out(g);
    std::size_t idx = 0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k, ++idx) {
                double pot = 0;
                if (ext.phi) pot = ext.phi(t, g.point(i, j, k));
                const double s = std::norm(c.psi.v[idx]);
                out.v[idx] = -kin * lap.v[idx] +
                             (c.q * pot + kin * gp(s)) * c.psi.v[idx];
            }
    return out;
}

double continuity_residual(const SystemState& sys, int ell, double dt) {
    validate_system(sys);
    if (ell < 0 || ell >= static_cast<int>(sys.charges.size()))
        throw ConfigError("ell", "charge index out of range");

    SystemState s1 = sys;
    step(s1, dt);
    SystemState s2 = s1;
    step(s2, dt);

    const auto& c1 = s1.charges[ell];
    const auto& g = c1.psi.grid;
    const double coef = c1.chi / c1.m;

    // div J at the midpoint state, J = (chi/m) Im(conj(psi) grad psi)
    const auto grad = spectral_gradient(c1.psi);
    std::array<CplxField3, 3> J{CplxField3(g), CplxField3(g), CplxField3(g)};
    for (int comp = 0; comp < 3; ++comp)
        for (std::size_t i = 0; i < c1.psi.v.size(); ++i)
            J[comp].v[i] = coef * (std::conj(c1.psi.v[i]) * grad[comp].v[i]).imag();

    auto fft = Fft3::get(g.n);
    const auto kf = fft_freqs(g.n, g.L);
    const double inv_n3 = 1.0 / (static_cast<double>(g.n) * g.n * g.n);
    CplxField3 div(g);
    for (int comp = 0; comp < 3; ++comp) {
        fft->forward(J[comp].v.data());
        std::size_t idx = 0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                for (int k = 0; k < g.n; ++k, ++idx) {
                    const double kc = comp == 0 ? kf[i] : comp == 1 ? kf[j] : kf[k];
                    div.v[idx] += std::complex<double>(0, 1) * kc *
                                  J[comp].v[idx] * inv_n3;
                }
    }
    fft->backward(div.v.data());

    const auto& p0 = sys.charges[ell].psi;
    const auto& p2 = s2.charges[ell].psi;
    double sum = 0;
    for (std::size_t i = 0; i < p0.v.size(); ++i) {
        const double ddt =
            (std::norm(p2.v[i]) - std::norm(p0.v[i])) / (2.0 * dt);
        const double res = ddt + div.v[i].real();
        sum += res * res;
    }
    return std::sqrt(sum * g.h * g.h * g.h);
}

double external_field_consistency(const ExternalField& ext,
                                  const std::vector<double>& times,
                                  const std::vector<Vec3>& probes) {
    if (!ext.phi || !ext.E)
        throw ConfigError("external", "need both phi and E to cross-check");
    double worst = 0;
    for (const double t : times)
        for (const Vec3& p : probes) {
            const double h = 1e-4 * (1.0 + p.norm());
            Vec3 grad;
            grad.x = (ext.phi(t, {p.x + h, p.y, p.z}) -
                      ext.phi(t, {p.x - h, p.y, p.z})) / (2 * h);
            grad.y = (ext.phi(t, {p.x, p.y + h, p.z}) -
                      ext.phi(t, {p.x, p.y - h, p.z})) / (2 * h);
            grad.z = (ext.phi(t, {p.x, p.y, p.z + h}) -
                      ext.phi(t, {p.x, p.y, p.z - h})) / (2 * h);
            worst = std::max(worst, (ext.E(t, p) + grad).norm());
        }
    return worst;
}

NewtonTrajectory newton_ode(double m, double q, const ExternalField& ext,
                            const std::vector<PointCharge>& others, Vec3 r0,
                            Vec3 v0, double T, double dt, double c_light,
                            double r_min) {
    if (!(m > 0)) throw ConfigError("m", "mass must be positive");
    if (!(dt > 0) || !(T > 0)) throw ConfigError("dt", "need T, dt > 0");
    const long n_steps = std::lround(T / dt);
    if (n_steps < 1 || std::abs(T / dt - static_cast<double>(n_steps)) >
                           1e-6 * T / dt)
        throw ConfigError("dt", "T must be an integer multiple of dt");

    auto accel = [&](double t, const Vec3& r, const Vec3& v) {
        Vec3 F{0, 0, 0};
        if (ext.E) F += q * ext.E(t, r);
        if (ext.B) F += (q / c_light) * v.cross(ext.B(t, r));
        for (const auto& pc : others) {
            const Vec3 d = r - pc.r;
            const double dist = d.norm();
            if (dist < r_min)
                throw NumericalError("near-collision with a point charge at t=" +
                                     std::to_string(t));
            F += q * pc.q / (dist * dist * dist) * d;
        }
        return F / m;
    };

    NewtonTrajectory traj;
    traj.t.reserve(n_steps + 1);
    traj.r.reserve(n_steps + 1);
    traj.v.reserve(n_steps + 1);
    Vec3 r = r0, v = v0;
    double t = 0;
    traj.t.push_back(t);
    traj.r.push_back(r);
    traj.v.push_back(v);
    for (long s = 0; s < n_steps; ++s) {
        const Vec3 k1r = v, k1v = accel(t, r, v);
        const Vec3 k2r = v + 0.5 * dt * k1v,
                   k2v = accel(t + 0.5 * dt, r + 0.5 * dt * k1r, v + 0.5 * dt * k1v);
        const Vec3 k3r = v + 0.5 * dt * k2v,
                   k3v = accel(t + 0.5 * dt, r + 0.5 * dt * k2r, v + 0.5 * dt * k2v);
        const Vec3 k4r = v + dt * k3v,
                   k4v = accel(t + dt, r + dt * k3r, v + dt * k3v);
        r += dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        t = (s + 1) * dt;
        traj.t.push_back(t);
        traj.r.push_back(r);
        traj.v.push_back(v);
    }
    return traj;
}

std::vector<NewtonLimitRow> newton_limit_study(const NewtonLimitConfig& cfg,
                                               const ExternalField& ext) {
    if (!ext.E)
        throw ConfigError("external", "the point-limit study needs E_ex");
    if (cfg.cases.empty()) throw ConfigError("cases", "no sizes given");

    std::vector<NewtonLimitRow> rows;
    for (const auto& cs : cfg.cases) {
        const auto grid = CartesianGrid::cubic(cs.n, cs.L);
        FormFactorSpec ff;
        ff.kind = cfg.kind;
        ff.a = cs.a;

        ChargeState charge;
        charge.m = cfg.m;
        charge.q = cfg.q;
        charge.chi = cfg.chi;
        charge.ff = ff;
        charge.psi = CplxField3(grid);
        for (int i = 0; i < grid.n; ++i)
            for (int j = 0; j < grid.n; ++j)
                for (int k = 0; k < grid.n; ++k) {
                    const Vec3 x = grid.point(i, j, k);
                    const double amp = eval_form_factor(ff, (x - cfg.r0).norm());
                    const double phase =
                        cfg.m * cfg.v0.dot(x - cfg.r0) / cfg.chi;
                    charge.psi(i, j, k) =
                        amp * std::complex<double>(std::cos(phase),
                                                   std::sin(phase));
                }

        SystemState sys;
        sys.charges.push_back(std::move(charge));
        sys.external = ext;

        const auto newton = newton_ode(cfg.m, cfg.q, ext, {}, cfg.r0, cfg.v0,
                                       cfg.T, cfg.dt / 4.0);

        NewtonLimitRow row;
        row.a = cs.a;
        row.L = cs.L;
        const double norm0 = norm_sq(sys.charges[0].psi);

        EvolveOptions opts;
        opts.T = cfg.T;
        opts.dt = cfg.dt;
        opts.output_stride = cfg.output_stride;
        evolve(sys, opts, [&](const SystemState& s) {
            const auto& c = s.charges[0];
            const Vec3 center = charge_center(c);
            // matching Newton sample: dt_ode = dt/4
            const std::size_t k =
                static_cast<std::size_t>(std::lround(s.t / (cfg.dt / 4.0)));
            const Vec3 rn = newton.r[std::min(k, newton.r.size() - 1)];
            row.sup_center_dev =
                std::max(row.sup_center_dev, (center - rn).norm());

            Vec3 eps{0, 0, 0};
            const Vec3 Ec = ext.E(s.t, center);
            std::size_t idx = 0;
            for (int i = 0; i < grid.n; ++i)
                for (int j = 0; j < grid.n; ++j)
                    for (int kk = 0; kk < grid.n; ++kk, ++idx) {
                        const double sden = std::norm(c.psi.v[idx]);
                        eps += (ext.E(s.t, grid.point(i, j, kk)) - Ec) * sden;
                    }
            const double h3 = grid.h * grid.h * grid.h;
            row.max_eps1 = std::max(row.max_eps1, (eps * h3).norm());
        });

        row.norm_drift = std::abs(norm_sq(sys.charges[0].psi) - norm0);
        double edge = 0;
        std::size_t idx = 0;
        for (int i = 0; i < grid.n; ++i)
            for (int j = 0; j < grid.n; ++j)
                for (int k = 0; k < grid.n; ++k, ++idx) {
                    const Vec3 p = grid.point(i, j, k);
                    if (std::max({std::abs(p.x), std::abs(p.y), std::abs(p.z)}) >
                        0.75 * grid.L)
                        edge += std::norm(sys.charges[0].psi.v[idx]);
                }
        row.edge_mass = edge * grid.h * grid.h * grid.h;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace wc
