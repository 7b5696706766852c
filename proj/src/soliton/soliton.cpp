#include "wavecorpuscle/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wavecorpuscle/errors.hpp"

namespace wc {

namespace {

// Cubic Hermite basis on [0,1] and its derivative (divided by the interval
// width at the call site).
struct Hermite {
    double h00, h10, h01, h11;      // value weights
    double d00, d10, d01, d11;      // derivative weights (per unit tau)
    explicit Hermite(double u) {
        const double u2 = u * u, u3 = u2 * u;
        h00 = 1 - 3 * u2 + 2 * u3;
        h10 = u - 2 * u2 + u3;
        h01 = 3 * u2 - 2 * u3;
        h11 = -u2 + u3;
        d00 = -6 * u + 6 * u2;
        d10 = 1 - 4 * u + 3 * u2;
        d01 = 6 * u - 6 * u2;
        d11 = -2 * u + 3 * u2;
    }
};

Vec3 hermite_vec(const Hermite& w, const Vec3& p0, const Vec3& d0,
                 const Vec3& p1, const Vec3& d1, double dt) {
    return w.h00 * p0 + (dt * w.h10) * d0 + w.h01 * p1 + (dt * w.h11) * d1;
}

double hermite_val(const Hermite& w, double p0, double d0, double p1,
                   double d1, double dt) {
    return w.h00 * p0 + dt * w.h10 * d0 + w.h01 * p1 + dt * w.h11 * d1;
}

// Largest second difference of phi over probe triples, relative to the
// sampled magnitude; > 0 exactly when phi has curvature in x.
double sampled_curvature(const std::function<double(double, const Vec3&)>& phi,
                         double T) {
    const double times[] = {0.0, 0.37 * T, 0.71 * T, T};
    const Vec3 dirs[] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                         {1, 1, 0}, {0, 1, -1}, {1, -1, 1}};
    const Vec3 bases[] = {{0, 0, 0}, {1.3, -0.7, 2.1}, {-2.9, 1.7, -0.4},
                          {3.8, 3.1, -3.5}};
    double curv = 0, scale = 1;
    for (double t : times)
        for (const Vec3& x : bases)
            for (const Vec3& d : dirs) {
                const double fm = phi(t, x - d), f0 = phi(t, x),
                             fp = phi(t, x + d);
                curv = std::max(curv, std::abs(fp - 2 * f0 + fm));
                scale = std::max({scale, std::abs(f0), std::abs(fp)});
            }
    return curv / scale;
}

}  // namespace

WaveCorpuscle build_wave_corpuscle(const WaveCorpuscleConfig& cfg,
                                   const ExternalField& ext) {
    if (!(cfg.m > 0) || !(cfg.chi > 0))
        throw ConfigError("m", "mass and action scale must be positive");
    if (!(cfg.T > 0) || !(cfg.dt > 0))
        throw ConfigError("t_final", "need T, dt > 0");
    const long n_steps = std::lround(cfg.T / cfg.dt);
    if (n_steps < 1 || std::abs(cfg.T / cfg.dt - static_cast<double>(n_steps)) >
                           1e-6 * cfg.T / cfg.dt)
        throw ConfigError("dt", "T must be an integer multiple of dt");
    if (ext.E && !ext.phi)
        throw ConfigError("phi_ex",
                          "E without a potential leaves the phase gauge "
                          "undetermined; provide phi_ex");

    WaveCorpuscle wc;
    wc.cfg_ = cfg;
    wc.ext_ = ext;

    if (ext.phi) {
        const double curv = sampled_curvature(ext.phi, cfg.T);
        if (curv > 1e-10) {
            std::ostringstream msg;
            msg << "phi_ex is not affine in x: sampled second difference "
                << curv << " exceeds 1e-10";
            throw ConfigError("phi_ex", msg.str());
        }
        if (!ext.E) {
            // affine => E is x-independent and exactly a central difference
            auto phi = ext.phi;
            wc.ext_.E = [phi](double t, const Vec3&) {
                return Vec3{-(phi(t, {1, 0, 0}) - phi(t, {-1, 0, 0})) / 2,
                            -(phi(t, {0, 1, 0}) - phi(t, {0, -1, 0})) / 2,
                            -(phi(t, {0, 0, 1}) - phi(t, {0, 0, -1})) / 2};
            };
        }
    }

    // RK4 on the augmented state (r, v, s_p).
    const auto& E = wc.ext_.E;
    const auto& phi = wc.ext_.phi;
    auto acc = [&](double t, const Vec3& r) {
        return E ? (cfg.q / cfg.m) * E(t, r) : Vec3{0, 0, 0};
    };
    auto spdot = [&](double t, const Vec3& r, const Vec3& v) {
        return 0.5 * cfg.m * v.norm2() - (phi ? cfg.q * phi(t, r) : 0.0);
    };

    wc.mesh_dt_ = cfg.dt;
    const std::size_t n = static_cast<std::size_t>(n_steps) + 1;
    wc.r_.reserve(n);
    wc.v_.reserve(n);
    wc.a_.reserve(n);
    wc.sp_.reserve(n);
    wc.spdot_.reserve(n);

    Vec3 r = cfg.r0, v = cfg.v0;
    double sp = 0;
    for (long k = 0;; ++k) {
        const double t = k * cfg.dt;
        wc.r_.push_back(r);
        wc.v_.push_back(v);
        wc.a_.push_back(acc(t, r));
        wc.sp_.push_back(sp);
        wc.spdot_.push_back(spdot(t, r, v));
        if (k == n_steps) break;

        const double h = cfg.dt;
        const Vec3 k1r = v, k1v = acc(t, r);
        const double k1s = spdot(t, r, v);
        const Vec3 k2r = v + 0.5 * h * k1v,
                   k2v = acc(t + 0.5 * h, r + 0.5 * h * k1r);
        const double k2s = spdot(t + 0.5 * h, r + 0.5 * h * k1r, k2r);
        const Vec3 k3r = v + 0.5 * h * k2v,
                   k3v = acc(t + 0.5 * h, r + 0.5 * h * k2r);
        const double k3s = spdot(t + 0.5 * h, r + 0.5 * h * k2r, k3r);
        const Vec3 k4r = v + h * k3v, k4v = acc(t + h, r + h * k3r);
        const double k4s = spdot(t + h, r + h * k3r, k4r);

        r += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        sp += h / 6.0 * (k1s + 2 * k2s + 2 * k3s + k4s);
    }
    return wc;
}

void WaveCorpuscle::locate(double t, int& k, double& tau) const {
    const double T = cfg_.T;
    if (t < -1e-12 || t > T * (1 + 1e-12) + 1e-12)
        throw ConfigError("t", "time outside the built horizon [0, T]");
    t = std::clamp(t, 0.0, T);
    k = std::min(static_cast<int>(t / mesh_dt_),
                 static_cast<int>(r_.size()) - 2);
    tau = (t - k * mesh_dt_) / mesh_dt_;
}

Vec3 WaveCorpuscle::r(double t) const {
    int k;
    double u;
    locate(t, k, u);
    return hermite_vec(Hermite(u), r_[k], v_[k], r_[k + 1], v_[k + 1], mesh_dt_);
}

Vec3 WaveCorpuscle::v(double t) const {
    int k;
    double u;
    locate(t, k, u);
    return hermite_vec(Hermite(u), v_[k], a_[k], v_[k + 1], a_[k + 1], mesh_dt_);
}

Vec3 WaveCorpuscle::accel(double t) const {
    // derivative of the velocity interpolant (exact when v is cubic)
    int k;
    double u;
    locate(t, k, u);
    const Hermite w(u);
    return (w.d00 / mesh_dt_) * v_[k] + w.d10 * a_[k] +
           (w.d01 / mesh_dt_) * v_[k + 1] + w.d11 * a_[k + 1];
}

double WaveCorpuscle::s_p(double t) const {
    int k;
    double u;
    locate(t, k, u);
    return hermite_val(Hermite(u), sp_[k], spdot_[k], sp_[k + 1], spdot_[k + 1],
                       mesh_dt_);
}

double WaveCorpuscle::s_p_dot(double t) const {
    int k;
    double u;
    locate(t, k, u);
    const Hermite w(u);
    return w.d00 / mesh_dt_ * sp_[k] + w.d10 * spdot_[k] +
           w.d01 / mesh_dt_ * sp_[k + 1] + w.d11 * spdot_[k + 1];
}

std::complex<double> WaveCorpuscle::psi(double t, const Vec3& x) const {
    const Vec3 rt = r(t), vt = v(t);
    const Vec3 y = x - rt;
    const double S = cfg_.m * vt.dot(y) + s_p(t);
    const double amp = eval_form_factor(cfg_.ff, y.norm());
    const double th = S / cfg_.chi;
    return amp * std::complex<double>(std::cos(th), std::sin(th));
}

CplxField3 WaveCorpuscle::sample(double t, const CartesianGrid& g) const {
    const Vec3 rt = r(t), vt = v(t);
    const double spt = s_p(t);
    CplxField3 out(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k) {
                const Vec3 y = g.point(i, j, k) - rt;
                const double S = cfg_.m * vt.dot(y) + spt;
                const double amp = eval_form_factor(cfg_.ff, y.norm());
                const double th = S / cfg_.chi;
                out(i, j, k) =
                    amp * std::complex<double>(std::cos(th), std::sin(th));
            }
    return out;
}

double nls_residual(const WaveCorpuscle& wc, double t, const CartesianGrid& g) {
    return nls_residual(wc, t, g, wc.external());
}

double nls_residual(const WaveCorpuscle& wc, double t, const CartesianGrid& g,
                    const ExternalField& eq_ext) {
    const auto& cfg = wc.config();

    ChargeState c;
    c.m = cfg.m;
    c.q = cfg.q;
    c.chi = cfg.chi;
    c.ff = cfg.ff;
    c.psi = wc.sample(t, g);
    const CplxField3 H = nls_rhs(c, t, eq_ext);

    // analytic d_t psi = e^{iS/chi} [ (i/chi)(dS/dt) psi_a - (v . y/|y|) psi_a' ]
    // with dS/dt = m a . y - m |v|^2 + s_p_dot.
    const Vec3 rt = wc.r(t), vt = wc.v(t), at = wc.accel(t);
    const double spd = wc.s_p_dot(t), spt = wc.s_p(t);
    const double v2 = vt.norm2();

    double sum = 0;
    std::size_t idx = 0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k, ++idx) {
                const Vec3 y = g.point(i, j, k) - rt;
                const double ry = y.norm();
                const double amp = eval_form_factor(cfg.ff, ry);
                const double S = cfg.m * vt.dot(y) + spt;
                const std::complex<double> phase(std::cos(S / cfg.chi),
                                                 std::sin(S / cfg.chi));
                const double dS = cfg.m * at.dot(y) - cfg.m * v2 + spd;
                std::complex<double> dtpsi =
                    std::complex<double>(0, dS / cfg.chi) * amp;
                if (ry > 1e-12)
                    dtpsi -= (vt.dot(y) / ry) *
                             eval_form_factor_derivative(cfg.ff, ry);
                dtpsi *= phase;

                const std::complex<double> R =
                    std::complex<double>(0, cfg.chi) * dtpsi - H.v[idx];
                sum += std::norm(R);
            }
    return std::sqrt(sum * g.h * g.h * g.h);
}

OracleCompare oracle_compare(const WaveCorpuscle& wc, const CartesianGrid& g,
                             const EvolveOptions& opts) {
    if (opts.T > wc.config().T * (1 + 1e-12))
        throw ConfigError("t_final", "comparison horizon exceeds the built "
                                     "trajectory");
    SystemState sys;
    ChargeState c;
    c.m = wc.config().m;
    c.q = wc.config().q;
    c.chi = wc.config().chi;
    c.ff = wc.config().ff;
    c.psi = wc.sample(0.0, g);
    sys.charges.push_back(std::move(c));
    sys.external = wc.external();

    OracleCompare out;
    const double h3 = g.h * g.h * g.h;
    evolve(sys, opts, [&](const SystemState& s) {
        const auto exact = wc.sample(s.t, g);
        double d2 = 0;
        for (std::size_t i = 0; i < exact.v.size(); ++i)
            d2 += std::norm(s.charges[0].psi.v[i] - exact.v[i]);
        out.sup_l2_error = std::max(out.sup_l2_error, std::sqrt(d2 * h3));
        out.sup_center_error =
            std::max(out.sup_center_error,
                     (charge_center(s.charges[0]) - wc.r(s.t)).norm());
    });
    return out;
}

}  // namespace wc
