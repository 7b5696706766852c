// Exact accelerating corpuscle solutions, used as analytic oracles for the
// split-step integrator.
//
// For an external potential phi_ex(t, x) that is affine in x, the ansatz
//
//     psi(t, x) = e^{i S / chi} psi_a(|x - r(t)|),
//     S(t, x)   = m v . (x - r) + s_p(t),
//
// solves    i chi d_t psi = -(chi^2/2m) lap psi + q phi_ex psi
//                           + (chi^2/2m) G_a'(|psi|^2) psi
//
// exactly, provided the center obeys Newton's law  m r'' = q E_ex(t, r)
// (E_ex = -grad phi_ex) and the phase shift accumulates as
//
//     s_p(t) = int_0^t [ m |v|^2 / 2 - q phi_ex(t', r(t')) ] dt',  s_p(0) = 0.
//
// The center ODE and s_p are integrated by RK4 on a dense uniform time
// mesh; between mesh points all trajectory quantities are cubic-Hermite
// interpolated (exact to rounding whenever they are polynomials of degree
// <= 3, e.g. for a constant force).  Closed forms, where they exist, are
// exercised in the tests only.

#pragma once

#include <complex>
#include <vector>

#include "wavecorpuscle/dynamics.hpp"
#include "wavecorpuscle/grids.hpp"
#include "wavecorpuscle/nonlin.hpp"

namespace wc {

struct WaveCorpuscleConfig {
    FormFactorSpec ff;
    double m = 1.0, q = 1.0, chi = 1.0;
    Vec3 r0, v0;
    double T = 1.0;     // horizon of the built trajectory
    double dt = 1e-3;   // dense mesh spacing for the center ODE
};

class WaveCorpuscle {
public:
    // Trajectory evaluation for t in [0, T].  Throws ConfigError outside.
    Vec3 r(double t) const;
    Vec3 v(double t) const;
    Vec3 accel(double t) const;
    double s_p(double t) const;
    double s_p_dot(double t) const;

    // Pointwise and grid-sampled ansatz evaluation.
    std::complex<double> psi(double t, const Vec3& x) const;
    CplxField3 sample(double t, const CartesianGrid& g) const;

    const WaveCorpuscleConfig& config() const { return cfg_; }
    const ExternalField& external() const { return ext_; }

private:
    friend WaveCorpuscle build_wave_corpuscle(const WaveCorpuscleConfig&,
                                              const ExternalField&);
    WaveCorpuscle() = default;

    // Hermite interval lookup: index k with t in [t_k, t_{k+1}], tau in [0,1].
    void locate(double t, int& k, double& tau) const;

    WaveCorpuscleConfig cfg_;
    ExternalField ext_;  // E always populated (derived from phi if absent)
    double mesh_dt_ = 0;
    std::vector<Vec3> r_, v_, a_;
    std::vector<double> sp_, spdot_;
};

// Integrates the center ODE and phase.  phi_ex must be affine in x at every
// sampled time (checked via second differences over probe triples; tolerance
// 1e-10 relative to the sampled scale) -- a non-affine potential is rejected
// with the measured curvature in the error message.  If ext.E is absent it
// is derived from phi (exactly, using affineness); if phi is absent but E is
// given the construction is rejected (s_p needs the potential's gauge).
// Both absent means free motion.
WaveCorpuscle build_wave_corpuscle(const WaveCorpuscleConfig& cfg,
                                   const ExternalField& ext);

// L2 norm of  i chi d_t psi - H psi  on the grid at time t, with d_t psi by
// analytic differentiation of the ansatz and H psi through nls_rhs -- the
// identical code path the dynamics module uses.  The overload taking an
// explicit external field measures the ansatz against a *different*
// equation (e.g. a non-affine potential, where it is not a solution).
double nls_residual(const WaveCorpuscle& wc, double t, const CartesianGrid& g);
double nls_residual(const WaveCorpuscle& wc, double t, const CartesianGrid& g,
                    const ExternalField& eq_ext);

struct OracleCompare {
    double sup_l2_error = 0;     // sup_t || psi_num - psi_exact ||_2
    double sup_center_error = 0; // sup_t | center_num - r_exact |
};

// Evolves psi(0) = wc.sample(0) with the split-stepper under wc's external
// field and compares against the exact solution at every observed time.
OracleCompare oracle_compare(const WaveCorpuscle& wc, const CartesianGrid& g,
                             const EvolveOptions& opts);

}  // namespace wc
