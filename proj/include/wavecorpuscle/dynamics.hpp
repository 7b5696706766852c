// Coupled nonlinear-wave / electrostatic dynamics.
//
// Each charge ell carries a complex field psi_ell on a shared cubic grid and
// evolves under
//
//   i chi d_t psi = -(chi^2/2m) lap psi
//                   + q (phi_other + phi_ex) psi
//                   + (chi^2/2m) G_a'(|psi|^2) psi,
//
// where phi_other is the electrostatic potential sourced by the *other*
// charges' |psi|^2 (a charge's own potential does not act on itself; with a
// single charge no Poisson solve happens at all) and phi_ex is a prescribed
// external potential.
//
// Time stepping is Strang splitting: half a local phase rotation (the
// potential + nonlinear term is diagonal in x, and |psi| is frozen during a
// pure phase rotation, so that substep is exact), a full spectral kinetic
// step, then the second half phase with the coupling potentials refreshed
// from the post-kinetic amplitudes and the external potential evaluated at
// t + dt.  Norm is conserved to rounding by construction.
//
// Inside phase/energy evaluations the logarithmic nonlinearity is evaluated
// with the cutoff floored at xi_num = -200 (an IEEE guard far below any
// physically reached amplitude; recorded here for reproducibility).

#pragma once

#include <functional>
#include <vector>

#include "wavecorpuscle/grids.hpp"
#include "wavecorpuscle/nonlin.hpp"

namespace wc {

inline constexpr double kXiNumericFloor = -200.0;

struct ExternalField {
    // Any of these may be empty.  B enters only the Newton comparator.
    std::function<double(double t, const Vec3&)> phi;
    std::function<Vec3(double t, const Vec3&)> E;
    std::function<Vec3(double t, const Vec3&)> B;
};

struct ChargeState {
    CplxField3 psi;
    double m = 1.0;
    double q = 1.0;
    double chi = 1.0;
    FormFactorSpec ff;  // ff.a is the charge's size parameter
};

struct SystemState {
    std::vector<ChargeState> charges;
    ExternalField external;
    double t = 0.0;
};

// One Strang step.  Throws NumericalError if non-finite values appear (the
// state is then unusable; evolve() restores its last observed snapshot).
void step(SystemState& sys, double dt);

struct EvolveOptions {
    double T = 1.0;
    double dt = 1e-3;
    int output_stride = 1;  // observer cadence in steps
};

using Observer = std::function<void(const SystemState&)>;

// Advances sys to t + T, invoking obs at t=0, every output_stride steps and
// at the end.  On NumericalError, sys is restored to the last observed
// snapshot before rethrowing.
void evolve(SystemState& sys, const EvolveOptions& opts, const Observer& obs = {});

// ---- observables ----

Vec3 charge_center(const ChargeState& c);

struct Kinematics {
    Vec3 v;  // velocity (chi/m) int Im(conj(psi) grad psi) / ||psi||^2
    Vec3 P;  // momentum  chi int Im(conj(psi) grad psi)
};
Kinematics velocity_and_momentum(const ChargeState& c);

struct ChargeEnergy {
    double gradient = 0;   // (chi^2/2m) int |grad psi|^2
    double nonlinear = 0;  // (chi^2/2m) int G_a(|psi|^2)
    double coupling = 0;   // q int phi_other |psi|^2   (unhalved)
    double external = 0;   // q int phi_ex |psi|^2
    double total = 0;      // sum of the above
};

struct EnergyBreakdown {
    std::vector<ChargeEnergy> per_charge;
    double coupling_half_sum = 0;  // (1/2) sum_ell coupling_ell
    double total = 0;  // sum(gradient + nonlinear + external) + coupling_half_sum
};

EnergyBreakdown system_energy(const SystemState& sys);

// Right-hand side H psi = -(chi^2/2m) lap psi + q phi_ex psi
//                         + (chi^2/2m) G'(|psi|^2) psi
// for a single charge in an external potential, evaluated with the same
// nonlinearity evaluator and spectral operators the split-stepper uses.
// Exact-solution residual checks build on this single code path.
CplxField3 nls_rhs(const ChargeState& c, double t, const ExternalField& ext);

// L2 norm of  d_t |psi|^2 + div[(chi/m) Im(conj(psi) grad psi)]  for charge
// ell, formed from a centered difference of two copies stepped by dt.
double continuity_residual(const SystemState& sys, int ell, double dt);

// max |E + grad phi| over the given probes/times (central differences);
// verifies a user-supplied (phi, E) pair is consistent.
double external_field_consistency(const ExternalField& ext,
                                  const std::vector<double>& times,
                                  const std::vector<Vec3>& probes);

// ---- Newton point-mechanics comparator ----

struct PointCharge {
    double q = 0;
    Vec3 r;
};

struct NewtonTrajectory {
    std::vector<double> t;
    std::vector<Vec3> r, v;
};

// RK4 for m r'' = q E_ex(t,r) + (q/c) r' x B_ex(t,r)
//                 - q sum_j q_j (r_j - r)/|r_j - r|^3.
// Throws NumericalError if the trajectory approaches a point charge closer
// than r_min.
NewtonTrajectory newton_ode(double m, double q, const ExternalField& ext,
                            const std::vector<PointCharge>& others, Vec3 r0,
                            Vec3 v0, double T, double dt, double c_light = 1.0,
                            double r_min = 1e-6);

// ---- point (Newtonian) limit study ----

struct NewtonLimitCase {
    double a;  // corpuscle size
    double L;  // box half-width used for this size
    int n;     // grid nodes per axis
};

struct NewtonLimitConfig {
    FormFactorKind kind = FormFactorKind::LogGaussian;
    double m = 1.0, q = 1.0, chi = 1.0;
    Vec3 r0, v0;
    double T = 1.0;
    double dt = 2e-3;
    int output_stride = 10;
    std::vector<NewtonLimitCase> cases;
};

struct NewtonLimitRow {
    double a = 0, L = 0;
    double sup_center_dev = 0;  // sup_t |center(t) - r_newton(t)|
    double max_eps1 = 0;        // sup_t |int (E(x)-E(center)) |psi|^2 dx|
    double norm_drift = 0;      // | ||psi(T)||^2 - ||psi(0)||^2 |
    double edge_mass = 0;       // final mass beyond |x|_inf > 3L/4 (wrap guard)
};

std::vector<NewtonLimitRow> newton_limit_study(const NewtonLimitConfig& cfg,
                                               const ExternalField& ext);

}  // namespace wc
