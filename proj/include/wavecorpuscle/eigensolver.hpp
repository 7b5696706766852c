// Radial nonlinear eigenvalue problem for the hydrogen-like charge:
//
//     omega Psi = -1/2 lap Psi - Psi/r + 1/2 G'_{a,xi}(|Psi|^2) Psi,
//     ||Psi||_{L^2(R^3)} = 1,     a = 1/kappa,
//
// reduced to u = r Psi on a uniform radial grid with Dirichlet ends
// (u(0) = u(r_max) = 0), second-order finite differences, and the log-law
// nonlinearity from the nonlin module (optional cutoff xi <= 0).
//
// The linear (kappa = 0) operator is the Coulomb problem with spectrum
// omega0_n = -1/(2 n^2).  For kappa > 0 the nonlinear term shifts each
// level by O(kappa^2 (1 + |ln kappa|)); the ground state has the exact
// product form  Psi = kappa^{3/2} C_g C exp(-kappa^2 r^2 / 2 - r)  with C
// fixed by normalization and  omega = -1/2 - (kappa^2/2) ln C^2.
//
// Discrete forms are shared between the eigenvalue, the residual and the
// energy functional so the identity  E - omega = kappa^2/2  (exact for the
// pure log law) holds at the discrete level to rounding.

#pragma once

#include <limits>
#include <vector>

#include "wavecorpuscle/grids.hpp"
#include "wavecorpuscle/nonlin.hpp"

namespace wc {

struct EigenConfig {
    double kappa = 0.1;  // inverse size a = 1/kappa; 0 = linear problem
    double xi = -std::numeric_limits<double>::infinity();  // log cutoff <= 0
    FormFactorKind kind = FormFactorKind::LogGaussian;
    int grid_n = 8000;    // nodes (the last node r = r_max carries u = 0)
    double r_max = 100.0; // must satisfy r_max >= 10/kappa for kappa > 0
    double tol_residual = 1e-9;
    double tol_omega = 1e-12;
    int max_iter = 50000;
    double mixing = 2.0;  // imaginary-time step / Newton damping floor
};

struct EigenSolution {
    RadialGrid grid;
    std::vector<double> Psi;  // Psi_i = u_i / r_i
    std::vector<double> u;    // u = r Psi, normalized 4 pi h sum u^2 = 1
    double omega = 0;         // from the integral identity (solver-free)
    double energy = 0;        // value of the energy functional
    double residual = 0;      // discrete L2 norm of the eigen-equation
    int node_count = 0;
    double decay_rate = 0;    // fitted exponential tail rate (0 if no window)
    double omega_linear = 0;  // matching linear level -1/(2n^2) on this grid
    bool converged = false;
    double kappa = 0, xi = 0; // configuration echo (self-describing)
};

// ---- linear reference problem ----

struct LinearLevel {
    double omega = 0;
    std::vector<double> u;  // normalized, first antinode positive
    int node_count = 0;
};

// Lowest n_max eigenpairs of  -1/2 u'' - u/r  with Dirichlet ends
// (LAPACK symmetric tridiagonal).  Rejects grids whose boundary carries
// more than 1e-6 relative amplitude (insufficient r_max).
std::vector<LinearLevel> linear_hydrogen_spectrum(const RadialGrid& grid,
                                                  int n_max);

// ---- shared discrete forms (u-representation) ----

// <u, -1/2 D2 u> * 4 pi h : discrete kinetic energy int |grad Psi|^2 / 2.
double kinetic_form(const RadialGrid& grid, const std::vector<double>& u);
// -4 pi h sum u^2 / r : Coulomb attraction -int |Psi|^2 / r.
double coulomb_form(const RadialGrid& grid, const std::vector<double>& u);
// 4 pi h sum (1/2) G_a(s_i) r_i^2  and  4 pi h sum (1/2) G_a'(s_i) u_i^2,
// s_i = (u_i/r_i)^2 floored at 1e-290 to keep the logarithm finite.
double nonlinear_G_form(const RadialGrid& grid, const std::vector<double>& u,
                        const EigenConfig& cfg);
double nonlinear_Gp_form(const RadialGrid& grid, const std::vector<double>& u,
                         const EigenConfig& cfg);

// omega from the state (integral identity): kinetic + coulomb + Gp forms.
double omega_from_state(const RadialGrid& grid, const std::vector<double>& u,
                        const EigenConfig& cfg);

// E(Psi) = int [ 1/2 |grad Psi|^2 - |Psi|^2/r + 1/2 G_{a,xi}(|Psi|^2) ],
// with the s ln s integrand continued by 0 at s = 0.
double coulomb_energy_functional(const RadialGrid& grid,
                                 const std::vector<double>& u,
                                 const EigenConfig& cfg);
// Free part (no Coulomb term): 1/2 int |grad Psi|^2 + 1/2 int G.
double free_energy_functional(const RadialGrid& grid,
                              const std::vector<double>& u,
                              const EigenConfig& cfg);

// ---- analytic ground-state family (pure log law) ----

// Psi(r) = kappa^{3/2} C_g C exp(-kappa^2 r^2/2 - r) solves the radial
// equation exactly for xi = -inf with omega = -1/2 - (kappa^2/2) ln C^2;
// C^2 = sqrt(pi) / (4 kappa^3 I2(kappa)), I2 = int_0^inf r^2 e^{-k^2 r^2 - 2r}.
struct ProductStateConstants {
    double C_sq = 0;      // normalization constant squared
    double ln_C_sq = 0;
    double omega = 0;     // -1/2 - (kappa^2/2) ln C^2
};
ProductStateConstants product_state_constants(double kappa);

// The product state sampled on cfg's grid (normalized in the discrete norm),
// packaged with omega/energy/residual evaluated by the discrete forms.
EigenSolution analytic_ground_state(const EigenConfig& cfg);

// ---- nonlinear solvers ----

// Ground state by normalized semi-implicit imaginary time from the linear
// Coulomb ground state; kappa <= 0.5.  Non-convergence returns the last
// iterate with converged = false.
EigenSolution solve_ground(const EigenConfig& cfg);

// n-th level (2 <= n <= 5) by damped Newton on {equation, normalization}
// with geometric continuation in kappa from the linear eigenfunction.
// Node-count mismatch after convergence raises NumericalError (level
// crossing); persistent Newton divergence raises NumericalError.
EigenSolution solve_excited(const EigenConfig& cfg, int n);

// Discrete L2 norm of  omega u + 1/2 D2 u + u/r - 1/2 G' u  for the given
// state -- the same forms the solvers drive to zero.
double eigen_residual(const EigenSolution& sol, const EigenConfig& cfg);

// | E - omega - kappa^2/2 |, both sides independently evaluated.
double eom_deviation(const EigenSolution& sol, const EigenConfig& cfg);

// max over pairs of |chi (omega_i - omega_j) - (E0_i - E0_j)| and over
// single solutions of |E0_i - chi omega_i - chi^2/(2 a^2 m)|, with
// E0 = (chi^2/m) E and omega scaled by chi/m; `a` must equal each
// solution's 1/kappa.
double planck_einstein_check(const std::vector<EigenSolution>& sols,
                             double chi, double m, double a);

// ---- gap scan ----

struct GapPoint {
    double omega = 0;
    double floor_residual = 0;  // best residual across starts
};

// Scans n_omega trial eigenvalues in [omega0_n + delta, omega0_{n+1} - delta]
// running fixed-omega inverse-iteration residual minimization from n_starts
// different starts.  Requires delta >= C4 kappa^2 (1 + |ln kappa|); refused
// otherwise with the required delta in the error message.
std::vector<GapPoint> gap_scan(const EigenConfig& cfg, int n_gap, double delta,
                               int n_omega, double C4, int n_starts = 5);

// ---- tail diagnostics ----

enum class TailDominance { Exponential, Gaussian };

struct DecayFit {
    double exp_rate = 0;        // p in ln|Psi| ~ c - p r      (vs-r fit)
    double gauss_rate_pure = 0; // q in ln|Psi| ~ c - q r^2    (vs-r^2 fit)
    double gauss_coef = 0;      // q in ln|Psi| ~ c - p r - q r^2 (joint fit)
    double exp_rate_joint = 0;  // p from the joint quadratic fit
    TailDominance dominance = TailDominance::Exponential;
    double r_lo = 0, r_hi = 0;  // fitted window
    double decades = 0;         // amplitude span of the window
};

// Fits the far tail on the window where |Psi|/max|Psi| lies in
// [window_lo, window_hi]; requires the window to span >= 4 decades.
// Dominance compares the joint-fit contributions p (r_hi - r_lo) vs
// q (r_hi^2 - r_lo^2) across the window.
DecayFit decay_fit(const EigenSolution& sol, double window_lo = 1e-12,
                   double window_hi = 1e-3);

// ---- invariants (exposed for property tests) ----

// | 1/2 int G - lambda ||Psi||^2 + 1/6 int |grad Psi|^2 |  with lambda the
// free-problem multiplier read off the state (no Coulomb term).
double pohozaev_deviation(const RadialGrid& grid, const std::vector<double>& u,
                          const EigenConfig& cfg);

// (3/2) ln[ (2/(3 pi e)) int |grad Psi|^2 ] - int Psi^2 ln Psi^2  for a
// normalized state; >= 0 up to quadrature, 0 exactly at Gaussians.
double log_sobolev_gap(const RadialGrid& grid, const std::vector<double>& u);

// Coarse level-2 min-max cross-check (off the solver path): the maximum of
// the energy functional over the normalized circle spanned by a ground and
// a first-excited state.  An upper bound that tightens as the two states
// approach the true critical points.
double minmax_level2_estimate(const EigenSolution& ground,
                              const EigenSolution& excited,
                              const EigenConfig& cfg);

// ---- two-particle electron/proton reduction ----

struct TwoParticleConfig {
    double b = 0.01;       // mass ratio in (0, 0.1]
    double kappa_e = 0.1;  // electron nonlinearity parameter
    double kappa_p = 1.0;  // proton nonlinearity parameter
    double xi = -std::numeric_limits<double>::infinity();
    int grid_n_e = 8000;
    double r_max_e = 100.0;
    int grid_n_p = 4000;
    double r_max_p = 40.0;
    double tol = 1e-10;    // successive omega change cutoff
    int max_outer = 200;
    double mixing = 1.0;   // potential mixing, halved on oscillation
};

struct TwoParticleResult {
    EigenSolution electron, proton;
    double D_prot = 0;         // -int [(1/b) phi2(y/b) - 1/y] |Psi1|^2
    double D_prot_direct = 0;  // same via the reduced double integral
    int outer_iterations = 0;
};

// Alternating SCF: electron in the frozen proton potential (1/b) phi2(y/b),
// proton in the frozen electron potential b phi1(b z), radial Poisson with
// cross-scale interpolation (exact 1/r far field).
TwoParticleResult two_particle_scf(const TwoParticleConfig& cfg);

}  // namespace wc
