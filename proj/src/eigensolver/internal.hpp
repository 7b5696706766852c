// Internal radial machinery shared by the eigensolver translation units:
// the discrete operator on u = r Psi, normalization helpers, the
// imaginary-time ground flow and solution packaging.  Not installed.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "wavecorpuscle/constants.hpp"
#include "wavecorpuscle/eigensolver.hpp"
#include "wavecorpuscle/errors.hpp"
#include "wavecorpuscle/nonlin.hpp"

namespace wc::detail {

// Amplitude-square floor keeping ln s finite at (near-)nodes; the factor
// u^2 ln s vanishes there, so the floor only blocks 0 * inf = NaN.
inline constexpr double kAmpSqFloor = 1e-290;

inline double grid_h(const RadialGrid& grid) { return grid.r_max / grid.size(); }

FormFactorSpec spec_for(double kappa, double xi, FormFactorKind kind);
void validate_config(const EigenConfig& cfg);

// Discrete Hamiltonian H u = -1/2 D2 u + V u + 1/2 G'(s) u with Dirichlet
// ends: unknowns are the first size()-1 nodes, the last node carries u = 0.
struct RadialOperator {
    const RadialGrid& grid;
    std::vector<double> V;  // external potential at the nodes (all of them)
    const FormFactorSpec* spec = nullptr;  // null: linear problem
    double h, inv_h2;
    int n_int;

    RadialOperator(const RadialGrid& g, std::vector<double> Vext,
                   const FormFactorSpec* sp)
        : grid(g), V(std::move(Vext)), spec(sp), h(grid_h(g)),
          inv_h2(1.0 / (grid_h(g) * grid_h(g))), n_int(g.size() - 1) {}

    double gp_half(double u_i, double r_i) const {
        if (!spec) return 0.0;
        double s = (u_i / r_i) * (u_i / r_i);
        return 0.5 * eval_Gprime(*spec, std::max(s, kAmpSqFloor));
    }

    void apply(const std::vector<double>& u, std::vector<double>& Hu) const {
        const auto& r = grid.r;
        for (int i = 0; i < n_int; ++i) {
            double left = (i > 0) ? u[i - 1] : 0.0;
            double right = u[i + 1];  // u[n_int] == 0 by convention
            double lap = (right - 2.0 * u[i] + left) * inv_h2;
            Hu[i] = -0.5 * lap + (V[i] + gp_half(u[i], r[i])) * u[i];
        }
        Hu[n_int] = 0.0;
    }
};

double norm_sq_radial(const RadialGrid& grid, const std::vector<double>& u);
void normalize(const RadialGrid& grid, std::vector<double>& u);
double dot_radial(const RadialGrid& grid, const std::vector<double>& a,
                  const std::vector<double>& b);
int count_nodes(const std::vector<double>& u);
void fix_sign(std::vector<double>& u);

// Tridiagonal solve (LAPACK dgtsv); dl/d/du are destroyed, b holds x.
void solve_tridiag(std::vector<double>& dl, std::vector<double>& d,
                   std::vector<double>& du, std::vector<double>& b);

struct StateReport {
    double omega, residual;
};
StateReport state_report(const RadialOperator& op, const std::vector<double>& u);

// Normalize, evaluate all reported quantities with the operator's own
// potential (energy = kinetic + int V |Psi|^2 + 1/2 int G), fit the tail.
EigenSolution package_solution(const EigenConfig& cfg, const RadialOperator& op,
                               std::vector<double> u, bool converged,
                               double omega_linear);

// Semi-implicit imaginary-time flow to the (positive) ground state of the
// operator, from the supplied start; checks the entropy bound on every
// normalized iterate.
EigenSolution run_ground_flow(const EigenConfig& cfg, const RadialOperator& op,
                              std::vector<double> u, double omega_linear);

}  // namespace wc::detail
