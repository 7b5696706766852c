// Free-space (vanishing at infinity) electrostatic potentials
//
//     phi(x) = q * int density(y) / |x - y| dy,   density >= 0, int = 1.
//
// Radial path: for a spherically symmetric density rho(r),
//     phi(r) = (q/r) [ 4 pi int_0^r t^2 rho(t) dt ] + 4 pi q int_r^inf t rho(t) dt,
// evaluated by cumulative trapezoid quadrature on the grid; the far field
// beyond the last node is the exact point-charge tail q * (mass inside)/r.
//
// Cartesian path: zero-padded (domain-doubling) FFT convolution with the
// free-space kernel, entering through the exact Fourier symbol of the
// truncated kernel 1/r * [r <= L_T],
//     K(k) = 4 pi (1 - cos(L_T |k|)) / |k|^2,   K(0) = 2 pi L_T^2,
// with L_T = 2L.  For densities supported in the half-box |x|_inf <= L/2 the
// periodized truncated kernel is exact there and the solve is spectrally
// accurate.  Mass found outside the half-box is reported as leaked_mass and
// flips support_ok (the potential is then still computed but carries no
// accuracy guarantee near the box surface).

#pragma once

#include <vector>

#include "wavecorpuscle/grids.hpp"

namespace wc {

// phi on the same radial grid; density must be >= 0.
RadialField poisson_radial(const RadialField& density, double q);

// phi(0) = 4 pi q int_0^inf t rho(t) dt.
double poisson_radial_origin(const RadialField& density, double q);

struct CartesianPoissonResult {
    RealField3 phi;
    double leaked_mass = 0;  // density mass outside |x|_inf <= L/2
    bool support_ok = true;
};

CartesianPoissonResult poisson_cartesian(const RealField3& density, double q);

// max_r |phi(r) - q/r| over the supplied far radii (radial solver path):
// quantifies approach to the point-charge limit; decays with the tail mass
// beyond the probe radius.
double coulomb_limit_error(const RadialField& density, double q,
                           const std::vector<double>& far_radii);

}  // namespace wc
