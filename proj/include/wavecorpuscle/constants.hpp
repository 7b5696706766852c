// Normalization constants of the three built-in charge form factors.
//
// Each form factor is a radial profile psi1(r) with unit L2 norm on R^3,
// i.e. 4*pi * int_0^inf r^2 psi1(r)^2 dr = 1.  The size-a family is
// psi_a(r) = a^{-3/2} psi1(r/a), which preserves the norm.
//
//   power-law    psi1(r) = c_pw (1+r^2)^{-5/4},  c_pw = sqrt(3/(4 pi))
//   exponential  psi1(r) = c_e  exp(-sqrt(r^2+1)),
//                c_e^{-2} = 4 pi int_0^inf r^2 exp(-2 sqrt(r^2+1)) dr
//                (no elementary closed form; evaluated once by adaptive
//                quadrature and cached)
//   gaussian     psi1(r) = C_g  exp(-r^2/2),     C_g = pi^{-3/4}

#pragma once

namespace wc::constants {

inline constexpr double pi = 3.14159265358979323846;

// c_pw = sqrt(3/(4 pi)) : power-law normalization.
double c_pw();

// C_g = pi^{-3/4} : gaussian normalization.  C_g^2 = pi^{-3/2}.
double C_g();

// c_e : exponential normalization, cached quadrature (rel. error < 1e-12).
double c_e();

// The quadrature I_e = int_0^inf r^2 exp(-2 sqrt(r^2+1)) dr behind c_e,
// exposed so tests can cross-check the cached value.
double I_e();

}  // namespace wc::constants
