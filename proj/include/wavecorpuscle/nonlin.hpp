// Charge-equilibrium nonlinearities.
//
// A charge's internal nonlinearity G is determined by its resting form
// factor psi_a through the equilibrium condition
//
//     -lap psi_a + G_a'(psi_a^2) psi_a = 0,
//
// i.e. G_a'(s) = (lap psi_a / psi_a)(r(s)) where r(s) inverts s = psi_a(r)^2.
// Since psi_a(r)^2 decreases monotonically from its peak s_peak = psi_a(0)^2,
// G' is defined on [0, s_peak]; above the peak it is either continued as a
// constant (default) or, where the defining formula stays valid for all
// s >= 0, by the closed form itself.
//
// Size scaling: with psi_a(r) = a^{-3/2} psi1(r/a),
//     G_a'(s) = a^{-2} G_1'(a^3 s),      G_a(s) = a^{-5} G_1(a^3 s).
//
// Built-in families (base size a = 1, s in units of the base peak):
//   PowerLaw     G1'(s) = 15 s^{2/5} / (4 c^{4/5}) - 45 s^{4/5} / (4 c^{8/5})
//                (valid for all s >= 0), c = c_pw.
//   Exponential  G1'(s) = 1 - 4/L - 4/L^2 - 8/L^3 with L = ln(c_e^2/s),
//                for s <= c_e^2 e^{-2}; constant -3 above.  G1 has no
//                elementary antiderivative; it reduces to exponential
//                integrals E_n (evaluated via Boost) and is cross-checked
//                against direct quadrature of G1'.
//   LogGaussian  G1'(s) = -ln_{+,xi}(s / C_g^2) - 3, a logarithmic law with
//                optional lower cutoff xi (xi = -inf means the pure log).
//                ln_{+,xi}(z) = max(ln z, xi).  The closed form is valid for
//                every s >= 0.
//
// Free energy G(s) = int_0^s G'(u) du with G(0) = 0.

#pragma once

#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace wc {

enum class FormFactorKind { PowerLaw, Exponential, LogGaussian };

enum class Extension {
    ConstantAbovePeak,    // G'(s) = G'(s_peak) for s > s_peak (default)
    ClosedFormEverywhere  // use the defining formula for all s >= 0
};

struct FormFactorSpec {
    FormFactorKind kind = FormFactorKind::LogGaussian;
    double a = 1.0;  // size parameter, > 0
    // Logarithm cutoff; only meaningful for LogGaussian.  -inf = pure log.
    double xi = -std::numeric_limits<double>::infinity();
    Extension extension = Extension::ConstantAbovePeak;
};

const char* to_string(FormFactorKind kind);

// ln_{+,xi}(z): the logarithm clipped from below at xi; ln_{+,xi}(0) = xi.
double ln_plus(double z, double xi);

// Resting profile psi_a(r) and its radial derivative d psi_a / dr.
double eval_form_factor(const FormFactorSpec& spec, double r);
double eval_form_factor_derivative(const FormFactorSpec& spec, double r);

// Peak amplitude-square s_peak = psi_a(0)^2 = a^{-3} psi1(0)^2.
double form_factor_peak(const FormFactorSpec& spec);

// G_a'(s), G_a(s) and g(psi) = G_a'(|psi|^2) psi.
// Throws ConfigError on invalid spec (a <= 0, finite xi on a non-log kind,
// ClosedFormEverywhere on Exponential) or s < 0.
double eval_Gprime(const FormFactorSpec& spec, double s);
double eval_G(const FormFactorSpec& spec, double s);
std::complex<double> eval_g(const FormFactorSpec& spec, std::complex<double> psi);

// Tabulated G' built by numerically inverting s = psi_a(r)^2 and evaluating
// lap psi_a / psi_a on the inverse -- an independent cross-check of the
// closed forms above.  Samples are log-spaced in s on [s_peak*s_min_rel,
// s_peak]; operator() interpolates linearly in (ln s, G') and clamps at the
// ends.
struct GprimeTable {
    std::vector<double> ln_s;
    std::vector<double> gp;
    double operator()(double s) const;
};

GprimeTable build_Gprime_numeric(const FormFactorSpec& spec, int n_samples,
                                 double s_min_rel = 1e-12);

// Convenience wrapper bundling a validated spec with cached scaling factors.
class Nonlinearity {
public:
    explicit Nonlinearity(FormFactorSpec spec);

    double Gprime(double s) const { return eval_Gprime(spec_, s); }
    double G(double s) const { return eval_G(spec_, s); }
    std::complex<double> g(std::complex<double> psi) const {
        return eval_g(spec_, psi);
    }
    double s_peak() const { return s_peak_; }
    const FormFactorSpec& spec() const { return spec_; }

private:
    FormFactorSpec spec_;
    double s_peak_;
};

}  // namespace wc
