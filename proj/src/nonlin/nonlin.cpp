#include "wavecorpuscle/nonlin.hpp"

#include <boost/math/special_functions/expint.hpp>
#include <algorithm>
#include <cmath>

#include "wavecorpuscle/constants.hpp"
#include "wavecorpuscle/errors.hpp"

namespace wc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_spec(const FormFactorSpec& spec) {
    if (!(spec.a > 0) || !std::isfinite(spec.a))
        throw ConfigError("a", "form factor size must be positive and finite");
    if (spec.kind != FormFactorKind::LogGaussian && std::isfinite(spec.xi))
        throw ConfigError("xi", "logarithm cutoff applies to LogGaussian only");
    if (std::isnan(spec.xi) || spec.xi == kInf)
        throw ConfigError("xi", "cutoff must be a real number or -inf");
    if (spec.kind == FormFactorKind::Exponential &&
        spec.extension == Extension::ClosedFormEverywhere)
        throw ConfigError("extension",
                          "the exponential family has no closed form above its "
                          "peak; use ConstantAbovePeak");
}

void validate_s(double s) {
    if (!(s >= 0))
        throw ConfigError("s", "amplitude-square must be >= 0");
}

// ---- base (a = 1) profiles -------------------------------------------------

double psi1(FormFactorKind kind, double r) {
    switch (kind) {
        case FormFactorKind::PowerLaw:
            return constants::c_pw() * std::pow(1.0 + r * r, -1.25);
        case FormFactorKind::Exponential:
            return constants::c_e() * std::exp(-std::sqrt(r * r + 1.0));
        case FormFactorKind::LogGaussian:
            return constants::C_g() * std::exp(-0.5 * r * r);
    }
    return 0;
}

double psi1_prime(FormFactorKind kind, double r) {
    switch (kind) {
        case FormFactorKind::PowerLaw:
            return constants::c_pw() * -2.5 * r * std::pow(1.0 + r * r, -2.25);
        case FormFactorKind::Exponential: {
            const double w = std::sqrt(r * r + 1.0);
            return constants::c_e() * (-r / w) * std::exp(-w);
        }
        case FormFactorKind::LogGaussian:
            return constants::C_g() * -r * std::exp(-0.5 * r * r);
    }
    return 0;
}

double peak1(FormFactorKind kind) {
    const double p = psi1(kind, 0.0);
    return p * p;
}

// ---- base (a = 1) G' -------------------------------------------------------

// PowerLaw: valid for every s >= 0.
double Gprime1_powerlaw(double s) {
    const double c = constants::c_pw();
    const double t = std::pow(s / (c * c), 0.4);  // (s/c^2)^{2/5} = 1/(1+r^2)
    return 3.75 * t - 11.25 * t * t;
}

// Exponential: valid for s <= c_e^2 e^{-2} (L = ln(c_e^2/s) >= 2).
double Gprime1_exponential(double s) {
    if (s == 0) return 1.0;  // L -> inf limit
    const double L = std::log(constants::c_e() * constants::c_e() / s);
    return 1.0 - 4.0 / L - 4.0 / (L * L) - 8.0 / (L * L * L);
}

double Gprime1_loggaussian(double s, double xi) {
    const double Cg2 = constants::C_g() * constants::C_g();
    return -ln_plus(s / Cg2, xi) - 3.0;
}

double Gprime1_below_peak(const FormFactorSpec& spec, double s1) {
    switch (spec.kind) {
        case FormFactorKind::PowerLaw: return Gprime1_powerlaw(s1);
        case FormFactorKind::Exponential: return Gprime1_exponential(s1);
        case FormFactorKind::LogGaussian: return Gprime1_loggaussian(s1, spec.xi);
    }
    return 0;
}

// ---- base (a = 1) G --------------------------------------------------------

double G1_powerlaw(double s) {
    const double c = constants::c_pw();
    const double c45 = std::pow(c, 0.8);   // c^{4/5}
    return 75.0 / 28.0 * std::pow(s, 1.4) / c45 -
           25.0 / 4.0 * std::pow(s, 1.8) / (c45 * c45);
}

// Exponential: G1(s) = int_0^s G1'(u) du.  Substituting u = c_e^2 e^{-L}
// reduces to exponential integrals E_n:
//   G1(s) = c_e^2 [ e^{-L0} - 4 E1(L0) - 4 E2(L0)/L0 - 8 E3(L0)/L0^2 ],
// with L0 = ln(c_e^2 / s) >= 2 on the formula's domain.
double G1_exponential(double s) {
    if (s == 0) return 0.0;
    const double ce2 = constants::c_e() * constants::c_e();
    const double L0 = std::log(ce2 / s);
    const double E1 = boost::math::expint(1, L0);
    const double E2 = boost::math::expint(2, L0);
    const double E3 = boost::math::expint(3, L0);
    return ce2 * (std::exp(-L0) - 4.0 * E1 - 4.0 * E2 / L0 - 8.0 * E3 / (L0 * L0));
}

double G1_loggaussian(double s, double xi) {
    if (s == 0) return 0.0;
    const double Cg2 = constants::C_g() * constants::C_g();
    const double exi = std::exp(xi);  // 0 for xi = -inf
    if (s <= Cg2 * exi) return (-xi - 3.0) * s;
    return -s * std::log(s / Cg2) - 2.0 * s - Cg2 * exi;
}

double G1_below_peak(const FormFactorSpec& spec, double s1) {
    switch (spec.kind) {
        case FormFactorKind::PowerLaw: return G1_powerlaw(s1);
        case FormFactorKind::Exponential: return G1_exponential(s1);
        case FormFactorKind::LogGaussian: return G1_loggaussian(s1, spec.xi);
    }
    return 0;
}

}  // namespace

const char* to_string(FormFactorKind kind) {
    switch (kind) {
        case FormFactorKind::PowerLaw: return "PowerLaw";
        case FormFactorKind::Exponential: return "Exponential";
        case FormFactorKind::LogGaussian: return "LogGaussian";
    }
    return "?";
}

double ln_plus(double z, double xi) {
    if (z < 0) throw ConfigError("s", "logarithm argument must be >= 0");
    return std::max(std::log(z), xi);  // log(0) = -inf, so ln_plus(0) = xi
}

double eval_form_factor(const FormFactorSpec& spec, double r) {
    validate_spec(spec);
    return std::pow(spec.a, -1.5) * psi1(spec.kind, std::abs(r) / spec.a);
}

double eval_form_factor_derivative(const FormFactorSpec& spec, double r) {
    validate_spec(spec);
    return std::pow(spec.a, -2.5) * psi1_prime(spec.kind, std::abs(r) / spec.a);
}

double form_factor_peak(const FormFactorSpec& spec) {
    validate_spec(spec);
    return peak1(spec.kind) / (spec.a * spec.a * spec.a);
}

double eval_Gprime(const FormFactorSpec& spec, double s) {
    validate_spec(spec);
    validate_s(s);
    const double a2 = spec.a * spec.a;
    const double s1 = a2 * spec.a * s;  // base-scale amplitude-square
    const double sp = peak1(spec.kind);
    if (s1 <= sp || spec.extension == Extension::ClosedFormEverywhere)
        return Gprime1_below_peak(spec, s1) / a2;
    return Gprime1_below_peak(spec, sp) / a2;
}

double eval_G(const FormFactorSpec& spec, double s) {
    validate_spec(spec);
    validate_s(s);
    const double a3 = spec.a * spec.a * spec.a;
    const double a5 = a3 * spec.a * spec.a;
    const double s1 = a3 * s;
    const double sp = peak1(spec.kind);
    if (s1 <= sp || spec.extension == Extension::ClosedFormEverywhere)
        return G1_below_peak(spec, s1) / a5;
    // Constant G' above the peak integrates to a linear continuation.
    return (G1_below_peak(spec, sp) +
            Gprime1_below_peak(spec, sp) * (s1 - sp)) / a5;
}

std::complex<double> eval_g(const FormFactorSpec& spec, std::complex<double> psi) {
    const double s = std::norm(psi);
    if (s == 0) return {0.0, 0.0};  // G'(s) s^{1/2} -> 0 even for the pure log
    return eval_Gprime(spec, s) * psi;
}

double GprimeTable::operator()(double s) const {
    if (ln_s.empty()) throw NumericalError("empty G' table");
    const double t = std::log(std::max(s, 1e-300));
    if (t <= ln_s.front()) return gp.front();
    if (t >= ln_s.back()) return gp.back();
    const auto it = std::upper_bound(ln_s.begin(), ln_s.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - ln_s.begin());
    const double w = (t - ln_s[i - 1]) / (ln_s[i] - ln_s[i - 1]);
    return (1.0 - w) * gp[i - 1] + w * gp[i];
}

GprimeTable build_Gprime_numeric(const FormFactorSpec& spec, int n_samples,
                                 double s_min_rel) {
    validate_spec(spec);
    if (n_samples < 8) throw ConfigError("n_samples", "need at least 8 samples");
    if (!(s_min_rel > 0 && s_min_rel < 1))
        throw ConfigError("s_min_rel", "must lie in (0,1)");

    const double sp = form_factor_peak(spec);

    // Invert s = psi_a(r)^2 by bisection (psi_a strictly decreasing).
    auto s_of_r = [&](double r) {
        const double p = eval_form_factor(spec, r);
        return p * p;
    };
    auto r_of_s = [&](double s) {
        double lo = 0.0, hi = spec.a;
        while (s_of_r(hi) > s) hi *= 2.0;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (s_of_r(mid) > s ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    // lap psi / psi by 4th-order central differences (profiles are even in r,
    // so negative arguments evaluate via |r| inside eval_form_factor).
    auto lap_over_psi = [&](double r) {
        const double h = 1e-3 * (spec.a + r);
        auto f = [&](double x) { return eval_form_factor(spec, x); };
        const double f0 = f(r);
        const double d2 = (-f(r + 2 * h) + 16 * f(r + h) - 30 * f0 +
                           16 * f(r - h) - f(r - 2 * h)) / (12 * h * h);
        double lap;
        if (r < 1e-9) {
            lap = 3.0 * d2;  // lap(even profile) -> 3 f'' at the origin
        } else {
            const double d1 = (-f(r + 2 * h) + 8 * f(r + h) -
                               8 * f(r - h) + f(r - 2 * h)) / (12 * h);
            lap = d2 + 2.0 / r * d1;
        }
        return lap / f0;
    };

    GprimeTable table;
    table.ln_s.resize(n_samples);
    table.gp.resize(n_samples);
    const double ln_lo = std::log(sp * s_min_rel);
    const double ln_hi = std::log(sp);
    for (int i = 0; i < n_samples; ++i) {
        const double t = ln_lo + (ln_hi - ln_lo) * i / (n_samples - 1.0);
        const double s = std::exp(t);
        const double r = (i == n_samples - 1) ? 0.0 : r_of_s(s);
        table.ln_s[i] = t;
        table.gp[i] = lap_over_psi(r);
    }
    return table;
}

Nonlinearity::Nonlinearity(FormFactorSpec spec) : spec_(spec) {
    validate_spec(spec_);
    s_peak_ = form_factor_peak(spec_);
}

}  // namespace wc
