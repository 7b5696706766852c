#include "wavecorpuscle/constants.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <mutex>

namespace wc::constants {

double c_pw() { return std::sqrt(3.0 / (4.0 * pi)); }

double C_g() { return std::pow(pi, -0.75); }

namespace {

double compute_I_e() {
    // int_0^inf r^2 exp(-2 sqrt(r^2+1)) dr, smooth with exponential decay.
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(
        [](double r) { return r * r * std::exp(-2.0 * std::sqrt(r * r + 1.0)); },
        /*tolerance=*/1e-13);
}

}  // namespace

double I_e() {
    static const double value = compute_I_e();
    return value;
}

double c_e() {
    static const double value = 1.0 / std::sqrt(4.0 * pi * I_e());
    return value;
}

}  // namespace wc::constants
