#include "wavecorpuscle/poisson.hpp"

#include <algorithm>
#include <cmath>

#include "wavecorpuscle/constants.hpp"
#include "wavecorpuscle/errors.hpp"
#include "wavecorpuscle/fft.hpp"

namespace wc {

namespace {

void validate_density(const RadialField& density) {
    if (density.v.size() != density.grid.r.size())
        throw ConfigError("density", "field/grid size mismatch");
    for (double v : density.v)
        if (!(v >= 0) || !std::isfinite(v))
            throw ConfigError("density", "density must be finite and >= 0");
}

// Cumulative moments: inner[i] = int_0^{r_i} t^2 rho dt,
//                     outer[i] = int_{r_i}^{r_max} t rho dt  (trapezoid).
struct Moments {
    std::vector<double> inner, outer;
    double origin_moment;  // int_0^{r_max} t rho dt
};

Moments radial_moments(const RadialField& density) {
    const auto& r = density.grid.r;
    const auto& rho = density.v;
    const int n = static_cast<int>(r.size());
    Moments m;
    m.inner.resize(n);
    m.outer.assign(n, 0.0);

    // First cell [0, r_0]: rho is smooth and even, so rho ~ rho(r_0) there.
    m.inner[0] = rho[0] * r[0] * r[0] * r[0] / 3.0;
    for (int i = 1; i < n; ++i) {
        const double dr = r[i] - r[i - 1];
        m.inner[i] = m.inner[i - 1] +
                     0.5 * dr * (r[i] * r[i] * rho[i] + r[i - 1] * r[i - 1] * rho[i - 1]);
    }
    for (int i = n - 2; i >= 0; --i) {
        const double dr = r[i + 1] - r[i];
        m.outer[i] = m.outer[i + 1] +
                     0.5 * dr * (r[i + 1] * rho[i + 1] + r[i] * rho[i]);
    }
    m.origin_moment = m.outer[0] + rho[0] * r[0] * r[0] / 2.0;
    return m;
}

}  // namespace

RadialField poisson_radial(const RadialField& density, double q) {
    validate_density(density);
    const auto m = radial_moments(density);
    const auto& r = density.grid.r;
    RadialField phi;
    phi.grid = density.grid;
    phi.v.resize(r.size());
    const double fourpi = 4.0 * constants::pi;
    for (std::size_t i = 0; i < r.size(); ++i)
        phi.v[i] = q * (fourpi * m.inner[i] / r[i] + fourpi * m.outer[i]);
    return phi;
}

double poisson_radial_origin(const RadialField& density, double q) {
    validate_density(density);
    return 4.0 * constants::pi * q * radial_moments(density).origin_moment;
}

CartesianPoissonResult poisson_cartesian(const RealField3& density, double q) {
    const auto& g = density.grid;
    if (density.v.size() != g.size())
        throw ConfigError("density", "field/grid size mismatch");

    CartesianPoissonResult res;

    // Support diagnostic: mass outside the half-box |x|_inf <= L/2.
    double total = 0, leaked = 0;
    {
        std::size_t idx = 0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                for (int l = 0; l < g.n; ++l, ++idx) {
                    const double v = density.v[idx];
                    total += v;
                    const double m = std::max({std::abs(g.coord(i)),
                                               std::abs(g.coord(j)),
                                               std::abs(g.coord(l))});
                    if (m > 0.5 * g.L) leaked += v;
                }
    }
    const double h3 = g.h * g.h * g.h;
    res.leaked_mass = leaked * h3;
    res.support_ok = total <= 0 || leaked <= 1e-8 * total;

    // Domain doubling + truncated-kernel symbol.
    const int N = 2 * g.n;
    const double P = N * g.h;  // padded period = 4 L
    const double LT = 2.0 * g.L;
    std::vector<std::complex<double>> pad(static_cast<std::size_t>(N) * N * N,
                                          {0.0, 0.0});
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int l = 0; l < g.n; ++l)
                pad[(static_cast<std::size_t>(i) * N + j) * N + l] =
                    density.v[g.idx(i, j, l)];

    auto fft = Fft3::get(N);
    fft->forward(pad.data());

    const auto k = fft_freqs(N, P / 2.0);
    const double fourpi = 4.0 * constants::pi;
    std::size_t idx = 0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int l = 0; l < N; ++l, ++idx) {
                const double k2 = k[i] * k[i] + k[j] * k[j] + k[l] * k[l];
                const double sym =
                    k2 == 0 ? 2.0 * constants::pi * LT * LT
                            : fourpi * (1.0 - std::cos(LT * std::sqrt(k2))) / k2;
                pad[idx] *= sym;
            }
    fft->backward(pad.data());

    res.phi = RealField3(g);
    const double scale = q * h3 / (P * P * P);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int l = 0; l < g.n; ++l)
                res.phi.v[g.idx(i, j, l)] =
                    pad[(static_cast<std::size_t>(i) * N + j) * N + l].real() *
                    scale;
    return res;
}

double coulomb_limit_error(const RadialField& density, double q,
                           const std::vector<double>& far_radii) {
    validate_density(density);
    const auto m = radial_moments(density);
    const auto& r = density.grid.r;
    const double fourpi = 4.0 * constants::pi;
    const double total_inner = m.inner.back();

    double worst = 0;
    for (double rf : far_radii) {
        if (!(rf > 0)) throw ConfigError("far_radii", "radii must be positive");
        double phi;
        if (rf >= r.back()) {
            phi = q * fourpi * total_inner / rf;  // all grid mass enclosed
        } else {
            const auto it = std::lower_bound(r.begin(), r.end(), rf);
            const std::size_t i = static_cast<std::size_t>(it - r.begin());
            auto phi_at = [&](std::size_t j) {
                return q * (fourpi * m.inner[j] / r[j] + fourpi * m.outer[j]);
            };
            if (i == 0) {
                phi = phi_at(0);
            } else {
                const double w = (rf - r[i - 1]) / (r[i] - r[i - 1]);
                phi = (1 - w) * phi_at(i - 1) + w * phi_at(i);
            }
        }
        worst = std::max(worst, std::abs(phi - q / rf));
    }
    return worst;
}

}  // namespace wc
