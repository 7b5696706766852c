#include "wavecorpuscle/grids.hpp"

#include <cmath>

#include "wavecorpuscle/errors.hpp"

namespace wc {

double Vec3::norm() const { return std::sqrt(norm2()); }

Vec3 operator*(double c, const Vec3& v) { return v * c; }

RadialGrid RadialGrid::uniform(int n, double r_max) {
    if (n < 2) throw ConfigError("nodes", "radial grid needs at least 2 nodes");
    if (!(r_max > 0)) throw ConfigError("r_max", "must be positive");
    RadialGrid g;
    g.r_max = r_max;
    g.spacing = RadialSpacing::Uniform;
    g.r.resize(n);
    const double h = r_max / n;
    for (int i = 0; i < n; ++i) g.r[i] = (i + 1) * h;
    return g;
}

RadialGrid RadialGrid::log_stretched(int n, double r_min, double r_max) {
    if (n < 2) throw ConfigError("nodes", "radial grid needs at least 2 nodes");
    if (!(r_min > 0 && r_max > r_min))
        throw ConfigError("r_min", "need 0 < r_min < r_max");
    RadialGrid g;
    g.r_max = r_max;
    g.spacing = RadialSpacing::LogStretched;
    g.r.resize(n);
    const double ratio = std::log(r_max / r_min) / (n - 1);
    for (int i = 0; i < n; ++i) g.r[i] = r_min * std::exp(ratio * i);
    return g;
}

CartesianGrid CartesianGrid::cubic(int n, double L) {
    if (n < 16 || (n & (n - 1)) != 0)
        throw ConfigError("n", "grid nodes per axis must be a power of two >= 16");
    if (!(L > 0)) throw ConfigError("L", "box half-width must be positive");
    CartesianGrid g;
    g.n = n;
    g.L = L;
    g.h = 2.0 * L / n;
    return g;
}

double integrate(const RealField3& f) {
    double sum = 0;
    for (double v : f.v) sum += v;
    return sum * f.grid.h * f.grid.h * f.grid.h;
}

double norm_sq(const CplxField3& psi) {
    double sum = 0;
    for (const auto& c : psi.v) sum += std::norm(c);
    return sum * psi.grid.h * psi.grid.h * psi.grid.h;
}

}  // namespace wc
