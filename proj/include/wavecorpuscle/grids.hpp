// Spatial grids and field containers.
//
// RadialGrid: strictly positive radii for spherically symmetric quantities.
// CartesianGrid: a uniform cubic grid of n^3 nodes covering [-L, L)^3 with
// spacing h = 2L/n (node x_i = -L + i h), the natural sampling for periodic
// FFT-based operators.  n must be a power of two, n >= 16.

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace wc {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double c) const { return {c * x, c * y, c * z}; }
    Vec3 operator/(double c) const { return {x / c, y / c, z / c}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm2() const { return dot(*this); }
    double norm() const;
};

Vec3 operator*(double c, const Vec3& v);

enum class RadialSpacing { Uniform, LogStretched };

struct RadialGrid {
    std::vector<double> r;  // strictly increasing, r[0] > 0
    double r_max = 0;
    RadialSpacing spacing = RadialSpacing::Uniform;

    // r_i = (i+1) h, h = r_max / n, i = 0..n-1 (excludes 0, includes r_max).
    static RadialGrid uniform(int n, double r_max);
    // Geometric spacing from r_min to r_max (n nodes).
    static RadialGrid log_stretched(int n, double r_min, double r_max);

    int size() const { return static_cast<int>(r.size()); }
};

struct RadialField {
    RadialGrid grid;
    std::vector<double> v;
};

struct CartesianGrid {
    int n = 0;       // nodes per axis (power of two, >= 16)
    double L = 0;    // half-width of the box
    double h = 0;    // spacing 2L/n

    static CartesianGrid cubic(int n, double L);

    std::size_t size() const {
        return static_cast<std::size_t>(n) * n * n;
    }
    std::size_t idx(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n + j) * n + k;
    }
    double coord(int i) const { return -L + h * i; }
    Vec3 point(int i, int j, int k) const {
        return {coord(i), coord(j), coord(k)};
    }
    bool operator==(const CartesianGrid& o) const {
        return n == o.n && L == o.L;
    }
};

template <class T>
struct Field3 {
    CartesianGrid grid;
    std::vector<T> v;

    Field3() = default;
    explicit Field3(const CartesianGrid& g) : grid(g), v(g.size()) {}
    T& operator()(int i, int j, int k) { return v[grid.idx(i, j, k)]; }
    const T& operator()(int i, int j, int k) const { return v[grid.idx(i, j, k)]; }
};

using RealField3 = Field3<double>;
using CplxField3 = Field3<std::complex<double>>;

// Grid quadrature: h^3 * sum (midpoint rule; spectrally accurate for smooth
// rapidly decaying integrands).
double integrate(const RealField3& f);
double norm_sq(const CplxField3& psi);  // int |psi|^2

}  // namespace wc
