// Thin RAII wrapper over FFTW3 complex-to-complex 3D transforms, plus the
// spectral differential operators built on them (gradient, Laplacian and the
// free-space Poisson convolution all share the plans cached here).
//
// Transforms are unnormalized: backward(forward(x)) = n^3 * x.  Plan
// creation is serialized behind a mutex (FFTW planning is not thread-safe);
// execution via fftw_execute_dft on distinct arrays is.

#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "wavecorpuscle/grids.hpp"

namespace wc {

class Fft3 {
public:
    explicit Fft3(int n);
    ~Fft3();
    Fft3(const Fft3&) = delete;
    Fft3& operator=(const Fft3&) = delete;

    int n() const { return n_; }
    // In-place transforms on an n^3 complex array.
    void forward(std::complex<double>* data) const;
    void backward(std::complex<double>* data) const;

    // Shared per-size plan cache.
    static std::shared_ptr<Fft3> get(int n);

private:
    int n_;
    void* fwd_;  // fftw_plan
    void* bwd_;
};

// Angular frequencies k_m = (2 pi / (2L)) * m, m = 0..n/2, -n/2+1..-1 for a
// grid of n nodes spanning [-L, L).
std::vector<double> fft_freqs(int n, double L);

// Spectral operators on smooth, box-supported fields (periodic wrap error is
// below the field's tail amplitude).
CplxField3 spectral_laplacian(const CplxField3& psi);
std::array<CplxField3, 3> spectral_gradient(const CplxField3& psi);

// int |grad psi|^2 evaluated in Fourier space (Parseval).
double gradient_norm_sq(const CplxField3& psi);

// H1 inner product <f, g>_{H1} = int conj(f) g + conj(grad f) . grad g.
std::complex<double> h1_inner(const CplxField3& f, const CplxField3& g);

}  // namespace wc
