#include "wavecorpuscle/fft.hpp"

#include <fftw3.h>

#include <array>
#include <map>
#include <mutex>

#include "wavecorpuscle/constants.hpp"
#include "wavecorpuscle/errors.hpp"

namespace wc {

namespace {
std::mutex plan_mutex;
}

Fft3::Fft3(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    // Plan on a scratch array so construction does not disturb caller data;
    // FFTW_ESTIMATE keeps planning deterministic and cheap.
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n) * n * n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fwd_ = fftw_plan_dft_3d(n, n, n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_3d(n, n, n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw NumericalError("FFTW plan creation failed");
}

Fft3::~Fft3() {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void Fft3::forward(std::complex<double>* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void Fft3::backward(std::complex<double>* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(bwd_), p, p);
}

std::shared_ptr<Fft3> Fft3::get(int n) {
    static std::mutex cache_mutex;
    static std::map<int, std::weak_ptr<Fft3>> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (auto sp = cache[n].lock()) return sp;
    auto sp = std::make_shared<Fft3>(n);
    cache[n] = sp;
    return sp;
}

std::vector<double> fft_freqs(int n, double L) {
    std::vector<double> k(n);
    const double dk = constants::pi / L;  // 2 pi / (2 L)
    for (int m = 0; m < n; ++m) k[m] = dk * (m <= n / 2 ? m : m - n);
    return k;
}

CplxField3 spectral_laplacian(const CplxField3& psi) {
    const int n = psi.grid.n;
    auto fft = Fft3::get(n);
    CplxField3 out = psi;
    fft->forward(out.v.data());
    const auto k = fft_freqs(n, psi.grid.L);
    const double scale = 1.0 / (static_cast<double>(n) * n * n);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l, ++idx)
                out.v[idx] *= -(k[i] * k[i] + k[j] * k[j] + k[l] * k[l]) * scale;
    fft->backward(out.v.data());
    return out;
}

std::array<CplxField3, 3> spectral_gradient(const CplxField3& psi) {
    const int n = psi.grid.n;
    auto fft = Fft3::get(n);
    CplxField3 hat = psi;
    fft->forward(hat.v.data());
    const auto k = fft_freqs(n, psi.grid.L);
    const double scale = 1.0 / (static_cast<double>(n) * n * n);
    std::array<CplxField3, 3> grad{CplxField3(psi.grid), CplxField3(psi.grid),
                                   CplxField3(psi.grid)};
    const std::complex<double> I(0, 1);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l, ++idx) {
                const auto base = hat.v[idx] * scale;
                grad[0].v[idx] = I * k[i] * base;
                grad[1].v[idx] = I * k[j] * base;
                grad[2].v[idx] = I * k[l] * base;
            }
    for (auto& gcomp : grad) fft->backward(gcomp.v.data());
    return grad;
}

double gradient_norm_sq(const CplxField3& psi) {
    const int n = psi.grid.n;
    auto fft = Fft3::get(n);
    CplxField3 hat = psi;
    fft->forward(hat.v.data());
    const auto k = fft_freqs(n, psi.grid.L);
    // Parseval: int |grad psi|^2 = sum k^2 |psi_hat|^2 * h^3 / n^3.
    double sum = 0;
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l, ++idx)
                sum += (k[i] * k[i] + k[j] * k[j] + k[l] * k[l]) *
                       std::norm(hat.v[idx]);
    const double h = psi.grid.h;
    const double n3 = static_cast<double>(n) * n * n;
    return sum * h * h * h / n3;
}

std::complex<double> h1_inner(const CplxField3& f, const CplxField3& g) {
    if (!(f.grid == g.grid)) throw ConfigError("grid", "H1 inner product needs matching grids");
    const double h3 = f.grid.h * f.grid.h * f.grid.h;
    std::complex<double> l2(0, 0);
    for (std::size_t i = 0; i < f.v.size(); ++i) l2 += std::conj(f.v[i]) * g.v[i];
    const auto gf = spectral_gradient(f);
    const auto gg = spectral_gradient(g);
    std::complex<double> grad(0, 0);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < f.v.size(); ++i)
            grad += std::conj(gf[c].v[i]) * gg[c].v[i];
    return (l2 + grad) * h3;
}

}  // namespace wc
