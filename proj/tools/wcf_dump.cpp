// Inspector for .wcf field snapshots: prints the 32-byte header (magic,
// dtype, dimensionality, extents, box half-width) and, for 3-d payloads,
// basic statistics of the stored field.  Useful for checking dynamics
// snapshot output without a plotting stack.

#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>

#include "wavecorpuscle/grids.hpp"
#include "wavecorpuscle/io.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: wcf_dump FILE.wcf\n";
        return 2;
    }
    const std::string path = argv[1];
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot open " << path << "\n";
        return 2;
    }
    // 32-byte header: magic[4], u8 dtype, u8 ndim, u16 reserved,
    // u32 n0/n1/n2, f64 domain (unaligned), u32 reserved.
    char raw[32];
    in.read(raw, sizeof raw);
    char magic[4];
    std::uint8_t dtype = 0, ndim = 0;
    std::uint32_t n0 = 0, n1 = 0, n2 = 0;
    double domain = 0;
    std::memcpy(magic, raw, 4);
    std::memcpy(&dtype, raw + 4, 1);
    std::memcpy(&ndim, raw + 5, 1);
    std::memcpy(&n0, raw + 8, 4);
    std::memcpy(&n1, raw + 12, 4);
    std::memcpy(&n2, raw + 16, 4);
    std::memcpy(&domain, raw + 20, 8);
    if (!in || std::memcmp(magic, "WCF1", 4) != 0) {
        std::cerr << path << ": not a WCF1 snapshot\n";
        return 2;
    }
    std::cout << "magic   WCF1\n"
              << "dtype   " << (dtype == 0 ? "real" : "complex") << "\n"
              << "ndim    " << int(ndim) << "\n"
              << "extent  " << n0 << " x " << n1 << " x " << n2 << "\n"
              << "domain  " << wc::format_double(domain) << "\n";
    if (ndim != 3) return 0;

    try {
        if (dtype == 0) {
            const auto f = wc::read_snapshot_real(path);
            double lo = f.v[0], hi = f.v[0], sum = 0;
            for (double x : f.v) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
                sum += x;
            }
            std::cout << "min     " << wc::format_double(lo) << "\n"
                      << "max     " << wc::format_double(hi) << "\n"
                      << "mean    " << wc::format_double(sum / double(f.v.size()))
                      << "\n";
        } else {
            const auto f = wc::read_snapshot_cplx(path);
            double lo = std::abs(f.v[0]), hi = lo, sum2 = 0;
            for (const auto& z : f.v) {
                const double a = std::abs(z);
                lo = std::min(lo, a);
                hi = std::max(hi, a);
                sum2 += a * a;
            }
            const double h = f.grid.h;
            std::cout << "|min|   " << wc::format_double(lo) << "\n"
                      << "|max|   " << wc::format_double(hi) << "\n"
                      << "norm^2  " << wc::format_double(sum2 * h * h * h)
                      << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "payload error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
