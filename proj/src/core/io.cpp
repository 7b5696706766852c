#include "wavecorpuscle/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "wavecorpuscle/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

namespace wc {

namespace {

#pragma pack(push, 1)
struct Header {
    char magic[4];
    std::uint8_t dtype;
    std::uint8_t ndim;
    std::uint16_t reserved0;
    std::uint32_t n0, n1, n2;
    double domain;  // unaligned by design: the header is exactly 32 bytes
    std::uint32_t reserved1;
};
#pragma pack(pop)
static_assert(sizeof(Header) == 32, "snapshot header must be 32 bytes");

void write_header(std::ofstream& out, std::uint8_t dtype, std::uint8_t ndim,
                  std::uint32_t n0, std::uint32_t n1, std::uint32_t n2,
                  double domain) {
    Header h{};
    std::memcpy(h.magic, "WCF1", 4);
    h.dtype = dtype;
    h.ndim = ndim;
    h.n0 = n0;
    h.n1 = n1;
    h.n2 = n2;
    h.domain = domain;
    out.write(reinterpret_cast<const char*>(&h), sizeof(h));
}

Header read_header(std::ifstream& in, const std::filesystem::path& path) {
    Header h{};
    in.read(reinterpret_cast<char*>(&h), sizeof(h));
    if (!in || std::memcmp(h.magic, "WCF1", 4) != 0)
        throw ConfigError("file", "not a WCF1 snapshot: " + path.string());
    return h;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const RealField3& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("out", "cannot open " + path.string());
    const auto n = static_cast<std::uint32_t>(f.grid.n);
    write_header(out, 0, 3, n, n, n, f.grid.L);
    out.write(reinterpret_cast<const char*>(f.v.data()),
              static_cast<std::streamsize>(f.v.size() * sizeof(double)));
    if (!out) throw ConfigError("out", "write failed: " + path.string());
}

void write_snapshot(const std::filesystem::path& path, const CplxField3& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("out", "cannot open " + path.string());
    const auto n = static_cast<std::uint32_t>(f.grid.n);
    write_header(out, 1, 3, n, n, n, f.grid.L);
    out.write(reinterpret_cast<const char*>(f.v.data()),
              static_cast<std::streamsize>(f.v.size() * 2 * sizeof(double)));
    if (!out) throw ConfigError("out", "write failed: " + path.string());
}

RealField3 read_snapshot_real(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("file", "cannot open " + path.string());
    const Header h = read_header(in, path);
    if (h.dtype != 0 || h.ndim != 3)
        throw ConfigError("file", "snapshot is not a real 3d field");
    RealField3 f(CartesianGrid::cubic(static_cast<int>(h.n0), h.domain));
    in.read(reinterpret_cast<char*>(f.v.data()),
            static_cast<std::streamsize>(f.v.size() * sizeof(double)));
    if (!in) throw ConfigError("file", "truncated snapshot: " + path.string());
    return f;
}

CplxField3 read_snapshot_cplx(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("file", "cannot open " + path.string());
    const Header h = read_header(in, path);
    if (h.dtype != 1 || h.ndim != 3)
        throw ConfigError("file", "snapshot is not a complex 3d field");
    CplxField3 f(CartesianGrid::cubic(static_cast<int>(h.n0), h.domain));
    in.read(reinterpret_cast<char*>(f.v.data()),
            static_cast<std::streamsize>(f.v.size() * 2 * sizeof(double)));
    if (!in) throw ConfigError("file", "truncated snapshot: " + path.string());
    return f;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("out", "cannot open " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "");
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << format_double(row[i]) << (i + 1 < row.size() ? "," : "");
        out << '\n';
    }
    if (!out) throw ConfigError("out", "write failed: " + path.string());
}

}  // namespace wc
