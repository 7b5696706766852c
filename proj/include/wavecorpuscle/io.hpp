// On-disk formats.
//
// Field snapshot (binary, little-endian), 32-byte header:
//   offset  size  field
//   0       4     magic "WCF1"
//   4       1     dtype: 0 = float64 (real), 1 = 2x float64 (complex)
//   5       1     ndim: 1 (radial) or 3 (cartesian cube)
//   6       2     reserved, zero
//   8       4     n0 (radial: node count; cartesian: n per axis)
//   12      4     n1 (1 for radial)
//   16      4     n2 (1 for radial)
//   20      8     domain: cartesian half-width L / radial r_max (float64)
//   28      4     reserved, zero
// followed by the payload in row-major order (x slowest, z fastest);
// complex values interleaved (re, im).  Radial payloads carry the node
// values on the uniform grid r_i = (i+1) r_max / n0.
//
// CSV writers use '.' decimal points and enough digits to round-trip
// doubles; rows end with '\n'.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wavecorpuscle/grids.hpp"

namespace wc {

void write_snapshot(const std::filesystem::path& path, const RealField3& f);
void write_snapshot(const std::filesystem::path& path, const CplxField3& f);
RealField3 read_snapshot_real(const std::filesystem::path& path);
CplxField3 read_snapshot_cplx(const std::filesystem::path& path);

// Generic CSV: header row + rows of doubles.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string format_double(double v);  // shortest round-trip representation

}  // namespace wc
