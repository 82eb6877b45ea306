#pragma once

#include <filesystem>
#include <string>

#include "dbar/complex_grid.hpp"

namespace dbar {

/// GRID binary format: magic "DBGR", u32 version=1, u32 nx, u32 ny (=nx),
/// f64 L, then nx*nx (re, im) f64 pairs, little-endian, row-major.
void write_grid(const std::filesystem::path& path, const ComplexGrid& g);
ComplexGrid read_grid(const std::filesystem::path& path);

/// Boundary samples as CSV with header "theta,re,im".
void write_boundary_csv(const std::filesystem::path& path, const std::vector<cplx>& values);
std::vector<cplx> read_boundary_csv(const std::filesystem::path& path);

}  // namespace dbar
