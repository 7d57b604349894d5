#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gsmlab/homogenize/grid.hpp"

namespace gsmlab::homogenize {

// A single spherocylinder (capsule) inclusion with id 1 in a matrix with id 0,
// periodic, axis random in the x-y plane, center random; radius chosen for the
// requested volume fraction at a total length of 3/4 of the smallest edge.
std::vector<std::uint16_t> spherocylinder_fiber(const GridDims& dims, double volume_fraction, std::uint64_t seed);

// Raw little-endian material ids plus a JSON sidecar next to it.
struct Geometry {
  GridDims dims;
  std::vector<std::uint16_t> ids;
  std::string sidecar_json;  // material table and other metadata, verbatim
};

// Reads `<path>` (the sidecar, JSON with "dims", "dtype" = "u8"|"u16", "raw").
Geometry read_geometry(const std::filesystem::path& sidecar);
void write_geometry(const std::filesystem::path& sidecar, const GridDims& dims, const std::vector<std::uint16_t>& ids,
                    const std::string& materials_json = "[]");

}  // namespace gsmlab::homogenize
