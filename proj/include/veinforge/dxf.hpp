#pragma once

#include <cstdint>
#include <vector>

#include "veinforge/phantom.hpp"

namespace veinforge {

// Minimal ASCII DXF R12: HEADER section plus one closed POLYLINE entity per
// contour. Formatting is canonical (6 decimals), so export/parse/export is
// byte-identical.
std::vector<std::uint8_t> export_dxf(const ContourSet& cs);
ContourSet parse_dxf(const std::vector<std::uint8_t>& bytes);

} // namespace veinforge
