#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "veinforge/common.hpp"
#include "veinforge/phantom.hpp"

namespace veinforge {

struct Triangle {
    Vec3 a, b, c;

    Vec3 normal() const { return (b - a).cross(c - a).normalized(); }
    double area() const { return 0.5 * (b - a).cross(c - a).norm(); }
};

// Triangle soup with consistent outward (counterclockwise) winding.
struct TriangleMesh {
    std::vector<Triangle> triangles;

    // Signed volume via the divergence theorem; positive for outward
    // winding.
    double signed_volume() const;

    void append(const TriangleMesh& other);
};

// One closed mesh per printed material. Tissue is the full outer cylinder;
// bones and veins are separate overlapping solids, mirroring dual-extrusion
// slicing where the later body wins, in the same priority order material_at
// uses.
std::map<MaterialId, TriangleMesh> mesh_phantom(
    const FingerPhantomModel& model, int angular_steps = 64);

// Closed cylinder along z from z0 to z1.
TriangleMesh mesh_cylinder(double radius, double z0, double z1,
                           int angular_steps);

// Closed swept tube with end caps; rings are parallel-transported along the
// path to avoid twist.
TriangleMesh mesh_tube(const VeinTube& tube, int angular_steps);

// Binary STL: 80-byte header, little-endian u32 count, 50 bytes per
// triangle (normal + 3 vertices as float32, u16 attribute 0).
std::vector<std::uint8_t> export_stl(const TriangleMesh& mesh);
TriangleMesh parse_stl(const std::vector<std::uint8_t>& bytes);

// True when every edge is shared by exactly two triangles (orientation
// counted: each directed edge appears once).
bool mesh_is_watertight(const TriangleMesh& mesh);

} // namespace veinforge
