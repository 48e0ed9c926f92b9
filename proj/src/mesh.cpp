#include "veinforge/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <map>

namespace veinforge {

double TriangleMesh::signed_volume() const {
    double v = 0.0;
    for (const auto& t : triangles)
        v += t.a.dot(t.b.cross(t.c)) / 6.0;
    return v;
}

void TriangleMesh::append(const TriangleMesh& other) {
    triangles.insert(triangles.end(), other.triangles.begin(),
                     other.triangles.end());
}

namespace {

// Ring of vertices around center, lying in the plane spanned by u, v.
std::vector<Vec3> make_ring(const Vec3& center, const Vec3& u, const Vec3& v,
                            double radius, int steps) {
    std::vector<Vec3> ring(static_cast<size_t>(steps), Vec3{});
    for (int i = 0; i < steps; ++i) {
        double a = 2.0 * kPi * double(i) / double(steps);
        ring[i] = center + u * (radius * std::cos(a)) +
                  v * (radius * std::sin(a));
    }
    return ring;
}

// Connects two rings of equal size with outward-facing quads. Assumes ring1
// is further along the outward axis than ring0.
void stitch_rings(TriangleMesh& mesh, const std::vector<Vec3>& ring0,
                  const std::vector<Vec3>& ring1) {
    int n = int(ring0.size());
    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        mesh.triangles.push_back({ring0[i], ring0[j], ring1[i]});
        mesh.triangles.push_back({ring0[j], ring1[j], ring1[i]});
    }
}

// Fan cap; flip controls whether the cap faces the -axis direction.
void cap_ring(TriangleMesh& mesh, const std::vector<Vec3>& ring,
              const Vec3& center, bool flip) {
    int n = int(ring.size());
    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        if (flip)
            mesh.triangles.push_back({center, ring[j], ring[i]});
        else
            mesh.triangles.push_back({center, ring[i], ring[j]});
    }
}

} // namespace

TriangleMesh mesh_cylinder(double radius, double z0, double z1,
                           int angular_steps) {
    if (angular_steps < 8) throw ConfigError("angular_steps must be >= 8");
    if (!(z1 > z0) || radius <= 0.0)
        throw DomainError("degenerate cylinder");
    Vec3 u{1, 0, 0}, v{0, 1, 0};
    auto ring0 = make_ring({0, 0, z0}, u, v, radius, angular_steps);
    auto ring1 = make_ring({0, 0, z1}, u, v, radius, angular_steps);
    TriangleMesh mesh;
    stitch_rings(mesh, ring0, ring1);
    cap_ring(mesh, ring0, {0, 0, z0}, true);
    cap_ring(mesh, ring1, {0, 0, z1}, false);
    return mesh;
}

TriangleMesh mesh_tube(const VeinTube& tube, int angular_steps) {
    if (angular_steps < 8) throw ConfigError("angular_steps must be >= 8");
    tube.validate();

    // Drop zero-length steps so tangents stay well defined.
    std::vector<Vec3> path;
    std::vector<double> radius;
    for (size_t i = 0; i < tube.path.size(); ++i) {
        if (!path.empty() && (tube.path[i] - path.back()).norm() < 1e-12)
            continue;
        path.push_back(tube.path[i]);
        radius.push_back(tube.radius_mm[i]);
    }
    if (path.size() < 2) throw DomainError("vein path collapsed to a point");

    const size_t n = path.size();
    std::vector<Vec3> tangents(n);
    for (size_t i = 0; i < n; ++i) {
        size_t i0 = i > 0 ? i - 1 : i;
        size_t i1 = i + 1 < n ? i + 1 : i;
        tangents[i] = (path[i1] - path[i0]).normalized();
    }

    // Parallel transport of the ring frame along the path.
    Vec3 t0 = tangents[0];
    Vec3 ref = std::abs(t0.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    Vec3 u = t0.cross(ref).normalized();
    Vec3 v = t0.cross(u).normalized();

    std::vector<std::vector<Vec3>> rings(n);
    rings[0] = make_ring(path[0], u, v, radius[0], angular_steps);
    for (size_t i = 1; i < n; ++i) {
        const Vec3& t = tangents[i];
        u = (u - t * u.dot(t)).normalized();
        v = t.cross(u).normalized();
        rings[i] = make_ring(path[i], u, v, radius[i], angular_steps);
    }

    TriangleMesh mesh;
    for (size_t i = 0; i + 1 < n; ++i)
        stitch_rings(mesh, rings[i], rings[i + 1]);
    cap_ring(mesh, rings[0], path[0], true);
    cap_ring(mesh, rings[n - 1], path[n - 1], false);

    // The stitching above faces outward when the rings wind counter-
    // clockwise about the tangent; flip wholesale if the volume came out
    // negative (frame handedness depends on the reference pick).
    if (mesh.signed_volume() < 0.0)
        for (auto& t : mesh.triangles) std::swap(t.b, t.c);
    return mesh;
}

std::map<MaterialId, TriangleMesh> mesh_phantom(
    const FingerPhantomModel& model, int angular_steps) {
    std::map<MaterialId, TriangleMesh> out;
    out[MaterialId::tissue] =
        mesh_cylinder(model.outer_radius_mm, 0.0, model.length_mm,
                      angular_steps);

    TriangleMesh bones;
    for (const auto& b : model.bones) {
        bones.append(mesh_cylinder(b.shaft_radius_mm, b.z_start_mm,
                                   b.z_end_mm, angular_steps));
        bones.append(mesh_cylinder(b.joint_radius_mm, b.z_start_mm,
                                   b.z_start_mm + b.joint_length_mm,
                                   angular_steps));
        bones.append(mesh_cylinder(b.joint_radius_mm,
                                   b.z_end_mm - b.joint_length_mm,
                                   b.z_end_mm, angular_steps));
    }
    out[MaterialId::bone] = std::move(bones);

    TriangleMesh veins;
    for (const auto& v : model.veins)
        veins.append(mesh_tube(v, angular_steps));
    out[MaterialId::vein] = std::move(veins);
    return out;
}

// ---------------------------------------------------------------------------
// Binary STL
// ---------------------------------------------------------------------------

namespace {

void put_f32(std::vector<std::uint8_t>& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    out.push_back(std::uint8_t(bits & 0xff));
    out.push_back(std::uint8_t((bits >> 8) & 0xff));
    out.push_back(std::uint8_t((bits >> 16) & 0xff));
    out.push_back(std::uint8_t((bits >> 24) & 0xff));
}

float get_f32(const std::vector<std::uint8_t>& in, size_t pos) {
    std::uint32_t bits = std::uint32_t(in[pos]) |
                         (std::uint32_t(in[pos + 1]) << 8) |
                         (std::uint32_t(in[pos + 2]) << 16) |
                         (std::uint32_t(in[pos + 3]) << 24);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

} // namespace

std::vector<std::uint8_t> export_stl(const TriangleMesh& mesh) {
    std::vector<std::uint8_t> out;
    out.reserve(84 + mesh.triangles.size() * 50);
    const char header[] = "veinforge binary STL";
    out.resize(80, 0);
    std::memcpy(out.data(), header, sizeof(header) - 1);

    std::uint32_t count = std::uint32_t(mesh.triangles.size());
    for (int i = 0; i < 4; ++i)
        out.push_back(std::uint8_t((count >> (8 * i)) & 0xff));

    for (const auto& t : mesh.triangles) {
        Vec3 n = t.normal();
        put_f32(out, float(n.x));
        put_f32(out, float(n.y));
        put_f32(out, float(n.z));
        for (const Vec3* v : {&t.a, &t.b, &t.c}) {
            put_f32(out, float(v->x));
            put_f32(out, float(v->y));
            put_f32(out, float(v->z));
        }
        out.push_back(0);
        out.push_back(0); // attribute byte count
    }
    return out;
}

TriangleMesh parse_stl(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 84) throw FormatError("STL shorter than header");
    std::uint32_t count = std::uint32_t(bytes[80]) |
                          (std::uint32_t(bytes[81]) << 8) |
                          (std::uint32_t(bytes[82]) << 16) |
                          (std::uint32_t(bytes[83]) << 24);
    if (bytes.size() != 84 + size_t(count) * 50)
        throw FormatError("STL size does not match triangle count");

    TriangleMesh mesh;
    mesh.triangles.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        size_t pos = 84 + size_t(i) * 50 + 12; // skip stored normal
        Triangle t;
        Vec3* vs[3] = {&t.a, &t.b, &t.c};
        for (auto* v : vs) {
            v->x = get_f32(bytes, pos);
            v->y = get_f32(bytes, pos + 4);
            v->z = get_f32(bytes, pos + 8);
            pos += 12;
        }
        mesh.triangles.push_back(t);
    }
    return mesh;
}

bool mesh_is_watertight(const TriangleMesh& mesh) {
    // Vertices generated from shared ring arrays compare bit-equal, so exact
    // coordinates are usable as keys.
    std::map<std::array<double, 3>, int> vertex_ids;
    auto id_of = [&](const Vec3& v) {
        auto [it, inserted] = vertex_ids.try_emplace(
            std::array<double, 3>{v.x, v.y, v.z}, int(vertex_ids.size()));
        return it->second;
    };

    std::map<std::pair<int, int>, int> directed;
    for (const auto& t : mesh.triangles) {
        int ia = id_of(t.a), ib = id_of(t.b), ic = id_of(t.c);
        if (ia == ib || ib == ic || ic == ia) return false;
        ++directed[{ia, ib}];
        ++directed[{ib, ic}];
        ++directed[{ic, ia}];
    }
    for (const auto& [edge, n] : directed) {
        if (n != 1) return false;
        auto rev = directed.find({edge.second, edge.first});
        if (rev == directed.end() || rev->second != 1) return false;
    }
    return true;
}

} // namespace veinforge
