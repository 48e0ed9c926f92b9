#include "veinforge/phantom.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace veinforge {

void BoneSegment::validate() const {
    if (!(z_end_mm > z_start_mm)) throw DomainError("bone span must be positive");
    if (shaft_radius_mm <= 0.0) throw DomainError("shaft radius must be > 0");
    if (joint_radius_mm < shaft_radius_mm)
        throw DomainError("joint radius must be >= shaft radius");
    if (joint_length_mm <= 0.0) throw DomainError("joint length must be > 0");
    if (2.0 * joint_length_mm >= span())
        throw DomainError("joints longer than bone span");
}

void VeinTube::validate() const {
    if (path.size() < 2) throw DomainError("vein path needs >= 2 points");
    if (radius_mm.size() != path.size())
        throw DomainError("vein radius count must match path points");
    for (double r : radius_mm)
        if (r <= 0.0) throw DomainError("vein radius must be > 0");
}

std::string material_name(MaterialId id) {
    switch (id) {
        case MaterialId::air: return "air";
        case MaterialId::tissue: return "tissue";
        case MaterialId::bone: return "bone";
        case MaterialId::vein: return "vein";
    }
    return "air";
}

const MaterialSpec& FingerPhantomModel::spec_for(MaterialId id) const {
    switch (id) {
        case MaterialId::bone: return materials.bone;
        case MaterialId::vein: return materials.vein;
        default: return materials.tissue;
    }
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

std::vector<VeinTube> project_to_cylinder(const VeinSkeleton& skel,
                                          double outer_radius_mm,
                                          double depth_mm,
                                          double image_center_y_mm) {
    if (!(depth_mm >= 0.0 && depth_mm < outer_radius_mm))
        throw DomainError("vein depth must lie in [0, R)");
    const double rc = outer_radius_mm - depth_mm; // centerline radius

    std::vector<VeinTube> tubes;
    tubes.reserve(skel.polylines.size());
    for (const auto& pl : skel.polylines) {
        VeinTube tube;
        tube.path.reserve(pl.size());
        tube.radius_mm.reserve(pl.size());
        for (const auto& p : pl) {
            double offset = p.y_mm - image_center_y_mm;
            if (!(std::abs(offset) < kPi * rc))
                throw DomainError("vein pattern wider than half-circumference");
            double theta = offset / rc;
            tube.path.push_back(
                {rc * std::sin(theta), -rc * std::cos(theta), p.x_mm});
            tube.radius_mm.push_back(p.width_mm / 2.0);
        }
        tube.validate();
        tubes.push_back(std::move(tube));
    }
    return tubes;
}

std::vector<BoneSegment> build_bone_layout(double length_mm, int n_bones,
                                           double shaft_radius_mm,
                                           double joint_radius_mm,
                                           double joint_length_mm,
                                           double gap_mm) {
    if (n_bones < 1) throw DomainError("need at least one bone");
    if (gap_mm < 0.0) throw DomainError("gap must be nonnegative");
    double span =
        (length_mm - double(n_bones - 1) * gap_mm) / double(n_bones);
    if (!(span > 2.0 * joint_length_mm))
        throw DomainError("bone layout infeasible: joints exceed span");

    std::vector<BoneSegment> bones;
    bones.reserve(size_t(n_bones));
    for (int i = 0; i < n_bones; ++i) {
        BoneSegment b;
        b.z_start_mm = double(i) * (span + gap_mm);
        b.z_end_mm = b.z_start_mm + span;
        b.shaft_radius_mm = shaft_radius_mm;
        b.joint_radius_mm = joint_radius_mm;
        b.joint_length_mm = joint_length_mm;
        b.validate();
        bones.push_back(b);
    }
    return bones;
}

namespace {

// Distance from p to the closed axis-aligned cylinder z in [z0,z1],
// radius r (0 inside).
double dist_to_zcylinder(const Vec3& p, double z0, double z1, double r) {
    double rho = std::hypot(p.x, p.y);
    double dz = std::max({z0 - p.z, p.z - z1, 0.0});
    double dr = std::max(rho - r, 0.0);
    return std::hypot(dz, dr);
}

double dist_to_bone(const Vec3& p, const BoneSegment& b) {
    double d = dist_to_zcylinder(p, b.z_start_mm, b.z_end_mm,
                                 b.shaft_radius_mm);
    d = std::min(d, dist_to_zcylinder(p, b.z_start_mm,
                                      b.z_start_mm + b.joint_length_mm,
                                      b.joint_radius_mm));
    d = std::min(d, dist_to_zcylinder(p, b.z_end_mm - b.joint_length_mm,
                                      b.z_end_mm, b.joint_radius_mm));
    return d;
}

bool point_in_bone(const Vec3& p, const BoneSegment& b) {
    return dist_to_bone(p, b) == 0.0;
}

// Squared distance from p to segment ab, and the closest parameter t.
double segment_dist2(const Vec3& p, const Vec3& a, const Vec3& b,
                     double& t_out) {
    Vec3 d = b - a;
    double l2 = d.dot(d);
    double t = l2 > 0.0 ? std::clamp((p - a).dot(d) / l2, 0.0, 1.0) : 0.0;
    Vec3 c = a + d * t;
    t_out = t;
    Vec3 e = p - c;
    return e.dot(e);
}

bool point_in_tube(const Vec3& p, const VeinTube& tube) {
    for (size_t i = 0; i + 1 < tube.path.size(); ++i) {
        double t;
        double d2 = segment_dist2(p, tube.path[i], tube.path[i + 1], t);
        double r = tube.radius_mm[i] +
                   t * (tube.radius_mm[i + 1] - tube.radius_mm[i]);
        if (d2 < r * r) return true;
    }
    return false;
}

} // namespace

FingerPhantomModel assemble_phantom(std::vector<BoneSegment> bones,
                                    std::vector<VeinTube> veins,
                                    double outer_radius_mm, double length_mm,
                                    double vein_depth_mm,
                                    MaterialPalette materials) {
    if (outer_radius_mm <= 0.0 || length_mm <= 0.0)
        throw DomainError("cylinder dimensions must be positive");
    if (vein_depth_mm < 0.0) throw DomainError("vein depth must be >= 0");
    materials.bone.validate();
    materials.tissue.validate();
    materials.vein.validate();

    std::sort(bones.begin(), bones.end(),
              [](const BoneSegment& a, const BoneSegment& b) {
                  return a.z_start_mm < b.z_start_mm;
              });
    for (size_t i = 0; i < bones.size(); ++i) {
        bones[i].validate();
        if (bones[i].joint_radius_mm > outer_radius_mm ||
            bones[i].z_start_mm < 0.0 || bones[i].z_end_mm > length_mm)
            throw DomainError("bone outside cylinder");
        if (i > 0 && bones[i].z_start_mm < bones[i - 1].z_end_mm)
            throw DomainError("bones overlap in z");
    }

    double max_vein_radius = 0.0;
    for (const auto& tube : veins) {
        tube.validate();
        for (size_t i = 0; i < tube.path.size(); ++i) {
            const Vec3& p = tube.path[i];
            double r = tube.radius_mm[i];
            max_vein_radius = std::max(max_vein_radius, r);
            if (std::hypot(p.x, p.y) + r > outer_radius_mm)
                throw DomainError("vein pierces outer surface");
            for (const auto& b : bones)
                if (dist_to_bone(p, b) < r)
                    throw DomainError("vein intersects bone");
        }
    }
    if (!veins.empty() && !(vein_depth_mm + max_vein_radius < outer_radius_mm))
        throw DomainError("vein depth plus radius exceeds cylinder radius");

    FingerPhantomModel model;
    model.outer_radius_mm = outer_radius_mm;
    model.length_mm = length_mm;
    model.vein_depth_mm = vein_depth_mm;
    model.bones = std::move(bones);
    model.veins = std::move(veins);
    model.materials = std::move(materials);
    return model;
}

MaterialId material_at(const FingerPhantomModel& model, const Vec3& p) {
    double rho = std::hypot(p.x, p.y);
    if (rho > model.outer_radius_mm || p.z < 0.0 || p.z > model.length_mm)
        return MaterialId::air;
    for (const auto& tube : model.veins)
        if (point_in_tube(p, tube)) return MaterialId::vein;
    for (const auto& b : model.bones)
        if (point_in_bone(p, b)) return MaterialId::bone;
    return MaterialId::tissue;
}

PrintabilityReport enforce_printability(const FingerPhantomModel& model,
                                        const PrinterConstraints& pc) {
    if (pc.min_feature_mm <= 0.0)
        throw ConfigError("printer min feature must be > 0");
    PrintabilityReport report;
    report.model = model;
    double min_radius = pc.min_feature_mm / 2.0;
    for (auto& tube : report.model.veins) {
        for (double& r : tube.radius_mm) {
            if (r < min_radius) {
                r = min_radius;
                ++report.raised_points;
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Contours
// ---------------------------------------------------------------------------

ContourSet skeleton_to_contours(const VeinSkeleton& skel, int cap_segments) {
    if (cap_segments < 1) throw ConfigError("cap_segments must be >= 1");
    ContourSet cs;
    for (const auto& pl : skel.polylines) {
        for (const auto& p : pl)
            if (p.width_mm <= 0.0)
                throw DomainError("zero-width skeleton point in contour");

        const size_t n = pl.size();
        std::vector<Vec2> left(n), right(n);
        for (size_t i = 0; i < n; ++i) {
            size_t i0 = i > 0 ? i - 1 : i;
            size_t i1 = i + 1 < n ? i + 1 : i;
            Vec2 t{pl[i1].x_mm - pl[i0].x_mm, pl[i1].y_mm - pl[i0].y_mm};
            double tn = t.norm();
            Vec2 nrm = tn > 0 ? Vec2{-t.y / tn, t.x / tn} : Vec2{0.0, 1.0};
            double r = pl[i].width_mm / 2.0;
            Vec2 c{pl[i].x_mm, pl[i].y_mm};
            left[i] = c + nrm * r;
            right[i] = c - nrm * r;
        }

        // Semicircular arc from `from` half a turn clockwise around `center`,
        // emitting cap_segments interior vertices. With the left side
        // traversed forward and the right side backward, the clockwise half
        // turn always wraps around the outside of the path end.
        auto emit_cap = [&](std::vector<Vec2>& out, const Vec2& center,
                            const Vec2& from) {
            double a0 = std::atan2(from.y - center.y, from.x - center.x);
            double r = (from - center).norm();
            for (int s = 1; s <= cap_segments; ++s) {
                double a = a0 - kPi * double(s) / double(cap_segments + 1);
                out.push_back({center.x + r * std::cos(a),
                               center.y + r * std::sin(a)});
            }
        };

        std::vector<Vec2> poly;
        poly.reserve(2 * n + 2 * size_t(cap_segments));
        for (size_t i = 0; i < n; ++i) poly.push_back(left[i]);
        emit_cap(poly, {pl[n - 1].x_mm, pl[n - 1].y_mm}, left[n - 1]);
        for (size_t i = n; i-- > 0;) poly.push_back(right[i]);
        emit_cap(poly, {pl[0].x_mm, pl[0].y_mm}, right[0]);
        cs.contours.push_back(std::move(poly));
    }
    return cs;
}

double polygon_area(const std::vector<Vec2>& polygon) {
    double a = 0.0;
    for (size_t i = 0; i < polygon.size(); ++i) {
        const Vec2& p = polygon[i];
        const Vec2& q = polygon[(i + 1) % polygon.size()];
        a += p.cross(q);
    }
    return 0.5 * std::abs(a);
}

// ---------------------------------------------------------------------------
// JSON description
// ---------------------------------------------------------------------------

namespace {

nlohmann::json material_to_json(const MaterialSpec& m) {
    return {{"name", m.name},
            {"infill_percent", m.infill_percent},
            {"mu_solid_per_mm", m.mu_solid_per_mm}};
}

MaterialSpec material_from_json(const nlohmann::json& j) {
    MaterialSpec m;
    m.name = j.at("name").get<std::string>();
    m.infill_percent = j.at("infill_percent").get<double>();
    m.mu_solid_per_mm = j.at("mu_solid_per_mm").get<double>();
    return m;
}

} // namespace

std::string save_phantom_json(const FingerPhantomModel& model) {
    nlohmann::json j;
    j["format"] = "veinforge-phantom-1";
    j["outer_radius_mm"] = model.outer_radius_mm;
    j["length_mm"] = model.length_mm;
    j["vein_depth_mm"] = model.vein_depth_mm;
    j["materials"] = {{"bone", material_to_json(model.materials.bone)},
                      {"tissue", material_to_json(model.materials.tissue)},
                      {"vein", material_to_json(model.materials.vein)}};
    j["bones"] = nlohmann::json::array();
    for (const auto& b : model.bones)
        j["bones"].push_back({{"z_start_mm", b.z_start_mm},
                              {"z_end_mm", b.z_end_mm},
                              {"shaft_radius_mm", b.shaft_radius_mm},
                              {"joint_radius_mm", b.joint_radius_mm},
                              {"joint_length_mm", b.joint_length_mm}});
    j["veins"] = nlohmann::json::array();
    for (const auto& v : model.veins) {
        nlohmann::json tube;
        tube["path"] = nlohmann::json::array();
        for (const auto& p : v.path) tube["path"].push_back({p.x, p.y, p.z});
        tube["radius_mm"] = v.radius_mm;
        j["veins"].push_back(std::move(tube));
    }
    return j.dump(2) + "\n";
}

FingerPhantomModel load_phantom_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad phantom JSON: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "veinforge-phantom-1")
            throw FormatError("unknown phantom format tag");
        std::vector<BoneSegment> bones;
        for (const auto& bj : j.at("bones")) {
            BoneSegment b;
            b.z_start_mm = bj.at("z_start_mm").get<double>();
            b.z_end_mm = bj.at("z_end_mm").get<double>();
            b.shaft_radius_mm = bj.at("shaft_radius_mm").get<double>();
            b.joint_radius_mm = bj.at("joint_radius_mm").get<double>();
            b.joint_length_mm = bj.at("joint_length_mm").get<double>();
            bones.push_back(b);
        }
        std::vector<VeinTube> veins;
        for (const auto& vj : j.at("veins")) {
            VeinTube t;
            for (const auto& pj : vj.at("path"))
                t.path.push_back({pj.at(0).get<double>(),
                                  pj.at(1).get<double>(),
                                  pj.at(2).get<double>()});
            t.radius_mm = vj.at("radius_mm").get<std::vector<double>>();
            veins.push_back(std::move(t));
        }
        MaterialPalette mats;
        mats.bone = material_from_json(j.at("materials").at("bone"));
        mats.tissue = material_from_json(j.at("materials").at("tissue"));
        mats.vein = material_from_json(j.at("materials").at("vein"));
        return assemble_phantom(std::move(bones), std::move(veins),
                                j.at("outer_radius_mm").get<double>(),
                                j.at("length_mm").get<double>(),
                                j.at("vein_depth_mm").get<double>(),
                                std::move(mats));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad phantom JSON: ") + e.what());
    }
}

} // namespace veinforge
