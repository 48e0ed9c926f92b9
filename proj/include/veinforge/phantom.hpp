#pragma once

#include <string>
#include <vector>

#include "veinforge/common.hpp"
#include "veinforge/extraction.hpp"
#include "veinforge/materials.hpp"

namespace veinforge {

// Bone with thicker cylindrical joint caps at both ends. The cylinder axis
// is the model z axis.
struct BoneSegment {
    double z_start_mm = 0.0;
    double z_end_mm = 0.0;
    double shaft_radius_mm = 0.0;
    double joint_radius_mm = 0.0;
    double joint_length_mm = 0.0;

    double span() const { return z_end_mm - z_start_mm; }
    void validate() const;
};

// Tube swept along a 3D path with a per-point radius.
struct VeinTube {
    std::vector<Vec3> path;
    std::vector<double> radius_mm; // one entry per path point

    void validate() const;
};

enum class MaterialId { air, tissue, bone, vein };

std::string material_name(MaterialId id);

struct FingerPhantomModel {
    double outer_radius_mm = 9.0;
    double length_mm = 90.0;
    double vein_depth_mm = 1.5; // outer surface to vein centerline
    std::vector<BoneSegment> bones;
    std::vector<VeinTube> veins;
    MaterialPalette materials;

    const MaterialSpec& spec_for(MaterialId id) const;
};

// Closed 2D polygons (first vertex implicitly joined to the last).
struct ContourSet {
    std::vector<std::vector<Vec2>> contours;
};

struct PrinterConstraints {
    double min_feature_mm = 0.4;
};

// Unrolls the 2D skeleton onto a cylinder of radius R at the given depth
// below the surface. Lateral image distance maps isometrically to arc
// length; x maps to the axial coordinate.
std::vector<VeinTube> project_to_cylinder(const VeinSkeleton& skel,
                                          double outer_radius_mm,
                                          double depth_mm,
                                          double image_center_y_mm);

// Evenly partitions the length into n bones separated by gaps.
std::vector<BoneSegment> build_bone_layout(double length_mm, int n_bones,
                                           double shaft_radius_mm,
                                           double joint_radius_mm,
                                           double joint_length_mm,
                                           double gap_mm);

// Validates containment (bones inside the cylinder and non-overlapping,
// veins clear of bones and of the outer surface) and assembles the model.
// Soft tissue is everything inside the cylinder not claimed by a bone or
// vein.
FingerPhantomModel assemble_phantom(std::vector<BoneSegment> bones,
                                    std::vector<VeinTube> veins,
                                    double outer_radius_mm, double length_mm,
                                    double vein_depth_mm,
                                    MaterialPalette materials);

// Point classification with priority vein > bone > tissue; anything outside
// the cylinder is air.
MaterialId material_at(const FingerPhantomModel& model, const Vec3& p);

struct PrintabilityReport {
    FingerPhantomModel model;
    size_t raised_points = 0;
};

// Raises every vein diameter below the printer's minimum feature size to
// exactly that size. Idempotent; never shrinks a vein.
PrintabilityReport enforce_printability(const FingerPhantomModel& model,
                                        const PrinterConstraints& pc);

// Outlines each polyline at width/2 on both sides with semicircular end
// caps, cap_segments interior vertices per cap. Vertex count per contour is
// 2 * points + 2 * cap_segments.
ContourSet skeleton_to_contours(const VeinSkeleton& skel,
                                int cap_segments = 16);

double polygon_area(const std::vector<Vec2>& polygon);

// JSON phantom description used by the CLI to hand a built model to the
// renderer.
std::string save_phantom_json(const FingerPhantomModel& model);
FingerPhantomModel load_phantom_json(const std::string& text);

} // namespace veinforge
