#pragma once

#include <string>
#include <vector>

#include "veinforge/common.hpp"
#include "veinforge/image.hpp"

namespace veinforge {

struct ExtractionConfig {
    // Gaussian scale (px) for the profile derivative filters.
    double sigma_px = 3.0;
    // Fractional contrast drop that defines the vein boundary when measuring
    // widths: the profile is "inside" while below
    //   background - width_fraction * (background - center).
    double width_fraction = 0.5;
    // Half-extent (px) of the perpendicular profile used for width
    // estimation; widths are clamped to this.
    double max_width_px = 16.0;
    // Erosion of the per-column finger band before scoring; suppresses the
    // silhouette-edge response every transillumination image carries.
    double edge_margin_px = 14.0;

    void validate() const;
};

// Accumulated curvature response; zero where no dark-valley was detected.
struct CurvatureScoreMap {
    int width = 0;
    int height = 0;
    std::vector<double> scores; // row-major, >= 0

    double at(int x, int y) const { return scores[size_t(y) * width + x]; }
    double& at(int x, int y) { return scores[size_t(y) * width + x]; }
};

struct BinaryVeinMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> mask; // row-major, 0 or 1

    static BinaryVeinMap zeros(int width, int height);
    bool at(int x, int y) const { return mask[size_t(y) * width + x] != 0; }
    void set(int x, int y, bool v) { mask[size_t(y) * width + x] = v ? 1 : 0; }
    size_t count_true() const;
};

struct SkeletonPoint {
    double x_mm = 0.0;
    double y_mm = 0.0;
    double width_mm = 0.0;
    double depth_mm = 0.0;
};

// Centerline polylines in physical units. Every polyline has >= 2 points.
struct VeinSkeleton {
    std::vector<std::vector<SkeletonPoint>> polylines;

    size_t total_points() const;
    bool empty() const { return polylines.empty(); }
};

// Maximum-curvature valley detector. For each of the four cross-section
// directions (horizontal, vertical, both diagonals) the profile curvature
//   k = P'' / (1 + P'^2)^(3/2)
// is evaluated from Gaussian-derivative filtered image gradients; inside
// each run of positive curvature of width Wr, every local maximum of k
// receives score k * Wr. Direction responses are summed.
CurvatureScoreMap max_curvature_scores(const NirImage& img,
                                       const ExtractionConfig& cfg);

// Line-support filter: each pixel receives, per direction, the minimum of
// the two-sided neighbor maxima
//   min(max(s[-1], s[-2]), max(s[+1], s[+2]))
// summed over the four directions. Isolated responses collapse to zero and
// single-pixel gaps along a line are bridged.
CurvatureScoreMap connect_scores(const CurvatureScoreMap& scores);

// Threshold at the median of the strictly positive scores (strict >).
BinaryVeinMap binarize_median(const CurvatureScoreMap& scores);

// Zhang-Suen thinning to 1-px centerlines, then path tracing. Paths split at
// junction pixels; coordinates are converted to mm via the pitch; width and
// depth start at zero.
VeinSkeleton trace_skeleton(const BinaryVeinMap& mask, double pitch_mm);

// Full-width-at-fractional-contrast width measurement along the local
// perpendicular of each skeleton point, against the source image.
VeinSkeleton estimate_widths(const NirImage& img, const VeinSkeleton& skel,
                             const ExtractionConfig& cfg);

// Per-column finger band: the widest dark run of the column profile,
// eroded by margin_px. Columns without a finger-like band (dark run
// narrower than 35% of the height) stay fully enabled, so images that are
// not transillumination scans pass through untouched.
BinaryVeinMap finger_region(const NirImage& img, double margin_px);

struct ExtractionResult {
    CurvatureScoreMap scores;
    BinaryVeinMap mask;
    VeinSkeleton skeleton;
};

// normalize -> score -> connect -> finger-region suppression -> binarize
// -> trace (+ widths on request).
ExtractionResult extract_veins(const NirImage& img,
                               const ExtractionConfig& cfg,
                               bool with_widths = false);

// Line-oriented VEINSKEL format: header "VEINSKEL 1", one block per
// polyline with "P <x_mm> <y_mm> <width_mm> <depth_mm>" lines, blocks
// separated by a blank line.
std::string save_veinskel(const VeinSkeleton& skel);
VeinSkeleton load_veinskel(const std::string& text);

} // namespace veinforge
