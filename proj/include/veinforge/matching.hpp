#pragma once

#include <vector>

#include "veinforge/common.hpp"
#include "veinforge/extraction.hpp"

namespace veinforge {

// Rigid map q = R(rotation) * p + translation over pixel coordinates.
struct RigidTransform2D {
    double rotation_deg = 0.0;
    Vec2 translation; // px

    Vec2 apply(const Vec2& p) const;
    RigidTransform2D inverse() const;
};

struct MatchConfig {
    int cw = 30; // max horizontal correlation displacement (px)
    int ch = 30; // max vertical correlation displacement (px)
    int icp_max_iter = 50;
    double icp_tol_px = 0.01;

    void validate() const;
};

struct IcpResult {
    RigidTransform2D transform;
    bool degenerate = false; // fewer than 2 points on either side
    int iterations = 0;
    double mean_distance_px = 0.0;
    // Mean nearest-neighbor distance after each accepted iteration;
    // non-increasing by construction.
    std::vector<double> distance_trace;
};

// Point-to-point rigid ICP: nearest neighbors on a uniform grid, then the
// closed-form 2D fit (rotation from atan2 of summed cross/dot products
// about the centroids). Stops when the mean correspondence distance
// improves by less than icp_tol_px.
IcpResult icp_align(const std::vector<Vec2>& probe_pts,
                    const std::vector<Vec2>& gallery_pts,
                    const MatchConfig& cfg);

// Nearest-neighbor resampling of the mask under rotation+translation about
// the image center. Out-of-frame pixels are false.
BinaryVeinMap apply_transform(const BinaryVeinMap& mask,
                              const RigidTransform2D& t);

// Maximum overlap ratio over displacements |u| <= cw, |v| <= ch of the
// probe against the margin-cropped gallery:
//   overlap / (probe_true + gallery_true)  within the compared region.
// 0.5 means the regions coincide exactly at the best displacement.
double miura_correlation(const BinaryVeinMap& probe,
                         const BinaryVeinMap& gallery,
                         const MatchConfig& cfg);

struct MatchScore {
    double value = 0.0; // [0, 100]
};

// Maps the [0, 0.5] overlap ratio onto 0-100.
MatchScore score_to_100(double ratio);

// Full pipeline: extract both patterns, ICP-align the probe skeleton to the
// gallery skeleton, resample the probe mask, correlate, and map the score.
MatchScore compare(const NirImage& probe_img, const NirImage& gallery_img,
                   const ExtractionConfig& ecfg, const MatchConfig& mcfg);

// Pattern pieces reused across many comparisons of the same image.
struct MatchFeatures {
    BinaryVeinMap mask;
    std::vector<Vec2> points; // skeleton points in px
};

MatchFeatures extract_match_features(const NirImage& img,
                                     const ExtractionConfig& ecfg);

MatchScore compare_features(const MatchFeatures& probe,
                            const MatchFeatures& gallery,
                            const MatchConfig& mcfg);

} // namespace veinforge
