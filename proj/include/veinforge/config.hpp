#pragma once

#include <string>

#include "veinforge/extraction.hpp"
#include "veinforge/materials.hpp"
#include "veinforge/matching.hpp"
#include "veinforge/phantom.hpp"
#include "veinforge/render.hpp"

namespace veinforge {

struct PhantomConfig {
    double outer_radius_mm = 9.0;
    double length_mm = 90.0;
    int n_bones = 3;
    double shaft_radius_mm = 3.0;
    double joint_radius_mm = 4.5;
    double joint_length_mm = 6.0;
    double bone_gap_mm = 3.0;
    double vein_depth_mm = 1.5;
    double min_feature_mm = 0.4;
};

struct EvalConfig {
    double threshold = 30.0;
    double max_rotation_deg = 8.0;
    double max_translation_px = 6.0;
};

// Flat sectioned key=value settings for the whole pipeline; every field has
// a working default.
struct PipelineConfig {
    ExtractionConfig extraction;
    PhantomConfig phantom;
    MaterialPalette materials = default_palette();
    RenderConfig render;
    MatchConfig match;
    EvalConfig eval;
    std::uint64_t seed = 42;

    void validate() const;
};

// "[section]" headers with key=value lines; '#' and ';' start comments.
// Unknown sections or keys are errors.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config_file(const std::string& path);
std::string dump_config(const PipelineConfig& cfg);

} // namespace veinforge
