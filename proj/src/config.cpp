#include "veinforge/config.hpp"

#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "veinforge/image.hpp"

namespace veinforge {

void PipelineConfig::validate() const {
    extraction.validate();
    render.validate();
    match.validate();
    materials.bone.validate();
    materials.tissue.validate();
    materials.vein.validate();
    if (phantom.outer_radius_mm <= 0.0 || phantom.length_mm <= 0.0)
        throw ConfigError("phantom dimensions must be positive");
    if (phantom.vein_depth_mm < 0.0 ||
        phantom.vein_depth_mm >= phantom.outer_radius_mm)
        throw ConfigError("vein depth must lie in [0, R)");
    if (phantom.n_bones < 1) throw ConfigError("need at least one bone");
    if (phantom.min_feature_mm <= 0.0)
        throw ConfigError("min feature must be positive");
    if (eval.threshold < 0.0 || eval.threshold > 100.0)
        throw ConfigError("threshold must lie in [0,100]");
    if (eval.max_rotation_deg < 0.0 || eval.max_translation_px < 0.0)
        throw ConfigError("perturbation bounds must be >= 0");
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig cfg;

    using Setter = std::function<void(const std::string&)>;
    auto num = [](double& slot) {
        return [&slot](const std::string& v) { slot = std::stod(v); };
    };
    auto integer = [](int& slot) {
        return [&slot](const std::string& v) { slot = std::stoi(v); };
    };
    auto text_field = [](std::string& slot) {
        return [&slot](const std::string& v) { slot = v; };
    };

    std::map<std::string, std::map<std::string, Setter>> schema;
    schema["extraction"] = {
        {"sigma_px", num(cfg.extraction.sigma_px)},
        {"width_fraction", num(cfg.extraction.width_fraction)},
        {"max_width_px", num(cfg.extraction.max_width_px)},
        {"edge_margin_px", num(cfg.extraction.edge_margin_px)},
    };
    schema["phantom"] = {
        {"outer_radius_mm", num(cfg.phantom.outer_radius_mm)},
        {"length_mm", num(cfg.phantom.length_mm)},
        {"n_bones", integer(cfg.phantom.n_bones)},
        {"shaft_radius_mm", num(cfg.phantom.shaft_radius_mm)},
        {"joint_radius_mm", num(cfg.phantom.joint_radius_mm)},
        {"joint_length_mm", num(cfg.phantom.joint_length_mm)},
        {"bone_gap_mm", num(cfg.phantom.bone_gap_mm)},
        {"vein_depth_mm", num(cfg.phantom.vein_depth_mm)},
        {"min_feature_mm", num(cfg.phantom.min_feature_mm)},
    };
    schema["materials"] = {
        {"bone_name", text_field(cfg.materials.bone.name)},
        {"bone_infill_percent", num(cfg.materials.bone.infill_percent)},
        {"bone_mu_solid_per_mm", num(cfg.materials.bone.mu_solid_per_mm)},
        {"tissue_name", text_field(cfg.materials.tissue.name)},
        {"tissue_infill_percent", num(cfg.materials.tissue.infill_percent)},
        {"tissue_mu_solid_per_mm",
         num(cfg.materials.tissue.mu_solid_per_mm)},
        {"vein_name", text_field(cfg.materials.vein.name)},
        {"vein_infill_percent", num(cfg.materials.vein.infill_percent)},
        {"vein_mu_solid_per_mm", num(cfg.materials.vein.mu_solid_per_mm)},
    };
    schema["render"] = {
        {"pixel_pitch_mm", num(cfg.render.pixel_pitch_mm)},
        {"i0", num(cfg.render.i0)},
        {"ray_step_mm", num(cfg.render.ray_step_mm)},
        {"scatter_sigma0_mm", num(cfg.render.scatter_sigma0_mm)},
        {"scatter_k", num(cfg.render.scatter_k)},
        {"noise_sigma", num(cfg.render.noise_sigma)},
    };
    schema["match"] = {
        {"cw", integer(cfg.match.cw)},
        {"ch", integer(cfg.match.ch)},
        {"icp_max_iter", integer(cfg.match.icp_max_iter)},
        {"icp_tol_px", num(cfg.match.icp_tol_px)},
    };
    schema["eval"] = {
        {"threshold", num(cfg.eval.threshold)},
        {"max_rotation_deg", num(cfg.eval.max_rotation_deg)},
        {"max_translation_px", num(cfg.eval.max_translation_px)},
        {"seed",
         [&cfg](const std::string& v) { cfg.seed = std::stoull(v); }},
    };

    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("unterminated section header at line " +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (!schema.count(section))
                throw ConfigError("unknown config section [" + section + "]");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key=value at line " +
                              std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("key outside any section at line " +
                              std::to_string(lineno));
        auto& keys = schema[section];
        auto it = keys.find(key);
        if (it == keys.end())
            throw ConfigError("unknown key '" + key + "' in [" + section +
                              "]");
        try {
            it->second(value);
        } catch (const std::exception&) {
            throw ConfigError("bad value for " + section + "." + key + ": " +
                              value);
        }
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config_file(const std::string& path) {
    return parse_config(read_text_file(path));
}

std::string dump_config(const PipelineConfig& cfg) {
    char buf[4096];
    std::snprintf(
        buf, sizeof(buf),
        "[extraction]\n"
        "sigma_px = %g\nwidth_fraction = %g\nmax_width_px = %g\n"
        "edge_margin_px = %g\n\n"
        "[phantom]\n"
        "outer_radius_mm = %g\nlength_mm = %g\nn_bones = %d\n"
        "shaft_radius_mm = %g\njoint_radius_mm = %g\njoint_length_mm = %g\n"
        "bone_gap_mm = %g\nvein_depth_mm = %g\nmin_feature_mm = %g\n\n"
        "[materials]\n"
        "bone_name = %s\nbone_infill_percent = %g\n"
        "bone_mu_solid_per_mm = %g\n"
        "tissue_name = %s\ntissue_infill_percent = %g\n"
        "tissue_mu_solid_per_mm = %g\n"
        "vein_name = %s\nvein_infill_percent = %g\n"
        "vein_mu_solid_per_mm = %g\n\n"
        "[render]\n"
        "pixel_pitch_mm = %g\ni0 = %g\nray_step_mm = %g\n"
        "scatter_sigma0_mm = %g\nscatter_k = %g\nnoise_sigma = %g\n\n"
        "[match]\n"
        "cw = %d\nch = %d\nicp_max_iter = %d\nicp_tol_px = %g\n\n"
        "[eval]\n"
        "threshold = %g\nmax_rotation_deg = %g\nmax_translation_px = %g\n"
        "seed = %llu\n",
        cfg.extraction.sigma_px, cfg.extraction.width_fraction,
        cfg.extraction.max_width_px, cfg.extraction.edge_margin_px,
        cfg.phantom.outer_radius_mm,
        cfg.phantom.length_mm, cfg.phantom.n_bones,
        cfg.phantom.shaft_radius_mm, cfg.phantom.joint_radius_mm,
        cfg.phantom.joint_length_mm, cfg.phantom.bone_gap_mm,
        cfg.phantom.vein_depth_mm, cfg.phantom.min_feature_mm,
        cfg.materials.bone.name.c_str(), cfg.materials.bone.infill_percent,
        cfg.materials.bone.mu_solid_per_mm,
        cfg.materials.tissue.name.c_str(),
        cfg.materials.tissue.infill_percent,
        cfg.materials.tissue.mu_solid_per_mm,
        cfg.materials.vein.name.c_str(), cfg.materials.vein.infill_percent,
        cfg.materials.vein.mu_solid_per_mm, cfg.render.pixel_pitch_mm,
        cfg.render.i0, cfg.render.ray_step_mm, cfg.render.scatter_sigma0_mm,
        cfg.render.scatter_k, cfg.render.noise_sigma, cfg.match.cw,
        cfg.match.ch, cfg.match.icp_max_iter, cfg.match.icp_tol_px,
        cfg.eval.threshold, cfg.eval.max_rotation_deg,
        cfg.eval.max_translation_px,
        static_cast<unsigned long long>(cfg.seed));
    return buf;
}

} // namespace veinforge
