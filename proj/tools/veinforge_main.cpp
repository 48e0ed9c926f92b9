// veinforge command-line front end: extract / build / render / match /
// evaluate / calibrate / demo.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "veinforge/config.hpp"
#include "veinforge/demo.hpp"
#include "veinforge/dxf.hpp"
#include "veinforge/evaluation.hpp"
#include "veinforge/mesh.hpp"
#include "veinforge/render.hpp"

namespace vf = veinforge;
namespace fs = std::filesystem;

namespace {

vf::PipelineConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return vf::PipelineConfig{};
    return vf::load_config_file(path);
}

// Splits polylines at unmeasurable (zero-width) points so the geometry ops
// only ever see positive widths; returns the number of dropped points.
size_t drop_zero_width(vf::VeinSkeleton& skel) {
    size_t dropped = 0;
    std::vector<std::vector<vf::SkeletonPoint>> kept;
    for (auto& pl : skel.polylines) {
        std::vector<vf::SkeletonPoint> run;
        auto flush = [&]() {
            if (run.size() >= 2) kept.push_back(run);
            else dropped += run.size();
            run.clear();
        };
        for (auto& p : pl) {
            if (p.width_mm > 0.0) {
                run.push_back(p);
            } else {
                ++dropped;
                flush();
            }
        }
        flush();
    }
    skel.polylines = std::move(kept);
    return dropped;
}

vf::DatasetManifest load_manifest_file(const std::string& path) {
    vf::DatasetManifest m = vf::load_manifest(vf::read_text_file(path));
    fs::path base = fs::path(path).parent_path();
    for (auto& e : m.entries) {
        if (!fs::path(e.path).is_absolute())
            e.path = (base / e.path).string();
    }
    return m;
}

int cmd_extract(const std::string& image_path, const std::string& config,
                const std::string& out_base) {
    auto cfg = load_config_or_default(config);
    vf::NirImage img = vf::load_image_file(image_path,
                                           cfg.render.pixel_pitch_mm);
    vf::ExtractionResult res = vf::extract_veins(img, cfg.extraction, true);
    vf::write_binary_file(out_base + ".mask.pgm", vf::save_pgm([&] {
        vf::NirImage m = vf::NirImage::filled(res.mask.width,
                                              res.mask.height, 0.0,
                                              img.pixel_pitch_mm);
        for (size_t i = 0; i < m.pixels.size(); ++i)
            m.pixels[i] = res.mask.mask[i] ? 1.0 : 0.0;
        return m;
    }()));
    vf::write_text_file(out_base + ".skel",
                        vf::save_veinskel(res.skeleton));
    std::printf("mask=%s.mask.pgm skeleton=%s.skel polylines=%zu\n",
                out_base.c_str(), out_base.c_str(),
                res.skeleton.polylines.size());
    return 0;
}

int cmd_build(const std::string& skel_path, const std::string& config,
              const std::string& out_dir) {
    auto cfg = load_config_or_default(config);
    vf::VeinSkeleton skel =
        vf::load_veinskel(vf::read_text_file(skel_path));
    size_t dropped = drop_zero_width(skel);

    const auto& ph = cfg.phantom;
    auto bones = vf::build_bone_layout(ph.length_mm, ph.n_bones,
                                       ph.shaft_radius_mm,
                                       ph.joint_radius_mm,
                                       ph.joint_length_mm, ph.bone_gap_mm);
    auto veins = vf::project_to_cylinder(skel, ph.outer_radius_mm,
                                         ph.vein_depth_mm,
                                         ph.outer_radius_mm);
    auto model = vf::assemble_phantom(bones, veins, ph.outer_radius_mm,
                                      ph.length_mm, ph.vein_depth_mm,
                                      cfg.materials);
    auto printable = vf::enforce_printability(model, {ph.min_feature_mm});

    fs::create_directories(out_dir);
    vf::write_text_file(out_dir + "/phantom.json",
                        vf::save_phantom_json(printable.model));

    auto meshes = vf::mesh_phantom(printable.model);
    vf::write_binary_file(out_dir + "/tissue.stl",
                          vf::export_stl(meshes[vf::MaterialId::tissue]));
    vf::write_binary_file(out_dir + "/bones.stl",
                          vf::export_stl(meshes[vf::MaterialId::bone]));
    vf::write_binary_file(out_dir + "/veins.stl",
                          vf::export_stl(meshes[vf::MaterialId::vein]));
    vf::write_binary_file(out_dir + "/veins.dxf",
                          vf::export_dxf(vf::skeleton_to_contours(skel)));

    std::printf("printability: raised %zu vein points to %.2f mm; "
                "dropped %zu zero-width points\n",
                printable.raised_points, ph.min_feature_mm, dropped);
    return 0;
}

int cmd_render(const std::string& phantom_path, const std::string& config,
               const std::string& out_path, std::uint64_t seed,
               bool seed_set) {
    auto cfg = load_config_or_default(config);
    auto model = vf::load_phantom_json(vf::read_text_file(phantom_path));
    vf::NirImage img = vf::render_nir(model, cfg.render,
                                      seed_set ? seed : cfg.seed);
    vf::save_image_file(img, out_path);
    std::printf("rendered %dx%d -> %s\n", img.width, img.height,
                out_path.c_str());
    return 0;
}

int cmd_match(const std::string& a, const std::string& b,
              const std::string& config) {
    auto cfg = load_config_or_default(config);
    vf::NirImage ia = vf::load_image_file(a, cfg.render.pixel_pitch_mm);
    vf::NirImage ib = vf::load_image_file(b, cfg.render.pixel_pitch_mm);
    vf::MatchScore score = vf::compare(ia, ib, cfg.extraction, cfg.match);
    std::printf("score=%.2f\n", score.value);
    return 0;
}

int cmd_evaluate(const std::vector<std::string>& manifests,
                 const std::string& config, const std::string& out_dir,
                 double threshold, bool threshold_set) {
    auto cfg = load_config_or_default(config);
    double thr = threshold_set ? threshold : cfg.eval.threshold;
    fs::create_directories(out_dir);

    if (manifests.size() == 1) {
        auto m = load_manifest_file(manifests[0]);
        auto plan = vf::enumerate_pairs(m);
        auto report = vf::run_eval(plan, cfg.extraction, cfg.match, thr);
        vf::write_text_file(out_dir + "/hist.csv",
                            vf::export_histograms(report));
        std::string summary =
            vf::format_eval_summary(report, "[single-set evaluation]");
        vf::write_text_file(out_dir + "/summary.txt", summary);
        std::fputs(summary.c_str(), stdout);
        return 0;
    }

    auto real = load_manifest_file(manifests[0]);
    auto phantom = load_manifest_file(manifests[1]);
    auto plan = vf::enumerate_cross_pairs(real, phantom);
    auto report = vf::run_eval(plan, cfg.extraction, cfg.match, thr);
    double rate = vf::spoof_report(report, thr);
    vf::write_text_file(out_dir + "/cross_hist.csv",
                        vf::export_histograms(report));
    char spoof[160];
    std::snprintf(spoof, sizeof(spoof),
                  "threshold=%.1f\nspoof_success_rate=%.4f\n", thr, rate);
    std::string summary =
        vf::format_eval_summary(report, "[cross evaluation]") + spoof;
    vf::write_text_file(out_dir + "/summary.txt", summary);
    std::fputs(summary.c_str(), stdout);
    return 0;
}

int cmd_calibrate(const std::string& csv_path, double path_length,
                  double i0) {
    auto curve = vf::load_calibration_csv(vf::read_text_file(csv_path));
    vf::MuFit fit = vf::fit_mu_solid(curve, path_length, i0);
    if (fit.clamped)
        std::fprintf(stderr,
                     "warning: negative slope clamped to zero\n");
    std::printf("mu_solid=%.9f\nrms_residual=%.9f\n", fit.mu_solid_per_mm,
                fit.rms_residual);
    return 0;
}

int cmd_demo(const std::string& config, const std::string& out_dir,
             std::uint64_t seed, bool seed_set, int fingers, int samples) {
    auto cfg = load_config_or_default(config);
    vf::DemoResult r = vf::run_demo(cfg, out_dir,
                                    seed_set ? seed : cfg.seed, fingers,
                                    samples);
    std::printf("pairs: mated=%ld nonmated=%ld cross_mated=%ld "
                "cross_nonmated=%ld\n",
                r.n_mated, r.n_nonmated, r.n_cross_mated,
                r.n_cross_nonmated);
    std::printf("max_nonmated: real=%.2f phantom=%.2f cross=%.2f\n",
                r.real_report.max_nonmated, r.phantom_report.max_nonmated,
                r.cross_report.max_nonmated);
    std::printf("spoof_success_rate=%.4f\n", r.spoof_rate);
    std::printf("reports written to %s\n", out_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"veinforge: finger vein phantom construction, rendering "
                 "and matching"};
    app.require_subcommand(1);

    std::string config, out, image, image_b, skel, phantom, csv;
    std::vector<std::string> manifests;
    std::uint64_t seed = 42;
    double threshold = 30.0, path_length = 10.0, i0 = 1.0;
    int fingers = 6, samples = 5;

    auto* sc_extract = app.add_subcommand(
        "extract", "Extract a vein mask and skeleton from a NIR image");
    sc_extract->add_option("image", image, "input PGM")->required();
    sc_extract->add_option("--config", config, "pipeline config file");
    sc_extract->add_option("--out", out, "output base path")->required();

    auto* sc_build = app.add_subcommand(
        "build", "Build a printable phantom from a vein skeleton");
    sc_build->add_option("skeleton", skel, "VEINSKEL file")->required();
    sc_build->add_option("--config", config, "pipeline config file");
    sc_build->add_option("--out", out, "output directory")->required();

    auto* sc_render = app.add_subcommand(
        "render", "Render a phantom under simulated NIR transmission");
    sc_render->add_option("phantom", phantom, "phantom JSON")->required();
    sc_render->add_option("--config", config, "pipeline config file");
    sc_render->add_option("--out", out, "output PGM path")->required();
    auto* render_seed = sc_render->add_option("--seed", seed, "noise seed");

    auto* sc_match = app.add_subcommand(
        "match", "Compare two finger vein images");
    sc_match->add_option("image_a", image, "probe PGM")->required();
    sc_match->add_option("image_b", image_b, "gallery PGM")->required();
    sc_match->add_option("--config", config, "pipeline config file");

    auto* sc_eval = app.add_subcommand(
        "evaluate", "Score mated/non-mated pairs of one or two datasets");
    sc_eval->add_option("manifests", manifests, "1 manifest (single-set) or "
                        "2 manifests (real phantom cross mode)")
        ->expected(1, 2);
    sc_eval->add_option("--config", config, "pipeline config file");
    sc_eval->add_option("--out", out, "output directory")->required();
    auto* eval_thr =
        sc_eval->add_option("--threshold", threshold, "decision threshold");

    auto* sc_cal = app.add_subcommand(
        "calibrate", "Fit mu_solid from a step-density calibration CSV");
    sc_cal->add_option("csv", csv, "density,intensity CSV")->required();
    sc_cal->add_option("--path-length", path_length, "optical path (mm)")
        ->required();
    sc_cal->add_option("--i0", i0, "source intensity");

    auto* sc_demo = app.add_subcommand(
        "demo", "Run the synthetic end-to-end spoofing experiment");
    sc_demo->add_option("--config", config, "pipeline config file");
    sc_demo->add_option("--out", out, "output directory")->required();
    auto* demo_seed = sc_demo->add_option("--seed", seed, "master seed");
    sc_demo->add_option("--fingers", fingers, "number of fingers");
    sc_demo->add_option("--samples", samples, "samples per finger");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sc_extract) return cmd_extract(image, config, out);
        if (*sc_build) return cmd_build(skel, config, out);
        if (*sc_render)
            return cmd_render(phantom, config, out, seed,
                              render_seed->count() > 0);
        if (*sc_match) return cmd_match(image, image_b, config);
        if (*sc_eval)
            return cmd_evaluate(manifests, config, out, threshold,
                                eval_thr->count() > 0);
        if (*sc_cal) return cmd_calibrate(csv, path_length, i0);
        if (*sc_demo)
            return cmd_demo(config, out, seed, demo_seed->count() > 0,
                            fingers, samples);
    } catch (const vf::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
