#include "veinforge/demo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "veinforge/render.hpp"

namespace veinforge {

namespace {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a + 0x9e3779b97f4a7c15ULL + (b << 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

struct Rng {
    std::mt19937_64 rng;
    explicit Rng(std::uint64_t seed) : rng(seed) {}
    double uniform(double lo, double hi) {
        return lo + double(rng() >> 11) * 0x1.0p-53 * (hi - lo);
    }
    int uniform_int(int lo, int hi) { // inclusive
        return lo + int(rng() % std::uint64_t(hi - lo + 1));
    }
};

// Smooth lateral wander: a linear drift plus two random sinusoids, so
// veins cross lanes instead of running parallel tracks.
struct Wander {
    double y0, slope, a1, l1, p1, a2, l2, p2;

    static Wander random(Rng& rng, double y0, double drift, double span) {
        return {y0,
                drift / span,
                rng.uniform(1.2, 3.2), rng.uniform(25.0, 65.0),
                rng.uniform(0.0, 2.0 * kPi),
                rng.uniform(0.4, 1.2), rng.uniform(10.0, 26.0),
                rng.uniform(0.0, 2.0 * kPi)};
    }
    double y(double x) const {
        return y0 + slope * x + a1 * std::sin(2.0 * kPi * x / l1 + p1) +
               a2 * std::sin(2.0 * kPi * x / l2 + p2);
    }
};

// Smoothly folds a wander back into [lo, hi]: monotone, no flat clamp
// rails, identity well inside the range.
double soft_limit(double y, double lo, double hi) {
    double c = 0.5 * (lo + hi);
    double half = 0.5 * (hi - lo);
    return c + half * std::tanh((y - c) / half);
}

std::vector<SkeletonPoint> make_vein(Rng& rng, double x0, double x1,
                                     double base_y, double drift,
                                     double base_width, double y_min,
                                     double y_max) {
    Wander w = Wander::random(rng, base_y, drift, x1 - x0);
    double wobble_phase = rng.uniform(0.0, 2.0 * kPi);
    double wobble_scale = rng.uniform(0.05, 0.15);

    std::vector<SkeletonPoint> pl;
    const double step = 0.5;
    for (double x = x0; x <= x1 + 1e-9; x += step) {
        SkeletonPoint p;
        p.x_mm = x;
        p.y_mm = soft_limit(w.y(x - x0), y_min, y_max);
        p.width_mm = base_width *
                     (1.0 + wobble_scale *
                                std::sin(2.0 * kPi * x / 31.0 + wobble_phase));
        pl.push_back(p);
    }
    return pl;
}

} // namespace

SyntheticPattern generate_vein_pattern(const PhantomConfig& phantom,
                                       std::uint64_t seed) {
    Rng rng(seed);
    const double length = phantom.length_mm;
    const double lateral = 2.0 * phantom.outer_radius_mm;
    const double margin_x = 0.07 * length;
    const double y_min = 0.17 * lateral, y_max = 0.83 * lateral;

    SyntheticPattern pat;
    std::vector<std::vector<SkeletonPoint>> mains;

    int n_main = rng.uniform_int(3, 4);
    for (int i = 0; i < n_main; ++i) {
        double base_y = rng.uniform(y_min + 1.0, y_max - 1.0);
        double span_lo = margin_x;
        double span_hi = length - margin_x;
        double start = span_lo + rng.uniform(0.0, 0.3 * (span_hi - span_lo));
        double len = (span_hi - start) * rng.uniform(0.55, 1.0);
        double drift = rng.uniform(-5.0, 5.0);
        double width = rng.uniform(0.55, 1.0);
        mains.push_back(make_vein(rng, start, start + len, base_y, drift,
                                  width, y_min, y_max));
    }

    // Branches forking off a main vein toward another lane; the junctions
    // make patterns structurally distinctive.
    int n_branch = rng.uniform_int(1, 2);
    for (int i = 0; i < n_branch; ++i) {
        const auto& parent = mains[size_t(rng.uniform_int(
            0, int(mains.size()) - 1))];
        size_t at = size_t(rng.uniform_int(int(parent.size()) / 5,
                                           4 * int(parent.size()) / 5));
        double x0 = parent[at].x_mm;
        double y0 = parent[at].y_mm;
        double x1 = std::min(x0 + rng.uniform(15.0, 40.0),
                             length - margin_x);
        double drift = rng.uniform(3.0, 7.0) * (rng.uniform(0, 1) < 0.5
                                                    ? -1.0
                                                    : 1.0);
        double width = rng.uniform(0.5, 0.8);
        mains.push_back(
            make_vein(rng, x0, x1, y0, drift, width, y_min, y_max));
    }

    for (auto& pl : mains) {
        pat.printable.polylines.push_back(pl);
        pat.full.polylines.push_back(std::move(pl));
    }

    // Thin side veins the printer cannot reproduce.
    int n_small = rng.uniform_int(3, 6);
    for (int i = 0; i < n_small; ++i) {
        double x0 = rng.uniform(margin_x, length - margin_x - 12.0);
        double x1 = x0 + rng.uniform(8.0, 22.0);
        double base_y = rng.uniform(y_min + 0.5, y_max - 0.5);
        double drift = rng.uniform(-3.0, 3.0);
        double width = rng.uniform(0.18, 0.32);
        pat.full.polylines.push_back(make_vein(rng, x0, x1, base_y, drift,
                                               width, y_min, y_max));
    }
    return pat;
}

DemoResult run_demo(const PipelineConfig& cfg, const std::string& out_dir,
                    std::uint64_t seed, int fingers,
                    int samples_per_finger) {
    cfg.validate();
    if (fingers < 1 || samples_per_finger < 1)
        throw ConfigError("demo needs >= 1 finger and sample");

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/images");
    fs::create_directories(out_dir + "/phantoms");

    const auto& ph = cfg.phantom;
    const double image_center_y = ph.outer_radius_mm; // middle of the unroll

    DatasetManifest real_manifest{DatasetKind::real, fingers,
                                  samples_per_finger, {}};
    DatasetManifest phantom_manifest{DatasetKind::phantom, fingers,
                                     samples_per_finger, {}};

    for (int f = 0; f < fingers; ++f) {
        SyntheticPattern pattern =
            generate_vein_pattern(ph, mix_seed(seed, 101 + f));

        auto bones = build_bone_layout(ph.length_mm, ph.n_bones,
                                       ph.shaft_radius_mm,
                                       ph.joint_radius_mm,
                                       ph.joint_length_mm, ph.bone_gap_mm);

        // The "real" finger carries every vein at its true size.
        auto real_model = assemble_phantom(
            bones,
            project_to_cylinder(pattern.full, ph.outer_radius_mm,
                                ph.vein_depth_mm, image_center_y),
            ph.outer_radius_mm, ph.length_mm, ph.vein_depth_mm,
            cfg.materials);

        // The printed phantom only keeps the printable veins, clamped to
        // the nozzle limit.
        auto built = assemble_phantom(
            bones,
            project_to_cylinder(pattern.printable, ph.outer_radius_mm,
                                ph.vein_depth_mm, image_center_y),
            ph.outer_radius_mm, ph.length_mm, ph.vein_depth_mm,
            cfg.materials);
        auto printable =
            enforce_printability(built, {ph.min_feature_mm});

        char name[64];
        std::snprintf(name, sizeof(name), "/phantoms/finger%d.json", f);
        write_text_file(out_dir + name,
                        save_phantom_json(printable.model));

        struct Kind {
            const char* tag;
            const FingerPhantomModel* model;
            DatasetManifest* manifest;
        };
        const Kind kinds[2] = {{"real", &real_model, &real_manifest},
                               {"phantom", &printable.model,
                                &phantom_manifest}};
        for (int k = 0; k < 2; ++k) {
            for (int s = 0; s < samples_per_finger; ++s) {
                // Each recording places the finger slightly differently on
                // the scanner and sees fresh sensor noise.
                Rng pose_rng(mix_seed(seed, 7331 + 100 * f + 10 * s + k));
                ScannerPose pose;
                pose.rotation_deg = pose_rng.uniform(
                    -cfg.eval.max_rotation_deg, cfg.eval.max_rotation_deg);
                double t_mm =
                    cfg.eval.max_translation_px * cfg.render.pixel_pitch_mm;
                pose.dx_mm = pose_rng.uniform(-t_mm, t_mm);
                pose.dz_mm = pose_rng.uniform(-t_mm, t_mm);

                NirImage sample =
                    render_nir(*kinds[k].model, cfg.render,
                               mix_seed(seed, 977 + 100 * f + 10 * s + k),
                               pose);
                char img_name[96];
                std::snprintf(img_name, sizeof(img_name),
                              "images/%s_f%d_s%d.pgm", kinds[k].tag, f, s);
                std::string path = out_dir + "/" + img_name;
                save_image_file(sample, path);
                kinds[k].manifest->entries.push_back({f, s, path});
            }
        }
    }

    write_text_file(out_dir + "/real.manifest",
                    save_manifest(real_manifest));
    write_text_file(out_dir + "/phantom.manifest",
                    save_manifest(phantom_manifest));

    PairPlan real_plan = enumerate_pairs(real_manifest);
    PairPlan phantom_plan = enumerate_pairs(phantom_manifest);
    PairPlan cross_plan =
        enumerate_cross_pairs(real_manifest, phantom_manifest);

    DemoResult result;
    result.n_mated = real_plan.n_mated;
    result.n_nonmated = real_plan.n_nonmated;
    result.n_cross_mated = cross_plan.n_mated;
    result.n_cross_nonmated = cross_plan.n_nonmated;

    result.real_report = run_eval(real_plan, cfg.extraction, cfg.match,
                                  cfg.eval.threshold);
    result.phantom_report = run_eval(phantom_plan, cfg.extraction, cfg.match,
                                     cfg.eval.threshold);
    result.cross_report = run_eval(cross_plan, cfg.extraction, cfg.match,
                                   cfg.eval.threshold);
    result.spoof_rate = spoof_report(result.cross_report,
                                     cfg.eval.threshold);

    write_text_file(out_dir + "/real_hist.csv",
                    export_histograms(result.real_report));
    write_text_file(out_dir + "/phantom_hist.csv",
                    export_histograms(result.phantom_report));
    write_text_file(out_dir + "/cross_hist.csv",
                    export_histograms(result.cross_report));

    char spoof[256];
    std::snprintf(spoof, sizeof(spoof),
                  "mated_cross_pairs=%ld\nthreshold=%.1f\n"
                  "spoof_success_rate=%.4f\n",
                  result.cross_report.mated_hist.n, cfg.eval.threshold,
                  result.spoof_rate);
    write_text_file(out_dir + "/spoof_report.txt", spoof);

    std::string summary;
    summary += format_eval_summary(result.real_report, "[real vs real]");
    summary += "\n";
    summary +=
        format_eval_summary(result.phantom_report, "[phantom vs phantom]");
    summary += "\n";
    summary += format_eval_summary(result.cross_report, "[real vs phantom]");
    summary += "\n";
    summary += spoof;
    write_text_file(out_dir + "/summary.txt", summary);

    return result;
}

} // namespace veinforge
