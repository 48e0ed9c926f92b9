#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "veinforge/config.hpp"
#include "veinforge/demo.hpp"
#include "veinforge/dxf.hpp"
#include "veinforge/evaluation.hpp"
#include "veinforge/mesh.hpp"
#include "veinforge/render.hpp"

namespace py = pybind11;
using namespace veinforge;

namespace {

py::array_t<double> image_to_numpy(const NirImage& img) {
    py::array_t<double> arr({img.height, img.width});
    std::memcpy(arr.mutable_data(), img.pixels.data(),
                img.pixels.size() * sizeof(double));
    return arr;
}

NirImage image_from_numpy(
    py::array_t<double, py::array::c_style | py::array::forcecast> arr,
    double pixel_pitch_mm) {
    if (arr.ndim() != 2) throw DomainError("expected a 2D array");
    NirImage img;
    img.height = int(arr.shape(0));
    img.width = int(arr.shape(1));
    img.pixel_pitch_mm = pixel_pitch_mm;
    img.pixels.assign(arr.data(), arr.data() + arr.size());
    img.validate();
    return img;
}

py::array_t<double> skeleton_polyline_to_numpy(
    const std::vector<SkeletonPoint>& pl) {
    py::array_t<double> arr({py::ssize_t(pl.size()), py::ssize_t(4)});
    auto view = arr.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < py::ssize_t(pl.size()); ++i) {
        view(i, 0) = pl[size_t(i)].x_mm;
        view(i, 1) = pl[size_t(i)].y_mm;
        view(i, 2) = pl[size_t(i)].width_mm;
        view(i, 3) = pl[size_t(i)].depth_mm;
    }
    return arr;
}

VeinSkeleton skeleton_from_lists(const py::list& polylines) {
    VeinSkeleton skel;
    for (auto item : polylines) {
        auto arr = py::cast<py::array_t<
            double, py::array::c_style | py::array::forcecast>>(item);
        if (arr.ndim() != 2 || arr.shape(1) != 4)
            throw DomainError("each polyline must be an (n, 4) array");
        auto view = arr.unchecked<2>();
        std::vector<SkeletonPoint> pl;
        for (py::ssize_t i = 0; i < arr.shape(0); ++i)
            pl.push_back({view(i, 0), view(i, 1), view(i, 2), view(i, 3)});
        skel.polylines.push_back(std::move(pl));
    }
    return skel;
}

py::bytes vec_to_bytes(const std::vector<std::uint8_t>& v) {
    return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

std::vector<std::uint8_t> bytes_to_vec(const py::bytes& b) {
    std::string s = b;
    return {s.begin(), s.end()};
}

} // namespace

PYBIND11_MODULE(_veinforge, m) {
    m.doc() = "NIR finger vein phantom construction, rendering, matching "
              "and evaluation";

    py::register_exception<IoError>(m, "VeinforgeIoError");
    py::register_exception<FormatError>(m, "VeinforgeFormatError");
    py::register_exception<ConfigError>(m, "VeinforgeConfigError");
    py::register_exception<DomainError>(m, "VeinforgeDomainError");

    // ---- imaging ----
    py::class_<NirImage>(m, "NirImage")
        .def(py::init(&image_from_numpy), py::arg("pixels"),
             py::arg("pixel_pitch_mm") = 0.1)
        .def_readonly("width", &NirImage::width)
        .def_readonly("height", &NirImage::height)
        .def_readwrite("pixel_pitch_mm", &NirImage::pixel_pitch_mm)
        .def("numpy", &image_to_numpy);

    m.def("load_pgm",
          [](const py::bytes& b, double pitch) {
              return load_pgm(bytes_to_vec(b), pitch);
          },
          py::arg("data"), py::arg("pixel_pitch_mm") = 0.1);
    m.def("save_pgm",
          [](const NirImage& img) { return vec_to_bytes(save_pgm(img)); });
    m.def("load_image_file", &load_image_file, py::arg("path"),
          py::arg("default_pitch_mm") = 0.1);
    m.def("save_image_file", &save_image_file);
    m.def("normalize_contrast", &normalize_contrast);

    // ---- extraction ----
    py::class_<ExtractionConfig>(m, "ExtractionConfig")
        .def(py::init<>())
        .def_readwrite("sigma_px", &ExtractionConfig::sigma_px)
        .def_readwrite("width_fraction", &ExtractionConfig::width_fraction)
        .def_readwrite("max_width_px", &ExtractionConfig::max_width_px)
        .def_readwrite("edge_margin_px", &ExtractionConfig::edge_margin_px);

    py::class_<CurvatureScoreMap>(m, "CurvatureScoreMap")
        .def_readonly("width", &CurvatureScoreMap::width)
        .def_readonly("height", &CurvatureScoreMap::height)
        .def("numpy", [](const CurvatureScoreMap& s) {
            py::array_t<double> arr({s.height, s.width});
            std::memcpy(arr.mutable_data(), s.scores.data(),
                        s.scores.size() * sizeof(double));
            return arr;
        });

    py::class_<BinaryVeinMap>(m, "BinaryVeinMap")
        .def_readonly("width", &BinaryVeinMap::width)
        .def_readonly("height", &BinaryVeinMap::height)
        .def("count_true", &BinaryVeinMap::count_true)
        .def("numpy", [](const BinaryVeinMap& b) {
            py::array_t<bool> arr({b.height, b.width});
            auto view = arr.mutable_unchecked<2>();
            for (int y = 0; y < b.height; ++y)
                for (int x = 0; x < b.width; ++x)
                    view(y, x) = b.at(x, y);
            return arr;
        });

    py::class_<VeinSkeleton>(m, "VeinSkeleton")
        .def(py::init(&skeleton_from_lists), py::arg("polylines"))
        .def("polylines",
             [](const VeinSkeleton& s) {
                 py::list out;
                 for (const auto& pl : s.polylines)
                     out.append(skeleton_polyline_to_numpy(pl));
                 return out;
             })
        .def("total_points", &VeinSkeleton::total_points);

    m.def("max_curvature_scores", &max_curvature_scores);
    m.def("connect_scores", &connect_scores);
    m.def("binarize_median", &binarize_median);
    m.def("trace_skeleton", &trace_skeleton);
    m.def("estimate_widths", &estimate_widths);
    m.def("finger_region", &finger_region, py::arg("img"),
          py::arg("margin_px"));
    m.def("extract_veins", &extract_veins, py::arg("img"), py::arg("cfg"),
          py::arg("with_widths") = false);
    py::class_<ExtractionResult>(m, "ExtractionResult")
        .def_readonly("scores", &ExtractionResult::scores)
        .def_readonly("mask", &ExtractionResult::mask)
        .def_readonly("skeleton", &ExtractionResult::skeleton);
    m.def("save_veinskel", &save_veinskel);
    m.def("load_veinskel", &load_veinskel);

    // ---- materials ----
    py::class_<MaterialSpec>(m, "MaterialSpec")
        .def(py::init([](std::string name, double infill, double mu) {
                 return MaterialSpec{std::move(name), infill, mu};
             }),
             py::arg("name"), py::arg("infill_percent"),
             py::arg("mu_solid_per_mm"))
        .def_readwrite("name", &MaterialSpec::name)
        .def_readwrite("infill_percent", &MaterialSpec::infill_percent)
        .def_readwrite("mu_solid_per_mm", &MaterialSpec::mu_solid_per_mm);
    py::class_<MaterialPalette>(m, "MaterialPalette")
        .def(py::init<>())
        .def_readwrite("bone", &MaterialPalette::bone)
        .def_readwrite("tissue", &MaterialPalette::tissue)
        .def_readwrite("vein", &MaterialPalette::vein);
    m.def("effective_mu", &effective_mu);
    m.def("default_palette", &default_palette);
    py::class_<CalibrationCurve>(m, "CalibrationCurve")
        .def(py::init([](const std::vector<std::pair<double, double>>& s) {
            CalibrationCurve c;
            for (auto& [d, i] : s) c.samples.push_back({d, i});
            c.validate();
            return c;
        }))
        .def("samples", [](const CalibrationCurve& c) {
            std::vector<std::pair<double, double>> out;
            for (auto& s : c.samples)
                out.emplace_back(s.density_percent, s.intensity);
            return out;
        });
    py::class_<MuFit>(m, "MuFit")
        .def_readonly("mu_solid_per_mm", &MuFit::mu_solid_per_mm)
        .def_readonly("rms_residual", &MuFit::rms_residual)
        .def_readonly("clamped", &MuFit::clamped);
    m.def("fit_mu_solid", &fit_mu_solid, py::arg("curve"),
          py::arg("path_length_mm"), py::arg("i0") = 1.0);
    m.def("load_calibration_csv", &load_calibration_csv);

    // ---- phantom geometry ----
    py::class_<BoneSegment>(m, "BoneSegment")
        .def(py::init<>())
        .def_readwrite("z_start_mm", &BoneSegment::z_start_mm)
        .def_readwrite("z_end_mm", &BoneSegment::z_end_mm)
        .def_readwrite("shaft_radius_mm", &BoneSegment::shaft_radius_mm)
        .def_readwrite("joint_radius_mm", &BoneSegment::joint_radius_mm)
        .def_readwrite("joint_length_mm", &BoneSegment::joint_length_mm);

    py::class_<VeinTube>(m, "VeinTube")
        .def(py::init([](py::array_t<double, py::array::c_style |
                                                 py::array::forcecast>
                             path,
                         std::vector<double> radii) {
                 if (path.ndim() != 2 || path.shape(1) != 3)
                     throw DomainError("path must be an (n, 3) array");
                 VeinTube t;
                 auto view = path.unchecked<2>();
                 for (py::ssize_t i = 0; i < path.shape(0); ++i)
                     t.path.push_back({view(i, 0), view(i, 1), view(i, 2)});
                 t.radius_mm = std::move(radii);
                 t.validate();
                 return t;
             }),
             py::arg("path"), py::arg("radius_mm"))
        .def("path",
             [](const VeinTube& t) {
                 py::array_t<double> arr(
                     {py::ssize_t(t.path.size()), py::ssize_t(3)});
                 auto view = arr.mutable_unchecked<2>();
                 for (py::ssize_t i = 0; i < py::ssize_t(t.path.size());
                      ++i) {
                     view(i, 0) = t.path[size_t(i)].x;
                     view(i, 1) = t.path[size_t(i)].y;
                     view(i, 2) = t.path[size_t(i)].z;
                 }
                 return arr;
             })
        .def_readonly("radius_mm", &VeinTube::radius_mm);

    py::class_<FingerPhantomModel>(m, "FingerPhantomModel")
        .def_readonly("outer_radius_mm", &FingerPhantomModel::outer_radius_mm)
        .def_readonly("length_mm", &FingerPhantomModel::length_mm)
        .def_readonly("vein_depth_mm", &FingerPhantomModel::vein_depth_mm)
        .def_readonly("bones", &FingerPhantomModel::bones)
        .def_readonly("veins", &FingerPhantomModel::veins)
        .def_readonly("materials", &FingerPhantomModel::materials);

    m.def("project_to_cylinder", &project_to_cylinder, py::arg("skeleton"),
          py::arg("outer_radius_mm"), py::arg("depth_mm"),
          py::arg("image_center_y_mm"));
    m.def("build_bone_layout", &build_bone_layout, py::arg("length_mm"),
          py::arg("n_bones"), py::arg("shaft_radius_mm"),
          py::arg("joint_radius_mm"), py::arg("joint_length_mm"),
          py::arg("gap_mm"));
    m.def("assemble_phantom", &assemble_phantom, py::arg("bones"),
          py::arg("veins"), py::arg("outer_radius_mm"), py::arg("length_mm"),
          py::arg("vein_depth_mm"), py::arg("materials"));
    m.def("material_at",
          [](const FingerPhantomModel& model, double x, double y, double z) {
              return material_name(material_at(model, {x, y, z}));
          },
          py::arg("model"), py::arg("x"), py::arg("y"), py::arg("z"));
    m.def("enforce_printability",
          [](const FingerPhantomModel& model, double min_feature_mm) {
              auto r = enforce_printability(model, {min_feature_mm});
              return py::make_tuple(r.model, r.raised_points);
          },
          py::arg("model"), py::arg("min_feature_mm") = 0.4);
    m.def("skeleton_to_contours",
          [](const VeinSkeleton& skel, int cap_segments) {
              auto cs = skeleton_to_contours(skel, cap_segments);
              py::list out;
              for (const auto& c : cs.contours) {
                  py::array_t<double> arr(
                      {py::ssize_t(c.size()), py::ssize_t(2)});
                  auto view = arr.mutable_unchecked<2>();
                  for (py::ssize_t i = 0; i < py::ssize_t(c.size()); ++i) {
                      view(i, 0) = c[size_t(i)].x;
                      view(i, 1) = c[size_t(i)].y;
                  }
                  out.append(arr);
              }
              return out;
          },
          py::arg("skeleton"), py::arg("cap_segments") = 16);
    m.def("export_dxf",
          [](const VeinSkeleton& skel, int cap_segments) {
              return vec_to_bytes(
                  export_dxf(skeleton_to_contours(skel, cap_segments)));
          },
          py::arg("skeleton"), py::arg("cap_segments") = 16);
    m.def("save_phantom_json", &save_phantom_json);
    m.def("load_phantom_json", &load_phantom_json);

    // ---- meshes ----
    py::class_<TriangleMesh>(m, "TriangleMesh")
        .def("signed_volume", &TriangleMesh::signed_volume)
        .def("triangle_count",
             [](const TriangleMesh& m2) { return m2.triangles.size(); })
        .def("numpy", [](const TriangleMesh& m2) {
            py::array_t<double> arr({py::ssize_t(m2.triangles.size()),
                                     py::ssize_t(3), py::ssize_t(3)});
            auto view = arr.mutable_unchecked<3>();
            for (py::ssize_t i = 0; i < py::ssize_t(m2.triangles.size());
                 ++i) {
                const Triangle& t = m2.triangles[size_t(i)];
                const Vec3* vs[3] = {&t.a, &t.b, &t.c};
                for (int k = 0; k < 3; ++k) {
                    view(i, k, 0) = vs[k]->x;
                    view(i, k, 1) = vs[k]->y;
                    view(i, k, 2) = vs[k]->z;
                }
            }
            return arr;
        });
    m.def("mesh_phantom",
          [](const FingerPhantomModel& model, int angular_steps) {
              auto meshes = mesh_phantom(model, angular_steps);
              py::dict out;
              for (auto& [id, mesh] : meshes)
                  out[py::str(material_name(id))] = mesh;
              return out;
          },
          py::arg("model"), py::arg("angular_steps") = 64);
    m.def("export_stl", [](const TriangleMesh& mesh) {
        return vec_to_bytes(export_stl(mesh));
    });
    m.def("parse_stl",
          [](const py::bytes& b) { return parse_stl(bytes_to_vec(b)); });
    m.def("mesh_is_watertight", &mesh_is_watertight);

    // ---- rendering ----
    py::class_<RenderConfig>(m, "RenderConfig")
        .def(py::init<>())
        .def_readwrite("pixel_pitch_mm", &RenderConfig::pixel_pitch_mm)
        .def_readwrite("i0", &RenderConfig::i0)
        .def_readwrite("ray_step_mm", &RenderConfig::ray_step_mm)
        .def_readwrite("scatter_sigma0_mm", &RenderConfig::scatter_sigma0_mm)
        .def_readwrite("scatter_k", &RenderConfig::scatter_k)
        .def_readwrite("noise_sigma", &RenderConfig::noise_sigma);
    py::class_<ScannerPose>(m, "ScannerPose")
        .def(py::init([](double rot, double dx, double dz) {
                 return ScannerPose{rot, dx, dz};
             }),
             py::arg("rotation_deg") = 0.0, py::arg("dx_mm") = 0.0,
             py::arg("dz_mm") = 0.0)
        .def_readwrite("rotation_deg", &ScannerPose::rotation_deg)
        .def_readwrite("dx_mm", &ScannerPose::dx_mm)
        .def_readwrite("dz_mm", &ScannerPose::dz_mm);
    m.def("render_nir", &render_nir, py::arg("model"), py::arg("cfg"),
          py::arg("noise_seed") = 0, py::arg("pose") = ScannerPose{});
    m.def("render_joint_profile", &render_joint_profile, py::arg("model"),
          py::arg("cfg"), py::arg("noise_seed") = 0);

    // ---- matching ----
    py::class_<RigidTransform2D>(m, "RigidTransform2D")
        .def(py::init([](double rot, double dx, double dy) {
                 return RigidTransform2D{rot, {dx, dy}};
             }),
             py::arg("rotation_deg") = 0.0, py::arg("dx") = 0.0,
             py::arg("dy") = 0.0)
        .def_readwrite("rotation_deg", &RigidTransform2D::rotation_deg)
        .def_property_readonly("dx",
                               [](const RigidTransform2D& t) {
                                   return t.translation.x;
                               })
        .def_property_readonly("dy", [](const RigidTransform2D& t) {
            return t.translation.y;
        });
    py::class_<MatchConfig>(m, "MatchConfig")
        .def(py::init<>())
        .def_readwrite("cw", &MatchConfig::cw)
        .def_readwrite("ch", &MatchConfig::ch)
        .def_readwrite("icp_max_iter", &MatchConfig::icp_max_iter)
        .def_readwrite("icp_tol_px", &MatchConfig::icp_tol_px);
    py::class_<IcpResult>(m, "IcpResult")
        .def_readonly("transform", &IcpResult::transform)
        .def_readonly("degenerate", &IcpResult::degenerate)
        .def_readonly("iterations", &IcpResult::iterations)
        .def_readonly("mean_distance_px", &IcpResult::mean_distance_px);
    m.def("icp_align",
          [](py::array_t<double, py::array::c_style | py::array::forcecast>
                 probe,
             py::array_t<double, py::array::c_style | py::array::forcecast>
                 gallery,
             const MatchConfig& cfg) {
              auto to_pts = [](auto& arr) {
                  if (arr.ndim() != 2 || arr.shape(1) != 2)
                      throw DomainError("points must be (n, 2)");
                  std::vector<Vec2> pts;
                  auto view = arr.template unchecked<2>();
                  for (py::ssize_t i = 0; i < arr.shape(0); ++i)
                      pts.push_back({view(i, 0), view(i, 1)});
                  return pts;
              };
              return icp_align(to_pts(probe), to_pts(gallery), cfg);
          },
          py::arg("probe_points"), py::arg("gallery_points"),
          py::arg("cfg") = MatchConfig{});
    m.def("apply_transform", &apply_transform);
    m.def("miura_correlation", &miura_correlation, py::arg("probe"),
          py::arg("gallery"), py::arg("cfg") = MatchConfig{});
    m.def("score_to_100",
          [](double ratio) { return score_to_100(ratio).value; });
    m.def("compare",
          [](const NirImage& a, const NirImage& b,
             const ExtractionConfig& ecfg, const MatchConfig& mcfg) {
              return compare(a, b, ecfg, mcfg).value;
          },
          py::arg("probe"), py::arg("gallery"),
          py::arg("ecfg") = ExtractionConfig{},
          py::arg("mcfg") = MatchConfig{});

    // ---- evaluation ----
    py::enum_<DatasetKind>(m, "DatasetKind")
        .value("real", DatasetKind::real)
        .value("phantom", DatasetKind::phantom);
    py::class_<ManifestEntry>(m, "ManifestEntry")
        .def(py::init([](int f, int s, std::string p) {
                 return ManifestEntry{f, s, std::move(p)};
             }),
             py::arg("finger"), py::arg("sample"), py::arg("path"))
        .def_readwrite("finger", &ManifestEntry::finger)
        .def_readwrite("sample", &ManifestEntry::sample)
        .def_readwrite("path", &ManifestEntry::path);
    py::class_<DatasetManifest>(m, "DatasetManifest")
        .def(py::init([](DatasetKind kind, int fingers, int samples,
                         std::vector<ManifestEntry> entries) {
                 DatasetManifest m2{kind, fingers, samples,
                                    std::move(entries)};
                 m2.validate();
                 return m2;
             }),
             py::arg("kind"), py::arg("fingers"),
             py::arg("samples_per_finger"), py::arg("entries"))
        .def_readonly("kind", &DatasetManifest::kind)
        .def_readonly("fingers", &DatasetManifest::fingers)
        .def_readonly("samples_per_finger",
                      &DatasetManifest::samples_per_finger)
        .def_readonly("entries", &DatasetManifest::entries);
    m.def("save_manifest", &save_manifest);
    m.def("load_manifest", &load_manifest);

    py::class_<PairPlan>(m, "PairPlan")
        .def_readonly("n_mated", &PairPlan::n_mated)
        .def_readonly("n_nonmated", &PairPlan::n_nonmated);
    m.def("enumerate_pairs", &enumerate_pairs);
    m.def("enumerate_cross_pairs", &enumerate_cross_pairs);

    py::class_<ScoreHistogram>(m, "ScoreHistogram")
        .def_readonly("n", &ScoreHistogram::n)
        .def("bins", [](const ScoreHistogram& h) {
            return std::vector<long>(h.bins.begin(), h.bins.end());
        });
    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("mated_hist", &EvalReport::mated_hist)
        .def_readonly("nonmated_hist", &EvalReport::nonmated_hist)
        .def_readonly("mated_scores", &EvalReport::mated_scores)
        .def_readonly("nonmated_scores", &EvalReport::nonmated_scores)
        .def_readonly("max_nonmated", &EvalReport::max_nonmated)
        .def_readonly("min_mated", &EvalReport::min_mated)
        .def_readonly("fraction_mated_above_threshold",
                      &EvalReport::fraction_mated_above_threshold)
        .def_readonly("threshold", &EvalReport::threshold)
        .def_readonly("excluded_pairs", &EvalReport::excluded_pairs);
    m.def("run_eval", &run_eval, py::arg("plan"), py::arg("ecfg"),
          py::arg("mcfg"), py::arg("threshold") = 30.0);
    m.def("spoof_report", &spoof_report);
    m.def("perturb_pose", &perturb_pose, py::arg("img"),
          py::arg("max_rotation_deg"), py::arg("max_translation_px"),
          py::arg("seed"));
    m.def("export_histograms", &export_histograms);

    // ---- config & demo ----
    py::class_<PhantomConfig>(m, "PhantomConfig")
        .def(py::init<>())
        .def_readwrite("outer_radius_mm", &PhantomConfig::outer_radius_mm)
        .def_readwrite("length_mm", &PhantomConfig::length_mm)
        .def_readwrite("n_bones", &PhantomConfig::n_bones)
        .def_readwrite("shaft_radius_mm", &PhantomConfig::shaft_radius_mm)
        .def_readwrite("joint_radius_mm", &PhantomConfig::joint_radius_mm)
        .def_readwrite("joint_length_mm", &PhantomConfig::joint_length_mm)
        .def_readwrite("bone_gap_mm", &PhantomConfig::bone_gap_mm)
        .def_readwrite("vein_depth_mm", &PhantomConfig::vein_depth_mm)
        .def_readwrite("min_feature_mm", &PhantomConfig::min_feature_mm);
    py::class_<EvalConfig>(m, "EvalConfig")
        .def(py::init<>())
        .def_readwrite("threshold", &EvalConfig::threshold)
        .def_readwrite("max_rotation_deg", &EvalConfig::max_rotation_deg)
        .def_readwrite("max_translation_px",
                       &EvalConfig::max_translation_px);
    py::class_<PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_readwrite("extraction", &PipelineConfig::extraction)
        .def_readwrite("phantom", &PipelineConfig::phantom)
        .def_readwrite("materials", &PipelineConfig::materials)
        .def_readwrite("render", &PipelineConfig::render)
        .def_readwrite("match", &PipelineConfig::match)
        .def_readwrite("eval", &PipelineConfig::eval)
        .def_readwrite("seed", &PipelineConfig::seed);
    m.def("parse_config", &parse_config);
    m.def("load_config_file", &load_config_file);
    m.def("dump_config", &dump_config);

    py::class_<SyntheticPattern>(m, "SyntheticPattern")
        .def_readonly("full", &SyntheticPattern::full)
        .def_readonly("printable", &SyntheticPattern::printable);
    m.def("generate_vein_pattern", &generate_vein_pattern,
          py::arg("phantom_cfg"), py::arg("seed"));
    py::class_<DemoResult>(m, "DemoResult")
        .def_readonly("real_report", &DemoResult::real_report)
        .def_readonly("phantom_report", &DemoResult::phantom_report)
        .def_readonly("cross_report", &DemoResult::cross_report)
        .def_readonly("spoof_rate", &DemoResult::spoof_rate)
        .def_readonly("n_mated", &DemoResult::n_mated)
        .def_readonly("n_nonmated", &DemoResult::n_nonmated)
        .def_readonly("n_cross_mated", &DemoResult::n_cross_mated)
        .def_readonly("n_cross_nonmated", &DemoResult::n_cross_nonmated);
    m.def("run_demo", &run_demo, py::arg("cfg"), py::arg("out_dir"),
          py::arg("seed") = 42, py::arg("fingers") = 6,
          py::arg("samples_per_finger") = 5);
}
