#include "veinforge/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "parallel.hpp"

namespace veinforge {

void DatasetManifest::validate() const {
    if (fingers < 1 || samples_per_finger < 1)
        throw DomainError("manifest needs >= 1 finger and sample");
    if (entries.size() != size_t(fingers) * size_t(samples_per_finger))
        throw DomainError("manifest entry count != F*S");
    std::vector<std::vector<bool>> seen(
        size_t(fingers), std::vector<bool>(size_t(samples_per_finger), false));
    for (const auto& e : entries) {
        if (e.finger < 0 || e.finger >= fingers || e.sample < 0 ||
            e.sample >= samples_per_finger)
            throw DomainError("manifest ids must be dense from 0");
        if (seen[size_t(e.finger)][size_t(e.sample)])
            throw DomainError("duplicate manifest entry");
        seen[size_t(e.finger)][size_t(e.sample)] = true;
    }
}

std::string save_manifest(const DatasetManifest& m) {
    m.validate();
    std::string out = "MANIFEST ";
    out += (m.kind == DatasetKind::real) ? "real" : "phantom";
    out += " " + std::to_string(m.fingers) + " " +
           std::to_string(m.samples_per_finger) + "\n";
    for (const auto& e : m.entries)
        out += std::to_string(e.finger) + " " + std::to_string(e.sample) +
               " " + e.path + "\n";
    return out;
}

DatasetManifest load_manifest(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty manifest");

    DatasetManifest m;
    {
        std::istringstream hdr(line);
        std::string magic, kind;
        if (!(hdr >> magic >> kind >> m.fingers >> m.samples_per_finger) ||
            magic != "MANIFEST")
            throw FormatError("bad manifest header: " + line);
        if (kind == "real")
            m.kind = DatasetKind::real;
        else if (kind == "phantom")
            m.kind = DatasetKind::phantom;
        else
            throw FormatError("unknown manifest kind: " + kind);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        ManifestEntry e;
        if (!(row >> e.finger >> e.sample))
            throw FormatError("bad manifest row: " + line);
        std::getline(row, e.path);
        size_t start = e.path.find_first_not_of(" \t");
        if (start == std::string::npos)
            throw FormatError("manifest row without path: " + line);
        e.path = e.path.substr(start);
        m.entries.push_back(std::move(e));
    }
    m.validate();
    return m;
}

// ---------------------------------------------------------------------------
// Pair enumeration
// ---------------------------------------------------------------------------

PairPlan enumerate_pairs(const DatasetManifest& m) {
    m.validate();
    PairPlan plan;
    const auto& es = m.entries;
    for (size_t i = 0; i < es.size(); ++i) {
        for (size_t j = i + 1; j < es.size(); ++j) {
            if (es[i].finger == es[j].finger)
                plan.mated.push_back({es[i], es[j]});
            else
                plan.nonmated.push_back({es[i], es[j]});
        }
    }
    plan.n_mated = long(plan.mated.size());
    plan.n_nonmated = long(plan.nonmated.size());

    long F = m.fingers, S = m.samples_per_finger;
    if (plan.n_mated != F * S * (S - 1) / 2 ||
        plan.n_nonmated != S * S * F * (F - 1) / 2)
        throw DomainError("pair enumeration disagrees with closed form");
    return plan;
}

PairPlan enumerate_cross_pairs(const DatasetManifest& real,
                               const DatasetManifest& phantom) {
    real.validate();
    phantom.validate();
    if (real.fingers != phantom.fingers)
        throw DomainError("real and phantom manifests differ in F");

    PairPlan plan;
    for (const auto& r : real.entries)
        for (const auto& p : phantom.entries)
            if (r.finger == p.finger) plan.mated.push_back({r, p});

    // Non-mated pairs span the union of both sets.
    std::vector<ManifestEntry> all = real.entries;
    all.insert(all.end(), phantom.entries.begin(), phantom.entries.end());
    for (size_t i = 0; i < all.size(); ++i)
        for (size_t j = i + 1; j < all.size(); ++j)
            if (all[i].finger != all[j].finger)
                plan.nonmated.push_back({all[i], all[j]});

    plan.n_mated = long(plan.mated.size());
    plan.n_nonmated = long(plan.nonmated.size());

    long F = real.fingers;
    long Sr = real.samples_per_finger, Sp = phantom.samples_per_finger;
    if (plan.n_mated != Sr * Sp * F ||
        plan.n_nonmated != (Sr + Sp) * (Sr + Sp) * F * (F - 1) / 2)
        throw DomainError("cross enumeration disagrees with closed form");
    return plan;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

void ScoreHistogram::add(double score) {
    int bin = std::clamp(int(std::floor(score)), 0, 99);
    ++bins[size_t(bin)];
    ++n;
}

EvalReport run_eval(const PairPlan& plan, const ExtractionConfig& ecfg,
                    const MatchConfig& mcfg, double threshold) {
    // Extract each distinct image once.
    std::map<std::string, MatchFeatures> features;
    std::vector<const std::string*> paths;
    auto note_path = [&](const ManifestEntry& e) {
        if (features.emplace(e.path, MatchFeatures{}).second)
            paths.push_back(&features.find(e.path)->first);
    };
    for (const auto& p : plan.mated) {
        note_path(p.a);
        note_path(p.b);
    }
    for (const auto& p : plan.nonmated) {
        note_path(p.a);
        note_path(p.b);
    }

    // Keys are all present before the parallel region; workers only touch
    // their own mapped values.
    std::vector<std::uint8_t> load_failed(paths.size(), 0);
    detail::parallel_for(paths.size(), [&](size_t i) {
        try {
            NirImage img = load_image_file(*paths[i]);
            features.find(*paths[i])->second =
                extract_match_features(img, ecfg);
        } catch (const Error&) {
            load_failed[i] = 1;
        }
    });
    std::map<std::string, bool> ok;
    for (size_t i = 0; i < paths.size(); ++i)
        ok[*paths[i]] = load_failed[i] == 0;

    EvalReport report;
    report.threshold = threshold;

    auto score_pairs = [&](const std::vector<ImagePair>& pairs,
                           std::vector<double>& out) {
        std::vector<double> scores(pairs.size(),
                                   std::numeric_limits<double>::quiet_NaN());
        detail::parallel_for(pairs.size(), [&](size_t i) {
            const auto& pr = pairs[i];
            if (!ok.at(pr.a.path) || !ok.at(pr.b.path)) return;
            scores[i] = compare_features(features.at(pr.a.path),
                                         features.at(pr.b.path), mcfg)
                            .value;
        });
        for (double s : scores) {
            if (std::isnan(s))
                ++report.excluded_pairs;
            else
                out.push_back(s);
        }
    };
    score_pairs(plan.mated, report.mated_scores);
    score_pairs(plan.nonmated, report.nonmated_scores);

    for (double s : report.mated_scores) report.mated_hist.add(s);
    for (double s : report.nonmated_scores) report.nonmated_hist.add(s);

    report.max_nonmated =
        report.nonmated_scores.empty()
            ? 0.0
            : *std::max_element(report.nonmated_scores.begin(),
                                report.nonmated_scores.end());
    report.min_mated = report.mated_scores.empty()
                           ? 0.0
                           : *std::min_element(report.mated_scores.begin(),
                                               report.mated_scores.end());
    if (!report.mated_scores.empty()) {
        long above = 0;
        for (double s : report.mated_scores)
            if (s > threshold) ++above;
        report.fraction_mated_above_threshold =
            double(above) / double(report.mated_scores.size());
    }
    return report;
}

double spoof_report(const EvalReport& cross, double threshold) {
    if (cross.mated_scores.empty()) return 0.0;
    long hits = 0;
    for (double s : cross.mated_scores)
        if (s >= threshold) ++hits;
    return double(hits) / double(cross.mated_scores.size());
}

NirImage perturb_pose(const NirImage& img, double max_rotation_deg,
                      double max_translation_px, std::uint64_t seed) {
    if (max_rotation_deg < 0.0 || max_translation_px < 0.0)
        throw ConfigError("perturbation bounds must be >= 0");

    std::mt19937_64 rng(seed);
    auto uniform = [&](double lo, double hi) {
        double u = double(rng() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    };
    double rot = uniform(-max_rotation_deg, max_rotation_deg);
    double tx = uniform(-max_translation_px, max_translation_px);
    double ty = uniform(-max_translation_px, max_translation_px);

    const int w = img.width, h = img.height;
    double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
    double a = deg_to_rad(-rot);
    double ca = std::cos(a), sa = std::sin(a);

    // Flat fill at the mean border intensity; streak-free, so the pose
    // jitter does not fabricate vein-like structures.
    double border = 0.0;
    long count = 0;
    for (int x = 0; x < w; ++x) {
        border += img.at(x, 0) + img.at(x, h - 1);
        count += 2;
    }
    for (int y = 1; y < h - 1; ++y) {
        border += img.at(0, y) + img.at(w - 1, y);
        count += 2;
    }
    border /= double(count);

    NirImage out = img;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double qx = double(x) - cx - tx;
            double qy = double(y) - cy - ty;
            double px = ca * qx - sa * qy + cx;
            double py = sa * qx + ca * qy + cy;
            int sx = int(std::lround(px));
            int sy = int(std::lround(py));
            out.at(x, y) = img.in_bounds(sx, sy) ? img.at(sx, sy) : border;
        }
    }
    return out;
}

std::string export_histograms(const EvalReport& report) {
    std::string out = "bin,mated_count,nonmated_count\n";
    for (int b = 0; b < 100; ++b)
        out += std::to_string(b) + "," +
               std::to_string(report.mated_hist.bins[size_t(b)]) + "," +
               std::to_string(report.nonmated_hist.bins[size_t(b)]) + "\n";
    return out;
}

std::string format_eval_summary(const EvalReport& report,
                                const std::string& title) {
    char buf[256];
    std::string out = title + "\n";
    std::snprintf(buf, sizeof(buf),
                  "mated_pairs=%ld\nnonmated_pairs=%ld\nexcluded=%ld\n"
                  "min_mated=%.2f\nmax_nonmated=%.2f\n"
                  "fraction_mated_above_threshold=%.4f\nthreshold=%.1f\n",
                  report.mated_hist.n, report.nonmated_hist.n,
                  report.excluded_pairs, report.min_mated,
                  report.max_nonmated,
                  report.fraction_mated_above_threshold, report.threshold);
    out += buf;
    return out;
}

} // namespace veinforge
