#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "veinforge/image.hpp"
#include "veinforge/matching.hpp"

namespace veinforge {

enum class DatasetKind { real, phantom };

struct ManifestEntry {
    int finger = 0;
    int sample = 0;
    std::string path;
};

// Dataset listing: F fingers, S samples per finger, ids dense from 0.
struct DatasetManifest {
    DatasetKind kind = DatasetKind::real;
    int fingers = 0;
    int samples_per_finger = 0;
    std::vector<ManifestEntry> entries;

    void validate() const;
};

// Header "MANIFEST <real|phantom> <F> <S>", then "finger sample path" rows.
std::string save_manifest(const DatasetManifest& m);
DatasetManifest load_manifest(const std::string& text);

struct ImagePair {
    ManifestEntry a;
    ManifestEntry b;
};

struct PairPlan {
    std::vector<ImagePair> mated;
    std::vector<ImagePair> nonmated;
    // Closed-form counts the enumerations must match: F*S(S-1)/2 and
    // S^2*F(F-1)/2 in single-set mode, Sr*Sp*F and (Sr+Sp)^2*F(F-1)/2 in
    // cross mode.
    long n_mated = 0;
    long n_nonmated = 0;
};

// Same-finger sample pairs vs cross-finger pairs within one dataset.
PairPlan enumerate_pairs(const DatasetManifest& m);

// Mated pairs are real/phantom samples of the same finger; non-mated pairs
// are all cross-finger pairs over the union of both sets.
PairPlan enumerate_cross_pairs(const DatasetManifest& real,
                               const DatasetManifest& phantom);

struct ScoreHistogram {
    std::array<long, 100> bins{}; // width-1 bins over [0, 100]
    long n = 0;

    void add(double score);
};

struct EvalReport {
    ScoreHistogram mated_hist;
    ScoreHistogram nonmated_hist;
    std::vector<double> mated_scores;
    std::vector<double> nonmated_scores;
    double max_nonmated = 0.0;
    double min_mated = 0.0;
    double fraction_mated_above_threshold = 0.0;
    double threshold = 30.0;
    long excluded_pairs = 0;
};

// Scores every pair with the matcher; images and extractions are cached per
// path, unreadable pairs are counted and skipped.
EvalReport run_eval(const PairPlan& plan, const ExtractionConfig& ecfg,
                    const MatchConfig& mcfg, double threshold = 30.0);

// Fraction of mated (real vs phantom-of-same-finger) scores at or above the
// acceptance threshold: the presentation-attack success rate.
double spoof_report(const EvalReport& cross, double threshold);

// Seeded rigid pose jitter with nearest-neighbor resampling; out-of-frame
// samples replicate the border.
NirImage perturb_pose(const NirImage& img, double max_rotation_deg,
                      double max_translation_px, std::uint64_t seed);

// CSV "bin,mated_count,nonmated_count" for bins 0..99.
std::string export_histograms(const EvalReport& report);

std::string format_eval_summary(const EvalReport& report,
                                const std::string& title);

} // namespace veinforge
