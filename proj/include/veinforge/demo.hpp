#pragma once

#include <cstdint>
#include <string>

#include "veinforge/config.hpp"
#include "veinforge/evaluation.hpp"

namespace veinforge {

// Ground-truth synthetic vein pattern for one finger: smooth wandering main
// veins plus short thin side veins below the printable feature size.
struct SyntheticPattern {
    VeinSkeleton full;     // everything, used for the "real" finger
    VeinSkeleton printable; // main veins only, used for the phantom
};

SyntheticPattern generate_vein_pattern(const PhantomConfig& phantom,
                                       std::uint64_t seed);

struct DemoResult {
    EvalReport real_report;
    EvalReport phantom_report;
    EvalReport cross_report;
    double spoof_rate = 0.0;
    long n_mated = 0, n_nonmated = 0;       // per single-set plan
    long n_cross_mated = 0, n_cross_nonmated = 0;
};

// Desk-scale rerun of the acquisition experiment: synthesizes finger
// patterns, builds a printable phantom per finger, renders pose-perturbed
// NIR images of both the true anatomy and the phantom, and evaluates the
// real/real, phantom/phantom and real-vs-phantom score distributions.
// Writes images, manifests, histogram CSVs, the spoof report, and a summary
// under out_dir. Deterministic for a fixed seed.
DemoResult run_demo(const PipelineConfig& cfg, const std::string& out_dir,
                    std::uint64_t seed, int fingers = 6,
                    int samples_per_finger = 5);

} // namespace veinforge
