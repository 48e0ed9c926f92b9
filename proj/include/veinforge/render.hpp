#pragma once

#include <cstdint>
#include <vector>

#include "veinforge/image.hpp"
#include "veinforge/phantom.hpp"

namespace veinforge {

struct RenderConfig {
    double pixel_pitch_mm = 0.1;
    double i0 = 1.0;                // source intensity (relative units)
    double ray_step_mm = 0.05;      // marching step for the tissue pass
    double scatter_sigma0_mm = 0.2; // diffusion blur at depth zero
    double scatter_k = 0.15;        // blur growth per mm of vein depth
    double noise_sigma = 0.0;       // additive noise, normalized units

    void validate() const;
};

// Placement of the phantom on the scanner bed: in-plane rotation about the
// vertical illumination axis plus a lateral/axial shift. Rays stay vertical
// under this pose, so the attenuation math is unchanged.
struct ScannerPose {
    double rotation_deg = 0.0;
    double dx_mm = 0.0; // lateral
    double dz_mm = 0.0; // along the finger
};

// Transmission render of the phantom under top illumination. Rays run
// vertically through the cylinder; the image covers the footprint with z
// along the width and the lateral coordinate along the height.
//
// Bone and tissue attenuate in a marching pass that bisects material
// boundaries; the result is blurred by scatter_sigma0. Each vein multiplies
// in its own occlusion map exp(-mu_vein * chord), blurred by
// scatter_sigma0 + scatter_k * vein_depth, so deeper veins image softer.
// Intensities are normalized by the source so air is exactly 1.
NirImage render_nir(const FingerPhantomModel& model, const RenderConfig& cfg,
                    std::uint64_t noise_seed = 0,
                    const ScannerPose& pose = {});

// Mean intensity per z slice of a render; brighter bands are expected over
// the joints whenever tissue absorbs more than bone.
std::vector<double> render_joint_profile(const FingerPhantomModel& model,
                                         const RenderConfig& cfg,
                                         std::uint64_t noise_seed = 0);

// Exposed for oracle tests: total chord length of the vertical line at
// lateral offset x, axial position z through one tube (union over the
// capsule chain, exact up to floating point).
double tube_chord_length(const VeinTube& tube, double x, double z);

} // namespace veinforge
