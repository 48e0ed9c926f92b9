#pragma once

#include <string>
#include <vector>

#include "veinforge/common.hpp"

namespace veinforge {

// A printing material at a given infill density. mu_solid is the NIR
// absorption coefficient (1/mm) of the fully solid print.
struct MaterialSpec {
    std::string name;
    double infill_percent = 100.0;
    double mu_solid_per_mm = 0.0;

    void validate() const;
};

// Linear infill model: a 40% infill print absorbs like 40% of the solid
// material along the same path.
double effective_mu(const MaterialSpec& m);

// Measured transmission of a step-density cylinder: (density %, mean
// transmitted intensity) samples with strictly increasing densities.
struct CalibrationCurve {
    struct Sample {
        double density_percent = 0.0;
        double intensity = 0.0;
    };
    std::vector<Sample> samples;

    void validate() const;
};

struct MuFit {
    double mu_solid_per_mm = 0.0;
    double rms_residual = 0.0;
    bool clamped = false; // negative slope was clamped to zero
};

// Least-squares line through (density * path_length / 100, -ln(I/I0));
// the slope is the solid absorption coefficient. The intercept absorbs a
// miscalibrated I0, so only the slope is reported.
MuFit fit_mu_solid(const CalibrationCurve& curve, double path_length_mm,
                   double i0);

// CSV rows "density_percent,intensity"; a non-numeric first row is treated
// as a header.
CalibrationCurve load_calibration_csv(const std::string& text);

struct MaterialPalette {
    MaterialSpec bone;
    MaterialSpec tissue;
    MaterialSpec vein;
};

// Green PLA at low density for bone, green at higher density for tissue,
// solid grey for veins; effective absorption orders vein > tissue > bone.
MaterialPalette default_palette();

} // namespace veinforge
