#include "veinforge/materials.hpp"

#include <cmath>
#include <sstream>

namespace veinforge {

void MaterialSpec::validate() const {
    if (!(infill_percent >= 0.0 && infill_percent <= 100.0))
        throw DomainError("infill must lie in [0,100]");
    if (mu_solid_per_mm < 0.0)
        throw DomainError("mu_solid must be nonnegative");
}

double effective_mu(const MaterialSpec& m) {
    m.validate();
    return m.mu_solid_per_mm * m.infill_percent / 100.0;
}

void CalibrationCurve::validate() const {
    for (size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].intensity >= 0.0 && samples[i].intensity <= 1.0))
            throw DomainError("calibration intensity outside [0,1]");
        if (i > 0 &&
            !(samples[i].density_percent > samples[i - 1].density_percent))
            throw DomainError("calibration densities must be increasing");
    }
}

MuFit fit_mu_solid(const CalibrationCurve& curve, double path_length_mm,
                   double i0) {
    curve.validate();
    if (curve.samples.size() < 2)
        throw DomainError("calibration fit needs at least 2 samples");
    if (path_length_mm <= 0.0) throw ConfigError("path length must be > 0");
    if (i0 <= 0.0) throw ConfigError("I0 must be > 0");

    const size_t n = curve.samples.size();
    std::vector<double> xs(n), ys(n);
    for (size_t i = 0; i < n; ++i) {
        double inten = curve.samples[i].intensity;
        if (inten <= 0.0)
            throw DomainError("saturated calibration sample (intensity <= 0)");
        xs[i] = curve.samples[i].density_percent * path_length_mm / 100.0;
        ys[i] = -std::log(inten / i0);
    }

    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(n);
    my /= double(n);

    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw DomainError("calibration densities are degenerate");

    MuFit fit;
    double slope = sxy / sxx;
    double intercept = my - slope * mx;
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double r = ys[i] - (intercept + slope * xs[i]);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / double(n));
    if (slope < 0.0) {
        slope = 0.0;
        fit.clamped = true;
    }
    fit.mu_solid_per_mm = slope;
    return fit;
}

CalibrationCurve load_calibration_csv(const std::string& text) {
    CalibrationCurve curve;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw FormatError("calibration CSV row without comma: " + line);
        try {
            CalibrationCurve::Sample s;
            s.density_percent = std::stod(line.substr(0, comma));
            s.intensity = std::stod(line.substr(comma + 1));
            curve.samples.push_back(s);
        } catch (const std::exception&) {
            if (first) {
                first = false;
                continue; // header row
            }
            throw FormatError("malformed calibration CSV row: " + line);
        }
        first = false;
    }
    curve.validate();
    return curve;
}

MaterialPalette default_palette() {
    MaterialPalette p;
    p.bone = {"green-pla", 20.0, 0.35};
    p.tissue = {"green-pla", 60.0, 0.35};
    p.vein = {"grey-pla", 100.0, 1.2};
    return p;
}

} // namespace veinforge
