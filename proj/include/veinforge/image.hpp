#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "veinforge/common.hpp"

namespace veinforge {

// Normalized grayscale raster with a physical pixel pitch. Intensities live
// in [0,1]; pixel (x, y) = pixels[y * width + x] with x running along the
// image width and y down the rows.
struct NirImage {
    int width = 0;
    int height = 0;
    double pixel_pitch_mm = 0.1;
    std::vector<double> pixels;

    static NirImage filled(int width, int height, double value,
                           double pixel_pitch_mm = 0.1);

    double at(int x, int y) const { return pixels[size_t(y) * width + x]; }
    double& at(int x, int y) { return pixels[size_t(y) * width + x]; }

    // Clamp-to-edge lookup; used by resamplers near the border.
    double at_clamped(int x, int y) const;

    // Bilinear sample at a fractional pixel position, clamp-to-edge.
    double sample_bilinear(double x, double y) const;

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }

    // Throws DomainError if dimensions, pitch, or intensity range are off.
    void validate() const;
};

// Binary 8-bit PGM (magic P5, maxval 255). Any other depth is rejected.
NirImage load_pgm(const std::vector<std::uint8_t>& bytes,
                  double pixel_pitch_mm = 0.1);

// Canonical writer: "P5\n<w> <h>\n255\n" + w*h payload bytes,
// v = round(255 * intensity) with halves rounding up.
std::vector<std::uint8_t> save_pgm(const NirImage& img);

// File-level wrappers. The pixel pitch rides in a "<path>.meta" sidecar with
// a single "pixel_pitch_mm=<float>" line; absent sidecar means the default.
NirImage load_image_file(const std::string& path,
                         double default_pitch_mm = 0.1);
void save_image_file(const NirImage& img, const std::string& path);

// Affine rescale so min -> 0 and max -> 1. Constant images pass through.
NirImage normalize_contrast(const NirImage& img);

std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path,
                       const std::vector<std::uint8_t>& bytes);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace veinforge
