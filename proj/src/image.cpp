#include "veinforge/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace veinforge {

NirImage NirImage::filled(int width, int height, double value,
                          double pixel_pitch_mm) {
    NirImage img;
    img.width = width;
    img.height = height;
    img.pixel_pitch_mm = pixel_pitch_mm;
    img.pixels.assign(size_t(width) * size_t(height), value);
    return img;
}

double NirImage::at_clamped(int x, int y) const {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return at(x, y);
}

double NirImage::sample_bilinear(double x, double y) const {
    int x0 = int(std::floor(x));
    int y0 = int(std::floor(y));
    double fx = x - x0;
    double fy = y - y0;
    double v00 = at_clamped(x0, y0);
    double v10 = at_clamped(x0 + 1, y0);
    double v01 = at_clamped(x0, y0 + 1);
    double v11 = at_clamped(x0 + 1, y0 + 1);
    return (1 - fy) * ((1 - fx) * v00 + fx * v10) +
           fy * ((1 - fx) * v01 + fx * v11);
}

void NirImage::validate() const {
    if (width <= 0 || height <= 0)
        throw DomainError("image dimensions must be positive");
    if (pixel_pitch_mm <= 0.0)
        throw DomainError("pixel pitch must be positive");
    if (pixels.size() != size_t(width) * size_t(height))
        throw DomainError("pixel count does not match dimensions");
    for (double v : pixels) {
        if (!(v >= 0.0 && v <= 1.0))
            throw DomainError("intensity outside [0,1]");
    }
}

namespace {

// Reads the next whitespace-delimited PGM header token, skipping '#' comments.
std::string next_token(const std::vector<std::uint8_t>& bytes, size_t& pos) {
    while (pos < bytes.size()) {
        char c = char(bytes[pos]);
        if (c == '#') {
            while (pos < bytes.size() && char(bytes[pos]) != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else {
            break;
        }
    }
    std::string tok;
    while (pos < bytes.size() &&
           !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        tok.push_back(char(bytes[pos]));
        ++pos;
    }
    return tok;
}

long parse_int_token(const std::string& tok, const char* what) {
    if (tok.empty()) throw FormatError(std::string("missing PGM ") + what);
    for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw FormatError(std::string("malformed PGM ") + what);
    return std::stol(tok);
}

} // namespace

NirImage load_pgm(const std::vector<std::uint8_t>& bytes,
                  double pixel_pitch_mm) {
    size_t pos = 0;
    std::string magic = next_token(bytes, pos);
    if (magic != "P5") throw FormatError("not a binary PGM (expected P5)");

    long w = parse_int_token(next_token(bytes, pos), "width");
    long h = parse_int_token(next_token(bytes, pos), "height");
    long maxval = parse_int_token(next_token(bytes, pos), "maxval");
    if (w <= 0 || h <= 0) throw FormatError("non-positive PGM dimensions");
    if (maxval != 255)
        throw FormatError("unsupported PGM depth (only maxval 255)");

    // Exactly one whitespace byte separates the header from the payload.
    if (pos >= bytes.size() ||
        !std::isspace(static_cast<unsigned char>(bytes[pos])))
        throw FormatError("malformed PGM header");
    ++pos;

    size_t need = size_t(w) * size_t(h);
    if (bytes.size() - pos < need) throw FormatError("truncated PGM payload");

    NirImage img;
    img.width = int(w);
    img.height = int(h);
    img.pixel_pitch_mm = pixel_pitch_mm;
    img.pixels.resize(need);
    for (size_t i = 0; i < need; ++i)
        img.pixels[i] = double(bytes[pos + i]) / 255.0;
    return img;
}

std::vector<std::uint8_t> save_pgm(const NirImage& img) {
    img.validate();
    char header[64];
    int n = std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n",
                          img.width, img.height);
    std::vector<std::uint8_t> out(header, header + n);
    out.reserve(out.size() + img.pixels.size());
    for (double v : img.pixels) {
        long q = std::lround(v * 255.0);
        out.push_back(std::uint8_t(std::clamp(q, 0L, 255L)));
    }
    return out;
}

NirImage load_image_file(const std::string& path, double default_pitch_mm) {
    auto bytes = read_binary_file(path);
    double pitch = default_pitch_mm;
    std::ifstream meta(path + ".meta");
    if (meta) {
        std::string line;
        while (std::getline(meta, line)) {
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            if (line.substr(0, eq) == "pixel_pitch_mm")
                pitch = std::stod(line.substr(eq + 1));
        }
    }
    return load_pgm(bytes, pitch);
}

void save_image_file(const NirImage& img, const std::string& path) {
    write_binary_file(path, save_pgm(img));
    char buf[64];
    std::snprintf(buf, sizeof(buf), "pixel_pitch_mm=%.6f\n",
                  img.pixel_pitch_mm);
    write_text_file(path + ".meta", buf);
}

NirImage normalize_contrast(const NirImage& img) {
    auto [mn_it, mx_it] = std::minmax_element(img.pixels.begin(),
                                              img.pixels.end());
    double mn = *mn_it, mx = *mx_it;
    if (mx <= mn) return img;
    NirImage out = img;
    double scale = 1.0 / (mx - mn);
    for (double& v : out.pixels) v = (v - mn) * scale;
    return out;
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_binary_file(const std::string& path,
                       const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
    if (!f) throw IoError("cannot write " + path);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f << text;
    if (!f) throw IoError("cannot write " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace veinforge
