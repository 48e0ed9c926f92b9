#include "veinforge/extraction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_set>

namespace veinforge {

void ExtractionConfig::validate() const {
    if (sigma_px <= 0.0) throw ConfigError("extraction sigma must be > 0");
    if (!(width_fraction > 0.0 && width_fraction < 1.0))
        throw ConfigError("width_fraction must lie in (0,1)");
    if (max_width_px <= 0.0) throw ConfigError("max_width_px must be > 0");
    if (edge_margin_px < 0.0)
        throw ConfigError("edge_margin_px must be >= 0");
}

BinaryVeinMap BinaryVeinMap::zeros(int width, int height) {
    BinaryVeinMap m;
    m.width = width;
    m.height = height;
    m.mask.assign(size_t(width) * size_t(height), 0);
    return m;
}

size_t BinaryVeinMap::count_true() const {
    size_t n = 0;
    for (auto v : mask) n += v != 0;
    return n;
}

size_t VeinSkeleton::total_points() const {
    size_t n = 0;
    for (const auto& pl : polylines) n += pl.size();
    return n;
}

// ---------------------------------------------------------------------------
// Gaussian-derivative filtering
// ---------------------------------------------------------------------------

namespace {

struct Kernels {
    std::vector<double> g, g1, g2; // value, first, second derivative
    int radius = 0;
};

Kernels make_kernels(double sigma) {
    Kernels k;
    k.radius = std::max(1, int(std::ceil(4.0 * sigma)));
    double s2 = sigma * sigma;
    double norm = 0.0;
    for (int t = -k.radius; t <= k.radius; ++t)
        norm += std::exp(-0.5 * t * t / s2);
    for (int t = -k.radius; t <= k.radius; ++t) {
        double g = std::exp(-0.5 * t * t / s2) / norm;
        k.g.push_back(g);
        k.g1.push_back(-t / s2 * g);
        k.g2.push_back((t * t - s2) / (s2 * s2) * g);
    }
    return k;
}

// Separable convolution with clamp-to-edge boundary. kx runs along x (image
// columns), ky along y.
std::vector<double> convolve_sep(const NirImage& img,
                                 const std::vector<double>& kx,
                                 const std::vector<double>& ky, int radius) {
    const int w = img.width, h = img.height;
    std::vector<double> tmp(size_t(w) * h), out(size_t(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += kx[t + radius] *
                       img.at(std::clamp(x + t, 0, w - 1), y);
            tmp[size_t(y) * w + x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += ky[t + radius] *
                       tmp[size_t(std::clamp(y + t, 0, h - 1)) * w + x];
            out[size_t(y) * w + x] = acc;
        }
    }
    return out;
}

struct ProfileDir {
    int dx, dy;
    double ux, uy; // unit vector for the directional derivatives
};

// Scores the curvature profile along one grid line and accumulates into out.
// kappa[i] belongs to pixel (xs[i], ys[i]).
void score_profile(const std::vector<double>& kappa,
                   const std::vector<int>& xs, const std::vector<int>& ys,
                   CurvatureScoreMap& out) {
    const int n = int(kappa.size());
    int i = 0;
    while (i < n) {
        if (kappa[i] <= 0.0) {
            ++i;
            continue;
        }
        int start = i;
        while (i < n && kappa[i] > 0.0) ++i;
        int end = i; // [start, end) is one positive-curvature run
        double wr = double(end - start);
        for (int j = start; j < end; ++j) {
            double prev = (j > start) ? kappa[j - 1] : 0.0;
            double next = (j + 1 < end) ? kappa[j + 1] : 0.0;
            if (kappa[j] > prev && kappa[j] >= next)
                out.at(xs[j], ys[j]) += kappa[j] * wr;
        }
    }
}

} // namespace

CurvatureScoreMap max_curvature_scores(const NirImage& img,
                                       const ExtractionConfig& cfg) {
    cfg.validate();
    const int w = img.width, h = img.height;
    if (cfg.sigma_px >= std::min(w, h))
        throw ConfigError("sigma exceeds image extent");

    Kernels k = make_kernels(cfg.sigma_px);
    auto dx = convolve_sep(img, k.g1, k.g, k.radius);
    auto dy = convolve_sep(img, k.g, k.g1, k.radius);
    auto dxx = convolve_sep(img, k.g2, k.g, k.radius);
    auto dyy = convolve_sep(img, k.g, k.g2, k.radius);
    auto dxy = convolve_sep(img, k.g1, k.g1, k.radius);

    CurvatureScoreMap out;
    out.width = w;
    out.height = h;
    out.scores.assign(size_t(w) * h, 0.0);

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const std::array<ProfileDir, 4> dirs = {{
        {1, 0, 1.0, 0.0},
        {0, 1, 0.0, 1.0},
        {1, 1, inv_sqrt2, inv_sqrt2},
        {1, -1, inv_sqrt2, -inv_sqrt2},
    }};

    std::vector<double> kappa;
    std::vector<int> xs, ys;
    auto walk = [&](int x0, int y0, const ProfileDir& d) {
        kappa.clear();
        xs.clear();
        ys.clear();
        for (int x = x0, y = y0; x >= 0 && x < w && y >= 0 && y < h;
             x += d.dx, y += d.dy) {
            size_t i = size_t(y) * w + x;
            double p1 = d.ux * dx[i] + d.uy * dy[i];
            double p2 = d.ux * d.ux * dxx[i] + 2.0 * d.ux * d.uy * dxy[i] +
                        d.uy * d.uy * dyy[i];
            kappa.push_back(p2 / std::pow(1.0 + p1 * p1, 1.5));
            xs.push_back(x);
            ys.push_back(y);
        }
        score_profile(kappa, xs, ys, out);
    };

    for (const auto& d : dirs) {
        if (d.dx == 1 && d.dy == 0) {
            for (int y = 0; y < h; ++y) walk(0, y, d);
        } else if (d.dx == 0 && d.dy == 1) {
            for (int x = 0; x < w; ++x) walk(x, 0, d);
        } else if (d.dy == 1) { // down-right diagonal
            for (int x = 0; x < w; ++x) walk(x, 0, d);
            for (int y = 1; y < h; ++y) walk(0, y, d);
        } else { // up-right diagonal
            for (int x = 0; x < w; ++x) walk(x, h - 1, d);
            for (int y = 0; y < h - 1; ++y) walk(0, y, d);
        }
    }
    return out;
}

CurvatureScoreMap connect_scores(const CurvatureScoreMap& scores) {
    const int w = scores.width, h = scores.height;
    CurvatureScoreMap out;
    out.width = w;
    out.height = h;
    out.scores.assign(size_t(w) * h, 0.0);

    auto get = [&](int x, int y) -> double {
        return (x >= 0 && x < w && y >= 0 && y < h) ? scores.at(x, y) : 0.0;
    };
    static constexpr int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (auto& d : dirs) {
                double fwd = std::max(get(x + d[0], y + d[1]),
                                      get(x + 2 * d[0], y + 2 * d[1]));
                double bwd = std::max(get(x - d[0], y - d[1]),
                                      get(x - 2 * d[0], y - 2 * d[1]));
                acc += std::min(fwd, bwd);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

BinaryVeinMap binarize_median(const CurvatureScoreMap& scores) {
    std::vector<double> pos;
    pos.reserve(scores.scores.size() / 4);
    for (double s : scores.scores)
        if (s > 0.0) pos.push_back(s);

    BinaryVeinMap out = BinaryVeinMap::zeros(scores.width, scores.height);
    if (pos.empty()) return out;

    size_t mid = pos.size() / 2;
    std::nth_element(pos.begin(), pos.begin() + mid, pos.end());
    double median = pos[mid];
    if (pos.size() % 2 == 0) {
        double lower = *std::max_element(pos.begin(), pos.begin() + mid);
        median = 0.5 * (median + lower);
    }

    for (size_t i = 0; i < scores.scores.size(); ++i)
        out.mask[i] = scores.scores[i] > median ? 1 : 0;
    return out;
}

// ---------------------------------------------------------------------------
// Thinning and path tracing
// ---------------------------------------------------------------------------

namespace {

// One Zhang-Suen subiteration; returns number of deletions.
int zhang_suen_pass(BinaryVeinMap& m, int phase) {
    const int w = m.width, h = m.height;
    auto p = [&](int x, int y) -> int {
        return (x >= 0 && x < w && y >= 0 && y < h && m.at(x, y)) ? 1 : 0;
    };
    std::vector<std::pair<int, int>> kill;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!m.at(x, y)) continue;
            int n[8] = {p(x, y - 1),     p(x + 1, y - 1), p(x + 1, y),
                        p(x + 1, y + 1), p(x, y + 1),     p(x - 1, y + 1),
                        p(x - 1, y),     p(x - 1, y - 1)};
            int b = n[0] + n[1] + n[2] + n[3] + n[4] + n[5] + n[6] + n[7];
            if (b < 2 || b > 6) continue;
            int a = 0;
            for (int i = 0; i < 8; ++i)
                if (n[i] == 0 && n[(i + 1) % 8] == 1) ++a;
            if (a != 1) continue;
            if (phase == 0) {
                if (n[0] * n[2] * n[4] != 0) continue;
                if (n[2] * n[4] * n[6] != 0) continue;
            } else {
                if (n[0] * n[2] * n[6] != 0) continue;
                if (n[0] * n[4] * n[6] != 0) continue;
            }
            kill.emplace_back(x, y);
        }
    }
    for (auto [x, y] : kill) m.set(x, y, false);
    return int(kill.size());
}

constexpr int kNbr8[8][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                             {1, 1},  {1, -1}, {-1, 1}, {-1, -1}};

} // namespace

VeinSkeleton trace_skeleton(const BinaryVeinMap& mask, double pitch_mm) {
    if (pitch_mm <= 0.0) throw ConfigError("pixel pitch must be > 0");
    BinaryVeinMap thin = mask;
    while (zhang_suen_pass(thin, 0) + zhang_suen_pass(thin, 1) > 0) {
    }

    const int w = thin.width, h = thin.height;
    auto on = [&](int x, int y) {
        return x >= 0 && x < w && y >= 0 && y < h && thin.at(x, y);
    };
    auto degree = [&](int x, int y) {
        int d = 0;
        for (auto& nb : kNbr8) d += on(x + nb[0], y + nb[1]);
        return d;
    };

    // Edges between 8-neighbors, visited at most once per orientation.
    auto edge_id = [&](int x0, int y0, int x1, int y1) -> size_t {
        size_t a = size_t(y0) * w + x0, b = size_t(y1) * w + x1;
        return a * size_t(w) * h + b;
    };
    std::unordered_set<size_t> used;
    auto mark = [&](size_t id) { used.insert(id); };
    auto seen = [&](size_t id) { return used.count(id) != 0; };

    VeinSkeleton skel;
    auto emit = [&](const std::vector<std::pair<int, int>>& path) {
        if (path.size() < 2) return;
        std::vector<SkeletonPoint> pl;
        pl.reserve(path.size());
        for (auto [x, y] : path)
            pl.push_back({x * pitch_mm, y * pitch_mm, 0.0, 0.0});
        skel.polylines.push_back(std::move(pl));
    };

    // Walk from (x,y) through (nx,ny) until hitting a node pixel
    // (degree != 2) or an already-used edge.
    auto walk = [&](int x, int y, int nx, int ny) {
        std::vector<std::pair<int, int>> path{{x, y}};
        int px = x, py = y;
        int cx = nx, cy = ny;
        mark(edge_id(px, py, cx, cy));
        mark(edge_id(cx, cy, px, py));
        path.emplace_back(cx, cy);
        while (degree(cx, cy) == 2) {
            int tx = -1, ty = -1;
            for (auto& nb : kNbr8) {
                int qx = cx + nb[0], qy = cy + nb[1];
                if (!on(qx, qy) || (qx == px && qy == py)) continue;
                tx = qx;
                ty = qy;
                break;
            }
            if (tx < 0 || seen(edge_id(cx, cy, tx, ty))) break;
            mark(edge_id(cx, cy, tx, ty));
            mark(edge_id(tx, ty, cx, cy));
            px = cx;
            py = cy;
            cx = tx;
            cy = ty;
            path.emplace_back(cx, cy);
        }
        emit(path);
    };

    // Paths anchored at endpoints and junctions first.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!on(x, y)) continue;
            int d = degree(x, y);
            if (d == 2) continue;
            for (auto& nb : kNbr8) {
                int nx = x + nb[0], ny = y + nb[1];
                if (!on(nx, ny) || seen(edge_id(x, y, nx, ny))) continue;
                walk(x, y, nx, ny);
            }
        }
    }
    // Remaining pure cycles.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!on(x, y) || degree(x, y) != 2) continue;
            for (auto& nb : kNbr8) {
                int nx = x + nb[0], ny = y + nb[1];
                if (!on(nx, ny) || seen(edge_id(x, y, nx, ny))) continue;
                walk(x, y, nx, ny);
            }
        }
    }
    return skel;
}

// ---------------------------------------------------------------------------
// Width estimation
// ---------------------------------------------------------------------------

VeinSkeleton estimate_widths(const NirImage& img, const VeinSkeleton& skel,
                             const ExtractionConfig& cfg) {
    cfg.validate();
    const double pitch = img.pixel_pitch_mm;
    const double wmax_px = cfg.max_width_px;
    const double step_px = 0.1;

    VeinSkeleton out = skel;
    for (auto& pl : out.polylines) {
        for (size_t i = 0; i < pl.size(); ++i) {
            double cx = pl[i].x_mm / pitch;
            double cy = pl[i].y_mm / pitch;
            if (cx < 0 || cx > img.width - 1 || cy < 0 || cy > img.height - 1)
                throw DomainError("skeleton point outside image");

            size_t i0 = (i > 0) ? i - 1 : i;
            size_t i1 = (i + 1 < pl.size()) ? i + 1 : i;
            Vec2 tangent{pl[i1].x_mm - pl[i0].x_mm,
                         pl[i1].y_mm - pl[i0].y_mm};
            double tn = tangent.norm();
            Vec2 perp = tn > 0 ? Vec2{-tangent.y / tn, tangent.x / tn}
                               : Vec2{0.0, 1.0};

            double center = img.sample_bilinear(cx, cy);
            double bg_a = img.sample_bilinear(cx + perp.x * wmax_px,
                                              cy + perp.y * wmax_px);
            double bg_b = img.sample_bilinear(cx - perp.x * wmax_px,
                                              cy - perp.y * wmax_px);
            double background = 0.5 * (bg_a + bg_b);

            double threshold =
                background - cfg.width_fraction * (background - center);
            if (!(center < threshold)) {
                pl[i].width_mm = 0.0;
                continue;
            }
            // March outward from the centerline until the profile rises back
            // through the threshold on each side.
            double half[2] = {0.0, 0.0};
            for (int side = 0; side < 2; ++side) {
                double sgn = side == 0 ? 1.0 : -1.0;
                double d = 0.0;
                while (d < wmax_px) {
                    double nd = d + step_px;
                    double v = img.sample_bilinear(cx + sgn * perp.x * nd,
                                                   cy + sgn * perp.y * nd);
                    if (v >= threshold) {
                        // Linear interpolation of the crossing inside the
                        // last step.
                        double vprev = img.sample_bilinear(
                            cx + sgn * perp.x * d, cy + sgn * perp.y * d);
                        double f = (v > vprev)
                                       ? (threshold - vprev) / (v - vprev)
                                       : 0.0;
                        d += f * step_px;
                        break;
                    }
                    d = nd;
                }
                half[side] = d;
            }
            double width_px = std::min(half[0] + half[1], wmax_px);
            pl[i].width_mm = width_px * pitch;
        }
    }
    return out;
}

BinaryVeinMap finger_region(const NirImage& img, double margin_px) {
    const int w = img.width, h = img.height;
    const int margin = std::max(0, int(std::lround(margin_px)));
    BinaryVeinMap region = BinaryVeinMap::zeros(w, h);
    for (int x = 0; x < w; ++x) {
        double lo = 1.0, hi = 0.0;
        for (int y = 0; y < h; ++y) {
            lo = std::min(lo, img.at(x, y));
            hi = std::max(hi, img.at(x, y));
        }
        double thr = lo + 0.5 * (hi - lo);
        // widest dark run in this column
        int best_s = 0, best_e = 0, run_s = -1;
        for (int y = 0; y <= h; ++y) {
            bool dark = y < h && hi - lo > 1e-6 && img.at(x, y) < thr;
            if (dark && run_s < 0) run_s = y;
            if (!dark && run_s >= 0) {
                if (y - run_s > best_e - best_s) {
                    best_s = run_s;
                    best_e = y;
                }
                run_s = -1;
            }
        }
        if (best_e - best_s < int(0.35 * h)) {
            // no finger-like band here; keep the full column
            for (int y = 0; y < h; ++y) region.set(x, y, true);
        } else {
            for (int y = best_s + margin; y < best_e - margin; ++y)
                region.set(x, y, true);
        }
    }
    return region;
}

ExtractionResult extract_veins(const NirImage& img,
                               const ExtractionConfig& cfg,
                               bool with_widths) {
    NirImage norm = normalize_contrast(img);
    ExtractionResult r;
    r.scores = connect_scores(max_curvature_scores(norm, cfg));
    if (cfg.edge_margin_px > 0.0) {
        BinaryVeinMap region = finger_region(norm, cfg.edge_margin_px);
        for (int y = 0; y < r.scores.height; ++y)
            for (int x = 0; x < r.scores.width; ++x)
                if (!region.at(x, y)) r.scores.at(x, y) = 0.0;
    }
    r.mask = binarize_median(r.scores);
    r.skeleton = trace_skeleton(r.mask, img.pixel_pitch_mm);
    if (with_widths) r.skeleton = estimate_widths(norm, r.skeleton, cfg);
    return r;
}

// ---------------------------------------------------------------------------
// VEINSKEL serialization
// ---------------------------------------------------------------------------

std::string save_veinskel(const VeinSkeleton& skel) {
    std::string out = "VEINSKEL 1\n";
    char line[160];
    for (size_t b = 0; b < skel.polylines.size(); ++b) {
        if (b > 0) out += "\n";
        for (const auto& p : skel.polylines[b]) {
            std::snprintf(line, sizeof(line), "P %.6f %.6f %.6f %.6f\n",
                          p.x_mm, p.y_mm, p.width_mm, p.depth_mm);
            out += line;
        }
    }
    return out;
}

VeinSkeleton load_veinskel(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("VEINSKEL 1", 0) != 0)
        throw FormatError("missing VEINSKEL 1 header");

    VeinSkeleton skel;
    std::vector<SkeletonPoint> current;
    auto flush = [&]() {
        if (current.size() >= 2) skel.polylines.push_back(current);
        else if (current.size() == 1)
            throw FormatError("polyline with fewer than 2 points");
        current.clear();
    };
    while (std::getline(in, line)) {
        if (line.empty()) {
            flush();
            continue;
        }
        SkeletonPoint p;
        if (std::sscanf(line.c_str(), "P %lf %lf %lf %lf", &p.x_mm, &p.y_mm,
                        &p.width_mm, &p.depth_mm) != 4)
            throw FormatError("malformed VEINSKEL point line: " + line);
        if (p.width_mm < 0.0 || p.depth_mm < 0.0)
            throw FormatError("negative width or depth in VEINSKEL");
        current.push_back(p);
    }
    flush();
    return skel;
}

} // namespace veinforge
