#include "veinforge/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace veinforge {

Vec2 RigidTransform2D::apply(const Vec2& p) const {
    double a = deg_to_rad(rotation_deg);
    double c = std::cos(a), s = std::sin(a);
    return {c * p.x - s * p.y + translation.x,
            s * p.x + c * p.y + translation.y};
}

RigidTransform2D RigidTransform2D::inverse() const {
    double a = deg_to_rad(rotation_deg);
    double c = std::cos(a), s = std::sin(a);
    // R^-1 * (q - t)
    return {-rotation_deg,
            {-(c * translation.x + s * translation.y),
             -(-s * translation.x + c * translation.y)}};
}

void MatchConfig::validate() const {
    if (cw < 0 || ch < 0)
        throw ConfigError("correlation window must be >= 0");
    if (icp_max_iter < 1) throw ConfigError("icp_max_iter must be >= 1");
    if (icp_tol_px <= 0.0) throw ConfigError("icp_tol must be > 0");
}

// ---------------------------------------------------------------------------
// ICP
// ---------------------------------------------------------------------------

namespace {

// Uniform-grid index for nearest-neighbor lookups.
class PointGrid {
public:
    explicit PointGrid(const std::vector<Vec2>& pts) : pts_(pts) {
        double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
        for (const auto& p : pts) {
            min_x = std::min(min_x, p.x);
            min_y = std::min(min_y, p.y);
            max_x = std::max(max_x, p.x);
            max_y = std::max(max_y, p.y);
        }
        origin_ = {min_x, min_y};
        cell_ = std::max(1.0, std::max(max_x - min_x, max_y - min_y) /
                                  std::max(1.0, std::sqrt(double(pts.size()))));
        nx_ = int((max_x - min_x) / cell_) + 1;
        ny_ = int((max_y - min_y) / cell_) + 1;
        cells_.resize(size_t(nx_) * ny_);
        for (size_t i = 0; i < pts.size(); ++i)
            cells_[cell_index(pts[i])].push_back(int(i));
    }

    // Index of the nearest stored point; expands the search ring until a
    // candidate is confirmed nearest.
    int nearest(const Vec2& q) const {
        int cx = std::clamp(int((q.x - origin_.x) / cell_), 0, nx_ - 1);
        int cy = std::clamp(int((q.y - origin_.y) / cell_), 0, ny_ - 1);
        int best = -1;
        double best_d2 = std::numeric_limits<double>::max();
        for (int ring = 0; ring < std::max(nx_, ny_) + 1; ++ring) {
            for (int gy = cy - ring; gy <= cy + ring; ++gy) {
                for (int gx = cx - ring; gx <= cx + ring; ++gx) {
                    if (gx < 0 || gx >= nx_ || gy < 0 || gy >= ny_) continue;
                    if (std::max(std::abs(gx - cx), std::abs(gy - cy)) !=
                        ring)
                        continue;
                    for (int i : cells_[size_t(gy) * nx_ + gx]) {
                        Vec2 d = pts_[size_t(i)] - q;
                        double d2 = d.dot(d);
                        if (d2 < best_d2) {
                            best_d2 = d2;
                            best = i;
                        }
                    }
                }
            }
            // Points in farther rings are at least (ring) cells away.
            if (best >= 0 &&
                best_d2 <= double(ring) * cell_ * double(ring) * cell_)
                break;
        }
        return best;
    }

private:
    size_t cell_index(const Vec2& p) const {
        int gx = std::clamp(int((p.x - origin_.x) / cell_), 0, nx_ - 1);
        int gy = std::clamp(int((p.y - origin_.y) / cell_), 0, ny_ - 1);
        return size_t(gy) * nx_ + gx;
    }

    const std::vector<Vec2>& pts_;
    Vec2 origin_;
    double cell_ = 1.0;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<int>> cells_;
};

RigidTransform2D fit_rigid(const std::vector<Vec2>& src,
                           const std::vector<Vec2>& dst) {
    Vec2 cs{}, cd{};
    for (const auto& p : src) cs = cs + p;
    for (const auto& p : dst) cd = cd + p;
    double n = double(src.size());
    cs = cs * (1.0 / n);
    cd = cd * (1.0 / n);

    double s_dot = 0.0, s_cross = 0.0;
    for (size_t i = 0; i < src.size(); ++i) {
        Vec2 a = src[i] - cs;
        Vec2 b = dst[i] - cd;
        s_dot += a.dot(b);
        s_cross += a.cross(b);
    }
    double angle = std::atan2(s_cross, s_dot);

    RigidTransform2D t;
    t.rotation_deg = rad_to_deg(angle);
    double c = std::cos(angle), s = std::sin(angle);
    t.translation = {cd.x - (c * cs.x - s * cs.y),
                     cd.y - (s * cs.x + c * cs.y)};
    return t;
}

} // namespace

IcpResult icp_align(const std::vector<Vec2>& probe_pts,
                    const std::vector<Vec2>& gallery_pts,
                    const MatchConfig& cfg) {
    cfg.validate();
    IcpResult result;
    if (probe_pts.size() < 2 || gallery_pts.size() < 2) {
        result.degenerate = true;
        return result;
    }

    PointGrid grid(gallery_pts);

    // Start from the centroid shift; pure rotations then converge from a
    // roughly overlapping state.
    RigidTransform2D current;
    {
        Vec2 cp{}, cg{};
        for (const auto& p : probe_pts) cp = cp + p;
        for (const auto& p : gallery_pts) cg = cg + p;
        cp = cp * (1.0 / double(probe_pts.size()));
        cg = cg * (1.0 / double(gallery_pts.size()));
        current.translation = cg - cp;
    }

    double best_dist = std::numeric_limits<double>::max();
    RigidTransform2D best = current;

    std::vector<Vec2> moved(probe_pts.size());
    std::vector<Vec2> targets(probe_pts.size());
    for (int iter = 0; iter < cfg.icp_max_iter; ++iter) {
        double sum = 0.0;
        for (size_t i = 0; i < probe_pts.size(); ++i) {
            moved[i] = current.apply(probe_pts[i]);
            int j = grid.nearest(moved[i]);
            targets[i] = gallery_pts[size_t(j)];
            sum += (targets[i] - moved[i]).norm();
        }
        double mean_dist = sum / double(probe_pts.size());
        result.iterations = iter + 1;

        if (mean_dist < best_dist) {
            if (best_dist - mean_dist < cfg.icp_tol_px) {
                best_dist = mean_dist;
                best = current;
                result.distance_trace.push_back(mean_dist);
                break; // converged
            }
            best_dist = mean_dist;
            best = current;
            result.distance_trace.push_back(mean_dist);
        }
        // Non-improving iterations still refit; the best transform is kept.
        current = fit_rigid(probe_pts, targets);
    }

    result.transform = best;
    result.mean_distance_px = best_dist;
    return result;
}

// ---------------------------------------------------------------------------
// Mask resampling
// ---------------------------------------------------------------------------

BinaryVeinMap apply_transform(const BinaryVeinMap& mask,
                              const RigidTransform2D& t) {
    const int w = mask.width, h = mask.height;
    Vec2 center{(w - 1) / 2.0, (h - 1) / 2.0};

    BinaryVeinMap out = BinaryVeinMap::zeros(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            // Forward map: q = R(p - c) + c + t. Invert for resampling.
            Vec2 q{double(x) - center.x - t.translation.x,
                   double(y) - center.y - t.translation.y};
            double a = deg_to_rad(-t.rotation_deg);
            Vec2 p{std::cos(a) * q.x - std::sin(a) * q.y + center.x,
                   std::sin(a) * q.x + std::cos(a) * q.y + center.y};
            int sx = int(std::lround(p.x));
            int sy = int(std::lround(p.y));
            if (sx >= 0 && sx < w && sy >= 0 && sy < h && mask.at(sx, sy))
                out.set(x, y, true);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Correlation
// ---------------------------------------------------------------------------

namespace {

// Rows packed into 64-bit blocks for fast shifted AND + popcount.
struct PackedMask {
    int width = 0, height = 0, words_per_row = 0;
    std::vector<std::uint64_t> words;

    explicit PackedMask(const BinaryVeinMap& m)
        : width(m.width), height(m.height),
          words_per_row((m.width + 63) / 64),
          words(size_t(words_per_row) * m.height, 0) {
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                if (m.at(x, y))
                    words[size_t(y) * words_per_row + x / 64] |=
                        std::uint64_t(1) << (x % 64);
    }

    // 64 bits of row y starting at bit offset x0.
    std::uint64_t window(int y, int x0, int word) const {
        size_t row = size_t(y) * words_per_row;
        int base = x0 / 64 + word;
        int shift = x0 % 64;
        std::uint64_t lo =
            base < words_per_row ? words[row + base] >> shift : 0;
        std::uint64_t hi = (shift && base + 1 < words_per_row)
                               ? words[row + base + 1] << (64 - shift)
                               : 0;
        return lo | hi;
    }
};

} // namespace

double miura_correlation(const BinaryVeinMap& probe,
                         const BinaryVeinMap& gallery,
                         const MatchConfig& cfg) {
    cfg.validate();
    if (probe.width != gallery.width || probe.height != gallery.height)
        throw DomainError("correlation inputs must share dimensions");

    const int w = probe.width, h = probe.height;
    const int rw = w - 2 * cfg.cw, rh = h - 2 * cfg.ch;
    if (rw <= 0 || rh <= 0) return 0.0;

    // Gallery region is fixed; pack it once aligned at bit 0.
    BinaryVeinMap gal_region = BinaryVeinMap::zeros(rw, rh);
    long gallery_count = 0;
    for (int y = 0; y < rh; ++y)
        for (int x = 0; x < rw; ++x)
            if (gallery.at(x + cfg.cw, y + cfg.ch)) {
                gal_region.set(x, y, true);
                ++gallery_count;
            }
    PackedMask gal(gal_region);
    PackedMask prb(probe);

    // Integral image of the probe for O(1) window counts.
    std::vector<long> integral(size_t(w + 1) * (h + 1), 0);
    for (int y = 0; y < h; ++y) {
        long row_sum = 0;
        for (int x = 0; x < w; ++x) {
            row_sum += probe.at(x, y) ? 1 : 0;
            integral[size_t(y + 1) * (w + 1) + (x + 1)] =
                integral[size_t(y) * (w + 1) + (x + 1)] + row_sum;
        }
    }
    auto window_count = [&](int x0, int y0) -> long {
        return integral[size_t(y0 + rh) * (w + 1) + (x0 + rw)] -
               integral[size_t(y0) * (w + 1) + (x0 + rw)] -
               integral[size_t(y0 + rh) * (w + 1) + x0] +
               integral[size_t(y0) * (w + 1) + x0];
    };

    const int tail_bits = rw % 64;
    const std::uint64_t tail_mask =
        tail_bits ? ((std::uint64_t(1) << tail_bits) - 1) : ~std::uint64_t(0);

    double best = 0.0;
    for (int v = 0; v <= 2 * cfg.ch; ++v) {
        for (int u = 0; u <= 2 * cfg.cw; ++u) {
            long probe_count = window_count(u, v);
            long denom = probe_count + gallery_count;
            if (denom == 0) continue;
            long overlap = 0;
            for (int y = 0; y < rh; ++y) {
                for (int word = 0; word < gal.words_per_row; ++word) {
                    std::uint64_t pw = prb.window(y + v, u, word);
                    std::uint64_t gw =
                        gal.words[size_t(y) * gal.words_per_row + word];
                    if (word == gal.words_per_row - 1) pw &= tail_mask;
                    overlap += __builtin_popcountll(pw & gw);
                }
            }
            best = std::max(best, double(overlap) / double(denom));
        }
    }
    return best;
}

MatchScore score_to_100(double ratio) {
    if (!(ratio >= 0.0 && ratio <= 0.5))
        throw DomainError("overlap ratio outside [0, 0.5]");
    return {200.0 * ratio};
}

// ---------------------------------------------------------------------------
// End-to-end comparison
// ---------------------------------------------------------------------------

MatchFeatures extract_match_features(const NirImage& img,
                                     const ExtractionConfig& ecfg) {
    ExtractionResult ex = extract_veins(img, ecfg, false);
    MatchFeatures f;
    f.mask = std::move(ex.mask);
    double pitch = img.pixel_pitch_mm;
    f.points.reserve(ex.skeleton.total_points());
    for (const auto& pl : ex.skeleton.polylines)
        for (const auto& p : pl)
            f.points.push_back({p.x_mm / pitch, p.y_mm / pitch});
    return f;
}

MatchScore compare_features(const MatchFeatures& probe,
                            const MatchFeatures& gallery,
                            const MatchConfig& mcfg) {
    IcpResult icp = icp_align(probe.points, gallery.points, mcfg);

    // icp works in absolute pixel coordinates; apply_transform rotates
    // about the image center, so rebase the translation.
    RigidTransform2D t = icp.transform;
    Vec2 center{(probe.mask.width - 1) / 2.0, (probe.mask.height - 1) / 2.0};
    Vec2 rc = RigidTransform2D{t.rotation_deg, {0, 0}}.apply(center);
    t.translation = {t.translation.x - center.x + rc.x,
                     t.translation.y - center.y + rc.y};

    BinaryVeinMap aligned = apply_transform(probe.mask, t);
    return score_to_100(miura_correlation(aligned, gallery.mask, mcfg));
}

MatchScore compare(const NirImage& probe_img, const NirImage& gallery_img,
                   const ExtractionConfig& ecfg, const MatchConfig& mcfg) {
    MatchFeatures p = extract_match_features(probe_img, ecfg);
    MatchFeatures g = extract_match_features(gallery_img, ecfg);
    return compare_features(p, g, mcfg);
}

} // namespace veinforge
