#include "veinforge/render.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "parallel.hpp"

namespace veinforge {

void RenderConfig::validate() const {
    if (pixel_pitch_mm <= 0.0) throw ConfigError("pixel pitch must be > 0");
    if (ray_step_mm <= 0.0) throw ConfigError("ray step must be > 0");
    if (i0 <= 0.0) throw ConfigError("I0 must be > 0");
    if (scatter_sigma0_mm < 0.0 || scatter_k < 0.0 || noise_sigma < 0.0)
        throw ConfigError("scatter and noise parameters must be >= 0");
}

namespace {

// ---------------------------------------------------------------------------
// Tissue/bone pass: marching with boundary bisection
// ---------------------------------------------------------------------------

enum class BtMaterial : int { air = 0, tissue = 1, bone = 2 };

struct BtSampler {
    const FingerPhantomModel* model;
    double x, z; // ray position; the ray runs along y

    BtMaterial operator()(double y) const {
        double r2 = x * x + y * y;
        double R = model->outer_radius_mm;
        if (r2 > R * R || z < 0.0 || z > model->length_mm)
            return BtMaterial::air;
        for (const auto& b : model->bones) {
            if (z >= b.z_start_mm && z <= b.z_end_mm) {
                double rho2 = r2;
                if (rho2 <= b.shaft_radius_mm * b.shaft_radius_mm)
                    return BtMaterial::bone;
                bool in_joint =
                    (z <= b.z_start_mm + b.joint_length_mm ||
                     z >= b.z_end_mm - b.joint_length_mm);
                if (in_joint &&
                    rho2 <= b.joint_radius_mm * b.joint_radius_mm)
                    return BtMaterial::bone;
            }
        }
        return BtMaterial::tissue;
    }
};

// Optical depth along y in [y0, y1]. Marches in fixed steps and bisects any
// detected material change, so piecewise-constant media integrate to the
// boundary-location tolerance rather than the step size. Features thinner
// than the step can still slip between samples.
double integrate_bt(const BtSampler& sample, const double mu[3], double y0,
                    double y1, double step) {
    const double tol = 1e-10;
    int n = std::max(1, int(std::ceil((y1 - y0) / step)));
    double dl = (y1 - y0) / n;

    double tau = 0.0;
    double prev_y = y0;
    BtMaterial prev = sample(y0);
    for (int i = 1; i <= n; ++i) {
        double y = (i == n) ? y1 : y0 + i * dl;
        BtMaterial cur = sample(y);
        if (cur == prev) {
            tau += mu[int(prev)] * (y - prev_y);
        } else {
            double lo = prev_y, hi = y;
            while (hi - lo > tol) {
                double mid = 0.5 * (lo + hi);
                if (sample(mid) == prev)
                    lo = mid;
                else
                    hi = mid;
            }
            double yb = 0.5 * (lo + hi);
            tau += mu[int(prev)] * (yb - prev_y) + mu[int(cur)] * (y - yb);
        }
        prev_y = y;
        prev = cur;
    }
    return tau;
}

// ---------------------------------------------------------------------------
// Vein pass: exact vertical-line/capsule-chain intersection
// ---------------------------------------------------------------------------

using Interval = std::pair<double, double>;

// Appends {y : a*y^2 + b*y + c <= 0} n [lo, hi] to out.
void quad_sublevel(double a, double b, double c, double lo, double hi,
                   std::vector<Interval>& out) {
    const double eps = 1e-14;
    if (lo >= hi) return;
    if (std::abs(a) <= eps) {
        if (std::abs(b) <= eps) {
            if (c <= 0.0) out.push_back({lo, hi});
            return;
        }
        double root = -c / b;
        if (b > 0.0) {
            if (root > lo) out.push_back({lo, std::min(root, hi)});
        } else {
            if (root < hi) out.push_back({std::max(root, lo), hi});
        }
        return;
    }
    double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) {
        if (a < 0.0) out.push_back({lo, hi}); // always below
        return;
    }
    double sq = std::sqrt(disc);
    double r0 = (-b - sq) / (2.0 * a);
    double r1 = (-b + sq) / (2.0 * a);
    if (r0 > r1) std::swap(r0, r1);
    if (a > 0.0) {
        double s = std::max(r0, lo), e = std::min(r1, hi);
        if (s < e) out.push_back({s, e});
    } else {
        double e0 = std::min(r0, hi);
        if (lo < e0) out.push_back({lo, e0});
        double s1 = std::max(r1, lo);
        if (s1 < hi) out.push_back({s1, hi});
    }
}

// Intervals of y where (x, y, z) lies inside the capsule around segment AB
// with radius varying linearly from ra to rb.
void capsule_intervals(double x, double z, const Vec3& A, const Vec3& B,
                       double ra, double rb, double lo, double hi,
                       std::vector<Interval>& out) {
    Vec3 d = B - A;
    double L2 = d.dot(d);

    // |P(y) - A|^2 = qa*y^2 + qb*y + qc with P(y) = (x, y, z)
    double ex = x - A.x, ez = z - A.z;
    double qa = 1.0, qb = -2.0 * A.y, qc = ex * ex + A.y * A.y + ez * ez;

    if (L2 < 1e-24) {
        double r = std::max(ra, rb);
        quad_sublevel(qa, qb, qc - r * r, lo, hi, out);
        return;
    }

    // s(y) = (P(y) - A) . d  =  sc + y * dy
    double sc = ex * d.x - A.y * d.y + ez * d.z;
    double dy = d.y;

    // Inner regime: dist^2 = |P-A|^2 - s^2/L2, radius rA + (s/L2)(rb - ra).
    double k = (rb - ra) / L2;
    // f(y) = q(y) - s(y)^2/L2 - (ra + k*s(y))^2
    double fa = qa - dy * dy / L2 - k * k * dy * dy;
    double fb = qb - 2.0 * sc * dy / L2 -
                (2.0 * ra * k * dy + 2.0 * k * k * sc * dy);
    double fc = qc - sc * sc / L2 - (ra + k * sc) * (ra + k * sc);

    if (std::abs(dy) < 1e-15) {
        // The projection parameter does not depend on y; one regime applies.
        double t = sc / L2;
        if (t <= 0.0) {
            quad_sublevel(qa, qb, qc - ra * ra, lo, hi, out);
        } else if (t >= 1.0) {
            double bx = x - B.x, bz = z - B.z;
            quad_sublevel(1.0, -2.0 * B.y,
                          bx * bx + B.y * B.y + bz * bz - rb * rb, lo, hi,
                          out);
        } else {
            quad_sublevel(fa, fb, fc, lo, hi, out);
        }
        return;
    }

    double y_s0 = -sc / dy;          // s = 0
    double y_s1 = (L2 - sc) / dy;    // s = L2
    double ya = std::min(y_s0, y_s1);
    double yb2 = std::max(y_s0, y_s1);
    bool a_side_first = (dy > 0.0); // below ya the s<0 (A) regime when dy>0

    // A-cap regime
    {
        double rlo = a_side_first ? lo : std::max(lo, yb2);
        double rhi = a_side_first ? std::min(hi, ya) : hi;
        quad_sublevel(qa, qb, qc - ra * ra, rlo, rhi, out);
    }
    // B-cap regime
    {
        double bx = x - B.x, bz = z - B.z;
        double rlo = a_side_first ? std::max(lo, yb2) : lo;
        double rhi = a_side_first ? hi : std::min(hi, ya);
        quad_sublevel(1.0, -2.0 * B.y,
                      bx * bx + B.y * B.y + bz * bz - rb * rb, rlo, rhi, out);
    }
    // Inner regime
    quad_sublevel(fa, fb, fc, std::max(lo, ya), std::min(hi, yb2), out);
}

double merged_length(std::vector<Interval>& intervals) {
    if (intervals.empty()) return 0.0;
    std::sort(intervals.begin(), intervals.end());
    double total = 0.0;
    double cur_s = intervals[0].first, cur_e = intervals[0].second;
    for (size_t i = 1; i < intervals.size(); ++i) {
        if (intervals[i].first > cur_e) {
            total += cur_e - cur_s;
            cur_s = intervals[i].first;
            cur_e = intervals[i].second;
        } else {
            cur_e = std::max(cur_e, intervals[i].second);
        }
    }
    return total + (cur_e - cur_s);
}

// ---------------------------------------------------------------------------
// Blur and noise
// ---------------------------------------------------------------------------

void gaussian_blur(std::vector<double>& img, int w, int h, double sigma_px) {
    if (sigma_px < 1e-9) return;
    int radius = std::max(1, int(std::ceil(4.0 * sigma_px)));
    std::vector<double> kernel(size_t(2 * radius + 1));
    double norm = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        kernel[t + radius] = std::exp(-0.5 * t * t / (sigma_px * sigma_px));
        norm += kernel[t + radius];
    }
    for (auto& k : kernel) k /= norm;

    std::vector<double> tmp(img.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += kernel[t + radius] *
                       img[size_t(y) * w + std::clamp(x + t, 0, w - 1)];
            tmp[size_t(y) * w + x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += kernel[t + radius] *
                       tmp[size_t(std::clamp(y + t, 0, h - 1)) * w + x];
            img[size_t(y) * w + x] = acc;
        }
    }
}

// Deterministic standard normal from splittable uniform bits (Box-Muller;
// std::normal_distribution is implementation-defined).
struct NormalRng {
    std::mt19937_64 rng;
    explicit NormalRng(std::uint64_t seed) : rng(seed) {}

    double uniform() {
        return double((rng() >> 11) + 1) * 0x1.0p-53; // (0, 1]
    }
    double normal() {
        double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }
};

} // namespace

double tube_chord_length(const VeinTube& tube, double x, double z) {
    std::vector<Interval> intervals;
    double bound = 0.0;
    for (const auto& p : tube.path)
        bound = std::max(bound, std::abs(p.y));
    bound += *std::max_element(tube.radius_mm.begin(), tube.radius_mm.end()) +
             1.0;
    for (size_t i = 0; i + 1 < tube.path.size(); ++i)
        capsule_intervals(x, z, tube.path[i], tube.path[i + 1],
                          tube.radius_mm[i], tube.radius_mm[i + 1], -bound,
                          bound, intervals);
    return merged_length(intervals);
}

NirImage render_nir(const FingerPhantomModel& model, const RenderConfig& cfg,
                    std::uint64_t noise_seed, const ScannerPose& pose) {
    cfg.validate();
    const double R = model.outer_radius_mm;
    const double L = model.length_mm;
    if (cfg.ray_step_mm >= R)
        throw ConfigError("ray step must be smaller than the cylinder radius");

    const double pitch = cfg.pixel_pitch_mm;
    const int width = std::max(1, int(std::ceil(L / pitch)));
    const int height = std::max(1, int(std::ceil(2.0 * R / pitch)));

    NirImage img = NirImage::filled(width, height, 0.0, pitch);

    const double mu[3] = {0.0, effective_mu(model.materials.tissue),
                          effective_mu(model.materials.bone)};

    // The pose rotates about the vertical axis, so a world pixel (x, z)
    // maps to a model-frame anchor and the ray stays vertical.
    const double pa = deg_to_rad(pose.rotation_deg);
    const double pc = std::cos(pa), ps = std::sin(pa);
    auto world_to_model = [&](double x, double z, double& xm, double& zm) {
        double cx = x - pose.dx_mm;
        double cz = z - L / 2.0 - pose.dz_mm;
        // rotate by -pose about the footprint center
        xm = pc * cx + ps * cz;
        zm = -ps * cx + pc * cz + L / 2.0;
    };

    // Pass 1: bone + tissue attenuation, normalized so air is exactly 1.
    detail::parallel_for(size_t(height), [&](size_t row) {
        double x = (double(row) + 0.5) * pitch - R;
        for (int col = 0; col < width; ++col) {
            double z = (double(col) + 0.5) * pitch;
            double xm, zm;
            world_to_model(x, z, xm, zm);
            BtSampler sampler{&model, xm, zm};
            double tau =
                integrate_bt(sampler, mu, -R, R, cfg.ray_step_mm);
            img.at(col, int(row)) = std::exp(-tau);
        }
    });
    gaussian_blur(img.pixels, width, height, cfg.scatter_sigma0_mm / pitch);

    // Pass 2: per-vein occlusion patches, blurred by the depth-dependent
    // sigma, multiplied into the base image. Tubes are mapped into the
    // world frame once; vertical-line geometry is preserved by the pose.
    const double mu_vein = effective_mu(model.materials.vein);
    const double sigma_vein_px =
        (cfg.scatter_sigma0_mm + cfg.scatter_k * model.vein_depth_mm) / pitch;
    const int pad = int(std::ceil(4.0 * sigma_vein_px)) + 1;

    std::vector<VeinTube> world_veins = model.veins;
    for (auto& tube : world_veins) {
        for (auto& p : tube.path) {
            double cx = p.x, cz = p.z - L / 2.0;
            p.x = pc * cx - ps * cz + pose.dx_mm;
            p.z = ps * cx + pc * cz + L / 2.0 + pose.dz_mm;
        }
    }

    for (const auto& tube : world_veins) {
        double rmax = *std::max_element(tube.radius_mm.begin(),
                                        tube.radius_mm.end());
        double x_min = 1e300, x_max = -1e300, z_min = 1e300, z_max = -1e300;
        for (const auto& p : tube.path) {
            x_min = std::min(x_min, p.x);
            x_max = std::max(x_max, p.x);
            z_min = std::min(z_min, p.z);
            z_max = std::max(z_max, p.z);
        }
        int row0 = std::max(0, int((x_min - rmax + R) / pitch) - pad);
        int row1 = std::min(height - 1, int((x_max + rmax + R) / pitch) + pad);
        int col0 = std::max(0, int((z_min - rmax) / pitch) - pad);
        int col1 = std::min(width - 1, int((z_max + rmax) / pitch) + pad);
        if (row0 > row1 || col0 > col1) continue;

        int pw = col1 - col0 + 1, ph = row1 - row0 + 1;
        std::vector<double> patch(size_t(pw) * ph, 1.0);
        detail::parallel_for(size_t(ph), [&](size_t pr) {
            double x = (double(row0 + int(pr)) + 0.5) * pitch - R;
            std::vector<Interval> intervals;
            for (int pc = 0; pc < pw; ++pc) {
                double z = (double(col0 + pc) + 0.5) * pitch;
                intervals.clear();
                for (size_t i = 0; i + 1 < tube.path.size(); ++i)
                    capsule_intervals(x, z, tube.path[i], tube.path[i + 1],
                                      tube.radius_mm[i],
                                      tube.radius_mm[i + 1], -R, R,
                                      intervals);
                double chord = merged_length(intervals);
                if (chord > 0.0)
                    patch[pr * size_t(pw) + pc] = std::exp(-mu_vein * chord);
            }
        });
        gaussian_blur(patch, pw, ph, sigma_vein_px);
        for (int pr = 0; pr < ph; ++pr)
            for (int pc = 0; pc < pw; ++pc)
                img.at(col0 + pc, row0 + pr) *= patch[size_t(pr) * pw + pc];
    }

    if (cfg.noise_sigma > 0.0) {
        NormalRng rng(noise_seed);
        for (double& v : img.pixels) v += cfg.noise_sigma * rng.normal();
    }
    for (double& v : img.pixels) v = std::clamp(v, 0.0, 1.0);
    return img;
}

std::vector<double> render_joint_profile(const FingerPhantomModel& model,
                                         const RenderConfig& cfg,
                                         std::uint64_t noise_seed) {
    NirImage img = render_nir(model, cfg, noise_seed);
    std::vector<double> profile(size_t(img.width), 0.0);
    for (int x = 0; x < img.width; ++x) {
        double acc = 0.0;
        for (int y = 0; y < img.height; ++y) acc += img.at(x, y);
        profile[size_t(x)] = acc / img.height;
    }
    return profile;
}

} // namespace veinforge
