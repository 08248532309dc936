#include "relpca/synth.hpp"

#include <algorithm>
#include <cmath>

#include "relpca/errors.hpp"

namespace relpca {

namespace {

struct Pt {
    double x, y;
};

struct Stroke {
    std::vector<Pt> line;
    double width_mult;
    double amp_mult;
};

// Shared body of the 5/6 twin pair; 6 adds the central closing hook.
const std::vector<Pt> kBody56 = {{0.72, 0.14}, {0.34, 0.14}, {0.30, 0.46}, {0.56, 0.44},
                                 {0.70, 0.56}, {0.70, 0.74}, {0.52, 0.86}, {0.33, 0.78}};

const double kHookWidth = 0.12 / 0.07;
const double kHookAmp = 1.10;

std::vector<Stroke> shape_for(int digit) {
    switch (digit) {
        case 0:
            return {{{{0.5, 0.12}, {0.78, 0.3}, {0.78, 0.7}, {0.5, 0.88}, {0.22, 0.7}, {0.22, 0.3}, {0.5, 0.12}}, 1, 1}};
        case 1:
            return {{{{0.35, 0.28}, {0.55, 0.12}, {0.55, 0.88}}, 1, 1}};
        case 2:
            return {{{{0.22, 0.3}, {0.35, 0.13}, {0.65, 0.13}, {0.76, 0.3}, {0.7, 0.5}, {0.24, 0.86}, {0.78, 0.86}}, 1, 1}};
        case 3:
            return {{{{0.40, 0.14}, {0.72, 0.12}, {0.84, 0.30}, {0.66, 0.46}, {0.86, 0.64}, {0.72, 0.86}, {0.40, 0.84}}, 1, 1}};
        case 4:
            return {{{{0.60, 0.90}, {0.60, 0.10}, {0.16, 0.58}, {0.82, 0.58}}, 1, 1}};
        case 5:
            return {{kBody56, 1, 1}};
        case 6:
            return {{kBody56, 1, 1},
                    {{{0.33, 0.78}, {0.28, 0.58}, {0.50, 0.52}}, kHookWidth, kHookAmp},
                    {{{0.34, 0.64}, {0.46, 0.64}}, kHookWidth, kHookAmp}};
        case 7:
            return {{{{0.22, 0.14}, {0.78, 0.14}, {0.45, 0.88}}, 1, 1}};
        case 8:
            return {{{{0.5, 0.12}, {0.72, 0.27}, {0.5, 0.47}, {0.28, 0.27}, {0.5, 0.12}}, 1, 1},
                    {{{0.5, 0.47}, {0.75, 0.67}, {0.5, 0.88}, {0.25, 0.67}, {0.5, 0.47}}, 1, 1}};
        case 9:
            return {{{{0.72, 0.35}, {0.5, 0.5}, {0.3, 0.35}, {0.5, 0.13}, {0.72, 0.3}, {0.7, 0.6}, {0.6, 0.88}}, 1, 1}};
        default:
            throw ConfigError("synth digit must be 0..9");
    }
}

double seg_dist(double px, double py, Pt a, Pt b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    if (len2 == 0.0) return std::hypot(px - a.x, py - a.y);
    double t = ((px - a.x) * vx + (py - a.y) * vy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(px - (a.x + t * vx), py - (a.y + t * vy));
}

double strip_top(Index r, double sigma) {
    const double d = double(r) - 1.5;
    return std::exp(-d * d / (2.0 * sigma * sigma));
}

double strip_right(Index c, double sigma) {
    const double d = double(c) - (double(kSynthSide) - 2.5);
    return std::exp(-d * d / (2.0 * sigma * sigma));
}

}  // namespace

VectorXd render_digit(int digit, int site, RngStream& rng, const SynthParams& params) {
    const Index R = kSynthSide;
    int lv1, lv2;
    if (site >= 0) {
        lv1 = site / params.levels;
        lv2 = site % params.levels;
    } else {
        lv1 = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(params.levels)));
        lv2 = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(params.levels)));
    }

    const double amp = params.amp0() + rng.uniform(-params.aj, params.aj) * params.gamma;
    const double w = params.w0 + rng.uniform(-params.wj, params.wj);
    const double th = rng.uniform(-params.rot, params.rot);
    const double sx = rng.uniform(params.s_lo, params.s_hi);
    const double sy = rng.uniform(params.s_lo, params.s_hi);
    const double shear = rng.uniform(-params.sh, params.sh);
    const double tx = rng.uniform(-params.tr, params.tr);
    const double ty = rng.uniform(-params.tr, params.tr);
    const double c = std::cos(th), s = std::sin(th);

    VectorXd glyph = VectorXd::Zero(R * R);
    for (const Stroke& stroke : shape_for(digit)) {
        std::vector<Pt> pts;
        pts.reserve(stroke.line.size());
        for (Pt p : stroke.line) {
            const double jx = p.x + rng.normal(0.0, params.cp);
            const double jy = p.y + rng.normal(0.0, params.cp);
            const double x0 = jx - 0.5, y0 = jy - 0.5;
            const double x1 = sx * (x0 + shear * y0);
            const double y1 = sy * y0;
            pts.push_back({c * x1 - s * y1 + 0.5 + tx, s * x1 + c * y1 + 0.5 + ty});
        }
        const double sa = std::min(amp * stroke.amp_mult, 0.98);
        const double sw = w * stroke.width_mult;
        for (std::size_t q = 0; q + 1 < pts.size(); ++q)
            for (Index r = 0; r < R; ++r)
                for (Index col = 0; col < R; ++col) {
                    const double px = (double(col) + 0.5) / double(R);
                    const double py = (double(r) + 0.5) / double(R);
                    const double d = seg_dist(px, py, pts[q], pts[q + 1]);
                    const double v = sa * std::exp(-d * d / (2.0 * sw * sw));
                    double& cell = glyph[r * R + col];
                    if (v > cell) cell = v;
                }
    }

    const double l1 = double(lv1) + rng.uniform(-params.lj, params.lj);
    const double l2 = double(lv2) + rng.uniform(-params.lj, params.lj);
    VectorXd img(R * R);
    for (Index r = 0; r < R; ++r)
        for (Index col = 0; col < R; ++col) {
            double v = glyph[r * R + col] + l1 * params.beta * strip_top(r, params.strip_sigma) +
                       l2 * params.beta * strip_right(col, params.strip_sigma);
            v = std::clamp(v, 0.0, 1.0);
            // byte quantization so IDX serialization round-trips bit-exactly
            img[r * R + col] = std::round(v * 255.0) / 255.0;
        }
    return img;
}

SynthSet synth_dataset(const std::vector<int>& digits, Index per_class, std::uint64_t seed,
                       const SynthParams& params) {
    SynthSet out;
    out.images.count = static_cast<Index>(digits.size()) * per_class;
    out.images.rows = kSynthSide;
    out.images.cols = kSynthSide;
    out.images.pixels.resize(out.images.count, kSynthSide * kSynthSide);
    out.labels.labels.reserve(static_cast<std::size_t>(out.images.count));
    Index row = 0;
    for (int digit : digits) {
        for (Index i = 0; i < per_class; ++i) {
            RngStream rng = derive_stream(seed, "synth", static_cast<std::uint64_t>(row));
            const int site = static_cast<int>(i % params.sites());
            out.images.pixels.row(row) = render_digit(digit, site, rng, params).transpose();
            out.labels.labels.push_back(digit);
            ++row;
        }
    }
    return out;
}

}  // namespace relpca
