#pragma once

#include <cstdint>
#include <vector>

#include "relpca/dataset.hpp"
#include "relpca/rng.hpp"
#include "relpca/types.hpp"

namespace relpca {

// Deterministic synthetic digit corpus (28x28) used when no real dataset is
// on disk.  Each image is a fixed per-digit polyline glyph under tight
// geometric jitter, plus two shared border-strip patterns (top row, right
// column) whose per-image levels in {0..levels-1} scale strip amplitude by
// lv*beta.
//
// The strips are high-variance nuisance directions shared by all classes:
// plain variance ranking spends its top components on them, while the
// blur-and-noise channel rates the glyph identity as more relevant - which is
// exactly the contrast the pipeline is meant to expose.  Digits 5 and 6 share
// a body and differ by a bright central hook, so their difference stays
// orthogonal to both strips.
//
// The level step beta is large on purpose: images at different strip levels
// are far apart relative to the channel bandwidth, so their mutual kernel
// mass is negligible instead of sitting in the barely-resolved band where a
// finite-sample estimate is all noise.  Shrinking beta (or adding levels)
// parks many pairs in that band and the asymmetry diagnostic degrades fast.
struct SynthParams {
    double gamma = 1.55;   // global stroke contrast scale
    int levels = 2;        // strip levels per axis
    double beta = 0.9;     // strip amplitude per level step
    double strip_sigma = 2.8;
    double w0 = 0.070;     // base stroke width (unit coords)
    // jitter ranges
    double aj = 0.0018;    // stroke amplitude
    double wj = 0.00018;   // stroke width
    double lj = 0.01;      // strip level (continuous, in level units)
    double cp = 0.00042;   // control point wobble (normal std)
    double rot = 0.0051;   // rotation (radians)
    double s_lo = 0.9971, s_hi = 1.0029;  // anisotropic scale
    double sh = 0.0039;    // shear
    double tr = 0.0020;    // translation

    double amp0() const { return 0.45 * gamma; }
    int sites() const { return levels * levels; }
};

constexpr Index kSynthSide = 28;

// Renders one digit at the given strip site (site = lv1*levels + lv2);
// site < 0 draws the levels from the stream instead.
VectorXd render_digit(int digit, int site, RngStream& rng, const SynthParams& params);

struct SynthSet {
    ImageSet images;
    LabelSet labels;
};

// Digit-major corpus; image index i within a class sits at site i % sites()
// so every class covers all strip sites evenly.  Each image draws from its
// own stream (seed, "synth", global_index).
SynthSet synth_dataset(const std::vector<int>& digits, Index per_class, std::uint64_t seed,
                       const SynthParams& params = SynthParams());

}  // namespace relpca
