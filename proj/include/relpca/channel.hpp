#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "relpca/dataset.hpp"
#include "relpca/errors.hpp"
#include "relpca/rng.hpp"
#include "relpca/types.hpp"

namespace relpca {

// Blur-and-noise channel: f = A g + noise, density p(f|g) ~ exp(-|f - Ag|^2 / h^2),
// which makes the per-pixel noise standard deviation h/sqrt(2).
struct ChannelParams {
    double sigma = 1.0;  // blur std dev, pixels
    double h = 1.317;    // noise scale, grayscale units
    Index rows = 28;
    Index cols = 28;

    double noise_stddev() const { return h / std::numbers::sqrt2; }
};

struct BlurredSet {
    MatrixXd points;  // n x m, rows are A x_i
    VectorXd norms;   // |A x_i|^2 per row

    Index n() const { return points.rows(); }
    Index dim() const { return points.cols(); }
};

// Truncated normalized 1-D Gaussian taps for radius ceil(3 sigma).
inline std::vector<double> gaussian_taps(double sigma) {
    if (sigma <= 0.0) return {1.0};
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(2 * radius + 1);
    double sum = 0.0;
    for (int d = -radius; d <= radius; ++d) {
        const double w = std::exp(-double(d) * d / (2.0 * sigma * sigma));
        taps[static_cast<std::size_t>(d + radius)] = w;
        sum += w;
    }
    for (double& w : taps) w /= sum;
    return taps;
}

// Separable 2-D convolution with zero padding; sigma = 0 is the identity.
template <class Scalar>
Vector<Scalar> blur(const Vector<Scalar>& image, const ChannelParams& params) {
    if (image.size() != params.rows * params.cols)
        throw DimensionMismatch("image length does not match channel geometry");
    if (params.sigma <= 0.0) return image;
    const std::vector<double> taps = gaussian_taps(params.sigma);
    const int radius = static_cast<int>(taps.size() / 2);
    const Index R = params.rows, C = params.cols;

    Vector<Scalar> pass(R * C), out(R * C);
    // horizontal
    for (Index r = 0; r < R; ++r)
        for (Index c = 0; c < C; ++c) {
            Scalar acc = 0;
            for (int d = -radius; d <= radius; ++d) {
                const Index cc = c + d;
                if (cc < 0 || cc >= C) continue;
                acc += Scalar(taps[static_cast<std::size_t>(d + radius)]) * image[r * C + cc];
            }
            pass[r * C + c] = acc;
        }
    // vertical
    for (Index r = 0; r < R; ++r)
        for (Index c = 0; c < C; ++c) {
            Scalar acc = 0;
            for (int d = -radius; d <= radius; ++d) {
                const Index rr = r + d;
                if (rr < 0 || rr >= R) continue;
                acc += Scalar(taps[static_cast<std::size_t>(d + radius)]) * pass[rr * C + c];
            }
            out[r * C + c] = acc;
        }
    return out;
}

inline BlurredSet blur_set(const Dataset& data, const ChannelParams& params) {
    BlurredSet set;
    set.points.resize(data.n(), data.dim());
    for (Index i = 0; i < data.n(); ++i) {
        VectorXd row = data.points.row(i).transpose();
        set.points.row(i) = blur(row, params).transpose();
    }
    set.norms = set.points.rowwise().squaredNorm();
    return set;
}

// One channel draw: blur then add i.i.d. Gaussian pixel noise of std h/sqrt(2).
inline VectorXd sample_output(const VectorXd& image, const ChannelParams& params,
                              RngStream& rng) {
    VectorXd f = blur(image, params);
    const double sd = params.noise_stddev();
    for (Index j = 0; j < f.size(); ++j) f[j] += sd * rng.normal();
    return f;
}

// log p(f | g) up to the constant shared by all points: -|f - blurred|^2 / h^2
inline double log_density_sq(const VectorXd& f, const VectorXd& blurred, double h) {
    if (f.size() != blurred.size()) throw DimensionMismatch("log_density_sq sizes differ");
    return -(f - blurred).squaredNorm() / (h * h);
}

namespace detail {

// Row-wise softmax of -sq / h^2 computed with max subtraction (log-sum-exp).
// sq holds squared distances and is overwritten with the probabilities.
inline void softmax_neg_scaled_rows(MatrixXd& sq, double h) {
    const double inv_h2 = 1.0 / (h * h);
    for (Index r = 0; r < sq.rows(); ++r) {
        double best = -std::numeric_limits<double>::infinity();
        for (Index j = 0; j < sq.cols(); ++j) {
            const double logit = -sq(r, j) * inv_h2;
            sq(r, j) = logit;
            if (logit > best) best = logit;
        }
        double z = 0.0;
        for (Index j = 0; j < sq.cols(); ++j) {
            const double e = std::exp(sq(r, j) - best);
            sq(r, j) = e;
            z += e;
        }
        sq.row(r) /= z;
    }
}

// Squared distances |F_r - B_j|^2 by norm expansion, clamped at zero.
inline MatrixXd sqdist_to_set(const MatrixXd& F, const BlurredSet& set) {
    MatrixXd sq = (-2.0 * F * set.points.transpose());
    sq.colwise() += F.rowwise().squaredNorm();
    sq.rowwise() += set.norms.transpose();
    return sq.cwiseMax(0.0);
}

}  // namespace detail

// Bayesian posterior over the n points given an observed channel output f.
inline VectorXd responsibilities(const VectorXd& f, const BlurredSet& set, double h) {
    if (f.size() != set.dim()) throw DimensionMismatch("responsibilities dimensions disagree");
    MatrixXd sq = detail::sqdist_to_set(f.transpose(), set);
    detail::softmax_neg_scaled_rows(sq, h);
    return sq.row(0).transpose();
}

// Channel view of one dataset for the Monte Carlo kernel estimator.  The
// generic surface shared with the test oracles:
//   size()                          -> number of points n
//   accumulate_row(i, S, rng, acc)  -> add S sampled responsibility vectors
//                                      for draws f ~ p(.|x_i) into acc
struct GaussianPointChannel {
    const BlurredSet& set;
    ChannelParams params;

    static constexpr Index kChunk = 256;  // fixed: keeps sums schedule-independent

    Index size() const { return set.n(); }

    void accumulate_row(Index i, Index samples, RngStream& rng, VectorXd& acc) const {
        const double sd = params.noise_stddev();
        const Index m = set.dim();
        MatrixXd F;
        Index left = samples;
        while (left > 0) {
            const Index c = std::min(kChunk, left);
            left -= c;
            F.resize(c, m);
            for (Index t = 0; t < c; ++t)
                for (Index j = 0; j < m; ++j) F(t, j) = set.points(i, j) + sd * rng.normal();
            MatrixXd w = detail::sqdist_to_set(F, set);
            detail::softmax_neg_scaled_rows(w, params.h);
            acc += w.colwise().sum().transpose();
        }
    }
};

// Mean responsibilities over T channel draws from a raw input z (used by the
// Monte Carlo projection).
inline VectorXd mean_responsibilities(const VectorXd& z, const BlurredSet& set,
                                      const ChannelParams& params, Index samples,
                                      RngStream& rng) {
    if (z.size() != set.dim()) throw DimensionMismatch("mean_responsibilities dimensions disagree");
    const VectorXd zb = blur(z, params);
    const double sd = params.noise_stddev();
    const Index m = set.dim();
    VectorXd acc = VectorXd::Zero(set.n());
    MatrixXd F;
    Index left = samples;
    while (left > 0) {
        const Index c = std::min(GaussianPointChannel::kChunk, left);
        left -= c;
        F.resize(c, m);
        for (Index t = 0; t < c; ++t)
            for (Index j = 0; j < m; ++j) F(t, j) = zb[j] + sd * rng.normal();
        MatrixXd w = detail::sqdist_to_set(F, set);
        detail::softmax_neg_scaled_rows(w, params.h);
        acc += w.colwise().sum().transpose();
    }
    return acc / double(samples);
}

}  // namespace relpca
