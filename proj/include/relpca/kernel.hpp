#pragma once

#include <cstdint>
#include <string>

#include "relpca/channel.hpp"
#include "relpca/errors.hpp"
#include "relpca/parallel.hpp"
#include "relpca/rng.hpp"
#include "relpca/types.hpp"

namespace relpca {

enum class KernelStage { raw, symmetrized, detraced };

struct KernelMeta {
    std::uint64_t seed = 0;
    Index samples_per_row = 0;
    double sigma = 0.0;
    double h = 0.0;
    double asymmetry = -1.0;  // filled by asymmetry()
    Index clamp_count = 0;    // filled by symmetrize()
};

struct KernelMatrix {
    MatrixXd entries;
    KernelStage stage = KernelStage::raw;
    KernelMeta meta;

    Index n() const { return entries.rows(); }
};

// Monte Carlo estimate of the relevance kernel for any point channel that
// exposes size() and accumulate_row().  Row i averages S responsibility
// vectors of draws from p(.|x_i) on a stream derived as (seed, "kernel", i);
// rows are embarrassingly parallel and the result is bitwise independent of
// the worker count.
template <class PointChannel>
MatrixXd estimate_kernel_raw(const PointChannel& channel, Index samples_per_row,
                             std::uint64_t seed, int workers) {
    const Index n = channel.size();
    MatrixXd K(n, n);
    parallel_for(n, workers, [&](Index i) {
        RngStream rng = derive_stream(seed, "kernel", static_cast<std::uint64_t>(i));
        VectorXd acc = VectorXd::Zero(n);
        channel.accumulate_row(i, samples_per_row, rng, acc);
        K.row(i) = acc.transpose() / double(samples_per_row);
    });
    return K;
}

inline KernelMatrix estimate_kernel(const Dataset& data, const ChannelParams& params,
                                    Index total_samples, std::uint64_t seed,
                                    int workers = default_workers()) {
    if (data.n() < 1) throw DataError("estimate_kernel: empty dataset");
    if (total_samples < data.n())
        throw InsufficientSamples("total_samples " + std::to_string(total_samples) +
                                  " < n " + std::to_string(data.n()));
    const Index S = total_samples / data.n();
    const BlurredSet blurred = blur_set(data, params);
    const GaussianPointChannel channel{blurred, params};
    KernelMatrix K;
    K.entries = estimate_kernel_raw(channel, S, seed, workers);
    K.stage = KernelStage::raw;
    K.meta.seed = seed;
    K.meta.samples_per_row = S;
    K.meta.sigma = params.sigma;
    K.meta.h = params.h;
    return K;
}

// Relative asymmetry of the raw estimate: mass-weighted over pairs i < j
// whose mean entry clears the floor 1e-6/n,
//   sum |K'_ij - K'_ji|  /  sum (K'_ij + K'_ji)/2.
// Single-pair inputs reduce to the plain ratio |d|/mean.
inline double asymmetry(const KernelMatrix& K) {
    if (K.stage != KernelStage::raw) throw ConfigError("asymmetry expects a raw kernel");
    const Index n = K.n();
    const double floor = 1e-6 / double(n);
    double num = 0.0, den = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const double a = K.entries(i, j), b = K.entries(j, i);
            const double mean = 0.5 * (a + b);
            if (mean > floor) {
                num += std::abs(a - b);
                den += mean;
            }
        }
    return den > 0.0 ? num / den : 0.0;
}

// K = (K' + K'^T)/2 with entries clamped to [0,1]; clamping events counted.
// Mirror assignment makes the result bitwise symmetric.
inline KernelMatrix symmetrize(const KernelMatrix& K_raw) {
    if (K_raw.stage != KernelStage::raw) throw ConfigError("symmetrize expects a raw kernel");
    KernelMatrix K = K_raw;
    K.stage = KernelStage::symmetrized;
    Index clamps = 0;
    const Index n = K.n();
    for (Index i = 0; i < n; ++i)
        for (Index j = i; j < n; ++j) {
            double v = 0.5 * (K_raw.entries(i, j) + K_raw.entries(j, i));
            if (v < 0.0) {
                v = 0.0;
                ++clamps;
            } else if (v > 1.0) {
                v = 1.0;
                ++clamps;
            }
            K.entries(i, j) = v;
            K.entries(j, i) = v;
        }
    K.meta.clamp_count = clamps;
    return K;
}

inline KernelMatrix detrace(const KernelMatrix& K_sym) {
    if (K_sym.stage != KernelStage::symmetrized)
        throw ConfigError("detrace expects a symmetrized kernel");
    KernelMatrix K = K_sym;
    K.stage = KernelStage::detraced;
    K.entries.array() -= 1.0 / double(K.n());
    return K;
}

}  // namespace relpca
