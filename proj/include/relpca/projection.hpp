#pragma once

#include <cstdint>
#include <string>

#include "relpca/channel.hpp"
#include "relpca/errors.hpp"
#include "relpca/parallel.hpp"
#include "relpca/spectral.hpp"
#include "relpca/types.hpp"

namespace relpca {

enum class ProjectionMethod { proj, proj0, rbf };

struct ComponentMatrix {
    MatrixXd values;  // points x k
    ProjectionMethod method = ProjectionMethod::proj;
};

constexpr double kEtaFloor = 1e-6;

// Closed-form projection: z is treated as a raw channel output (not blurred);
// component j is the responsibility-weighted sum of the coefficient vector.
inline VectorXd project_fast(const VectorXd& z, const FeatureBasis& basis,
                             const BlurredSet& set, const ChannelParams& params) {
    const VectorXd w = responsibilities(z, set, params.h);
    return basis.coefficients.transpose() * w;
}

// Monte Carlo projection: draw T outputs from p(.|z) (blur + noise), average
// responsibilities, then divide component j by its eigenvalue.
inline VectorXd project_mc(const VectorXd& z, const FeatureBasis& basis,
                           const BlurredSet& set, const ChannelParams& params,
                           Index samples, RngStream& rng) {
    if (samples < 1) throw ConfigError("project_mc needs samples >= 1");
    for (Index j = 0; j < basis.k; ++j)
        if (std::abs(basis.eigenvalues[j]) <= kEtaFloor)
            throw DegenerateEigenvalue("eigenvalue " + std::to_string(j) +
                                       " below floor; cannot divide");
    const VectorXd wbar = mean_responsibilities(z, set, params, samples, rng);
    VectorXd out = basis.coefficients.transpose() * wbar;
    out.array() /= basis.eigenvalues.array();
    return out;
}

// Batched wrapper; row p equals the single-point call on row p bitwise.
// proj0 derives a per-point stream (seed, "proj0", p) so the batch result is
// independent of scheduling.
inline ComponentMatrix project_batch(const Dataset& points, const FeatureBasis& basis,
                                     const BlurredSet& set, const ChannelParams& params,
                                     ProjectionMethod method, Index samples = 0,
                                     std::uint64_t seed = 0,
                                     int workers = default_workers()) {
    if (method == ProjectionMethod::rbf)
        throw ConfigError("project_batch handles proj/proj0; use the baseline module for rbf");
    if (points.n() > 0 && points.dim() != set.dim())
        throw DimensionMismatch("projection input dimension mismatch");
    ComponentMatrix out;
    out.method = method;
    out.values.resize(points.n(), basis.k);
    if (method == ProjectionMethod::proj0) {
        // validate eigenvalues once up front so empty batches still error
        for (Index j = 0; j < basis.k; ++j)
            if (std::abs(basis.eigenvalues[j]) <= kEtaFloor)
                throw DegenerateEigenvalue("eigenvalue " + std::to_string(j) +
                                           " below floor; cannot divide");
    }
    parallel_for(points.n(), workers, [&](Index p) {
        const VectorXd z = points.points.row(p).transpose();
        if (method == ProjectionMethod::proj) {
            out.values.row(p) = project_fast(z, basis, set, params).transpose();
        } else {
            RngStream rng = derive_stream(seed, "proj0", static_cast<std::uint64_t>(p));
            out.values.row(p) = project_mc(z, basis, set, params, samples, rng).transpose();
        }
    });
    return out;
}

}  // namespace relpca
