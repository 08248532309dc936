#pragma once

#include <utility>
#include <vector>

#include "relpca/errors.hpp"
#include "relpca/kernel.hpp"
#include "relpca/types.hpp"

namespace relpca {

struct Spectrum {
    VectorXd eigenvalues;  // descending
    MatrixXd vectors;      // columns, orthonormal, sign-fixed
};

struct FeatureBasis {
    Index k = 0;
    VectorXd eigenvalues;  // eta_1 >= ... >= eta_k
    MatrixXd coefficients; // n x k, unit-norm columns
    // adjacent pairs (a, a+1) within the selected k whose eigenvalues are
    // closer than 1e-9; their eigenvector split is basis-arbitrary
    std::vector<std::pair<Index, Index>> degenerate_pairs;
};

// Dense symmetric eigensolve of the detraced kernel.  Eigenvalues are sorted
// descending and each eigenvector's largest-magnitude entry is made positive
// so persisted bases are reproducible.
inline Spectrum eigendecompose(const KernelMatrix& K) {
    if (K.stage != KernelStage::detraced)
        throw ConfigError("eigendecompose expects a detraced kernel");
    const Index n = K.n();
    double max_dev = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            max_dev = std::max(max_dev, std::abs(K.entries(i, j) - K.entries(j, i)));
    if (max_dev > 1e-12)
        throw NotSymmetric("kernel asymmetric by " + std::to_string(max_dev));

    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(K.entries);
    if (solver.info() != Eigen::Success) throw NumericError("eigendecomposition failed");

    Spectrum spec;
    spec.eigenvalues = solver.eigenvalues().reverse();
    spec.vectors = solver.eigenvectors().rowwise().reverse();
    for (Index j = 0; j < n; ++j) {
        Index arg = 0;
        spec.vectors.col(j).cwiseAbs().maxCoeff(&arg);
        if (spec.vectors(arg, j) < 0.0) spec.vectors.col(j) = -spec.vectors.col(j);
    }
    return spec;
}

inline FeatureBasis top_features(const Spectrum& spectrum, Index k) {
    const Index n = spectrum.eigenvalues.size();
    if (k < 1 || k > n)
        throw KOutOfRange("k = " + std::to_string(k) + " outside 1.." + std::to_string(n));
    FeatureBasis basis;
    basis.k = k;
    basis.eigenvalues = spectrum.eigenvalues.head(k);
    basis.coefficients = spectrum.vectors.leftCols(k);
    for (Index a = 0; a + 1 < k; ++a)
        if (std::abs(basis.eigenvalues[a] - basis.eigenvalues[a + 1]) <= 1e-9)
            basis.degenerate_pairs.emplace_back(a, a + 1);
    return basis;
}

}  // namespace relpca
