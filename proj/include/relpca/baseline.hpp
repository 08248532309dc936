#pragma once

#include <string>

#include "relpca/channel.hpp"
#include "relpca/errors.hpp"
#include "relpca/types.hpp"

namespace relpca {

struct RbfParams {
    double delta = 40.0;
    bool apply_blur = true;
};

// Gaussian RBF Gram matrix exp(-|a-b|^2 / (2 delta^2)) on (optionally
// blurred) points; symmetric with an exactly unit diagonal.
inline MatrixXd rbf_kernel(const Dataset& points, const RbfParams& rbf,
                           const ChannelParams& channel) {
    if (rbf.delta <= 0.0) throw ConfigError("rbf delta must be positive");
    MatrixXd P = points.points;
    if (rbf.apply_blur) {
        for (Index i = 0; i < P.rows(); ++i) {
            VectorXd row = P.row(i).transpose();
            P.row(i) = blur(row, channel).transpose();
        }
    }
    const Index n = P.rows();
    const double inv = 1.0 / (2.0 * rbf.delta * rbf.delta);
    MatrixXd K(n, n);
    for (Index i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (Index j = i + 1; j < n; ++j) {
            const double v = std::exp(-(P.row(i) - P.row(j)).squaredNorm() * inv);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

// Kernel PCA basis with the centering statistics needed for out-of-sample
// projection.  alphas are eigenvectors scaled by 1/sqrt(lambda) so training
// components have unit variance.
struct KpcaBasis {
    MatrixXd alphas;      // n x k
    VectorXd lambdas;     // top k eigenvalues of the (optionally centered) Gram
    VectorXd row_means;   // centering stats of the training Gram
    double grand_mean = 0.0;
    bool centered = true;
    MatrixXd train_components;  // n x k
};

inline KpcaBasis kpca_fit(const MatrixXd& kernel, Index k, bool centered = true) {
    const Index n = kernel.rows();
    if (kernel.cols() != n) throw DimensionMismatch("kpca_fit expects a square kernel");
    if (k < 1 || k > n)
        throw KOutOfRange("kpca k = " + std::to_string(k) + " outside 1.." + std::to_string(n));

    KpcaBasis basis;
    basis.centered = centered;
    basis.row_means = kernel.rowwise().mean();
    basis.grand_mean = kernel.mean();
    MatrixXd Kc = kernel;
    if (centered) {
        Kc.colwise() -= basis.row_means;
        Kc.rowwise() -= basis.row_means.transpose();
        Kc.array() += basis.grand_mean;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(Kc);
    if (solver.info() != Eigen::Success) throw NumericError("kpca eigendecomposition failed");
    const VectorXd evals = solver.eigenvalues().reverse();
    MatrixXd evecs = solver.eigenvectors().rowwise().reverse();
    for (Index j = 0; j < n; ++j) {
        Index arg = 0;
        evecs.col(j).cwiseAbs().maxCoeff(&arg);
        if (evecs(arg, j) < 0.0) evecs.col(j) = -evecs.col(j);
    }
    basis.lambdas = evals.head(k);
    for (Index j = 0; j < k; ++j)
        if (basis.lambdas[j] <= 1e-12)
            throw NonPositiveEigenvalue("kpca eigenvalue " + std::to_string(j) +
                                        " = " + std::to_string(basis.lambdas[j]));
    basis.alphas = evecs.leftCols(k);
    for (Index j = 0; j < k; ++j) basis.alphas.col(j) /= std::sqrt(basis.lambdas[j]);
    basis.train_components = Kc * basis.alphas;
    return basis;
}

// Out-of-sample projection: kernel row against the training points, centered
// with the saved statistics, then inner products with the scaled eigenvectors.
inline MatrixXd kpca_project(const Dataset& test, const KpcaBasis& basis,
                             const Dataset& train, const RbfParams& rbf,
                             const ChannelParams& channel) {
    if (test.n() > 0 && test.dim() != train.dim())
        throw DimensionMismatch("kpca_project dimension mismatch");
    MatrixXd Ptr = train.points, Pte = test.points;
    if (rbf.apply_blur) {
        for (Index i = 0; i < Ptr.rows(); ++i) {
            VectorXd row = Ptr.row(i).transpose();
            Ptr.row(i) = blur(row, channel).transpose();
        }
        for (Index i = 0; i < Pte.rows(); ++i) {
            VectorXd row = Pte.row(i).transpose();
            Pte.row(i) = blur(row, channel).transpose();
        }
    }
    const double inv = 1.0 / (2.0 * rbf.delta * rbf.delta);
    MatrixXd Kx(Pte.rows(), Ptr.rows());
    for (Index i = 0; i < Pte.rows(); ++i)
        for (Index j = 0; j < Ptr.rows(); ++j)
            Kx(i, j) = std::exp(-(Pte.row(i) - Ptr.row(j)).squaredNorm() * inv);
    if (basis.centered) {
        const VectorXd test_means = Kx.rowwise().mean();
        Kx.colwise() -= test_means;
        Kx.rowwise() -= basis.row_means.transpose();
        Kx.array() += basis.grand_mean;
    }
    return Kx * basis.alphas;
}

}  // namespace relpca
