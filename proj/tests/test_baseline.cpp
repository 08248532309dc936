#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relpca/baseline.hpp"
#include "relpca/rng.hpp"

using namespace relpca;

namespace {

Dataset toy_points(Index n, Index dim, std::uint64_t seed) {
    Dataset d;
    d.points.resize(n, dim);
    RngStream rng(seed);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < dim; ++j) d.points(i, j) = rng.uniform();
    return d;
}

ChannelParams flat_channel(Index dim) {
    ChannelParams p;
    p.sigma = 0.0;
    p.rows = 1;
    p.cols = dim;
    return p;
}

}  // namespace

TEST_CASE("rbf kernel entry matches the closed form") {
    Dataset d;
    d.points.resize(2, 3);
    d.points << 0.0, 0.0, 0.0, 0.3, 0.4, 0.0;  // squared distance 0.25
    const RbfParams rbf{2.0, false};
    const MatrixXd K = rbf_kernel(d, rbf, flat_channel(3));
    CHECK(K(0, 0) == 1.0);
    CHECK(K(1, 1) == 1.0);
    CHECK(K(0, 1) == doctest::Approx(std::exp(-0.25 / 8.0)).epsilon(1e-14));
    CHECK(K(0, 1) == K(1, 0));
}

TEST_CASE("rbf kernel is bitwise symmetric with a unit diagonal") {
    const Dataset d = toy_points(12, 6, 3);
    const MatrixXd K = rbf_kernel(d, RbfParams{0.7, false}, flat_channel(6));
    for (Index i = 0; i < 12; ++i) {
        CHECK(K(i, i) == 1.0);
        for (Index j = 0; j < 12; ++j) CHECK(K(i, j) == K(j, i));
    }
}

TEST_CASE("rbf Gram matrices are positive semidefinite") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const Dataset d = toy_points(20, 8, seed);
        const MatrixXd K = rbf_kernel(d, RbfParams{0.5, false}, flat_channel(8));
        Eigen::SelfAdjointEigenSolver<MatrixXd> solver(K);
        CHECK(solver.eigenvalues().minCoeff() >= -1e-12);
    }
}

TEST_CASE("blur flag changes the kernel when sigma is positive") {
    Dataset d = toy_points(4, 25, 5);
    ChannelParams channel;
    channel.sigma = 1.0;
    channel.rows = 5;
    channel.cols = 5;
    const MatrixXd with_blur = rbf_kernel(d, RbfParams{1.0, true}, channel);
    const MatrixXd without = rbf_kernel(d, RbfParams{1.0, false}, channel);
    CHECK(with_blur != without);
    // blur contracts distances, so off-diagonals grow
    CHECK(with_blur(0, 1) > without(0, 1));
}

TEST_CASE("rbf delta must be positive") {
    const Dataset d = toy_points(3, 4, 7);
    CHECK_THROWS_AS(rbf_kernel(d, RbfParams{0.0, false}, flat_channel(4)), ConfigError);
    CHECK_THROWS_AS(rbf_kernel(d, RbfParams{-1.0, false}, flat_channel(4)), ConfigError);
}

TEST_CASE("double centering zeroes row sums; hand-checked 3x3 case") {
    MatrixXd K(3, 3);
    K << 1.0, 0.5, 0.2, 0.5, 1.0, 0.4, 0.2, 0.4, 1.0;
    const VectorXd row_means = K.rowwise().mean();
    const double grand = K.mean();
    MatrixXd Kc = K;
    Kc.colwise() -= row_means;
    Kc.rowwise() -= row_means.transpose();
    Kc.array() += grand;
    for (Index i = 0; i < 3; ++i) CHECK(std::abs(Kc.row(i).sum()) < 1e-10);
    // entry (0,1) expanded by hand:
    // K01 - mean(row0) - mean(row1) + grand
    const double expect = 0.5 - (1.0 + 0.5 + 0.2) / 3.0 - (0.5 + 1.0 + 0.4) / 3.0 +
                          (1.0 + 0.5 + 0.2 + 0.5 + 1.0 + 0.4 + 0.2 + 0.4 + 1.0) / 9.0;
    CHECK(Kc(0, 1) == doctest::Approx(expect).epsilon(1e-14));

    const KpcaBasis basis = kpca_fit(K, 2, true);
    CHECK(basis.train_components == Kc * basis.alphas);
}

TEST_CASE("training components are orthogonal with squared norms lambda") {
    const Dataset d = toy_points(15, 6, 11);
    const MatrixXd K = rbf_kernel(d, RbfParams{0.8, false}, flat_channel(6));
    const KpcaBasis basis = kpca_fit(K, 4, true);
    const MatrixXd gram = basis.train_components.transpose() * basis.train_components;
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j) {
            const double expect = i == j ? basis.lambdas[i] : 0.0;
            CHECK(gram(i, j) == doctest::Approx(expect).epsilon(1e-9).scale(1.0));
        }
    for (Index j = 0; j + 1 < 4; ++j) CHECK(basis.lambdas[j] >= basis.lambdas[j + 1]);
}

TEST_CASE("projecting the training set reproduces the training components") {
    const Dataset d = toy_points(10, 5, 13);
    const RbfParams rbf{0.9, false};
    const ChannelParams channel = flat_channel(5);
    const KpcaBasis basis = kpca_fit(rbf_kernel(d, rbf, channel), 3, true);
    const MatrixXd again = kpca_project(d, basis, d, rbf, channel);
    for (Index i = 0; i < 10; ++i)
        for (Index j = 0; j < 3; ++j)
            CHECK(again(i, j) == doctest::Approx(basis.train_components(i, j)).epsilon(1e-10));
}

TEST_CASE("uncentered fit skips the centering statistics") {
    const Dataset d = toy_points(8, 4, 17);
    const MatrixXd K = rbf_kernel(d, RbfParams{0.8, false}, flat_channel(4));
    const KpcaBasis basis = kpca_fit(K, 2, false);
    CHECK(basis.centered == false);
    CHECK(basis.train_components == K * basis.alphas);
}

TEST_CASE("rank-deficient centered kernels raise NonPositiveEigenvalue") {
    Dataset d;
    d.points.resize(3, 4);
    d.points.row(0).setConstant(0.2);
    d.points.row(1).setConstant(0.2);  // duplicate point
    d.points.row(2).setConstant(0.9);
    const MatrixXd K = rbf_kernel(d, RbfParams{1.0, false}, flat_channel(4));
    CHECK_THROWS_AS(kpca_fit(K, 3, true), NonPositiveEigenvalue);
    CHECK_NOTHROW(kpca_fit(K, 1, true));
}

TEST_CASE("kpca_fit validates shapes and k") {
    MatrixXd K(2, 3);
    K.setZero();
    CHECK_THROWS_AS(kpca_fit(K, 1, true), DimensionMismatch);
    MatrixXd K2 = MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(kpca_fit(K2, 0, true), KOutOfRange);
    CHECK_THROWS_AS(kpca_fit(K2, 4, true), KOutOfRange);
}

TEST_CASE("kpca_project validates dimensions") {
    const Dataset d = toy_points(6, 4, 19);
    const RbfParams rbf{1.0, false};
    const ChannelParams channel = flat_channel(4);
    const KpcaBasis basis = kpca_fit(rbf_kernel(d, rbf, channel), 2, true);
    Dataset wrong;
    wrong.points.resize(2, 5);
    wrong.points.setZero();
    CHECK_THROWS_AS(kpca_project(wrong, basis, d, rbf, channel), DimensionMismatch);
}
