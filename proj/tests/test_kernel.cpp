#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracle_discrete.hpp"
#include "relpca/kernel.hpp"

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

ChannelParams flat_channel(Index dim, double h = 0.8) {
    ChannelParams p;
    p.sigma = 0.0;
    p.rows = 1;
    p.cols = dim;
    p.h = h;
    return p;
}

KernelMatrix raw_from(const MatrixXd& entries) {
    KernelMatrix K;
    K.entries = entries;
    K.stage = KernelStage::raw;
    return K;
}

}  // namespace

TEST_CASE("single point kernel is exactly one") {
    const Dataset d = toy_points(1, 4, 1);
    const KernelMatrix K = estimate_kernel(d, flat_channel(4), 50, 7, 1);
    CHECK(K.entries(0, 0) == 1.0);
    CHECK(K.meta.samples_per_row == 50);
}

TEST_CASE("identical points share responsibility equally") {
    Dataset d;
    d.points.resize(3, 5);
    d.points.row(0).setConstant(0.3);
    d.points.row(1).setConstant(0.3);
    d.points.row(2).setConstant(0.3);
    const KernelMatrix K = estimate_kernel(d, flat_channel(5), 300, 3, 2);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j)
            CHECK(K.entries(i, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("raw kernel rows sum to one at any sample count") {
    const Dataset d = toy_points(6, 8, 2);
    for (Index total : {6, 60, 1200}) {
        const KernelMatrix K = estimate_kernel(d, flat_channel(8), total, 11, 2);
        for (Index i = 0; i < 6; ++i)
            CHECK(K.entries.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(K.entries.minCoeff() >= 0.0);
    }
}

TEST_CASE("insufficient total samples raises") {
    const Dataset d = toy_points(10, 4, 3);
    CHECK_THROWS_AS(estimate_kernel(d, flat_channel(4), 9, 1, 1), InsufficientSamples);
}

TEST_CASE("estimator is bitwise independent of the worker count") {
    const Dataset d = toy_points(8, 6, 4);
    const KernelMatrix a = estimate_kernel(d, flat_channel(6), 800, 21, 1);
    const KernelMatrix b = estimate_kernel(d, flat_channel(6), 800, 21, 4);
    const KernelMatrix c = estimate_kernel(d, flat_channel(6), 800, 21, 3);
    CHECK(a.entries == b.entries);
    CHECK(a.entries == c.entries);
}

TEST_CASE("seed changes the estimate, sample count shrinks the noise") {
    const Dataset d = toy_points(4, 6, 5);
    const KernelMatrix a = estimate_kernel(d, flat_channel(6), 400, 1, 2);
    const KernelMatrix b = estimate_kernel(d, flat_channel(6), 400, 2, 2);
    CHECK(a.entries != b.entries);
}

TEST_CASE("Monte Carlo estimate converges to the exact discrete kernel") {
    const oracle::DiscreteChannel ch = oracle::make_discrete_channel({3.0, 7.5, 11.0});
    const MatrixXd exact = oracle::exact_kernel(ch);
    const Index S = 4000;
    const MatrixXd est = estimate_kernel_raw(ch, S, 17, 2);
    const double tol = 5.0 / std::sqrt(double(S));
    for (Index i = 0; i < 3; ++i) {
        CHECK(est.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
        for (Index j = 0; j < 3; ++j) CHECK(std::abs(est(i, j) - exact(i, j)) < tol);
    }
}

TEST_CASE("exact discrete kernel rows sum to one") {
    const oracle::DiscreteChannel ch = oracle::make_discrete_channel({2.0, 8.0, 9.5, 13.0});
    const MatrixXd exact = oracle::exact_kernel(ch);
    for (Index i = 0; i < 4; ++i)
        CHECK(exact.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("asymmetry of the documented two-point example is 0.4") {
    MatrixXd entries(2, 2);
    entries << 0.5, 0.4, 0.6, 0.5;
    CHECK(asymmetry(raw_from(entries)) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("asymmetry is zero for symmetric estimates and ignores tiny pairs") {
    MatrixXd sym(3, 3);
    sym << 0.6, 0.2, 0.2, 0.2, 0.6, 0.2, 0.2, 0.2, 0.6;
    CHECK(asymmetry(raw_from(sym)) == 0.0);

    // a pair straddling the floor is excluded from both sums
    MatrixXd tiny(2, 2);
    const double eps = 1e-9;  // mean below 1e-6/2
    tiny << 1.0 - eps, eps, 0.0, 1.0;
    CHECK(asymmetry(raw_from(tiny)) == 0.0);
}

TEST_CASE("asymmetry rejects non-raw input") {
    MatrixXd entries(2, 2);
    entries << 0.5, 0.4, 0.6, 0.5;
    const KernelMatrix sym = symmetrize(raw_from(entries));
    CHECK_THROWS_AS(asymmetry(sym), ConfigError);
}

TEST_CASE("symmetrize averages mirrored entries and is bitwise symmetric") {
    MatrixXd entries(2, 2);
    entries << 0.5, 0.4, 0.6, 0.5;
    const KernelMatrix sym = symmetrize(raw_from(entries));
    CHECK(sym.entries(0, 1) == 0.5);
    CHECK(sym.entries(1, 0) == 0.5);
    CHECK(sym.stage == KernelStage::symmetrized);
    CHECK(sym.meta.clamp_count == 0);

    const Dataset d = toy_points(7, 5, 9);
    const KernelMatrix K = symmetrize(estimate_kernel(d, flat_channel(5), 700, 5, 2));
    for (Index i = 0; i < 7; ++i)
        for (Index j = 0; j < 7; ++j) CHECK(K.entries(i, j) == K.entries(j, i));
}

TEST_CASE("symmetrize clamps out-of-range averages and counts them") {
    MatrixXd entries(2, 2);
    entries << 1.3, -0.2, -0.3, 0.4;
    const KernelMatrix sym = symmetrize(raw_from(entries));
    CHECK(sym.entries(0, 0) == 1.0);
    CHECK(sym.entries(0, 1) == 0.0);
    CHECK(sym.meta.clamp_count == 2);
}

TEST_CASE("stage guards on symmetrize and detrace") {
    MatrixXd entries = MatrixXd::Identity(2, 2);
    const KernelMatrix sym = symmetrize(raw_from(entries));
    CHECK_THROWS_AS(symmetrize(sym), ConfigError);
    CHECK_THROWS_AS(detrace(raw_from(entries)), ConfigError);
    const KernelMatrix det = detrace(sym);
    CHECK(det.stage == KernelStage::detraced);
    CHECK(det.entries(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(det.entries(0, 1) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("detraced kernel annihilates the all-ones direction") {
    const Dataset d = toy_points(9, 6, 6);
    const KernelMatrix det = detrace(symmetrize(estimate_kernel(d, flat_channel(6), 900, 8, 2)));
    VectorXd ones = VectorXd::Constant(9, 1.0 / 3.0);  // unit vector of ones
    const double rayleigh = ones.dot(det.entries * ones);
    CHECK(std::abs(rayleigh) < 1e-12);
}
