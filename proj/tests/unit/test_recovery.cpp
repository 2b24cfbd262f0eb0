#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mmwcs/channel.hpp"
#include "mmwcs/errors.hpp"
#include "mmwcs/recovery.hpp"
#include "test_util.hpp"

using namespace mmwcs;

namespace {

std::vector<Index> sorted(std::vector<Index> v)
{
    std::sort(v.begin(), v.end());
    return v;
}

// row-sparse X on a random support, Y = Phi X
struct Problem {
    CMatrix phi;
    CMatrix y;
    std::vector<Index> support;
};

Problem make_problem(Index m, Index g, int k, Index d, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    Problem p;
    p.phi = testutil::random_matrix(m, g, gen);
    std::vector<Index> all(g);
    std::iota(all.begin(), all.end(), Index{0});
    std::shuffle(all.begin(), all.end(), gen);
    p.support.assign(all.begin(), all.begin() + k);
    CMatrix x = CMatrix::Zero(g, d);
    const CMatrix rows = testutil::random_matrix(k, d, gen);
    for (int i = 0; i < k; ++i)
        x.row(p.support[i]) = rows.row(i) + rows.row(i).normalized() * 2.0;
    p.y = p.phi * x;
    return p;
}

}  // namespace

TEST(Somp, RecoversSupportLikeExhaustiveSearch)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto p = make_problem(20, 30, 3, 4, seed);
        const auto greedy = somp(p.y, p.phi, 3);
        const auto exhaustive = brute_force_support(p.y, p.phi, 3);
        EXPECT_EQ(sorted(greedy.support), sorted(p.support)) << seed;
        EXPECT_EQ(sorted(exhaustive.support), sorted(p.support)) << seed;
        EXPECT_LT(greedy.residual_norms.back(), 1e-9 * p.y.norm());
    }
}

TEST(Somp, CoefficientsMatchLeastSquaresOnSupport)
{
    const auto p = make_problem(16, 40, 4, 3, 77);
    std::mt19937_64 gen(5);
    const CMatrix noisy = p.y + 0.05 * testutil::random_matrix(16, 3, gen);
    const auto est = somp(noisy, p.phi, 4);
    // independent normal-equation solution
    CMatrix sub(16, 4);
    for (int k = 0; k < 4; ++k)
        sub.col(k) = p.phi.col(est.support[k]);
    const CMatrix x = (sub.adjoint() * sub).inverse() * sub.adjoint() * noisy;
    EXPECT_LT((est.coefficients - x).norm(), 1e-10 * x.norm());
    const auto fit = least_squares_on_support(noisy, p.phi, est.support);
    EXPECT_LT((fit.coefficients - x).norm(), 1e-10 * x.norm());
    EXPECT_NEAR(fit.residual.norm(), est.residual_norms.back(), 1e-10);
}

TEST(Somp, DirectAndIncrementalAgree)
{
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        auto p = make_problem(12, 50, 4, 2, seed);
        std::mt19937_64 gen(seed);
        p.y += 0.3 * testutil::random_matrix(12, 2, gen);
        SompOptions direct;
        direct.update = CorrelationUpdate::direct;
        const auto a = somp(p.y, p.phi, 4, direct);
        const auto b = somp(p.y, p.phi, 4);
        EXPECT_EQ(a.support, b.support);
        EXPECT_LT((a.coefficients - b.coefficients).norm(), 1e-9 * a.coefficients.norm());
        ASSERT_EQ(a.residual_norms.size(), b.residual_norms.size());
        for (std::size_t i = 0; i < a.residual_norms.size(); ++i)
            EXPECT_NEAR(a.residual_norms[i], b.residual_norms[i], 1e-9 * p.y.norm());
    }
}

TEST(Somp, ResidualNormsNonIncreasing)
{
    for (std::uint64_t seed = 200; seed < 220; ++seed) {
        std::mt19937_64 gen(seed);
        const CMatrix phi = testutil::random_matrix(10, 25, gen);
        const CMatrix y = testutil::random_matrix(10, 3, gen);
        const auto est = somp(y, phi, 8);
        ASSERT_EQ(est.residual_norms.size(), 9u);
        for (std::size_t i = 1; i < est.residual_norms.size(); ++i)
            EXPECT_LE(est.residual_norms[i], est.residual_norms[i - 1] * (1 + 1e-12));
    }
}

TEST(Somp, TiesGoToSmallestIndex)
{
    // identical columns 2 and 5, both maximally correlated
    CMatrix phi = CMatrix::Identity(4, 6);
    phi.col(4) = CVector::Unit(4, 3);
    phi.col(5) = phi.col(2);
    CMatrix y = CMatrix::Zero(4, 1);
    y(2, 0) = 1.0;
    const auto est = somp(y, phi, 1);
    EXPECT_EQ(est.support.front(), 2);
}

TEST(Somp, RidgeWhenSelectionIsDependent)
{
    // more atoms requested than rows: the basis runs out
    std::mt19937_64 gen(9);
    const CMatrix phi = testutil::random_matrix(3, 10, gen);
    const CMatrix y = testutil::random_matrix(3, 2, gen);
    const auto est = somp(y, phi, 5);
    EXPECT_TRUE(est.diagnostics.ridge_used);
    EXPECT_TRUE(est.diagnostics.underdetermined);
    EXPECT_EQ(est.support.size(), 5u);
    EXPECT_TRUE(est.coefficients.allFinite());
    EXPECT_LT(est.residual_norms.back(), 1e-4 * y.norm());
}

TEST(Somp, ResidualThresholdStopsEarly)
{
    const auto p = make_problem(20, 30, 2, 2, 31);
    SompOptions opt;
    opt.residual_threshold = 1e-8 * p.y.norm();
    const auto est = somp(p.y, p.phi, 6, opt);
    EXPECT_EQ(est.support.size(), 2u);
}

TEST(Somp, RejectsBadInput)
{
    CMatrix phi = CMatrix::Identity(4, 4);
    const CMatrix y = CMatrix::Ones(4, 1);
    EXPECT_THROW(somp(y, phi, 0), DimensionError);
    EXPECT_THROW(somp(CMatrix::Ones(3, 1), phi, 1), DimensionError);
    phi.col(1).setZero();
    EXPECT_THROW(somp(y, phi, 1), DomainError);
}

TEST(Somp, MultiplyCountScalesWithGridAndRows)
{
    const auto p = make_problem(20, 60, 3, 1, 4);
    const auto a = somp(p.y, p.phi, 3);
    const auto big = make_problem(20, 120, 3, 1, 4);
    const auto b = somp(big.y, big.phi, 3);
    const double ratio = static_cast<double>(b.diagnostics.multiplies) / a.diagnostics.multiplies;
    EXPECT_NEAR(ratio, 2.0, 0.15);
}

TEST(Mip, MatchesPairwiseOracle)
{
    std::mt19937_64 gen(12);
    const CMatrix phi = testutil::random_matrix(6, 9, gen);
    double raw = 0.0, norm = 0.0;
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j)
            if (i != j) {
                const double ip = std::abs(phi.col(i).dot(phi.col(j)));
                raw = std::max(raw, ip);
                norm = std::max(norm, ip / (phi.col(i).norm() * phi.col(j).norm()));
            }
    EXPECT_NEAR(mip_constant(phi, false), raw, 1e-12);
    EXPECT_NEAR(mip_constant(phi, true), norm, 1e-12);
    EXPECT_NEAR(mip_constant(build_dictionary(8, 1.0).response_matrix, true), 0.0, 1e-12);
}

TEST(BruteForce, GuardAndBinomial)
{
    EXPECT_EQ(binomial(10, 3), 120u);
    EXPECT_EQ(binomial(5, 7), 0u);
    EXPECT_EQ(binomial(64, 32), 1832624140942590534u);
    std::mt19937_64 gen(1);
    const CMatrix phi = testutil::random_matrix(8, 64, gen);
    const CMatrix y = testutil::random_matrix(8, 1, gen);
    EXPECT_THROW(brute_force_support(y, phi, 6, 1000), ResourceLimit);
}
