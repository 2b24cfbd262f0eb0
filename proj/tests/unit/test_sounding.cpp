#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mmwcs/errors.hpp"
#include "mmwcs/sounding.hpp"
#include "test_util.hpp"

using namespace mmwcs;

TEST(ChannelUses, CountsBothStages)
{
    const ArrayGeometry geo{32, 64, 4};
    EXPECT_EQ(channel_uses(geo, 4, 13), 4 * 32 / 4 + 13);
    EXPECT_THROW(channel_uses(ArrayGeometry{10, 8, 4}, 1, 1), ConfigError);
}

TEST(StagePlan, FromBudgetLeavesRemainderForStageTwo)
{
    const ArrayGeometry geo{32, 64, 4};
    const auto plan = StagePlan::from_budget(geo, 4, 77, 4, 2.0, 3.0);
    EXPECT_EQ(plan.bt2, 45);
    EXPECT_EQ(plan.br1, 32);
    EXPECT_EQ(plan.br2, 4);
    EXPECT_DOUBLE_EQ(plan.stage1_energy(), 2.0 * 4 * 32 / 4);
    EXPECT_DOUBLE_EQ(plan.stage2_energy(), 3.0 * 45);
    EXPECT_THROW(StagePlan::from_budget(geo, 4, 32, 4, 1.0, 1.0), ConfigError);
}

TEST(Dft, UnitaryWithNegativeExponent)
{
    for (int n : {1, 5, 16, 33}) {
        const CMatrix s = dft_matrix(n);
        EXPECT_LT((s.adjoint() * s - CMatrix::Identity(n, n)).norm(), 1e-12) << n;
    }
    const CMatrix s = dft_matrix(8);
    EXPECT_NEAR(std::abs(s(1, 1) - std::polar(1.0 / std::sqrt(8.0), -2.0 * kPi / 8)), 0.0, 1e-15);
}

TEST(Sounders, StageOneBeamsAreScaledBasisVectors)
{
    const ArrayGeometry geo{16, 32, 4};
    const auto tb = stage1_tsb(geo, 5, 2.5);
    ASSERT_EQ(tb.beams.cols(), 5);
    for (int j = 0; j < 5; ++j) {
        EXPECT_NEAR(tb.beams.col(j).squaredNorm(), 2.5, 1e-12);
        EXPECT_NEAR(std::abs(tb.beams(j, j)), std::sqrt(2.5), 1e-12);
    }
    EXPECT_TRUE(certify_factors(tb.beams, tb.factors));
    EXPECT_THROW(stage1_tsb(geo, 33, 1.0), DimensionError);
    EXPECT_THROW(stage1_tsb(geo, 2, 0.0), DomainError);
}

TEST(Sounders, CertifyRejectsBrokenFactor)
{
    const ArrayGeometry geo{8, 8, 2};
    auto tb = stage2_tsb(geo, 3, 1.0);
    ASSERT_TRUE(certify_factors(tb.beams, tb.factors));
    tb.factors[1].analog(0, 0) *= 2.0;
    EXPECT_FALSE(certify_factors(tb.beams, tb.factors));
    tb.factors.pop_back();
    EXPECT_FALSE(certify_factors(tb.beams, tb.factors));
}

TEST(Sounders, StageTwoCombinerSpansEstimatedResponses)
{
    std::mt19937_64 gen(3);
    const CMatrix a = testutil::random_matrix(12, 3, gen);
    const CMatrix q = stage2_rsb(a);
    EXPECT_LT((q.adjoint() * q - CMatrix::Identity(3, 3)).norm(), 1e-12);
    // projection onto span(q) leaves a unchanged
    EXPECT_LT((q * (q.adjoint() * a) - a).norm(), 1e-10 * a.norm());
    // R = Q^H A is upper triangular with nonnegative real diagonal
    const CMatrix r = q.adjoint() * a;
    for (int k = 0; k < 3; ++k) {
        EXPECT_GT(r(k, k).real(), 0.0);
        EXPECT_NEAR(r(k, k).imag(), 0.0, 1e-12);
        for (int i = k + 1; i < 3; ++i)
            EXPECT_NEAR(std::abs(r(i, k)), 0.0, 1e-12);
    }
}

TEST(Sounders, StageTwoCombinerRejectsRankDeficiency)
{
    CMatrix a(6, 2);
    a.col(0) = array_response(6, 0.25);
    a.col(1) = a.col(0);
    EXPECT_THROW(stage2_rsb(a), DegenerateEstimate);
    EXPECT_THROW(stage2_rsb(CMatrix::Ones(3, 4)), DimensionError);
}

TEST(Sounders, OneStageConstantModulusAndPower)
{
    const ArrayGeometry geo{16, 16, 4};
    Rng rng(8);
    const auto s = one_stage_sounders(geo, 8, 12, 3.0, SoundingMode::random_phase, rng);
    EXPECT_EQ(s.rsb.cols(), 8);
    EXPECT_EQ(s.tsb.cols(), 12);
    EXPECT_LT((s.rsb.cwiseAbs().array() - 0.25).abs().maxCoeff(), 1e-12);
    for (int j = 0; j < 12; ++j)
        EXPECT_NEAR(s.tsb.col(j).squaredNorm(), 3.0, 1e-12);
    EXPECT_TRUE(certify_factors(s.tsb, s.analog_factors));

    const auto d = one_stage_sounders(geo, 4, 16, 1.0, SoundingMode::partial_dft, rng);
    EXPECT_LT((d.tsb.adjoint() * d.tsb - CMatrix::Identity(16, 16)).norm(), 1e-12);
    EXPECT_THROW(one_stage_sounders(geo, 6, 4, 1.0, SoundingMode::random_phase, rng), ConfigError);
}

TEST(Observe, NoiselessIsBilinear)
{
    const auto ch = make_channel(6, 5, {0.2, 0.7}, {0.4, 0.9}, {cplx(1.0, 2.0), cplx(-1.0, 0.3)});
    std::mt19937_64 gen(1);
    const CMatrix w = testutil::random_matrix(6, 3, gen);
    const CMatrix f = testutil::random_matrix(5, 4, gen);
    Rng rng(2);
    const CMatrix y = observe(ch, w, f, 0.0, rng);
    EXPECT_LT((y - w.adjoint() * ch.matrix * f).norm(), 1e-12);
    EXPECT_THROW(observe(ch, f, f, 0.0, rng), DimensionError);
    EXPECT_THROW(observe(ch, w, f, -1.0, rng), DomainError);
}

TEST(Observe, NoiseAfterOrthonormalCombinerIsWhite)
{
    // zero channel: Y = W^H N, with W^H W = I the entries are CN(0, sigma^2)
    const auto ch = make_channel(8, 8, {0.1}, {0.1}, {cplx(0.0)});
    const CMatrix w = dft_matrix(8);
    const CMatrix f = CMatrix::Identity(8, 8);
    Rng rng(4);
    const double sigma = 0.7;
    double acc = 0.0;
    const int reps = 400;
    for (int r = 0; r < reps; ++r)
        acc += observe(ch, w, f, sigma, rng).squaredNorm();
    EXPECT_NEAR(acc / (reps * 64.0), sigma * sigma, 0.02);
}
