#include <gtest/gtest.h>

#include <cmath>

#include "mmwcs/bounds.hpp"
#include "mmwcs/errors.hpp"
#include "mmwcs/tracy_widom.hpp"
#include "mmwcs/types.hpp"

using namespace mmwcs;

namespace {

double tw_arg_oracle(double signal, double sigma, double m, double d)
{
    const double s2 = 4.0 * sigma * sigma;
    const double center = std::pow(std::sqrt(m) + std::sqrt(d), 2.0);
    const double scale = (std::sqrt(m) + std::sqrt(d)) * std::pow(1.0 / std::sqrt(m) + 1.0 / std::sqrt(d), 1.0 / 3.0);
    return (signal - s2 * center) / (s2 * scale);
}

SrpQuery base_query()
{
    SrpQuery q;
    q.num_paths = 4;
    q.mu = 0.05;
    q.h_min = 1.5;
    q.sigma = 1.0;
    q.p1 = 40.0;
    q.bt1 = 4;
    q.nr = 20;
    q.nt = 64;
    q.p2 = 10.0;
    q.bt2 = 30;
    return q;
}

AllocationRequest paper_request()
{
    AllocationRequest r;
    r.channel_uses = 50;
    r.rf_chains = 4;
    r.nr = 20;
    r.nt = 64;
    r.num_paths = 4;
    r.bt1 = 1;
    r.h_min = 1.0;
    r.sigma = 1.0;
    return r;
}

// |D_n(delta)| / n with D the Dirichlet kernel of n terms on a G-point grid
double dirichlet_coherence(int n, int g)
{
    double best = 0.0;
    for (int delta = 1; delta < g; ++delta) {
        const double x = kPi * delta / g;
        best = std::max(best, std::abs(std::sin(n * x) / (n * std::sin(x))));
    }
    return best;
}

}  // namespace

TEST(Bounds, MarchenkoPasturConstants)
{
    EXPECT_DOUBLE_EQ(mp_center(16.0, 4.0), 36.0);
    EXPECT_NEAR(mp_scale(16.0, 4.0), 6.0 * std::cbrt(0.75), 1e-14);
    EXPECT_THROW(mp_center(0.0, 1.0), DomainError);
}

TEST(Bounds, AoaMatchesClosedForm)
{
    const auto q = base_query();
    const double c = 1.0 - 7.0 * q.mu;
    const double signal = c * q.h_min * q.h_min * q.p1 * q.bt1 / q.nt;
    EXPECT_NEAR(srp_bound_aoa(q), tw_cdf(tw_arg_oracle(signal, 1.0, 20, 4)), 1e-14);
    EXPECT_NEAR(srp_bound_aoa(q, CoherenceFactor::squared),
                tw_cdf(tw_arg_oracle(c * signal, 1.0, 20, 4)), 1e-14);
}

TEST(Bounds, AodMatchesClosedForm)
{
    const auto q = base_query();
    const double c = 1.0 - 7.0 * q.mu;
    const double sig = std::sqrt(q.nt / (q.p2 * q.bt2));
    EXPECT_NEAR(srp_bound_aod(q), tw_cdf(tw_arg_oracle(c * c * q.h_min * q.h_min, sig, 30, 4)), 1e-14);
    const double sig_d = sig * std::sqrt(static_cast<double>(q.nt));
    EXPECT_NEAR(srp_bound_aod(q, AodBoundForm::displayed),
                tw_cdf(tw_arg_oracle(c * c * q.h_min * q.h_min, sig_d, 30, 4)), 1e-14);
    EXPECT_LE(srp_bound_aod(q, AodBoundForm::displayed), srp_bound_aod(q));
}

TEST(Bounds, SompAndAoaAgreeOnSharedInstance)
{
    // M = 20, d = 1, L = 4, mu = 0, sigma = 0.1
    SrpQuery q = base_query();
    q.mu = 0.0;
    q.sigma = 0.1;
    q.bt1 = 1;
    q.p1 = 2.0;
    const double cmin = q.h_min * std::sqrt(q.p1 * q.bt1 / q.nt);
    EXPECT_NEAR(srp_bound_aoa(q), srp_bound_somp(cmin, 0.0, 4, 0.1, 20, 1), 1e-14);
    q.mu = 0.1;
    EXPECT_NEAR(srp_bound_aoa(q, CoherenceFactor::squared), srp_bound_somp(cmin, 0.1, 4, 0.1, 20, 1),
                1e-14);
}

TEST(Bounds, NoiselessLimit)
{
    EXPECT_EQ(srp_bound_somp(1.0, 0.0, 3, 0.0, 10, 2), 1.0);
    EXPECT_EQ(srp_bound_somp(0.0, 0.0, 3, 0.0, 10, 2), tw_cdf(0.0));
    double prev = 0.0;
    for (double sigma : {1.0, 0.3, 0.1, 0.03, 0.01}) {
        const double b = srp_bound_somp(1.0, 0.1, 2, sigma, 10, 2);
        EXPECT_GE(b, prev);
        prev = b;
    }
    EXPECT_GT(prev, 1.0 - 1e-9);
}

TEST(Bounds, QuantizationErrorOnlyHurts)
{
    double prev = 1.0;
    for (double e : {0.0, 0.5, 1.0, 2.0, 4.0, 10.0}) {
        const double b = srp_bound_somp_quantized(10.0, 0.05, 3, 1.0, 16, 4, e);
        EXPECT_LE(b, prev);
        prev = b;
    }
    EXPECT_EQ(srp_bound_somp_quantized(10.0, 0.0, 1, 0.0, 16, 4, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(srp_bound_somp_quantized(10.0, 0.05, 3, 1.0, 16, 4, 0.0),
                     srp_bound_somp(10.0, 0.05, 3, 1.0, 16, 4));
}

TEST(Bounds, MoreMeasurementVectorsLowerTheFixedSignalBound)
{
    const auto v = mmv_count_effect(32, {1, 2, 4, 8, 16}, 12.0, 0.02, 2, 1.0);
    ASSERT_EQ(v.size(), 5u);
    for (std::size_t i = 1; i < v.size(); ++i)
        EXPECT_LE(v[i], v[i - 1]);
}

TEST(Bounds, FixedStageOneEnergyFavorsFewBeams)
{
    // p1 B_t1 fixed: spreading it over more beams only raises the noise terms
    SrpQuery q = base_query();
    q.mu = 0.0;
    const double budget = 80.0;
    double prev = 1.0;
    for (int bt1 = 1; bt1 <= 16; ++bt1) {
        q.bt1 = bt1;
        q.p1 = budget / bt1;
        const double b = srp_bound_aoa(q);
        EXPECT_LE(b, prev + 1e-15) << bt1;
        prev = b;
    }
}

TEST(Bounds, DoublingPowerHelps)
{
    SrpQuery q = base_query();
    const double a = srp_bound_aoa(q);
    const double d = srp_bound_aod(q);
    q.p1 *= 2;
    q.p2 *= 2;
    EXPECT_GE(srp_bound_aoa(q), a);
    EXPECT_GE(srp_bound_aod(q), d);
    q.p2 = 0.0;
    EXPECT_EQ(srp_bound_aod(q), 0.0);
}

TEST(Bounds, CoherenceHypothesis)
{
    SrpQuery q = base_query();
    q.mu = 1.0 / 7.0;
    EXPECT_THROW(srp_bound_aoa(q), BoundInvalid);
    EXPECT_THROW(srp_bound_aod(q), BoundInvalid);
    q.num_paths = 1;
    q.mu = 0.9;
    EXPECT_NO_THROW(srp_bound_aoa(q));
    q.mu = 1.0;
    EXPECT_THROW(srp_bound_aoa(q), BoundInvalid);
    EXPECT_THROW(srp_bound_somp(1.0, -0.1, 1, 1.0, 4, 1), BoundInvalid);
}

TEST(Coherence, DictionaryValues)
{
    EXPECT_NEAR(stage1_coherence(20, 1.0), 0.0, 1e-12);
    EXPECT_NEAR(truncated_aod_coherence(64, 45, 1.0), dirichlet_coherence(45, 64), 1e-12);
    EXPECT_NEAR(truncated_aod_coherence(16, 10, 2.0), dirichlet_coherence(10, 32), 1e-12);
    EXPECT_NEAR(truncated_aod_coherence(64, 45, 1.0), 0.3637, 1e-3);
    EXPECT_THROW(truncated_aod_coherence(8, 9, 1.0), DomainError);
}

TEST(Allocate, RoundTripsToTargets)
{
    AllocationRequest r = paper_request();
    r.mu1 = 0.0;
    r.mu2 = 0.0;
    const auto a = allocate(r);
    EXPECT_EQ(a.bt2, 45);
    EXPECT_NEAR(a.achieved_aoa, r.eta1, 1e-8);
    EXPECT_NEAR(a.achieved_aod, r.eta2, 1e-8);
    EXPECT_GT(a.p1, a.p2);
    EXPECT_NEAR(a.e1 / (a.e1 + a.e2), 0.659, 1e-3);

    r.mu1 = 0.05;
    r.mu2 = 0.1;
    const auto b = allocate(r);
    // squared factor in the energy is conservative for the linear AoA bound
    EXPECT_GE(b.achieved_aoa, r.eta1 - 1e-8);
    EXPECT_NEAR(b.achieved_aod, r.eta2, 1e-8);
    EXPECT_GT(b.e1, a.e1);
}

TEST(Allocate, EnergyScalesWithNoiseVariance)
{
    AllocationRequest r = paper_request();
    r.mu1 = r.mu2 = 0.0;
    const auto a = allocate(r);
    r.sigma = 3.0;
    const auto b = allocate(r);
    EXPECT_NEAR(b.e1 / a.e1, 9.0, 1e-9);
    EXPECT_NEAR(b.e2 / a.e2, 9.0, 1e-9);
    r.h_min = 3.0;
    const auto c = allocate(r);
    EXPECT_NEAR(c.e1, a.e1, 1e-9 * a.e1);
}

TEST(Allocate, InfeasibleCases)
{
    AllocationRequest r = paper_request();
    // computed mu2 of the truncated 64-point dictionary exceeds 1/7
    EXPECT_THROW(allocate(r), InfeasibleError);
    r.mu1 = r.mu2 = 0.0;
    r.channel_uses = 5;
    EXPECT_THROW(allocate(r), InfeasibleError);
    r.channel_uses = 200;
    EXPECT_THROW(allocate(r), InfeasibleError);
    r.channel_uses = 50;
    r.eta1 = 1.0;
    EXPECT_THROW(allocate(r), DomainError);
}
