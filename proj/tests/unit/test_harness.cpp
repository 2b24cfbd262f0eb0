#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "mmwcs/errors.hpp"
#include "mmwcs/harness.hpp"

using namespace mmwcs;

namespace {

ExperimentConfig small_config()
{
    ExperimentConfig c;
    c.geometry = {16, 32, 4};
    c.num_paths = 3;
    c.channel_uses = 40;
    c.bt1 = 4;
    c.snr_db = {0.0, 10.0};
    c.num_trials = 6;
    c.estimators = {Estimator::two_stage_somp, Estimator::one_stage_omp, Estimator::oracle};
    c.one_stage_br = 8;
    c.seed = 1234;
    return c;
}

}  // namespace

TEST(Config, RoundTripsThroughText)
{
    ExperimentConfig c = small_config();
    c.snr_db = {-5.0, 2.5, std::numeric_limits<double>::infinity()};
    c.continuous_angles = true;
    c.allocation = AllocationMode::explicit_power;
    c.p1 = 0.75;
    c.rho = 10.0;
    c.alloc_mu2 = std::numeric_limits<double>::quiet_NaN();
    const auto d = parse_config(to_config_text(c));
    EXPECT_EQ(to_config_text(d), to_config_text(c));
    EXPECT_TRUE(std::isinf(d.snr_db[2]));
    EXPECT_TRUE(std::isnan(d.alloc_mu2));
    EXPECT_EQ(d.estimators, c.estimators);
}

TEST(Config, ParsesCommentsAndAuto)
{
    const auto c = parse_config("# geometry\nnr = 8  # receive\nnt=16\nrf_chains = 2\nnum_paths = 2\n"
                                "channel_uses = 12\nbt1 = 1\nalloc_mu1 = auto\nsnr_db = 0, inf\n");
    EXPECT_EQ(c.geometry.num_rx_antennas, 8);
    EXPECT_EQ(c.bt2(), 8);
    EXPECT_TRUE(std::isnan(c.alloc_mu1));
    EXPECT_EQ(c.snr_db.size(), 2u);
}

TEST(Config, RejectsInvalidInput)
{
    EXPECT_THROW(parse_config("bogus = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("nr\n"), ConfigError);
    EXPECT_THROW(parse_config("nr = ten\n"), ConfigError);
    EXPECT_THROW(parse_config("angles = sideways\n"), ConfigError);
    EXPECT_THROW(parse_config("estimators = magic\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.txt"), ConfigError);

    ExperimentConfig c = small_config();
    c.num_paths = 5;  // more than N
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_config();
    c.channel_uses = 10;
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_config();
    c.estimators = {Estimator::one_stage_atomic_stub};
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_config();
    c.snr_db = {std::nan("")};
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Seeds, DistinctAndStable)
{
    std::set<std::uint64_t> seen;
    for (int s = 0; s < 4; ++s)
        for (int t = 0; t < 500; ++t)
            seen.insert(trial_seed(42, s, t));
    EXPECT_EQ(seen.size(), 2000u);
    EXPECT_EQ(trial_seed(42, 1, 7), trial_seed(42, 1, 7));
    EXPECT_NE(trial_seed(42, 1, 7), trial_seed(43, 1, 7));
    EXPECT_EQ(trial_seed(42, 1, 7), splitmix64(splitmix64(42) ^ splitmix64((1ULL << 32) | 7)));
}

TEST(PowerSplit, EnergyParity)
{
    ExperimentConfig c = small_config();
    for (auto mode : {AllocationMode::paper, AllocationMode::equal_power}) {
        c.allocation = mode;
        const auto p = power_split(c, 10.0);
        const double total = c.channel_uses * 10.0;
        EXPECT_NEAR(p.e1 + p.e2, total, 1e-9 * total);
        EXPECT_NEAR(p.one_stage_p * c.channel_uses, total, 1e-9 * total);
        EXPECT_NEAR(p.e1, p.p1 * c.bt1 * 16 / 4, 1e-9 * total);
        EXPECT_NEAR(p.e2, p.p2 * c.bt2(), 1e-9 * total);
        EXPECT_EQ(p.sigma, 1.0);
    }
    c.allocation = AllocationMode::explicit_power;
    c.p1 = 2.0;
    c.p2 = 3.0;
    const auto p = power_split(c, 20.0);
    EXPECT_NEAR(p.p1, 200.0, 1e-9);
    EXPECT_NEAR(p.p2, 300.0, 1e-9);
    const auto q = power_split(c, std::numeric_limits<double>::infinity());
    EXPECT_EQ(q.sigma, 0.0);
}

TEST(PowerSplit, PaperRuleAtDefaultGeometry)
{
    ExperimentConfig c;
    c.snr_db = {0.0};
    const auto p = power_split(c, 0.0);
    EXPECT_NEAR(p.e1 / (p.e1 + p.e2), 0.659, 1e-3);
    c.alloc_mu2 = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(power_split(c, 0.0), InfeasibleError);
}

TEST(Experiment, DeterministicAcrossThreadCounts)
{
    ExperimentConfig c = small_config();
    c.threads = 1;
    const auto a = run_experiment(c);
    c.threads = 3;
    const auto b = run_experiment(c);
    EXPECT_EQ(trials_csv(a.records), trials_csv(b.records));
    EXPECT_EQ(curves_csv(a.curves), curves_csv(b.curves));
    ASSERT_EQ(a.records.size(), 2u * 6u * 3u);
    // fixed order: snr, trial, estimator
    EXPECT_EQ(a.records[0].estimator, Estimator::two_stage_somp);
    EXPECT_EQ(a.records[1].estimator, Estimator::one_stage_omp);
    EXPECT_EQ(a.records[2].estimator, Estimator::oracle);
    EXPECT_EQ(a.records[0].seed, a.records[2].seed);
    EXPECT_EQ(a.records.back().snr_db, 10.0);
}

TEST(Experiment, SingleTrialMatchesExperimentRow)
{
    const ExperimentConfig c = small_config();
    const auto all = run_experiment(c);
    const auto one = run_trial(c, 1, 4);
    ASSERT_EQ(one.size(), 3u);
    EXPECT_EQ(trials_csv(one), trials_csv({all.records.begin() + (6 + 4) * 3,
                                           all.records.begin() + (6 + 4) * 3 + 3}));
}

TEST(Experiment, NoiselessIsExact)
{
    ExperimentConfig c = small_config();
    c.snr_db = {std::numeric_limits<double>::infinity()};
    c.estimators = {Estimator::two_stage_somp, Estimator::oracle};
    c.num_trials = 10;
    const auto res = run_experiment(c);
    for (const auto& r : res.records) {
        EXPECT_FALSE(r.failed) << r.failure;
        EXPECT_EQ(r.eps, 0.0);
        EXPECT_TRUE(r.aoa_support_exact && r.aod_support_exact);
        EXPECT_LT(r.nmse, 1e-20);
    }
    for (const auto& a : res.curves)
        EXPECT_EQ(a.srp, 1.0);
}

TEST(Experiment, StubFailuresAreCounted)
{
    ExperimentConfig c = small_config();
    c.enable_atomic_stub = true;
    c.estimators = {Estimator::one_stage_atomic_stub, Estimator::two_stage_somp};
    c.snr_db = {10.0};
    c.num_trials = 3;
    const auto res = run_experiment(c);
    for (const auto& r : res.records) {
        if (r.estimator == Estimator::one_stage_atomic_stub) {
            EXPECT_TRUE(r.failed);
            EXPECT_TRUE(std::isnan(r.eps));
        }
    }
    EXPECT_EQ(res.curves[0].failures, 3);
    EXPECT_EQ(res.curves[0].srp, 0.0);
    EXPECT_TRUE(std::isnan(res.curves[0].mse));
    EXPECT_EQ(res.curves[1].failures, 0);
}

TEST(Experiment, ExactSupportOnGridMeansZeroError)
{
    ExperimentConfig c = small_config();
    c.estimators = {Estimator::two_stage_somp, Estimator::one_stage_omp};
    c.snr_db = {-5.0, 5.0};
    c.num_trials = 20;
    const auto res = run_experiment(c);
    for (const auto& r : res.records) {
        if (r.aoa_support_exact && r.aod_support_exact)
            EXPECT_GE(r.eps, 0.0);
        if (r.eps == 0.0)
            EXPECT_TRUE(r.aoa_support_exact && r.aod_support_exact);
    }
}

TEST(Experiment, PaperConfigurationAtTwentyDecibels)
{
    ExperimentConfig c;
    c.snr_db = {20.0};
    c.num_trials = 60;
    const auto res = run_experiment(c);
    EXPECT_GE(res.curves[0].srp, 0.9);
}

TEST(Experiment, SrpGrowsWithSnr)
{
    ExperimentConfig c = small_config();
    c.estimators = {Estimator::two_stage_somp};
    c.snr_db = {-10.0, 0.0, 10.0, 20.0};
    c.num_trials = 40;
    const auto res = run_experiment(c);
    for (std::size_t i = 1; i < res.curves.size(); ++i)
        EXPECT_GE(res.curves[i].srp + 2.0 * res.curves[i].srp_err, res.curves[i - 1].srp);
    EXPECT_LT(res.curves.front().srp, res.curves.back().srp);
}

TEST(Csv, HeaderOnlyAndRoundTrip)
{
    EXPECT_EQ(trials_csv({}), "seed,snr_db,estimator,eps,aoa_support_exact,aod_support_exact,nmse,wall_ms,mults\n");
    EXPECT_EQ(curves_csv({}), "estimator,snr_db,srp,srp_err,mse,nmse,trials\n");
    ExperimentConfig c = small_config();
    c.num_trials = 3;
    const auto res = run_experiment(c);
    const auto parsed = parse_curves_csv(curves_csv(res.curves));
    ASSERT_EQ(parsed.size(), res.curves.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        EXPECT_EQ(parsed[i].estimator, res.curves[i].estimator);
        EXPECT_EQ(parsed[i].snr_db, res.curves[i].snr_db);
        EXPECT_EQ(parsed[i].srp, res.curves[i].srp);
        EXPECT_EQ(parsed[i].mse, res.curves[i].mse);
        EXPECT_EQ(parsed[i].trials, res.curves[i].trials);
    }
}

TEST(Csv, NumberFormatting)
{
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1e-300), "1e-300");
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Complexity, DegenerateRowsAreSkipped)
{
    ExperimentConfig c = small_config();
    c.geometry.num_rf_chains = 1;
    c.num_paths = 1;
    c.bt1 = 1;
    const auto r = complexity_report(c, {8, 16});
    EXPECT_FALSE(r.asserted);
    for (const auto& row : r.rows)
        EXPECT_TRUE(row.degenerate);
}

TEST(Complexity, RatioGrowsLinearlyInReceiveAntennas)
{
    ExperimentConfig c;
    c.geometry = {10, 64, 2};
    c.num_paths = 2;
    c.bt1 = 2;
    c.channel_uses = 50;
    c.one_stage_br = 10;
    const auto r = complexity_report(c, {10, 20, 40});
    ASSERT_TRUE(r.asserted);
    EXPECT_NEAR(r.slope, 1.0, 0.15);
    EXPECT_TRUE(r.within_factor);
    for (const auto& row : r.rows)
        EXPECT_GT(row.ratio, 1.0);
}
