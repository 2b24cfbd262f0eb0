#include "mmwcs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "mmwcs/bounds.hpp"
#include "mmwcs/errors.hpp"
#include "mmwcs/superres.hpp"

namespace mmwcs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t estimator_stream(Estimator e)
{
    return 1 + static_cast<std::uint64_t>(e);
}

std::optional<double> design_mu(double v)
{
    if (std::isnan(v))
        return std::nullopt;
    return v;
}

std::vector<std::pair<double, double>> true_pairs(const ChannelRealization& ch)
{
    std::vector<std::pair<double, double>> out;
    for (int l = 0; l < ch.num_paths; ++l)
        out.emplace_back(ch.aoa_freqs[l], ch.aod_freqs[l]);
    return out;
}

void score_angles(TrialRecord& rec, const ChannelRealization& ch,
                  const std::vector<std::pair<double, double>>& est, int grid_rx, int grid_tx)
{
    const AngleError err = angle_error(true_pairs(ch), est);
    rec.eps = err.eps;
    rec.mse = err.sum_sq;
    std::vector<double> ea, ed;
    for (const auto& [a, d] : est) {
        ea.push_back(a);
        ed.push_back(d);
    }
    rec.aoa_support_exact =
        same_support(nearest_grid_indices(ea, grid_rx), nearest_grid_indices(ch.aoa_freqs, grid_rx));
    rec.aod_support_exact =
        same_support(nearest_grid_indices(ed, grid_tx), nearest_grid_indices(ch.aod_freqs, grid_tx));
}

struct TrialContext {
    ArrayGeometry geometry;
    AngleDictionary dict_r;
    AngleDictionary dict_t;
};

TrialRecord run_estimator(const ExperimentConfig& config, const TrialContext& ctx,
                          const ChannelRealization& ch, const PowerSplit& power, Estimator e,
                          Rng rng)
{
    TrialRecord rec;
    rec.estimator = e;
    const int gr = ctx.dict_r.grid_size, gt = ctx.dict_t.grid_size;
    const double sigma = power.sigma;
    switch (e) {
    case Estimator::two_stage_somp: {
        const StagePlan plan = StagePlan::from_budget(ctx.geometry, config.num_paths,
                                                      config.channel_uses, config.bt1, power.p1,
                                                      power.p2);
        TwoStageOptions opts;
        opts.refit_gains = config.refit_gains;
        const TwoStageResult res =
            two_stage_somp(ch, ctx.geometry, ctx.dict_r, ctx.dict_t, plan, sigma, rng, opts);
        score_angles(rec, ch, res.path_angles(), gr, gt);
        rec.nmse = nmse(ch.matrix, res.h_hat);
        rec.mults = res.multiplies;
        break;
    }
    case Estimator::one_stage_omp: {
        OneStageOptions opts;
        opts.mode = config.one_stage_mode;
        opts.memory_budget = config.memory_budget;
        const OneStageResult res =
            one_stage_omp(ch, ctx.geometry, ctx.dict_r, ctx.dict_t, config.one_stage_rsb(),
                          config.one_stage_tsb(), power.one_stage_p, sigma, rng, opts);
        score_angles(rec, ch, res.path_angles(ctx.dict_r, ctx.dict_t), gr, gt);
        rec.nmse = nmse(ch.matrix, res.h_hat);
        rec.mults = res.multiplies;
        break;
    }
    case Estimator::two_stage_superres: {
        const StagePlan plan = StagePlan::from_budget(ctx.geometry, config.num_paths,
                                                      config.channel_uses, config.bt1, power.p1,
                                                      power.p2);
        SuperresOptions opts;
        opts.admm.rho = config.rho;
        opts.admm.max_iter = config.admm_max_iter;
        opts.admm.tol = config.admm_tol;
        opts.admm.log_objective = false;
        opts.lambda_scale = config.lambda_scale;
        opts.two_stage.refit_gains = config.refit_gains;
        const SuperresResult res = two_stage_superres(ch, ctx.geometry, plan, sigma, rng, opts);
        score_angles(rec, ch, res.result.path_angles(), gr, gt);
        rec.nmse = nmse(ch.matrix, res.result.h_hat);
        rec.mults = res.result.multiplies;
        break;
    }
    case Estimator::oracle: {
        // two-stage sounders, with the receive beams of stage 2 built from the true AoAs
        const CMatrix w1 = stage1_rsb(ctx.geometry);
        const TransmitBeams f1 = stage1_tsb(ctx.geometry, config.bt1, power.p1);
        const CMatrix y1 = observe(ch, w1, f1.beams, sigma, rng);
        const CMatrix w2 = stage2_rsb(ch.aoa_responses());
        const TransmitBeams f2 = stage2_tsb(ctx.geometry, config.bt2(), power.p2);
        const CMatrix y2 = observe(ch, w2, f2.beams, sigma, rng);
        const Measurement m[2] = {{w1, f1.beams, y1}, {w2, f2.beams, y2}};
        const OracleResult res = oracle_estimate(ch, m);
        score_angles(rec, ch, true_pairs(ch), gr, gt);
        rec.nmse = nmse(ch.matrix, res.h_hat);
        break;
    }
    case Estimator::one_stage_atomic_stub:
        throw Error("one_stage_atomic_stub: placeholder estimator, no result");
    }
    return rec;
}

TrialContext make_context(const ExperimentConfig& config)
{
    return {config.geometry, build_dictionary(config.geometry.num_rx_antennas, config.oversampling),
            build_dictionary(config.geometry.num_tx_antennas, config.oversampling)};
}

std::vector<TrialRecord> run_trial_with(const ExperimentConfig& config, const TrialContext& ctx,
                                        int snr_index, int trial)
{
    const std::uint64_t seed = trial_seed(config.seed, snr_index, trial);
    const double snr = config.snr_db.at(static_cast<std::size_t>(snr_index));
    const Rng master(seed);
    Rng chan_rng = master.derive(0);
    const std::vector<double> variances(static_cast<std::size_t>(config.num_paths),
                                        config.gain_variance);
    const AngleMode mode = config.continuous_angles
                               ? AngleMode{Continuous{}}
                               : AngleMode{OnGrid{ctx.dict_r.grid_size, ctx.dict_t.grid_size}};
    const ChannelRealization ch =
        sample_channel(config.geometry, config.num_paths, mode, variances, chan_rng);

    std::vector<TrialRecord> out;
    PowerSplit power;
    std::string power_error;
    try {
        power = power_split(config, snr);
    } catch (const Error& ex) {
        power_error = ex.what();
    }
    for (Estimator e : config.estimators) {
        TrialRecord rec;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if (!power_error.empty())
                throw Error(power_error);
            rec = run_estimator(config, ctx, ch, power, e, master.derive(estimator_stream(e)));
        } catch (const Error& ex) {
            rec = TrialRecord{};
            rec.failed = true;
            rec.failure = ex.what();
            rec.eps = kNaN;
            rec.mse = kNaN;
            rec.nmse = kNaN;
        }
        const auto t1 = std::chrono::steady_clock::now();
        rec.estimator = e;
        rec.seed = seed;
        rec.snr_db = snr;
        rec.wall_ms = config.record_timing
                          ? std::chrono::duration<double, std::milli>(t1 - t0).count()
                          : 0.0;
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master, int snr_index, int trial)
{
    const std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(snr_index)) << 32) |
                              static_cast<std::uint32_t>(trial);
    return splitmix64(splitmix64(master) ^ splitmix64(key));
}

PowerSplit power_split(const ExperimentConfig& config, double snr_db)
{
    PowerSplit out;
    const bool noiseless = std::isinf(snr_db) && snr_db > 0;
    const double gain = noiseless ? 1.0 : std::pow(10.0, snr_db / 10.0);
    out.sigma = noiseless ? 0.0 : 1.0;
    const int k = config.channel_uses;
    const double total = k * gain;
    const double stage1_uses = static_cast<double>(config.bt1) * config.geometry.num_rx_antennas /
                               config.geometry.num_rf_chains;
    const int bt2 = config.bt2();
    switch (config.allocation) {
    case AllocationMode::paper: {
        AllocationRequest req;
        req.channel_uses = k;
        req.rf_chains = config.geometry.num_rf_chains;
        req.nr = config.geometry.num_rx_antennas;
        req.nt = config.geometry.num_tx_antennas;
        req.num_paths = config.num_paths;
        req.eta1 = config.eta1;
        req.eta2 = config.eta2;
        req.bt1 = config.bt1;
        req.mu1 = design_mu(config.alloc_mu1);
        req.mu2 = design_mu(config.alloc_mu2);
        req.oversampling = config.oversampling;
        // the E1:E2 ratio does not depend on sigma or h_min
        const AllocationResult a = allocate(req);
        out.e1 = total * a.e1 / (a.e1 + a.e2);
        out.e2 = total - out.e1;
        out.p1 = out.e1 / stage1_uses;
        out.p2 = out.e2 / bt2;
        break;
    }
    case AllocationMode::equal_power:
        out.p1 = out.p2 = total / k;
        out.e1 = out.p1 * stage1_uses;
        out.e2 = out.p2 * bt2;
        break;
    case AllocationMode::explicit_power:
        out.p1 = config.p1 * gain;
        out.p2 = config.p2 * gain;
        out.e1 = out.p1 * stage1_uses;
        out.e2 = out.p2 * bt2;
        break;
    }
    out.one_stage_p = total / k;
    return out;
}

std::vector<TrialRecord> run_trial(const ExperimentConfig& config, int snr_index, int trial)
{
    config.validate();
    return run_trial_with(config, make_context(config), snr_index, trial);
}

ExperimentResult run_experiment(const ExperimentConfig& config)
{
    config.validate();
    const TrialContext ctx = make_context(config);
    const int num_snr = static_cast<int>(config.snr_db.size());
    const std::size_t tasks = static_cast<std::size_t>(num_snr) * config.num_trials;
    std::vector<std::vector<TrialRecord>> slots(tasks);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks; t = next++)
            slots[t] = run_trial_with(config, ctx, static_cast<int>(t / config.num_trials),
                                      static_cast<int>(t % config.num_trials));
    };
    const int nthreads = std::max(1, std::min<int>(config.threads, static_cast<int>(tasks)));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    ExperimentResult out;
    out.records.reserve(tasks * config.estimators.size());
    for (auto& slot : slots)
        for (auto& rec : slot)
            out.records.push_back(std::move(rec));
    out.curves = aggregate(out.records, config);
    return out;
}

std::vector<Aggregate> aggregate(const std::vector<TrialRecord>& records,
                                 const ExperimentConfig& config)
{
    std::vector<Aggregate> out;
    for (Estimator e : config.estimators) {
        for (double snr : config.snr_db) {
            Aggregate a;
            a.estimator = e;
            a.snr_db = snr;
            int ok = 0, support = 0, aoa = 0, aod = 0;
            double mse = 0.0, nm = 0.0;
            std::vector<double> mses;
            for (const auto& r : records) {
                if (r.estimator != e || !(r.snr_db == snr))
                    continue;
                ++a.trials;
                if (r.failed) {
                    ++a.failures;
                    continue;
                }
                ok += r.eps <= config.srp_threshold;
                support += r.aoa_support_exact && r.aod_support_exact;
                aoa += r.aoa_support_exact;
                aod += r.aod_support_exact;
                mse += r.mse;
                nm += r.nmse;
                mses.push_back(r.mse);
            }
            const double n = a.trials;
            const int valid = a.trials - a.failures;
            if (a.trials > 0) {
                a.srp = ok / n;
                a.srp_err = std::sqrt(a.srp * (1.0 - a.srp) / n);
                a.support_srp = support / n;
                a.aoa_srp = aoa / n;
                a.aod_srp = aod / n;
            }
            if (valid > 0) {
                a.mse = mse / valid;
                a.nmse = nm / valid;
                std::sort(mses.begin(), mses.end());
                const std::size_t h = mses.size() / 2;
                a.median_mse = mses.size() % 2 ? mses[h] : 0.5 * (mses[h - 1] + mses[h]);
            } else {
                a.mse = a.nmse = a.median_mse = kNaN;
            }
            out.push_back(a);
        }
    }
    return out;
}

ComplexityReport complexity_report(const ExperimentConfig& base, const std::vector<int>& nr_sweep,
                                   double factor)
{
    ComplexityReport report;
    report.factor = factor;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < nr_sweep.size(); ++i) {
        ComplexityRow row;
        row.nr = nr_sweep[i];
        ExperimentConfig cfg = base;
        cfg.geometry.num_rx_antennas = row.nr;
        row.predicted = cfg.oversampling * cfg.geometry.num_rf_chains * row.nr;
        if (row.nr < 2 || cfg.geometry.num_rf_chains < 2) {
            row.degenerate = true;
            report.rows.push_back(row);
            continue;
        }
        cfg.estimators = {Estimator::two_stage_somp, Estimator::one_stage_omp};
        cfg.validate();
        const TrialContext ctx = make_context(cfg);
        Rng master(trial_seed(cfg.seed, static_cast<int>(i), 0));
        Rng chan_rng = master.derive(0);
        const std::vector<double> variances(static_cast<std::size_t>(cfg.num_paths), 1.0);
        const ChannelRealization ch =
            sample_channel(cfg.geometry, cfg.num_paths,
                           OnGrid{ctx.dict_r.grid_size, ctx.dict_t.grid_size}, variances, chan_rng);
        // counts depend on dimensions only; unit powers, noiseless
        const StagePlan plan =
            StagePlan::from_budget(cfg.geometry, cfg.num_paths, cfg.channel_uses, cfg.bt1, 1.0, 1.0);
        Rng r2 = master.derive(estimator_stream(Estimator::two_stage_somp));
        const TwoStageResult two = two_stage_somp(ch, cfg.geometry, ctx.dict_r, ctx.dict_t, plan, 0.0, r2);
        Rng r1 = master.derive(estimator_stream(Estimator::one_stage_omp));
        OneStageOptions opts;
        opts.mode = cfg.one_stage_mode;
        opts.memory_budget = cfg.memory_budget;
        const OneStageResult one = one_stage_omp(ch, cfg.geometry, ctx.dict_r, ctx.dict_t,
                                                 cfg.one_stage_rsb(), cfg.one_stage_tsb(), 1.0, 0.0,
                                                 r1, opts);
        row.one_stage = one.multiplies;
        row.two_stage = two.multiplies;
        row.two_stage_stage1 = two.stage1.multiplies;
        row.two_stage_stage2 = two.stage2.multiplies;
        row.ratio = static_cast<double>(row.one_stage) / static_cast<double>(row.two_stage);
        xs.push_back(std::log(static_cast<double>(row.nr)));
        ys.push_back(std::log(row.ratio));
        report.rows.push_back(row);
    }
    report.asserted = xs.size() >= 2;
    if (report.asserted) {
        const double n = static_cast<double>(xs.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        report.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        report.within_factor = true;
        for (const auto& row : report.rows) {
            if (row.degenerate)
                continue;
            const double q = row.ratio / row.predicted;
            if (!(q >= 1.0 / factor && q <= factor))
                report.within_factor = false;
        }
    }
    return report;
}

}  // namespace mmwcs
