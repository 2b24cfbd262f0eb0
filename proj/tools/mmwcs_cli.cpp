// mmwcs: simulation, bounds and allocation front end.
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmwcs/mmwcs.hpp"

namespace {

using namespace mmwcs;

void print_kv(const std::string& key, double value)
{
    std::cout << key << " = " << format_number(value) << '\n';
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed, std::optional<int> threads,
                 std::optional<int> trials)
{
    ExperimentConfig cfg = load_config(config_path);
    if (seed)
        cfg.seed = *seed;
    if (threads)
        cfg.threads = *threads;
    if (trials)
        cfg.num_trials = *trials;
    cfg.validate();
    std::filesystem::create_directories(out_dir);
    const ExperimentResult res = run_experiment(cfg);
    const std::filesystem::path dir(out_dir);
    emit_csv(res.records, (dir / "trials.csv").string());
    emit_curves(res.curves, (dir / "curves.csv").string());
    write_text_file((dir / "config.txt").string(), to_config_text(cfg));
    std::cout << curves_csv(res.curves);
    int failures = 0;
    for (const auto& r : res.records)
        failures += r.failed;
    if (failures > 0)
        std::cerr << failures << " estimator runs failed; see trials.csv (nan rows)\n";
    return 0;
}

int cmd_bounds(const std::string& config_path, double h_min)
{
    const ExperimentConfig cfg = load_config(config_path);
    const double mu1 = std::isnan(cfg.alloc_mu1)
                           ? stage1_coherence(cfg.geometry.num_rx_antennas, cfg.oversampling)
                           : cfg.alloc_mu1;
    const double mu2 = std::isnan(cfg.alloc_mu2)
                           ? truncated_aod_coherence(cfg.geometry.num_tx_antennas, cfg.bt2(),
                                                     cfg.oversampling)
                           : cfg.alloc_mu2;
    std::cout << "snr_db,p1,p2,srp_bound_aoa,srp_bound_aod\n";
    for (double snr : cfg.snr_db) {
        const PowerSplit ps = power_split(cfg, snr);
        SrpQuery q;
        q.num_paths = cfg.num_paths;
        q.h_min = h_min;
        q.sigma = ps.sigma;
        q.p1 = ps.p1;
        q.bt1 = cfg.bt1;
        q.nr = cfg.geometry.num_rx_antennas;
        q.nt = cfg.geometry.num_tx_antennas;
        q.p2 = ps.p2;
        q.bt2 = cfg.bt2();
        std::string aoa = "nan", aod = "nan";
        try {
            q.mu = mu1;
            aoa = format_number(srp_bound_aoa(q));
        } catch (const BoundInvalid&) {
        }
        try {
            q.mu = mu2;
            aod = format_number(srp_bound_aod(q));
        } catch (const BoundInvalid&) {
        }
        std::cout << format_number(snr) << ',' << format_number(ps.p1) << ','
                  << format_number(ps.p2) << ',' << aoa << ',' << aod << '\n';
    }
    return 0;
}

int cmd_allocate(const AllocationRequest& req)
{
    const AllocationResult r = allocate(req);
    print_kv("e1", r.e1);
    print_kv("e2", r.e2);
    print_kv("p1", r.p1);
    print_kv("p2", r.p2);
    std::cout << "bt1 = " << r.bt1 << "\nbt2 = " << r.bt2 << '\n';
    print_kv("mu1", r.mu1);
    print_kv("mu2", r.mu2);
    print_kv("bound_aoa", r.achieved_aoa);
    print_kv("bound_aod", r.achieved_aod);
    return 0;
}

int cmd_tw(const std::vector<std::string>& queries)
{
    for (const auto& q : queries) {
        if (q.rfind("q=", 0) == 0) {
            const double v = std::stod(q.substr(2));
            std::cout << "F2^-1(" << format_number(v) << ") = " << format_number(tw_inverse(v)) << '\n';
        } else {
            const double s = std::stod(q.rfind("s=", 0) == 0 ? q.substr(2) : q);
            std::cout << "F2(" << format_number(s) << ") = " << format_number(tw_cdf(s)) << '\n';
        }
    }
    return 0;
}

int cmd_complexity(const std::string& config_path, const std::vector<int>& nr_sweep, double factor)
{
    const ExperimentConfig cfg = load_config(config_path);
    const ComplexityReport rep = complexity_report(cfg, nr_sweep, factor);
    std::cout << "nr,one_stage,two_stage,stage1,stage2,ratio,predicted\n";
    for (const auto& row : rep.rows) {
        if (row.degenerate) {
            std::cout << row.nr << ",degenerate\n";
            continue;
        }
        std::cout << row.nr << ',' << row.one_stage << ',' << row.two_stage << ','
                  << row.two_stage_stage1 << ',' << row.two_stage_stage2 << ','
                  << format_number(row.ratio) << ',' << format_number(row.predicted) << '\n';
    }
    if (rep.asserted) {
        print_kv("slope", rep.slope);
        std::cout << "within_factor = " << (rep.within_factor ? "yes" : "no") << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-stage compressed sensing mmWave channel estimation"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads, trials;
    auto* sim = app.add_subcommand("simulate", "run a Monte Carlo experiment");
    sim->add_option("--config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--seed", seed, "override the master seed");
    sim->add_option("--threads", threads, "worker threads");
    sim->add_option("--trials", trials, "override num_trials");

    double h_min = 1.0;
    auto* bnd = app.add_subcommand("bounds", "SRP lower bounds along the configured SNR grid");
    bnd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    bnd->add_option("--h-min", h_min, "design minimum gain modulus");

    AllocationRequest req;
    std::optional<double> mu1, mu2;
    auto* alc = app.add_subcommand("allocate", "stage energies meeting SRP targets");
    alc->add_option("--k", req.channel_uses);
    alc->add_option("--eta1", req.eta1);
    alc->add_option("--eta2", req.eta2);
    alc->add_option("--nr", req.nr);
    alc->add_option("--nt", req.nt);
    alc->add_option("--rf-chains", req.rf_chains);
    alc->add_option("--paths", req.num_paths);
    alc->add_option("--bt1", req.bt1);
    alc->add_option("--h-min", req.h_min);
    alc->add_option("--sigma", req.sigma);
    alc->add_option("--oversampling", req.oversampling);
    alc->add_option("--mu1", mu1, "design coherence; computed from the dictionary when absent");
    alc->add_option("--mu2", mu2);

    std::vector<std::string> queries;
    auto* tw = app.add_subcommand("tw", "Tracy-Widom F2 lookups");
    tw->add_option("--query", queries, "s=<value> for F2(s), q=<value> for the quantile")->required();

    std::vector<int> nr_sweep{10, 20, 40};
    double factor = 3.0;
    auto* cpx = app.add_subcommand("complexity", "multiply counts, one-stage vs two-stage");
    cpx->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    cpx->add_option("--nr", nr_sweep)->delimiter(',');
    cpx->add_option("--factor", factor);

    CLI11_PARSE(app, argc, argv);
    try {
        if (*sim)
            return cmd_simulate(config_path, out_dir, seed, threads, trials);
        if (*bnd)
            return cmd_bounds(config_path, h_min);
        if (*alc) {
            req.mu1 = mu1;
            req.mu2 = mu2;
            return cmd_allocate(req);
        }
        if (*tw)
            return cmd_tw(queries);
        if (*cpx)
            return cmd_complexity(config_path, nr_sweep, factor);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
