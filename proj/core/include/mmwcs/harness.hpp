#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmwcs/config.hpp"
#include "mmwcs/metrics.hpp"
#include "mmwcs/pipeline.hpp"

namespace mmwcs {

// convention: sigma = 1 and total energy E = K * 10^(snr/10)
struct PowerSplit {
    double sigma = 1.0;
    double e1 = 0.0;
    double e2 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double one_stage_p = 0.0;  // matched total energy over K uses
};

PowerSplit power_split(const ExperimentConfig& config, double snr_db);

struct TrialRecord {
    std::uint64_t seed = 0;
    double snr_db = 0.0;
    Estimator estimator = Estimator::two_stage_somp;
    double eps = 0.0;
    bool aoa_support_exact = false;
    bool aod_support_exact = false;
    double mse = 0.0;  // sum of squared angle errors, no 1/2L
    double nmse = 0.0;
    double wall_ms = 0.0;
    std::uint64_t mults = 0;
    bool failed = false;
    std::string failure;
};

struct Aggregate {
    Estimator estimator = Estimator::two_stage_somp;
    double snr_db = 0.0;
    double srp = 0.0;  // fraction with eps <= threshold
    double srp_err = 0.0;  // binomial standard error
    double support_srp = 0.0;  // both supports exact
    double aoa_srp = 0.0;
    double aod_srp = 0.0;
    double mse = 0.0;
    double nmse = 0.0;
    double median_mse = 0.0;
    int trials = 0;
    int failures = 0;
};

struct ExperimentResult {
    std::vector<TrialRecord> records;
    std::vector<Aggregate> curves;
};

// one trial of every configured estimator on a shared channel
std::vector<TrialRecord> run_trial(const ExperimentConfig& config, int snr_index, int trial);

ExperimentResult run_experiment(const ExperimentConfig& config);

std::vector<Aggregate> aggregate(const std::vector<TrialRecord>& records,
                                 const ExperimentConfig& config);

std::uint64_t trial_seed(std::uint64_t master, int snr_index, int trial);

struct ComplexityRow {
    int nr = 0;
    bool degenerate = false;
    std::uint64_t one_stage = 0;
    std::uint64_t two_stage = 0;
    std::uint64_t two_stage_stage1 = 0;
    std::uint64_t two_stage_stage2 = 0;
    double ratio = 0.0;
    double predicted = 0.0;  // s N N_r
};

struct ComplexityReport {
    std::vector<ComplexityRow> rows;
    double slope = 0.0;  // log-log fit of ratio against N_r
    bool asserted = false;
    bool within_factor = false;
    double factor = 3.0;
};

ComplexityReport complexity_report(const ExperimentConfig& base, const std::vector<int>& nr_sweep,
                                   double factor = 3.0);

// CSV
std::string format_number(double value);
std::string trials_csv(const std::vector<TrialRecord>& records);
std::string curves_csv(const std::vector<Aggregate>& curves);
void write_text_file(const std::string& path, const std::string& text);
void emit_csv(const std::vector<TrialRecord>& records, const std::string& path);
void emit_curves(const std::vector<Aggregate>& curves, const std::string& path);
std::vector<Aggregate> parse_curves_csv(const std::string& text);

}  // namespace mmwcs
