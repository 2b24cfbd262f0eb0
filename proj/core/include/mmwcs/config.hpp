#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mmwcs/channel.hpp"
#include "mmwcs/sounding.hpp"

namespace mmwcs {

enum class Estimator {
    two_stage_somp,
    one_stage_omp,
    two_stage_superres,
    one_stage_atomic_stub,
    oracle,
};

enum class AllocationMode {
    paper,         // split from the SRP-guaranteeing allocation rule
    equal_power,   // p1 = p2
    explicit_power,  // p1, p2 given at 0 dB and scaled with SNR
};

struct ExperimentConfig {
    ArrayGeometry geometry{20, 64, 4};
    int num_paths = 4;
    double oversampling = 1.0;
    int channel_uses = 50;
    int bt1 = 1;
    std::vector<double> snr_db{0.0};  // +inf means noiseless
    int num_trials = 2000;
    bool continuous_angles = false;
    std::vector<Estimator> estimators{Estimator::two_stage_somp};
    AllocationMode allocation = AllocationMode::paper;
    double eta1 = 0.95;
    double eta2 = 0.95;
    double p1 = 1.0;
    double p2 = 1.0;
    // coherence values fed to the allocation rule
    double alloc_mu1 = 0.0;
    double alloc_mu2 = 0.0;
    double gain_variance = 1.0;
    std::uint64_t seed = 1;
    int threads = 1;
    int one_stage_br = 0;  // 0 selects N_r
    SoundingMode one_stage_mode = SoundingMode::random_phase;
    std::uint64_t memory_budget = std::uint64_t{1} << 25;
    bool refit_gains = true;
    double srp_threshold = 1e-3;
    bool record_timing = false;
    // gridless solver
    double lambda_scale = 1.0;
    double rho = 1.0;
    int admm_max_iter = 10000;
    double admm_tol = 1e-6;
    bool enable_atomic_stub = false;

    int bt2() const;
    int one_stage_rsb() const;
    int one_stage_tsb() const;
    void validate() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
// key = value dump that parse_config reads back
std::string to_config_text(const ExperimentConfig& config);

std::string estimator_name(Estimator estimator);
Estimator parse_estimator(std::string_view name);

}  // namespace mmwcs
