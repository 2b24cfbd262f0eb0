#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mmwcs/channel.hpp"
#include "mmwcs/recovery.hpp"
#include "mmwcs/sounding.hpp"

namespace mmwcs {

struct StageDiagnostics {
    std::vector<double> residual_norms;
    bool ridge_used = false;
    std::uint64_t multiplies = 0;
};

struct AoaEstimate {
    std::vector<Index> support;
    CMatrix responses;     // N_r x L
    CMatrix observations;  // Y_1
    CMatrix rsb;           // W_1
    TransmitBeams tsb;     // F_1
    StageDiagnostics diagnostics;
};

struct AodEstimate {
    std::vector<Index> support;
    CMatrix responses;     // N_t x L
    CMatrix observations;  // Y_2
    CMatrix rsb;           // W_2
    TransmitBeams tsb;     // F_2
    StageDiagnostics diagnostics;
};

AoaEstimate estimate_aoa(const ChannelRealization& channel, const ArrayGeometry& geometry,
                         const AngleDictionary& dict_r, int bt1, double p1, double noise_std,
                         Rng& rng, const SompOptions& options = {});

AodEstimate estimate_aod(const ChannelRealization& channel, const ArrayGeometry& geometry,
                         const AngleDictionary& dict_t, const CMatrix& est_aoa_responses,
                         int bt2, double p2, double noise_std, Rng& rng,
                         const SompOptions& options = {});

struct Reconstruction {
    CMatrix r_hat;  // L x L
    CMatrix h_hat;  // A_r R A_t^H
    double gram_condition = 1.0;
    bool ridge_used = false;
    std::uint64_t multiplies = 0;
};

// stacked least squares over both stages; Kronecker structure of A_1, A_2 is
// used to form the normal equations
Reconstruction reconstruct_rhat(const CMatrix& y1, const CMatrix& y2, const CMatrix& w1,
                                const CMatrix& f1, const CMatrix& w2, const CMatrix& f2,
                                const CMatrix& est_aoa_responses,
                                const CMatrix& est_aod_responses);

struct PathPair {
    int aoa_index = 0;
    int aod_index = 0;
    cplx gain;
};

std::vector<PathPair> pair_paths(const CMatrix& r_hat);

// one sounding round: Y = W^H H F + W^H N
struct Measurement {
    CMatrix rsb;
    CMatrix tsb;
    CMatrix observations;
};

struct GainFit {
    CVector gains;
    double gram_condition = 1.0;
    std::uint64_t multiplies = 0;
};

// least squares for the gains of known atom pairs a_r,l a_t,l^H
GainFit fit_path_gains(std::span<const Measurement> measurements, const CMatrix& aoa_responses,
                       const CMatrix& aod_responses);

struct TwoStageOptions {
    SompOptions somp;
    // re-estimate the L paired gains by least squares over both stages
    bool refit_gains = true;
};

struct TwoStageResult {
    std::vector<Index> est_aoa_support;
    std::vector<Index> est_aod_support;
    CMatrix est_aoa_responses;
    CMatrix est_aod_responses;
    std::vector<double> est_aoa_freqs;  // per column of est_aoa_responses
    std::vector<double> est_aod_freqs;
    CMatrix r_hat_ls;  // full least-squares R
    CMatrix r_hat;     // estimate used for H (paired and refit when enabled)
    CMatrix h_hat;
    std::vector<PathPair> pairing;
    StageDiagnostics stage1;
    StageDiagnostics stage2;
    bool reconstruction_ridge = false;
    bool gains_refit = false;
    std::uint64_t multiplies = 0;

    // (aoa, aod) frequency pairs following the pairing
    std::vector<std::pair<double, double>> path_angles() const;
};

// shared tail of the grid and gridless pipelines: reconstruct, pair, refit
void finish_two_stage(TwoStageResult& result, const Measurement& stage1,
                      const Measurement& stage2, const TwoStageOptions& options);

TwoStageResult two_stage_somp(const ChannelRealization& channel, const ArrayGeometry& geometry,
                              const AngleDictionary& dict_r, const AngleDictionary& dict_t,
                              const StagePlan& plan, double noise_std, Rng& rng,
                              const TwoStageOptions& options = {});

struct OneStageOptions {
    SoundingMode mode = SoundingMode::random_phase;
    // refuse when G_r G_t B_r B_t exceeds this many complex entries
    std::uint64_t memory_budget = std::uint64_t{1} << 25;
    SompOptions somp;
};

struct OneStageResult {
    std::vector<std::pair<Index, Index>> support;  // (AoA grid index, AoD grid index)
    CVector gains;
    CMatrix h_hat;
    std::vector<double> residual_norms;
    std::uint64_t multiplies = 0;

    std::vector<std::pair<double, double>> path_angles(const AngleDictionary& dict_r,
                                                       const AngleDictionary& dict_t) const;
};

// flat column q of F^T conj(A_t) (x) W^H A_r  <->  (q mod G_r, q / G_r)
std::pair<Index, Index> split_flat_index(Index q, Index grid_rx);

CMatrix kronecker_dictionary(const CMatrix& rsb, const CMatrix& tsb,
                             const AngleDictionary& dict_r, const AngleDictionary& dict_t);

OneStageResult one_stage_omp(const ChannelRealization& channel, const ArrayGeometry& geometry,
                             const AngleDictionary& dict_r, const AngleDictionary& dict_t,
                             int br, int bt, double p, double noise_std, Rng& rng,
                             const OneStageOptions& options = {});

struct OracleResult {
    CVector gains;
    CMatrix h_hat;
};

// true A_r, A_t known; gains by least squares over all measurements
OracleResult oracle_estimate(const ChannelRealization& channel,
                             std::span<const Measurement> measurements);
OracleResult oracle_estimate(const ChannelRealization& channel, const SounderSet& sounders,
                             const CMatrix& observations);

}  // namespace mmwcs
