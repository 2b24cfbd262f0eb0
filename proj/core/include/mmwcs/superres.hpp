#pragma once

#include <vector>

#include "mmwcs/pipeline.hpp"

namespace mmwcs {

// Hermitian Toeplitz matrix whose first column is u
CMatrix toeplitz_from_generator(const CVector& u);

enum class DiagonalUpdate {
    // stationary point of the augmented Lagrangian in u_1
    derived,
    // u_1 = (V_1 + rho S_1) / (m rho + m)
    displayed,
};

struct AdmmOptions {
    double lambda = 1.0;
    double rho = 1.0;
    int max_iter = 10000;
    double tol = 1e-6;
    DiagonalUpdate diagonal = DiagonalUpdate::derived;
    // solve with unit penalty on lambda Y (Y / ||Y||_F when lambda is infinite),
    // then rescale; same minimizer
    bool normalize = true;
    bool log_objective = true;
    // record min eigenvalue / Hermitian error after each X update
    bool check_invariants = false;
};

struct AdmmResult {
    CVector u;
    CMatrix r;
    CMatrix z;
    CMatrix x;
    CMatrix multiplier;
    int iterations = 0;
    bool converged = false;
    double primal_residual = 0.0;
    std::vector<double> objective;  // tr T(u) + tr Z + lambda ||Y - R||^2 per iteration
    double worst_min_eigenvalue = 0.0;
    double worst_hermitian_error = 0.0;
};

AdmmResult atomic_admm(const CMatrix& y, const AdmmOptions& options);

// first index after `skip` at which the objective increases by more than
// slack * max(1, |f|); -1 when none
int first_objective_increase(const std::vector<double>& objective, int skip, double slack);

struct FrequencyEstimate {
    std::vector<double> freqs;   // ascending in [0,1)
    std::vector<double> powers;  // nonnegative weights
    double toeplitz_rank_gap = 0.0;
    bool low_confidence = false;
};

FrequencyEstimate extract_frequencies(const CVector& u, int num_paths, int num_antennas);

// W_1 Y_1; W_1 must be unitary
CMatrix project_observations_stage1(const CMatrix& y1, const CMatrix& w1);

// noise-scaled penalty for unit-norm atoms of length m and d snapshots;
// a large fixed value is used when sigma == 0
double default_lambda(double sigma, int m, int d, double scale = 1.0);

struct GridlessEstimate {
    FrequencyEstimate estimate;
    CMatrix responses;
    int admm_iterations = 0;
    bool admm_converged = false;
    std::vector<double> objective;
};

GridlessEstimate superres_aoa(const CMatrix& y1, const CMatrix& w1, int num_paths,
                              const AdmmOptions& options);
GridlessEstimate superres_aod(const CMatrix& y2, const CMatrix& f2, const CMatrix& w2,
                              int num_paths, int num_tx, const AdmmOptions& options);

struct SuperresOptions {
    AdmmOptions admm;
    double lambda_scale = 1.0;  // multiplies default_lambda when lambda is derived
    bool derive_lambda = true;
    TwoStageOptions two_stage;
};

struct SuperresResult {
    TwoStageResult result;
    GridlessEstimate stage1;
    GridlessEstimate stage2;
};

SuperresResult two_stage_superres(const ChannelRealization& channel, const ArrayGeometry& geometry,
                                  const StagePlan& plan, double noise_std, Rng& rng,
                                  const SuperresOptions& options = {});

}  // namespace mmwcs
