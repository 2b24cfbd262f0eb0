#pragma once

#include <vector>

#include "mmwcs/channel.hpp"

namespace mmwcs {

// f = analog * digital with constant-modulus analog entries
struct HybridFactor {
    CMatrix analog;   // N_t x N
    CVector digital;  // N
};

struct TransmitBeams {
    CMatrix beams;  // N_t x B_t
    double power_per_beam = 0.0;
    std::vector<HybridFactor> factors;
};

struct SounderSet {
    CMatrix rsb;  // W_b, N_r x B_r
    CMatrix tsb;  // F_b, N_t x B_t
    double power_per_beam = 0.0;
    std::vector<HybridFactor> analog_factors;
};

struct StagePlan {
    int bt1 = 1;
    int bt2 = 1;
    int br1 = 0;
    int br2 = 0;
    double p1 = 1.0;
    double p2 = 1.0;
    int channel_uses = 0;
    int rf_chains = 2;  // N

    // B_{t,2} = K - B_{t,1} N_r / N
    static StagePlan from_budget(const ArrayGeometry& geometry, int num_paths, int channel_uses,
                                 int bt1, double p1, double p2);
    void validate(const ArrayGeometry& geometry, int num_paths) const;
    double stage1_energy() const;
    double stage2_energy() const { return p2 * bt2; }
};

enum class SoundingMode { random_phase, partial_dft };

// K = B_{t,1} N_r / N + B_{t,2}; throws when B_{t,1} N_r is not divisible by N
int channel_uses(const ArrayGeometry& geometry, int bt1, int bt2);

CMatrix dft_matrix(int n);

TransmitBeams stage1_tsb(const ArrayGeometry& geometry, int bt1, double p1);
CMatrix stage1_rsb(const ArrayGeometry& geometry);
CMatrix stage2_rsb(const CMatrix& est_aoa_responses);
TransmitBeams stage2_tsb(const ArrayGeometry& geometry, int bt2, double p2);

SounderSet one_stage_sounders(const ArrayGeometry& geometry, int br, int bt, double p,
                              SoundingMode mode, Rng& rng);

// checks analog*digital == column and |analog| == 1/sqrt(N_t)
bool certify_factors(const CMatrix& beams, const std::vector<HybridFactor>& factors,
                     double tol = 1e-12);

CMatrix observe(const ChannelRealization& channel, const CMatrix& rsb, const CMatrix& tsb,
                double noise_std, Rng& rng);
CMatrix observe(const ChannelRealization& channel, const SounderSet& sounders,
                double noise_std, Rng& rng);

}  // namespace mmwcs
