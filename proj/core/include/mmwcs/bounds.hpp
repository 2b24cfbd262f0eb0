#pragma once

#include <optional>
#include <vector>

namespace mmwcs {

// centering and scaling of the largest squared singular value of an M x d
// complex Gaussian matrix
double mp_center(double m, double d);  // (sqrt M + sqrt d)^2
double mp_scale(double m, double d);   // (sqrt M + sqrt d)(1/sqrt M + 1/sqrt d)^(1/3)

double srp_bound_somp(double c_min, double mu, int num_paths, double sigma, double m, double d);

double srp_bound_somp_quantized(double c_min, double mu, int num_paths, double sigma, double m,
                                double d, double quant_err_norm);

// evaluates srp_bound_somp over d_range; throws if the sequence increases
std::vector<double> mmv_count_effect(double m, const std::vector<double>& d_range, double c_min,
                                     double mu, int num_paths, double sigma);

struct SrpQuery {
    int num_paths = 1;
    double mu = 0.0;  // mu_1 or mu_2 depending on the bound
    double h_min = 0.0;
    double sigma = 1.0;
    // stage 1
    double p1 = 0.0;
    int bt1 = 1;
    int nr = 1;
    int nt = 1;
    // stage 2
    double p2 = 0.0;
    int bt2 = 1;
};

enum class CoherenceFactor {
    linear,   // (1-(2L-1)mu) as displayed for the AoA theorem
    squared,  // (1-(2L-1)mu)^2 as in the generic SOMP bound
};

double srp_bound_aoa(const SrpQuery& query, CoherenceFactor factor = CoherenceFactor::linear);

enum class AodBoundForm {
    // Lemma bound with C_min = |h_min| sqrt(p2 B_t2 / N_t) on the normalized matrix
    derived,
    // displayed form, carrying an extra N_t in both noise terms
    displayed,
};

double srp_bound_aod(const SrpQuery& query, AodBoundForm form = AodBoundForm::derived);

// coherence of the normalized stage-1 matrix S^H A_r (zero for integer s)
double stage1_coherence(int nr, double oversampling);
// coherence of the first bt2 rows of the AoD dictionary, columns normalized
double truncated_aod_coherence(int nt, int bt2, double oversampling);

struct AllocationRequest {
    int channel_uses = 50;  // K
    int rf_chains = 4;      // N
    int nr = 20;
    int nt = 64;
    int num_paths = 4;
    double h_min = 1.0;
    double sigma = 1.0;
    double eta1 = 0.95;
    double eta2 = 0.95;
    int bt1 = 1;  // design B_{t,1}
    // computed from the dictionaries when absent
    std::optional<double> mu1;
    std::optional<double> mu2;
    double oversampling = 1.0;
};

struct AllocationResult {
    double e1 = 0.0;
    double e2 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    int bt1 = 0;
    int bt2 = 0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double achieved_aoa = 0.0;
    double achieved_aod = 0.0;
};

AllocationResult allocate(const AllocationRequest& request);

}  // namespace mmwcs
