#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mmwcs/types.hpp"

namespace mmwcs {

enum class CorrelationUpdate {
    // S = Phi^H R recomputed from the residual every iteration
    direct,
    // S updated by the rank-one change of the residual (same values, M*G per step)
    incremental,
};

struct SompOptions {
    CorrelationUpdate update = CorrelationUpdate::incremental;
    // stop early once ||R||_F <= threshold (unknown sparsity variant)
    std::optional<double> residual_threshold;
};

struct SompDiagnostics {
    bool ridge_used = false;
    bool underdetermined = false;  // L > M or G < M, reported only
    std::uint64_t multiplies = 0;  // complex multiplies spent in the greedy loop
};

struct SupportEstimate {
    std::vector<Index> support;        // selection order
    CMatrix coefficients;              // |support| x d
    std::vector<double> residual_norms;  // ||R^(l)||_F, l = 0..|support|
    SompDiagnostics diagnostics;
};

SupportEstimate somp(const CMatrix& observations, const CMatrix& measurement_matrix,
                     int sparsity, const SompOptions& options = {});

double mip_constant(const CMatrix& matrix, bool normalize);

// exhaustive search, refuses when binomial(G, L) > max_supports
SupportEstimate brute_force_support(const CMatrix& observations,
                                    const CMatrix& measurement_matrix, int sparsity,
                                    std::uint64_t max_supports = 1000000);

// least squares on a fixed support: coefficients and ridge flag
struct LeastSquaresFit {
    CMatrix coefficients;
    CMatrix residual;
    bool ridge_used = false;
};
LeastSquaresFit least_squares_on_support(const CMatrix& observations,
                                         const CMatrix& measurement_matrix,
                                         const std::vector<Index>& support);

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

}  // namespace mmwcs
