#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mmwcs/rng.hpp"
#include "mmwcs/types.hpp"

namespace mmwcs {

struct ArrayGeometry {
    int num_rx_antennas = 0;  // N_r
    int num_tx_antennas = 0;  // N_t
    int num_rf_chains = 0;    // N

    void validate() const;
};

struct AngleDictionary {
    CMatrix response_matrix;  // antennas x grid_size
    std::vector<double> grid_freqs;
    double oversampling = 1.0;
    int grid_size = 0;

    int antennas() const { return static_cast<int>(response_matrix.rows()); }
};

struct ChannelRealization {
    std::vector<double> aoa_freqs;
    std::vector<double> aod_freqs;
    std::vector<cplx> gains;  // h_l = sqrt(N_r N_t / L) alpha_l
    CMatrix matrix;
    int num_paths = 0;
    // grid indices of the angles when drawn on a grid
    std::vector<Index> aoa_grid;
    std::vector<Index> aod_grid;

    bool on_grid() const { return !aoa_grid.empty(); }
    CMatrix aoa_responses() const;
    CMatrix aod_responses() const;
    double min_gain_modulus() const;
};

struct OnGrid {
    int grid_rx = 0;
    int grid_tx = 0;
};
struct Continuous {};
using AngleMode = std::variant<OnGrid, Continuous>;

// maps any real frequency into [0,1)
double wrap_frequency(double f);

CVector array_response(int num_antennas, double freq);
CMatrix array_responses(int num_antennas, std::span<const double> freqs);
AngleDictionary build_dictionary(int num_antennas, double oversampling);

// H = A_r diag(h) A_t^H
ChannelRealization make_channel(int num_rx, int num_tx, std::vector<double> aoa,
                                std::vector<double> aod, std::vector<cplx> gains);

ChannelRealization sample_channel(const ArrayGeometry& geometry, int num_paths,
                                  const AngleMode& mode,
                                  std::span<const double> gain_variances, Rng& rng);

}  // namespace mmwcs
