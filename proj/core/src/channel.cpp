#include "mmwcs/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mmwcs/errors.hpp"

namespace mmwcs {

void ArrayGeometry::validate() const
{
    if (num_rx_antennas < 1 || num_tx_antennas < 1)
        throw DomainError("antenna counts must be positive");
    if (num_rf_chains < 2)
        throw DomainError("hybrid factorization needs at least 2 RF chains");
    if (num_rf_chains > std::min(num_rx_antennas, num_tx_antennas))
        throw DomainError("RF chains exceed antenna count");
}

double wrap_frequency(double f)
{
    double w = f - std::floor(f);
    if (w >= 1.0)
        w = 0.0;
    return w;
}

CVector array_response(int num_antennas, double freq)
{
    if (num_antennas < 1)
        throw DomainError("array_response: num_antennas must be >= 1");
    if (!(freq >= 0.0 && freq < 1.0))
        throw DomainError("array_response: frequency " + std::to_string(freq) + " outside [0,1)");
    CVector a(num_antennas);
    const double scale = 1.0 / std::sqrt(static_cast<double>(num_antennas));
    for (int k = 0; k < num_antennas; ++k) {
        const double phase = 2.0 * kPi * static_cast<double>(k) * freq;
        a(k) = scale * cplx(std::cos(phase), std::sin(phase));
    }
    return a;
}

CMatrix array_responses(int num_antennas, std::span<const double> freqs)
{
    CMatrix a(num_antennas, static_cast<Index>(freqs.size()));
    for (std::size_t l = 0; l < freqs.size(); ++l)
        a.col(static_cast<Index>(l)) = array_response(num_antennas, freqs[l]);
    return a;
}

AngleDictionary build_dictionary(int num_antennas, double oversampling)
{
    if (!(oversampling >= 1.0))
        throw DomainError("build_dictionary: oversampling must be >= 1");
    AngleDictionary dict;
    // guard against 1.5*20 = 30.000000000000004 style round-up
    const double raw = oversampling * num_antennas;
    dict.grid_size = static_cast<int>(std::ceil(raw - 1e-9 * raw));
    dict.oversampling = oversampling;
    dict.grid_freqs.resize(dict.grid_size);
    for (int i = 0; i < dict.grid_size; ++i)
        dict.grid_freqs[i] = static_cast<double>(i) / dict.grid_size;
    dict.response_matrix = array_responses(num_antennas, dict.grid_freqs);
    return dict;
}

CMatrix ChannelRealization::aoa_responses() const
{
    return array_responses(static_cast<int>(matrix.rows()), aoa_freqs);
}

CMatrix ChannelRealization::aod_responses() const
{
    return array_responses(static_cast<int>(matrix.cols()), aod_freqs);
}

double ChannelRealization::min_gain_modulus() const
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& h : gains)
        m = std::min(m, std::abs(h));
    return m;
}

ChannelRealization make_channel(int num_rx, int num_tx, std::vector<double> aoa,
                                std::vector<double> aod, std::vector<cplx> gains)
{
    if (aoa.size() != aod.size() || aoa.size() != gains.size() || aoa.empty())
        throw DimensionError("make_channel: path lists must be non-empty and of equal length");
    ChannelRealization ch;
    ch.num_paths = static_cast<int>(aoa.size());
    ch.aoa_freqs = std::move(aoa);
    ch.aod_freqs = std::move(aod);
    ch.gains = std::move(gains);
    const CMatrix ar = array_responses(num_rx, ch.aoa_freqs);
    const CMatrix at = array_responses(num_tx, ch.aod_freqs);
    const CVector h = Eigen::Map<const CVector>(ch.gains.data(), ch.num_paths);
    ch.matrix = ar * h.asDiagonal() * at.adjoint();
    return ch;
}

ChannelRealization sample_channel(const ArrayGeometry& geometry, int num_paths,
                                  const AngleMode& mode, std::span<const double> gain_variances,
                                  Rng& rng)
{
    geometry.validate();
    const int nr = geometry.num_rx_antennas;
    const int nt = geometry.num_tx_antennas;
    if (num_paths < 1 || num_paths > std::min(nr, nt))
        throw DomainError("sample_channel: need 1 <= L <= min(N_r, N_t)");
    if (static_cast<int>(gain_variances.size()) != num_paths)
        throw DimensionError("sample_channel: one gain variance per path");
    for (double v : gain_variances)
        if (!(v > 0.0))
            throw DomainError("sample_channel: gain variances must be positive");

    std::vector<double> aoa(num_paths), aod(num_paths);
    std::vector<Index> aoa_idx, aod_idx;

    auto draw_without_replacement = [&](int grid) {
        if (num_paths > grid)
            throw InfeasibleError("sample_channel: more paths than grid points");
        // partial Fisher-Yates
        std::vector<Index> pool(grid);
        std::iota(pool.begin(), pool.end(), Index{0});
        for (int l = 0; l < num_paths; ++l) {
            const auto j = l + static_cast<Index>(rng.below(static_cast<std::uint64_t>(grid - l)));
            std::swap(pool[l], pool[j]);
        }
        pool.resize(num_paths);
        return pool;
    };

    if (const auto* g = std::get_if<OnGrid>(&mode)) {
        aoa_idx = draw_without_replacement(g->grid_rx);
        aod_idx = draw_without_replacement(g->grid_tx);
        for (int l = 0; l < num_paths; ++l) {
            aoa[l] = static_cast<double>(aoa_idx[l]) / g->grid_rx;
            aod[l] = static_cast<double>(aod_idx[l]) / g->grid_tx;
        }
    } else {
        for (int l = 0; l < num_paths; ++l) {
            aoa[l] = rng.uniform();
            aod[l] = rng.uniform();
        }
    }

    const double scale = std::sqrt(static_cast<double>(nr) * nt / num_paths);
    std::vector<cplx> gains(num_paths);
    for (int l = 0; l < num_paths; ++l)
        gains[l] = scale * rng.complex_normal(gain_variances[l]);

    ChannelRealization ch = make_channel(nr, nt, std::move(aoa), std::move(aod), std::move(gains));
    ch.aoa_grid = std::move(aoa_idx);
    ch.aod_grid = std::move(aod_idx);
    return ch;
}

}  // namespace mmwcs
