#include "mmwcs/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mmwcs/errors.hpp"

namespace mmwcs {

namespace {

CMatrix select_columns(const CMatrix& a, const std::vector<Index>& idx)
{
    CMatrix out(a.rows(), static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k)
        out.col(static_cast<Index>(k)) = a.col(idx[k]);
    return out;
}

StageDiagnostics stage_diagnostics(const SupportEstimate& est)
{
    StageDiagnostics d;
    d.residual_norms = est.residual_norms;
    d.ridge_used = est.diagnostics.ridge_used;
    d.multiplies = est.diagnostics.multiplies;
    return d;
}

// Hermitian positive semidefinite solve with a condition check
struct GramSolve {
    CVector x;
    double condition = 1.0;
    bool ridge = false;
};

GramSolve solve_gram(CMatrix gram, const CVector& rhs, double max_condition, bool allow_ridge,
                     const char* who)
{
    GramSolve out;
    gram = (gram + gram.adjoint()).eval() * 0.5;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
    const double lmax = eig.eigenvalues().maxCoeff();
    const double lmin = eig.eigenvalues().minCoeff();
    out.condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
    if (!(lmax > 0.0) || out.condition > max_condition) {
        if (!allow_ridge)
            throw DegenerateEstimate(std::string(who) + ": singular Gram matrix");
        gram.diagonal().array() += 1e-12 * std::max(lmax, 1e-300);
        out.ridge = true;
    }
    out.x = gram.ldlt().solve(rhs);
    return out;
}

}  // namespace

AoaEstimate estimate_aoa(const ChannelRealization& channel, const ArrayGeometry& geometry,
                         const AngleDictionary& dict_r, int bt1, double p1, double noise_std,
                         Rng& rng, const SompOptions& options)
{
    geometry.validate();
    channel_uses(geometry, bt1, 0);
    if (dict_r.antennas() != geometry.num_rx_antennas)
        throw DimensionError("estimate_aoa: dictionary size differs from N_r");
    AoaEstimate out;
    out.rsb = stage1_rsb(geometry);
    out.tsb = stage1_tsb(geometry, bt1, p1);
    out.observations = observe(channel, out.rsb, out.tsb.beams, noise_std, rng);
    const CMatrix phi1 = out.rsb.adjoint() * dict_r.response_matrix;
    const SupportEstimate est = somp(out.observations, phi1, channel.num_paths, options);
    out.support = est.support;
    out.responses = select_columns(dict_r.response_matrix, est.support);
    out.diagnostics = stage_diagnostics(est);
    return out;
}

AodEstimate estimate_aod(const ChannelRealization& channel, const ArrayGeometry& geometry,
                         const AngleDictionary& dict_t, const CMatrix& est_aoa_responses, int bt2,
                         double p2, double noise_std, Rng& rng, const SompOptions& options)
{
    geometry.validate();
    if (dict_t.antennas() != geometry.num_tx_antennas)
        throw DimensionError("estimate_aod: dictionary size differs from N_t");
    AodEstimate out;
    out.rsb = stage2_rsb(est_aoa_responses);
    out.tsb = stage2_tsb(geometry, bt2, p2);
    out.observations = observe(channel, out.rsb, out.tsb.beams, noise_std, rng);
    const CMatrix phi2 = out.tsb.beams.adjoint() * dict_t.response_matrix;
    const SupportEstimate est = somp(out.observations.adjoint(), phi2, channel.num_paths, options);
    out.support = est.support;
    out.responses = select_columns(dict_t.response_matrix, est.support);
    out.diagnostics = stage_diagnostics(est);
    return out;
}

Reconstruction reconstruct_rhat(const CMatrix& y1, const CMatrix& y2, const CMatrix& w1,
                                const CMatrix& f1, const CMatrix& w2, const CMatrix& f2,
                                const CMatrix& est_aoa_responses, const CMatrix& est_aod_responses)
{
    const Index l = est_aoa_responses.cols();
    if (est_aod_responses.cols() != l)
        throw DimensionError("reconstruct_rhat: AoA and AoD estimates differ in count");
    if (y1.rows() * y1.cols() + y2.rows() * y2.cols() < l * l)
        throw DimensionError("reconstruct_rhat: fewer observations than unknowns");

    Reconstruction out;
    CMatrix gram = CMatrix::Zero(l * l, l * l);
    CVector rhs = CVector::Zero(l * l);
    const CMatrix* ys[2] = {&y1, &y2};
    const CMatrix* ws[2] = {&w1, &w2};
    const CMatrix* fs[2] = {&f1, &f2};
    for (int s = 0; s < 2; ++s) {
        const CMatrix c = ws[s]->adjoint() * est_aoa_responses;  // W^H A_r
        const CMatrix b = est_aod_responses.adjoint() * *fs[s];  // A_t^H F
        if (c.rows() != ys[s]->rows() || b.cols() != ys[s]->cols())
            throw DimensionError("reconstruct_rhat: sounder/observation mismatch");
        // A = B^T (x) C  =>  A^H A = conj(B) B^T (x) C^H C,  A^H vec(Y) = vec(C^H Y B^H)
        const CMatrix bb = b.conjugate() * b.transpose();
        const CMatrix cc = c.adjoint() * c;
        for (Index j = 0; j < l; ++j)
            for (Index i = 0; i < l; ++i)
                gram.block(i * l, j * l, l, l) += bb(i, j) * cc;
        const CMatrix proj = c.adjoint() * *ys[s] * b.adjoint();
        rhs += Eigen::Map<const CVector>(proj.data(), l * l);
        const auto br = static_cast<std::uint64_t>(c.rows());
        const auto bt = static_cast<std::uint64_t>(b.cols());
        const auto ul = static_cast<std::uint64_t>(l);
        out.multiplies += ul * ul * (br + bt) + ul * br * bt + ul * ul * bt + ul * ul * ul * ul;
    }
    const GramSolve sol = solve_gram(gram, rhs, 1e12, true, "reconstruct_rhat");
    out.gram_condition = sol.condition;
    out.ridge_used = sol.ridge;
    out.r_hat = Eigen::Map<const CMatrix>(sol.x.data(), l, l);
    out.h_hat = est_aoa_responses * out.r_hat * est_aod_responses.adjoint();
    return out;
}

std::vector<PathPair> pair_paths(const CMatrix& r_hat)
{
    const Index l = r_hat.rows();
    if (r_hat.cols() != l)
        throw DimensionError("pair_paths: R must be square");
    std::vector<Index> order(static_cast<std::size_t>(l * l));
    std::iota(order.begin(), order.end(), Index{0});
    // column-major position; stable sort keeps index order on equal modulus
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return std::abs(r_hat(a % l, a / l)) > std::abs(r_hat(b % l, b / l));
    });
    std::vector<char> row_used(static_cast<std::size_t>(l), 0), col_used(static_cast<std::size_t>(l), 0);
    std::vector<PathPair> pairs;
    for (Index pos : order) {
        const Index i = pos % l;
        const Index j = pos / l;
        if (row_used[i] || col_used[j])
            continue;
        row_used[i] = col_used[j] = 1;
        pairs.push_back({static_cast<int>(i), static_cast<int>(j), r_hat(i, j)});
        if (static_cast<Index>(pairs.size()) == l)
            break;
    }
    return pairs;
}

GainFit fit_path_gains(std::span<const Measurement> measurements, const CMatrix& aoa_responses,
                       const CMatrix& aod_responses)
{
    const Index l = aoa_responses.cols();
    if (aod_responses.cols() != l || l == 0)
        throw DimensionError("fit_path_gains: response counts differ");
    GainFit out;
    CMatrix gram = CMatrix::Zero(l, l);
    CVector rhs = CVector::Zero(l);
    for (const auto& m : measurements) {
        const CMatrix c = m.rsb.adjoint() * aoa_responses;  // W^H A_r
        const CMatrix b = aod_responses.adjoint() * m.tsb;  // A_t^H F
        if (c.rows() != m.observations.rows() || b.cols() != m.observations.cols())
            throw DimensionError("fit_path_gains: sounder/observation mismatch");
        // <x_l, x_k> = (C^H C)_{lk} (conj(B) B^T)_{lk}
        gram += (c.adjoint() * c).cwiseProduct(b.conjugate() * b.transpose());
        rhs += (c.adjoint() * m.observations * b.adjoint()).diagonal();
        const auto br = static_cast<std::uint64_t>(c.rows());
        const auto bt = static_cast<std::uint64_t>(b.cols());
        const auto ul = static_cast<std::uint64_t>(l);
        out.multiplies += ul * ul * (br + bt) + ul * br * bt + ul * ul * bt;
    }
    const GramSolve sol = solve_gram(gram, rhs, 1e14, false, "fit_path_gains");
    out.gains = sol.x;
    out.gram_condition = sol.condition;
    return out;
}

std::vector<std::pair<double, double>> TwoStageResult::path_angles() const
{
    std::vector<std::pair<double, double>> out;
    for (const auto& p : pairing)
        out.emplace_back(est_aoa_freqs[p.aoa_index], est_aod_freqs[p.aod_index]);
    return out;
}

void finish_two_stage(TwoStageResult& result, const Measurement& stage1, const Measurement& stage2,
                      const TwoStageOptions& options)
{
    const Reconstruction rec = reconstruct_rhat(stage1.observations, stage2.observations, stage1.rsb,
                                                stage1.tsb, stage2.rsb, stage2.tsb,
                                                result.est_aoa_responses, result.est_aod_responses);
    result.r_hat_ls = rec.r_hat;
    result.reconstruction_ridge = rec.ridge_used;
    result.pairing = pair_paths(rec.r_hat);
    result.r_hat = rec.r_hat;
    if (options.refit_gains) {
        const Index l = static_cast<Index>(result.pairing.size());
        CMatrix ar(result.est_aoa_responses.rows(), l), at(result.est_aod_responses.rows(), l);
        for (Index k = 0; k < l; ++k) {
            ar.col(k) = result.est_aoa_responses.col(result.pairing[k].aoa_index);
            at.col(k) = result.est_aod_responses.col(result.pairing[k].aod_index);
        }
        const Measurement both[2] = {stage1, stage2};
        try {
            const GainFit fit = fit_path_gains(both, ar, at);
            result.r_hat = CMatrix::Zero(l, l);
            for (Index k = 0; k < l; ++k) {
                auto& p = result.pairing[k];
                p.gain = fit.gains(k);
                result.r_hat(p.aoa_index, p.aod_index) = fit.gains(k);
            }
            result.gains_refit = true;
        } catch (const DegenerateEstimate&) {
            // keep the full least-squares R
            result.gains_refit = false;
        }
    }
    result.h_hat = result.est_aoa_responses * result.r_hat * result.est_aod_responses.adjoint();
}

TwoStageResult two_stage_somp(const ChannelRealization& channel, const ArrayGeometry& geometry,
                              const AngleDictionary& dict_r, const AngleDictionary& dict_t,
                              const StagePlan& plan, double noise_std, Rng& rng,
                              const TwoStageOptions& options)
{
    plan.validate(geometry, channel.num_paths);
    TwoStageResult result;
    const AoaEstimate aoa = estimate_aoa(channel, geometry, dict_r, plan.bt1, plan.p1, noise_std,
                                         rng, options.somp);
    const AodEstimate aod = estimate_aod(channel, geometry, dict_t, aoa.responses, plan.bt2,
                                         plan.p2, noise_std, rng, options.somp);
    result.est_aoa_support = aoa.support;
    result.est_aod_support = aod.support;
    result.est_aoa_responses = aoa.responses;
    result.est_aod_responses = aod.responses;
    for (Index i : aoa.support)
        result.est_aoa_freqs.push_back(dict_r.grid_freqs[static_cast<std::size_t>(i)]);
    for (Index i : aod.support)
        result.est_aod_freqs.push_back(dict_t.grid_freqs[static_cast<std::size_t>(i)]);
    result.stage1 = aoa.diagnostics;
    result.stage2 = aod.diagnostics;
    result.multiplies = aoa.diagnostics.multiplies + aod.diagnostics.multiplies;
    finish_two_stage(result, {aoa.rsb, aoa.tsb.beams, aoa.observations},
                     {aod.rsb, aod.tsb.beams, aod.observations}, options);
    return result;
}

std::pair<Index, Index> split_flat_index(Index q, Index grid_rx)
{
    return {q % grid_rx, q / grid_rx};
}

CMatrix kronecker_dictionary(const CMatrix& rsb, const CMatrix& tsb, const AngleDictionary& dict_r,
                             const AngleDictionary& dict_t)
{
    const CMatrix p = rsb.adjoint() * dict_r.response_matrix;                  // B_r x G_r
    const CMatrix q = tsb.transpose() * dict_t.response_matrix.conjugate();    // B_t x G_t
    const Index br = p.rows(), gr = p.cols(), bt = q.rows(), gt = q.cols();
    CMatrix d(br * bt, gr * gt);
    for (Index it = 0; it < gt; ++it)
        for (Index j = 0; j < bt; ++j)
            d.block(j * br, it * gr, br, gr) = q(j, it) * p;
    return d;
}

std::vector<std::pair<double, double>> OneStageResult::path_angles(
    const AngleDictionary& dict_r, const AngleDictionary& dict_t) const
{
    std::vector<std::pair<double, double>> out;
    for (const auto& [ir, it] : support)
        out.emplace_back(dict_r.grid_freqs[static_cast<std::size_t>(ir)],
                         dict_t.grid_freqs[static_cast<std::size_t>(it)]);
    return out;
}

OneStageResult one_stage_omp(const ChannelRealization& channel, const ArrayGeometry& geometry,
                             const AngleDictionary& dict_r, const AngleDictionary& dict_t, int br,
                             int bt, double p, double noise_std, Rng& rng,
                             const OneStageOptions& options)
{
    const auto entries = static_cast<std::uint64_t>(dict_r.grid_size) *
                         static_cast<std::uint64_t>(dict_t.grid_size) * static_cast<std::uint64_t>(br) *
                         static_cast<std::uint64_t>(bt);
    if (entries > options.memory_budget)
        throw ResourceLimit("one_stage_omp: dictionary of " + std::to_string(entries) +
                            " entries exceeds the memory budget");
    const SounderSet sounders = one_stage_sounders(geometry, br, bt, p, options.mode, rng);
    const CMatrix y = observe(channel, sounders, noise_std, rng);
    const CMatrix d = kronecker_dictionary(sounders.rsb, sounders.tsb, dict_r, dict_t);
    const CVector vy = Eigen::Map<const CVector>(y.data(), y.size());
    const SupportEstimate est = somp(vy, d, channel.num_paths, options.somp);

    OneStageResult out;
    out.residual_norms = est.residual_norms;
    out.multiplies = est.diagnostics.multiplies;
    out.gains = est.coefficients.col(0);
    out.h_hat = CMatrix::Zero(geometry.num_rx_antennas, geometry.num_tx_antennas);
    for (std::size_t k = 0; k < est.support.size(); ++k) {
        const auto [ir, it] = split_flat_index(est.support[k], dict_r.grid_size);
        out.support.emplace_back(ir, it);
        out.h_hat += out.gains(static_cast<Index>(k)) * dict_r.response_matrix.col(ir) *
                     dict_t.response_matrix.col(it).adjoint();
    }
    return out;
}

OracleResult oracle_estimate(const ChannelRealization& channel,
                             std::span<const Measurement> measurements)
{
    const CMatrix ar = channel.aoa_responses();
    const CMatrix at = channel.aod_responses();
    OracleResult out;
    out.gains = fit_path_gains(measurements, ar, at).gains;
    out.h_hat = ar * out.gains.asDiagonal() * at.adjoint();
    return out;
}

OracleResult oracle_estimate(const ChannelRealization& channel, const SounderSet& sounders,
                             const CMatrix& observations)
{
    const Measurement m{sounders.rsb, sounders.tsb, observations};
    return oracle_estimate(channel, std::span<const Measurement>(&m, 1));
}

}  // namespace mmwcs
