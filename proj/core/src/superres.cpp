#include "mmwcs/superres.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mmwcs/errors.hpp"

namespace mmwcs {

namespace {

using RMatrix = Eigen::MatrixXd;

// Lawson-Hanson active set method for min ||A x - b||, x >= 0
RVector nnls(const RMatrix& a, const RVector& b)
{
    const Index n = a.cols();
    RVector x = RVector::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    const double tol = 1e-12 * std::max(1.0, a.norm() * b.norm());
    for (int outer = 0; outer < 3 * n + 10; ++outer) {
        const RVector w = a.transpose() * (b - a * x);
        Index best = -1;
        for (Index j = 0; j < n; ++j)
            if (!passive[j] && w(j) > tol && (best < 0 || w(j) > w(best)))
                best = j;
        if (best < 0)
            break;
        passive[best] = true;
        for (int inner = 0; inner < 3 * n + 10; ++inner) {
            std::vector<Index> idx;
            for (Index j = 0; j < n; ++j)
                if (passive[j])
                    idx.push_back(j);
            RMatrix ap(a.rows(), static_cast<Index>(idx.size()));
            for (std::size_t k = 0; k < idx.size(); ++k)
                ap.col(static_cast<Index>(k)) = a.col(idx[k]);
            const RVector z = ap.colPivHouseholderQr().solve(b);
            if (z.minCoeff() > 0.0) {
                x.setZero();
                for (std::size_t k = 0; k < idx.size(); ++k)
                    x(idx[k]) = z(static_cast<Index>(k));
                break;
            }
            double alpha = 1.0;
            for (std::size_t k = 0; k < idx.size(); ++k) {
                const double zk = z(static_cast<Index>(k));
                if (zk <= 0.0)
                    alpha = std::min(alpha, x(idx[k]) / (x(idx[k]) - zk));
            }
            for (std::size_t k = 0; k < idx.size(); ++k)
                x(idx[k]) += alpha * (z(static_cast<Index>(k)) - x(idx[k]));
            for (std::size_t k = 0; k < idx.size(); ++k)
                if (x(idx[k]) <= 1e-15) {
                    x(idx[k]) = 0.0;
                    passive[idx[k]] = false;
                }
        }
    }
    return x;
}

constexpr double kNoiselessScale = 100.0;

double wrap01(double f)
{
    f -= std::floor(f);
    return f >= 1.0 ? 0.0 : f;
}

}  // namespace

CMatrix toeplitz_from_generator(const CVector& u)
{
    const Index m = u.size();
    CMatrix t(m, m);
    for (Index l = 0; l < m; ++l)
        for (Index k = 0; k < m; ++k)
            t(k, l) = k >= l ? u(k - l) : std::conj(u(l - k));
    return t;
}

int first_objective_increase(const std::vector<double>& objective, int skip, double slack)
{
    for (std::size_t t = static_cast<std::size_t>(std::max(skip, 0)) + 1; t < objective.size(); ++t) {
        const double prev = objective[t - 1];
        if (objective[t] - prev > slack * std::max(1.0, std::abs(prev)))
            return static_cast<int>(t);
    }
    return -1;
}

AdmmResult atomic_admm(const CMatrix& y_in, const AdmmOptions& options)
{
    const Index m = y_in.rows();
    const Index d = y_in.cols();
    if (m < 2 || d < 1)
        throw DimensionError("atomic_admm: need at least two rows and one column");
    if (!(options.rho > 0.0) || !(options.lambda > 0.0) || options.max_iter < 1)
        throw DomainError("atomic_admm: rho, lambda and max_iter must be positive");

    // scaled problem: Y' = Y / c with penalty lambda c has the minimizer scaled by 1/c.
    // c = 1/lambda gives a unit penalty. An infinite lambda (noiseless data) is
    // replaced by kNoiselessScale / ||Y||, which shrinks amplitudes slightly but
    // leaves well-separated frequencies in place
    const bool noiseless = std::isinf(options.lambda);
    const double c = !options.normalize ? 1.0
                     : noiseless        ? y_in.norm() / kNoiselessScale
                                        : 1.0 / options.lambda;
    AdmmResult out;
    if (y_in.norm() == 0.0) {
        out.u = CVector::Zero(m);
        out.r = CMatrix::Zero(m, d);
        out.z = CMatrix::Zero(d, d);
        out.x = CMatrix::Zero(m + d, m + d);
        out.multiplier = out.x;
        out.converged = true;
        return out;
    }
    const CMatrix y = y_in / c;
    const double lambda = noiseless ? (options.normalize ? 1.0 : kNoiselessScale / y_in.norm())
                                    : options.lambda * c;
    const double rho = options.rho;
    const Index n = m + d;

    CMatrix x = CMatrix::Zero(n, n);
    CMatrix lam = CMatrix::Zero(n, n);
    CVector u(m);
    CMatrix r(m, d), z(d, d), b(n, n);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig;
    out.worst_min_eigenvalue = std::numeric_limits<double>::infinity();

    for (int it = 0; it < options.max_iter; ++it) {
        for (Index i = 0; i < m; ++i) {
            cplx v = 0.0, s = 0.0;
            for (Index k = 0; k + i < m; ++k) {
                v += lam(k + i, k);
                s += x(k + i, k);
            }
            if (i == 0) {
                const double num = (v + rho * s).real();
                u(0) = options.diagonal == DiagonalUpdate::derived
                           ? (num - static_cast<double>(m)) / (static_cast<double>(m) * rho)
                           : num / (static_cast<double>(m) * rho + static_cast<double>(m));
            } else {
                u(i) = (v + rho * s) / (static_cast<double>(m - i) * rho);
            }
        }
        r = (lambda * y + rho * x.topRightCorner(m, d) + lam.topRightCorner(m, d)) / (lambda + rho);
        z = (lam.bottomRightCorner(d, d) + rho * x.bottomRightCorner(d, d) -
             CMatrix::Identity(d, d)) / rho;

        b.topLeftCorner(m, m) = toeplitz_from_generator(u);
        b.topRightCorner(m, d) = r;
        b.bottomLeftCorner(d, m) = r.adjoint();
        b.bottomRightCorner(d, d) = z;

        CMatrix g = b - lam / rho;
        g = (0.5 * (g + g.adjoint())).eval();
        eig.compute(g);
        const RVector w = eig.eigenvalues().cwiseMax(0.0);
        x = eig.eigenvectors() * w.asDiagonal() * eig.eigenvectors().adjoint();
        if (options.check_invariants) {
            out.worst_hermitian_error = std::max(out.worst_hermitian_error, (x - x.adjoint()).norm());
            Eigen::SelfAdjointEigenSolver<CMatrix> check(0.5 * (x + x.adjoint()), Eigen::EigenvaluesOnly);
            out.worst_min_eigenvalue = std::min(out.worst_min_eigenvalue, check.eigenvalues().minCoeff());
        }
        lam += rho * (x - b);

        if (options.log_objective) {
            const double obj = static_cast<double>(m) * u(0).real() + z.trace().real() +
                               lambda * (y - r).squaredNorm();
            out.objective.push_back(c * obj);
        }
        out.iterations = it + 1;
        const double xn = x.norm();
        out.primal_residual = xn > 0.0 ? (x - b).norm() / xn : (x - b).norm();
        if (xn > 0.0 && out.primal_residual < options.tol) {
            out.converged = true;
            break;
        }
    }
    out.u = c * u;
    out.r = c * r;
    out.z = c * z;
    out.x = c * x;
    out.multiplier = lam;
    if (!options.check_invariants)
        out.worst_min_eigenvalue = 0.0;
    return out;
}

FrequencyEstimate extract_frequencies(const CVector& u, int num_paths, int num_antennas)
{
    const Index m = u.size();
    if (m != num_antennas)
        throw DimensionError("extract_frequencies: generator length differs from the array size");
    if (num_paths < 1 || num_paths >= m)
        throw DimensionError("extract_frequencies: need 1 <= L < m");
    const CMatrix t = toeplitz_from_generator(u);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(t);
    const RVector& ev = eig.eigenvalues();  // ascending
    const Index l = num_paths;
    const CMatrix us = eig.eigenvectors().rightCols(l);

    FrequencyEstimate out;
    const double lam_l = ev(m - l);
    const double lam_next = ev(m - l - 1);
    out.toeplitz_rank_gap =
        lam_next > 0.0 ? lam_l / lam_next : std::numeric_limits<double>::infinity();
    out.low_confidence = out.toeplitz_rank_gap < 1.5;

    // shift invariance of the signal subspace
    const CMatrix psi = us.topRows(m - 1).colPivHouseholderQr().solve(us.bottomRows(m - 1));
    Eigen::ComplexEigenSolver<CMatrix> ces(psi, false);
    std::vector<double> freqs;
    for (Index k = 0; k < l; ++k)
        freqs.push_back(wrap01(std::arg(ces.eigenvalues()(k)) / (2.0 * kPi)));
    std::sort(freqs.begin(), freqs.end());

    const CMatrix a = array_responses(static_cast<int>(m), freqs);
    RMatrix design(2 * m * m, l);
    RVector target(2 * m * m);
    for (Index k = 0; k < l; ++k) {
        const CMatrix atom = a.col(k) * a.col(k).adjoint();
        for (Index e = 0; e < m * m; ++e) {
            design(e, k) = atom.data()[e].real();
            design(m * m + e, k) = atom.data()[e].imag();
        }
    }
    for (Index e = 0; e < m * m; ++e) {
        target(e) = t.data()[e].real();
        target(m * m + e) = t.data()[e].imag();
    }
    const RVector p = nnls(design, target);
    out.freqs = freqs;
    out.powers.assign(p.data(), p.data() + l);
    return out;
}

CMatrix project_observations_stage1(const CMatrix& y1, const CMatrix& w1)
{
    if (w1.rows() != w1.cols() || w1.cols() != y1.rows())
        throw DimensionError("project_observations_stage1: W_1 must be square and match Y_1");
    if (!(w1.adjoint() * w1).isIdentity(1e-9))
        throw DomainError("project_observations_stage1: W_1 is not unitary");
    return w1 * y1;
}

double default_lambda(double sigma, int m, int d, double scale)
{
    if (!(sigma >= 0.0) || m < 1 || d < 1 || !(scale > 0.0))
        throw DomainError("default_lambda: bad arguments");
    if (sigma == 0.0)
        return std::numeric_limits<double>::infinity();
    // expected dual atomic norm of the noise for unit-norm atoms
    const double lm = std::log(static_cast<double>(m));
    const double tau = sigma * std::sqrt(d + lm + std::sqrt(2.0 * d * lm));
    return 1.0 / (scale * tau);
}

namespace {

GridlessEstimate gridless_from(const CMatrix& y, int num_paths, int num_antennas_out,
                               const AdmmOptions& options)
{
    const AdmmResult admm = atomic_admm(y, options);
    GridlessEstimate out;
    out.estimate = extract_frequencies(admm.u, num_paths, static_cast<int>(y.rows()));
    out.responses = array_responses(num_antennas_out, out.estimate.freqs);
    out.admm_iterations = admm.iterations;
    out.admm_converged = admm.converged;
    out.objective = admm.objective;
    return out;
}

}  // namespace

GridlessEstimate superres_aoa(const CMatrix& y1, const CMatrix& w1, int num_paths,
                              const AdmmOptions& options)
{
    const CMatrix yt = project_observations_stage1(y1, w1);
    return gridless_from(yt, num_paths, static_cast<int>(yt.rows()), options);
}

GridlessEstimate superres_aod(const CMatrix& y2, const CMatrix& f2, const CMatrix& w2,
                              int num_paths, int num_tx, const AdmmOptions& options)
{
    const Index bt2 = f2.cols();
    if (f2.rows() != num_tx || y2.cols() != bt2 || y2.rows() != w2.cols())
        throw DimensionError("superres_aod: sounder/observation mismatch");
    if (bt2 <= num_paths)
        throw InfeasibleError("superres_aod: need B_t2 > L");
    // F_2 must be a scaled selection of the first B_t2 antennas, so that
    // F_2^H a_t(f) is a shorter array response
    const cplx scale = f2(0, 0);
    CMatrix expect = CMatrix::Zero(num_tx, bt2);
    expect.topRows(bt2) = scale * CMatrix::Identity(bt2, bt2);
    if (std::abs(scale) == 0.0 || !(f2 - expect).isZero(1e-12 * std::abs(scale)))
        throw DomainError("superres_aod: F_2 is not a truncated identity");
    return gridless_from(y2.adjoint(), num_paths, num_tx, options);
}

SuperresResult two_stage_superres(const ChannelRealization& channel, const ArrayGeometry& geometry,
                                  const StagePlan& plan, double noise_std, Rng& rng,
                                  const SuperresOptions& options)
{
    plan.validate(geometry, channel.num_paths);
    const int l = channel.num_paths;
    SuperresResult out;

    const CMatrix w1 = stage1_rsb(geometry);
    const TransmitBeams f1 = stage1_tsb(geometry, plan.bt1, plan.p1);
    const CMatrix y1 = observe(channel, w1, f1.beams, noise_std, rng);
    AdmmOptions o1 = options.admm;
    if (options.derive_lambda)
        o1.lambda = default_lambda(noise_std, geometry.num_rx_antennas, plan.bt1, options.lambda_scale);
    out.stage1 = superres_aoa(y1, w1, l, o1);

    const CMatrix w2 = stage2_rsb(out.stage1.responses);
    const TransmitBeams f2 = stage2_tsb(geometry, plan.bt2, plan.p2);
    const CMatrix y2 = observe(channel, w2, f2.beams, noise_std, rng);
    AdmmOptions o2 = options.admm;
    if (options.derive_lambda)
        o2.lambda = default_lambda(noise_std, plan.bt2, static_cast<int>(w2.cols()), options.lambda_scale);
    out.stage2 = superres_aod(y2, f2.beams, w2, l, geometry.num_tx_antennas, o2);

    TwoStageResult& res = out.result;
    res.est_aoa_responses = out.stage1.responses;
    res.est_aod_responses = out.stage2.responses;
    res.est_aoa_freqs = out.stage1.estimate.freqs;
    res.est_aod_freqs = out.stage2.estimate.freqs;
    finish_two_stage(res, {w1, f1.beams, y1}, {w2, f2.beams, y2}, options.two_stage);
    return out;
}

}  // namespace mmwcs
