#include "mmwcs/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mmwcs/errors.hpp"

namespace mmwcs {

namespace {

CMatrix gather_columns(const CMatrix& phi, const std::vector<Index>& support)
{
    CMatrix sub(phi.rows(), static_cast<Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k)
        sub.col(static_cast<Index>(k)) = phi.col(support[k]);
    return sub;
}

CMatrix ridge_solve(const CMatrix& sub, const CMatrix& y)
{
    CMatrix gram = sub.adjoint() * sub;
    const double delta = 1e-12 * std::max(gram.diagonal().real().maxCoeff(), 1e-300);
    gram.diagonal().array() += delta;
    return gram.ldlt().solve(sub.adjoint() * y);
}

}  // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k)
{
    if (k > n)
        return 0;
    k = std::min(k, n - k);
    // saturating product; exact while the result fits
    long double r = 1.0L;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
        if (r > 1.8e19L)
            return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(std::llround(r));
}

LeastSquaresFit least_squares_on_support(const CMatrix& observations,
                                         const CMatrix& measurement_matrix,
                                         const std::vector<Index>& support)
{
    LeastSquaresFit fit;
    const CMatrix sub = gather_columns(measurement_matrix, support);
    Eigen::ColPivHouseholderQR<CMatrix> qr(sub);
    qr.setThreshold(1e-12);
    if (qr.rank() < sub.cols()) {
        fit.coefficients = ridge_solve(sub, observations);
        fit.ridge_used = true;
    } else {
        fit.coefficients = qr.solve(observations);
    }
    fit.residual = observations - sub * fit.coefficients;
    return fit;
}

SupportEstimate somp(const CMatrix& observations, const CMatrix& measurement_matrix, int sparsity,
                     const SompOptions& options)
{
    const CMatrix& y = observations;
    const CMatrix& phi = measurement_matrix;
    const Index m = phi.rows();
    const Index g = phi.cols();
    const Index d = y.cols();
    if (y.rows() != m)
        throw DimensionError("somp: observation rows differ from measurement rows");
    if (sparsity < 1 || sparsity > g)
        throw DimensionError("somp: sparsity must be in [1, G]");

    const RVector col_norms = phi.colwise().norm();
    for (Index j = 0; j < g; ++j)
        if (!(col_norms(j) > 0.0))
            throw DomainError("somp: zero column " + std::to_string(j) + " in measurement matrix");

    SupportEstimate est;
    auto& diag = est.diagnostics;
    diag.underdetermined = sparsity > m || g < m;
    const auto gm = static_cast<std::uint64_t>(g) * static_cast<std::uint64_t>(m);
    const auto ud = static_cast<std::uint64_t>(d);
    const auto um = static_cast<std::uint64_t>(m);

    CMatrix residual = y;
    est.residual_norms.push_back(residual.norm());

    CMatrix corr = phi.adjoint() * residual;  // S = Phi^H R
    diag.multiplies += gm * ud;

    CMatrix q(m, sparsity);       // orthonormal basis of the selected columns
    CMatrix rfac = CMatrix::Zero(sparsity, sparsity);
    CMatrix zq(sparsity, d);      // Q^H Y
    std::vector<char> chosen(static_cast<std::size_t>(g), 0);
    bool ridge = false;
    CMatrix ridge_coeffs;

    for (int l = 0; l < sparsity; ++l) {
        if (options.residual_threshold && est.residual_norms.back() <= *options.residual_threshold)
            break;
        if (l > 0 && (ridge || options.update == CorrelationUpdate::direct)) {
            corr.noalias() = phi.adjoint() * residual;
            diag.multiplies += gm * ud;
        }

        // row of S with the largest 2-norm, smallest index on ties
        Index best = -1;
        double best_val = -1.0;
        for (Index i = 0; i < g; ++i) {
            if (chosen[static_cast<std::size_t>(i)])
                continue;
            const double v = corr.row(i).squaredNorm();
            if (v > best_val) {
                best_val = v;
                best = i;
            }
        }
        diag.multiplies += static_cast<std::uint64_t>(g) * ud;
        chosen[static_cast<std::size_t>(best)] = 1;
        est.support.push_back(best);

        if (!ridge) {
            // two passes of Gram-Schmidt against the current basis
            CVector v = phi.col(best);
            CVector coef = CVector::Zero(l);
            for (int pass = 0; pass < 2 && l > 0; ++pass) {
                const CVector c = q.leftCols(l).adjoint() * v;
                v.noalias() -= q.leftCols(l) * c;
                coef += c;
                diag.multiplies += 2 * um * static_cast<std::uint64_t>(l);
            }
            const double nv = v.norm();
            diag.multiplies += um;
            if (nv > 1e-10 * col_norms(best)) {
                q.col(l) = v / nv;
                rfac.col(l).head(l) = coef;
                rfac(l, l) = nv;
                const Eigen::RowVectorXcd z = q.col(l).adjoint() * residual;
                residual.noalias() -= q.col(l) * z;
                zq.row(l) = z;
                diag.multiplies += 2 * um * ud;
                if (options.update == CorrelationUpdate::incremental && l + 1 < sparsity) {
                    const CVector gq = phi.adjoint() * q.col(l);
                    corr.noalias() -= gq * z;
                    diag.multiplies += gm + static_cast<std::uint64_t>(g) * ud;
                }
            } else {
                ridge = true;
                diag.ridge_used = true;
            }
        }
        if (ridge) {
            const CMatrix sub = gather_columns(phi, est.support);
            ridge_coeffs = ridge_solve(sub, y);
            residual = y - sub * ridge_coeffs;
            const auto k = static_cast<std::uint64_t>(est.support.size());
            diag.multiplies += um * k * k + um * k * ud * 2;
        }
        est.residual_norms.push_back(residual.norm());
    }

    const Index k = static_cast<Index>(est.support.size());
    if (ridge) {
        est.coefficients = ridge_coeffs;
    } else {
        est.coefficients = rfac.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(zq.topRows(k));
        diag.multiplies += static_cast<std::uint64_t>(k * k) * ud;
    }
    return est;
}

double mip_constant(const CMatrix& matrix, bool normalize)
{
    if (matrix.cols() < 2)
        throw DomainError("mip_constant: need at least two columns");
    CMatrix a = matrix;
    if (normalize) {
        for (Index j = 0; j < a.cols(); ++j) {
            const double n = a.col(j).norm();
            if (!(n > 0.0))
                throw DomainError("mip_constant: zero column cannot be normalized");
            a.col(j) /= n;
        }
    }
    const CMatrix gram = a.adjoint() * a;
    double mu = 0.0;
    for (Index j = 0; j < gram.cols(); ++j)
        for (Index i = 0; i < j; ++i)
            mu = std::max(mu, std::abs(gram(i, j)));
    return mu;
}

SupportEstimate brute_force_support(const CMatrix& observations,
                                    const CMatrix& measurement_matrix, int sparsity,
                                    std::uint64_t max_supports)
{
    const Index g = measurement_matrix.cols();
    if (observations.rows() != measurement_matrix.rows())
        throw DimensionError("brute_force_support: row mismatch");
    if (sparsity < 1 || sparsity > g)
        throw DimensionError("brute_force_support: sparsity must be in [1, G]");
    const std::uint64_t count = binomial(static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(sparsity));
    if (count > max_supports)
        throw ResourceLimit("brute_force_support: " + std::to_string(count) + " supports exceed the guard");

    const double tie_tol = 1e-12 * observations.norm();
    std::vector<Index> comb(static_cast<std::size_t>(sparsity));
    for (int k = 0; k < sparsity; ++k)
        comb[k] = k;
    std::vector<Index> best;
    double best_res = std::numeric_limits<double>::infinity();

    while (true) {
        const CMatrix sub = gather_columns(measurement_matrix, comb);
        Eigen::HouseholderQR<CMatrix> qr(sub);
        const Index r = std::min(sub.rows(), sub.cols());
        const CMatrix qthin = qr.householderQ() * CMatrix::Identity(sub.rows(), r);
        const double res = (observations - qthin * (qthin.adjoint() * observations)).norm();
        if (res < best_res - tie_tol) {
            best_res = res;
            best = comb;
        }
        // next combination in lexicographic order
        int k = sparsity - 1;
        while (k >= 0 && comb[k] == g - sparsity + k)
            --k;
        if (k < 0)
            break;
        ++comb[k];
        for (int j = k + 1; j < sparsity; ++j)
            comb[j] = comb[j - 1] + 1;
    }

    SupportEstimate est;
    est.support = best;
    est.residual_norms.push_back(observations.norm());
    for (int k = 1; k <= sparsity; ++k) {
        const std::vector<Index> prefix(best.begin(), best.begin() + k);
        const LeastSquaresFit fit = least_squares_on_support(observations, measurement_matrix, prefix);
        est.residual_norms.push_back(fit.residual.norm());
        if (k == sparsity) {
            est.coefficients = fit.coefficients;
            est.diagnostics.ridge_used = fit.ridge_used;
        }
    }
    return est;
}

}  // namespace mmwcs
