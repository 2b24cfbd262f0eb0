#include "mmwcs/bounds.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mmwcs/channel.hpp"
#include "mmwcs/errors.hpp"
#include "mmwcs/recovery.hpp"
#include "mmwcs/tracy_widom.hpp"

namespace mmwcs {

namespace {

void check_coherence(double mu, int num_paths)
{
    if (num_paths < 1)
        throw DomainError("bound: L must be positive");
    if (!(mu >= 0.0) || mu * (2.0 * num_paths - 1.0) >= 1.0)
        throw BoundInvalid("bound: mu = " + std::to_string(mu) + " violates mu < 1/(2L-1)");
}

void check_positive(double v, const char* what)
{
    if (!(v > 0.0))
        throw DomainError(std::string("bound: ") + what + " must be positive");
}

// F2(num / den) with the sigma -> 0 limits made explicit
double tw_ratio(double num, double den)
{
    if (den == 0.0) {
        if (num > 0.0)
            return 1.0;
        return num < 0.0 ? 0.0 : tw_cdf(0.0);
    }
    return tw_cdf(num / den);
}

double coherence_factor(double mu, int num_paths) { return 1.0 - (2.0 * num_paths - 1.0) * mu; }

}  // namespace

double mp_center(double m, double d)
{
    check_positive(m, "M");
    check_positive(d, "d");
    const double r = std::sqrt(m) + std::sqrt(d);
    return r * r;
}

double mp_scale(double m, double d)
{
    check_positive(m, "M");
    check_positive(d, "d");
    return (std::sqrt(m) + std::sqrt(d)) * std::cbrt(1.0 / std::sqrt(m) + 1.0 / std::sqrt(d));
}

double srp_bound_somp(double c_min, double mu, int num_paths, double sigma, double m, double d)
{
    return srp_bound_somp_quantized(c_min, mu, num_paths, sigma, m, d, 0.0);
}

double srp_bound_somp_quantized(double c_min, double mu, int num_paths, double sigma, double m,
                                double d, double quant_err_norm)
{
    check_coherence(mu, num_paths);
    if (!(c_min >= 0.0) || !(sigma >= 0.0) || !(quant_err_norm >= 0.0))
        throw DomainError("bound: negative argument");
    const double margin = std::max(0.0, coherence_factor(mu, num_paths) * c_min - 2.0 * quant_err_norm);
    const double s2 = 4.0 * sigma * sigma;
    return tw_ratio(margin * margin - s2 * mp_center(m, d), s2 * mp_scale(m, d));
}

std::vector<double> mmv_count_effect(double m, const std::vector<double>& d_range, double c_min,
                                     double mu, int num_paths, double sigma)
{
    std::vector<double> out;
    out.reserve(d_range.size());
    for (double d : d_range) {
        out.push_back(srp_bound_somp(c_min, mu, num_paths, sigma, m, d));
        if (out.size() > 1 && out.back() > out[out.size() - 2])
            throw Error("mmv_count_effect: bound increased with the number of measurement vectors");
    }
    return out;
}

double srp_bound_aoa(const SrpQuery& q, CoherenceFactor factor)
{
    check_coherence(q.mu, q.num_paths);
    check_positive(q.nt, "N_t");
    if (!(q.p1 >= 0.0) || !(q.sigma >= 0.0) || q.bt1 < 1)
        throw DomainError("srp_bound_aoa: bad stage-1 parameters");
    double c = coherence_factor(q.mu, q.num_paths);
    if (factor == CoherenceFactor::squared)
        c *= c;
    const double s2 = 4.0 * q.sigma * q.sigma;
    const double signal = c * q.h_min * q.h_min * q.p1 * q.bt1 / q.nt;
    return tw_ratio(signal - s2 * mp_center(q.nr, q.bt1), s2 * mp_scale(q.nr, q.bt1));
}

double srp_bound_aod(const SrpQuery& q, AodBoundForm form)
{
    check_coherence(q.mu, q.num_paths);
    check_positive(q.nt, "N_t");
    if (!(q.p2 >= 0.0) || !(q.sigma >= 0.0) || q.bt2 < 1)
        throw DomainError("srp_bound_aod: bad stage-2 parameters");
    if (q.p2 == 0.0)
        return 0.0;
    const double c = coherence_factor(q.mu, q.num_paths);
    const double scale = q.nt / (q.p2 * q.bt2);  // column normalization of Phi_2, squared
    const double extra = form == AodBoundForm::displayed ? q.nt : 1.0;
    const double s2 = 4.0 * q.sigma * q.sigma * scale * extra;
    return tw_ratio(c * c * q.h_min * q.h_min - s2 * mp_center(q.bt2, q.num_paths),
                    s2 * mp_scale(q.bt2, q.num_paths));
}

double stage1_coherence(int nr, double oversampling)
{
    const AngleDictionary dict = build_dictionary(nr, oversampling);
    // W_1 is unitary, so the normalized Gram equals that of the dictionary
    return mip_constant(dict.response_matrix, true);
}

double truncated_aod_coherence(int nt, int bt2, double oversampling)
{
    if (bt2 < 1 || bt2 > nt)
        throw DomainError("truncated_aod_coherence: need 1 <= B_t2 <= N_t");
    const AngleDictionary dict = build_dictionary(nt, oversampling);
    return mip_constant(dict.response_matrix.topRows(bt2), true);
}

AllocationResult allocate(const AllocationRequest& r)
{
    if (!(r.eta1 > 0.0 && r.eta1 < 1.0 && r.eta2 > 0.0 && r.eta2 < 1.0))
        throw DomainError("allocate: eta must lie in (0,1)");
    if (r.rf_chains < 1 || r.nr < 1 || r.nt < 1 || r.num_paths < 1 || r.bt1 < 1)
        throw DomainError("allocate: dimensions must be positive");
    if (!(r.h_min > 0.0) || !(r.sigma > 0.0))
        throw DomainError("allocate: h_min and sigma must be positive");
    if ((r.bt1 * r.nr) % r.rf_chains != 0)
        throw InfeasibleError("allocate: B_t1 N_r is not a multiple of N");
    const int stage1_uses = r.bt1 * r.nr / r.rf_chains;
    if (r.channel_uses <= stage1_uses)
        throw InfeasibleError("allocate: K leaves no channel uses for stage 2");

    AllocationResult out;
    out.bt1 = r.bt1;
    out.bt2 = r.channel_uses - stage1_uses;
    if (out.bt2 > r.nt)
        throw InfeasibleError("allocate: B_t2 exceeds N_t");
    out.mu1 = r.mu1 ? *r.mu1 : stage1_coherence(r.nr, r.oversampling);
    out.mu2 = r.mu2 ? *r.mu2 : truncated_aod_coherence(r.nt, out.bt2, r.oversampling);
    const double limit = 1.0 / (2.0 * r.num_paths - 1.0);
    if (!(out.mu1 >= 0.0 && out.mu1 < limit) || !(out.mu2 >= 0.0 && out.mu2 < limit))
        throw InfeasibleError("allocate: coherence violates mu < 1/(2L-1) (mu1 = " +
                              std::to_string(out.mu1) + ", mu2 = " + std::to_string(out.mu2) + ")");

    const double s2 = 4.0 * r.sigma * r.sigma;
    const double h2 = r.h_min * r.h_min;
    const double c1 = coherence_factor(out.mu1, r.num_paths);
    const double c2 = coherence_factor(out.mu2, r.num_paths);
    const double x1 = tw_inverse(r.eta1);
    const double x2 = tw_inverse(r.eta2);
    const double t1 = x1 * mp_scale(r.nr, r.bt1) + mp_center(r.nr, r.bt1);
    const double t2 = x2 * mp_scale(out.bt2, r.num_paths) + mp_center(out.bt2, r.num_paths);
    out.e1 = s2 * r.nt * r.nr * t1 / (h2 * c1 * c1 * r.rf_chains);
    out.e2 = s2 * r.nt * t2 / (h2 * c2 * c2);
    if (!(out.e1 > 0.0) || !(out.e2 > 0.0))
        throw InfeasibleError("allocate: targets need non-positive energy");
    out.p1 = out.e1 * r.rf_chains / (static_cast<double>(r.bt1) * r.nr);
    out.p2 = out.e2 / out.bt2;

    SrpQuery q;
    q.num_paths = r.num_paths;
    q.h_min = r.h_min;
    q.sigma = r.sigma;
    q.nr = r.nr;
    q.nt = r.nt;
    q.p1 = out.p1;
    q.bt1 = out.bt1;
    q.p2 = out.p2;
    q.bt2 = out.bt2;
    q.mu = out.mu1;
    out.achieved_aoa = srp_bound_aoa(q);
    q.mu = out.mu2;
    out.achieved_aod = srp_bound_aod(q);
    return out;
}

}  // namespace mmwcs
