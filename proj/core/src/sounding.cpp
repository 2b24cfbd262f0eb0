#include "mmwcs/sounding.hpp"

#include <cmath>
#include <string>

#include "mmwcs/errors.hpp"

namespace mmwcs {

namespace {

// e_j = F_A f_D with F_A = (1/sqrt(Nt)) [1, 1~(j), 1, ..., 1], f_D = (sqrt(Nt)/2) [1, -1, 0, ...]
HybridFactor basis_factor(int nt, int n, int j, double amplitude)
{
    HybridFactor f;
    const double inv = 1.0 / std::sqrt(static_cast<double>(nt));
    f.analog = CMatrix::Constant(nt, n, cplx(inv, 0.0));
    f.analog(j, 1) = cplx(-inv, 0.0);
    f.digital = CVector::Zero(n);
    const double d = amplitude * std::sqrt(static_cast<double>(nt)) / 2.0;
    f.digital(0) = d;
    f.digital(1) = -d;
    return f;
}

// column already constant modulus: analog repeats it, digital selects it
HybridFactor constant_modulus_factor(const CVector& column, int n, double amplitude)
{
    HybridFactor f;
    f.analog = column.replicate(1, n) / amplitude;
    f.digital = CVector::Zero(n);
    f.digital(0) = amplitude;
    return f;
}

TransmitBeams basis_beams(const ArrayGeometry& geometry, int count, double power, const char* who)
{
    geometry.validate();
    const int nt = geometry.num_tx_antennas;
    if (count < 1 || count > nt)
        throw DimensionError(std::string(who) + ": need 1 <= B_t <= N_t, got " + std::to_string(count));
    if (!(power > 0.0))
        throw DomainError(std::string(who) + ": power must be positive");
    TransmitBeams tb;
    tb.power_per_beam = power;
    const double amp = std::sqrt(power);
    tb.beams = CMatrix::Zero(nt, count);
    for (int j = 0; j < count; ++j) {
        tb.beams(j, j) = amp;
        tb.factors.push_back(basis_factor(nt, geometry.num_rf_chains, j, amp));
    }
    return tb;
}

CVector random_phase_vector(int n, Rng& rng)
{
    CVector v(n);
    const double inv = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k) {
        const double theta = 2.0 * kPi * rng.uniform();
        v(k) = inv * cplx(std::cos(theta), std::sin(theta));
    }
    return v;
}

}  // namespace

int channel_uses(const ArrayGeometry& geometry, int bt1, int bt2)
{
    const long long num = static_cast<long long>(bt1) * geometry.num_rx_antennas;
    if (num % geometry.num_rf_chains != 0)
        throw ConfigError("B_t1 * N_r must be divisible by N");
    return static_cast<int>(num / geometry.num_rf_chains) + bt2;
}

StagePlan StagePlan::from_budget(const ArrayGeometry& geometry, int num_paths, int channel_uses_k,
                                 int bt1, double p1, double p2)
{
    StagePlan plan;
    plan.bt1 = bt1;
    plan.bt2 = channel_uses_k - mmwcs::channel_uses(geometry, bt1, 0);
    plan.br1 = geometry.num_rx_antennas;
    plan.br2 = num_paths;
    plan.p1 = p1;
    plan.p2 = p2;
    plan.channel_uses = channel_uses_k;
    plan.rf_chains = geometry.num_rf_chains;
    plan.validate(geometry, num_paths);
    return plan;
}

void StagePlan::validate(const ArrayGeometry& geometry, int num_paths) const
{
    geometry.validate();
    if (bt1 < 1 || bt1 > geometry.num_tx_antennas)
        throw ConfigError("B_t1 out of range");
    if (bt2 < 1 || bt2 > geometry.num_tx_antennas)
        throw ConfigError("B_t2 = " + std::to_string(bt2) + " out of range [1, N_t]");
    if (br1 != geometry.num_rx_antennas)
        throw ConfigError("stage-1 RSB count must equal N_r");
    if (br2 != num_paths)
        throw ConfigError("stage-2 RSB count must equal L");
    if (rf_chains != geometry.num_rf_chains)
        throw ConfigError("plan RF chain count differs from the geometry");
    if (channel_uses != mmwcs::channel_uses(geometry, bt1, bt2))
        throw ConfigError("channel uses inconsistent with B_t1, B_t2");
    if (!(p1 >= 0.0) || !(p2 >= 0.0))
        throw ConfigError("stage powers must be nonnegative");
}

double StagePlan::stage1_energy() const
{
    return p1 * bt1 * static_cast<double>(br1) / rf_chains;
}

CMatrix dft_matrix(int n)
{
    CMatrix s(n, n);
    const double inv = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
            // reduce the exponent first so large n keeps full phase accuracy
            const long long e = (static_cast<long long>(m) * k) % n;
            const double phase = -2.0 * kPi * static_cast<double>(e) / n;
            s(m, k) = inv * cplx(std::cos(phase), std::sin(phase));
        }
    }
    return s;
}

TransmitBeams stage1_tsb(const ArrayGeometry& geometry, int bt1, double p1)
{
    return basis_beams(geometry, bt1, p1, "stage1_tsb");
}

CMatrix stage1_rsb(const ArrayGeometry& geometry)
{
    return dft_matrix(geometry.num_rx_antennas);
}

CMatrix stage2_rsb(const CMatrix& est_aoa_responses)
{
    const Index n = est_aoa_responses.rows();
    const Index l = est_aoa_responses.cols();
    if (l < 1 || l > n)
        throw DimensionError("stage2_rsb: need 1 <= L <= N_r columns");
    Eigen::HouseholderQR<CMatrix> qr(est_aoa_responses);
    const CMatrix r = qr.matrixQR().topRows(l).triangularView<Eigen::Upper>();
    CMatrix q = qr.householderQ() * CMatrix::Identity(n, l);
    const double scale = est_aoa_responses.colwise().norm().maxCoeff();
    for (Index k = 0; k < l; ++k) {
        const double mag = std::abs(r(k, k));
        if (!(mag > 1e-10 * scale))
            throw DegenerateEstimate("stage2_rsb: estimated AoA responses are rank deficient");
        // nonnegative real diagonal of R
        q.col(k) *= r(k, k) / mag;
    }
    return q;
}

TransmitBeams stage2_tsb(const ArrayGeometry& geometry, int bt2, double p2)
{
    return basis_beams(geometry, bt2, p2, "stage2_tsb");
}

SounderSet one_stage_sounders(const ArrayGeometry& geometry, int br, int bt, double p,
                              SoundingMode mode, Rng& rng)
{
    geometry.validate();
    const int nr = geometry.num_rx_antennas;
    const int nt = geometry.num_tx_antennas;
    const int n = geometry.num_rf_chains;
    if (br < n || br % n != 0 || br > nr)
        throw ConfigError("one_stage_sounders: B_r must be a multiple of N not exceeding N_r");
    if (bt < 1 || (mode == SoundingMode::partial_dft && bt > nt))
        throw ConfigError("one_stage_sounders: invalid B_t");
    if (!(p > 0.0))
        throw DomainError("one_stage_sounders: power must be positive");

    SounderSet set;
    set.power_per_beam = p;
    const double amp = std::sqrt(p);
    if (mode == SoundingMode::partial_dft) {
        set.rsb = dft_matrix(nr).leftCols(br);
        set.tsb = amp * dft_matrix(nt).leftCols(bt);
    } else {
        set.rsb.resize(nr, br);
        for (int i = 0; i < br; ++i)
            set.rsb.col(i) = random_phase_vector(nr, rng);
        set.tsb.resize(nt, bt);
        for (int j = 0; j < bt; ++j)
            set.tsb.col(j) = amp * random_phase_vector(nt, rng);
        // exact power after drawing
        for (int j = 0; j < bt; ++j)
            set.tsb.col(j) *= amp / set.tsb.col(j).norm();
    }
    for (int j = 0; j < bt; ++j)
        set.analog_factors.push_back(constant_modulus_factor(set.tsb.col(j), n, amp));
    return set;
}

bool certify_factors(const CMatrix& beams, const std::vector<HybridFactor>& factors, double tol)
{
    if (static_cast<Index>(factors.size()) != beams.cols())
        return false;
    const double target = 1.0 / std::sqrt(static_cast<double>(beams.rows()));
    for (Index j = 0; j < beams.cols(); ++j) {
        const auto& f = factors[j];
        if (f.analog.rows() != beams.rows() || f.analog.cols() != f.digital.size())
            return false;
        if ((f.analog * f.digital - beams.col(j)).cwiseAbs().maxCoeff() > tol)
            return false;
        if ((f.analog.cwiseAbs().array() - target).abs().maxCoeff() > tol)
            return false;
    }
    return true;
}

CMatrix observe(const ChannelRealization& channel, const CMatrix& rsb, const CMatrix& tsb,
                double noise_std, Rng& rng)
{
    const CMatrix& h = channel.matrix;
    if (rsb.rows() != h.rows() || tsb.rows() != h.cols())
        throw DimensionError("observe: sounder dimensions do not match the channel");
    if (noise_std < 0.0)
        throw DomainError("observe: negative noise level");
    CMatrix received = h * tsb;
    if (noise_std > 0.0) {
        const double var = noise_std * noise_std;
        for (Index j = 0; j < received.cols(); ++j)
            for (Index i = 0; i < received.rows(); ++i)
                received(i, j) += rng.complex_normal(var);
    }
    return rsb.adjoint() * received;
}

CMatrix observe(const ChannelRealization& channel, const SounderSet& sounders, double noise_std,
                Rng& rng)
{
    return observe(channel, sounders.rsb, sounders.tsb, noise_std, rng);
}

}  // namespace mmwcs
