#include "mmwcs/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "mmwcs/errors.hpp"

namespace mmwcs {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string_view> split_list(std::string_view v)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        auto c = v.find(',', pos);
        if (c == std::string_view::npos)
            c = v.size();
        const auto item = trim(v.substr(pos, c - pos));
        if (!item.empty())
            out.push_back(item);
        pos = c + 1;
    }
    return out;
}

double to_double(std::string_view key, std::string_view v)
{
    if (v == "inf" || v == "+inf")
        return std::numeric_limits<double>::infinity();
    if (v == "auto" || v == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(std::string(key) + ": not a number: '" + std::string(v) + "'");
    return out;
}

template <class T>
T to_integer(std::string_view key, std::string_view v)
{
    T out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(std::string(key) + ": not an integer: '" + std::string(v) + "'");
    return out;
}

bool to_bool(std::string_view key, std::string_view v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw ConfigError(std::string(key) + ": expected a boolean");
}

std::string num(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "auto";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string allocation_name(AllocationMode m)
{
    switch (m) {
    case AllocationMode::paper: return "paper";
    case AllocationMode::equal_power: return "equal_power";
    case AllocationMode::explicit_power: return "explicit";
    }
    return "paper";
}

using Setter = std::function<void(ExperimentConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = {
        {"nr", [](auto& c, auto k, auto v) { c.geometry.num_rx_antennas = to_integer<int>(k, v); }},
        {"nt", [](auto& c, auto k, auto v) { c.geometry.num_tx_antennas = to_integer<int>(k, v); }},
        {"rf_chains", [](auto& c, auto k, auto v) { c.geometry.num_rf_chains = to_integer<int>(k, v); }},
        {"num_paths", [](auto& c, auto k, auto v) { c.num_paths = to_integer<int>(k, v); }},
        {"oversampling", [](auto& c, auto k, auto v) { c.oversampling = to_double(k, v); }},
        {"channel_uses", [](auto& c, auto k, auto v) { c.channel_uses = to_integer<int>(k, v); }},
        {"bt1", [](auto& c, auto k, auto v) { c.bt1 = to_integer<int>(k, v); }},
        {"snr_db",
         [](auto& c, auto k, auto v) {
             c.snr_db.clear();
             for (auto item : split_list(v))
                 c.snr_db.push_back(to_double(k, item));
         }},
        {"num_trials", [](auto& c, auto k, auto v) { c.num_trials = to_integer<int>(k, v); }},
        {"angles",
         [](auto& c, auto k, auto v) {
             if (v == "grid")
                 c.continuous_angles = false;
             else if (v == "continuous")
                 c.continuous_angles = true;
             else
                 throw ConfigError(std::string(k) + ": expected grid or continuous");
         }},
        {"estimators",
         [](auto& c, auto, auto v) {
             c.estimators.clear();
             for (auto item : split_list(v))
                 c.estimators.push_back(parse_estimator(item));
         }},
        {"allocation",
         [](auto& c, auto k, auto v) {
             if (v == "paper")
                 c.allocation = AllocationMode::paper;
             else if (v == "equal_power")
                 c.allocation = AllocationMode::equal_power;
             else if (v == "explicit")
                 c.allocation = AllocationMode::explicit_power;
             else
                 throw ConfigError(std::string(k) + ": expected paper, equal_power or explicit");
         }},
        {"eta1", [](auto& c, auto k, auto v) { c.eta1 = to_double(k, v); }},
        {"eta2", [](auto& c, auto k, auto v) { c.eta2 = to_double(k, v); }},
        {"p1", [](auto& c, auto k, auto v) { c.p1 = to_double(k, v); }},
        {"p2", [](auto& c, auto k, auto v) { c.p2 = to_double(k, v); }},
        {"alloc_mu1", [](auto& c, auto k, auto v) { c.alloc_mu1 = to_double(k, v); }},
        {"alloc_mu2", [](auto& c, auto k, auto v) { c.alloc_mu2 = to_double(k, v); }},
        {"gain_variance", [](auto& c, auto k, auto v) { c.gain_variance = to_double(k, v); }},
        {"seed", [](auto& c, auto k, auto v) { c.seed = to_integer<std::uint64_t>(k, v); }},
        {"threads", [](auto& c, auto k, auto v) { c.threads = to_integer<int>(k, v); }},
        {"one_stage_br", [](auto& c, auto k, auto v) { c.one_stage_br = to_integer<int>(k, v); }},
        {"one_stage_mode",
         [](auto& c, auto k, auto v) {
             if (v == "random_phase")
                 c.one_stage_mode = SoundingMode::random_phase;
             else if (v == "partial_dft")
                 c.one_stage_mode = SoundingMode::partial_dft;
             else
                 throw ConfigError(std::string(k) + ": expected random_phase or partial_dft");
         }},
        {"memory_budget",
         [](auto& c, auto k, auto v) { c.memory_budget = to_integer<std::uint64_t>(k, v); }},
        {"refit_gains", [](auto& c, auto k, auto v) { c.refit_gains = to_bool(k, v); }},
        {"srp_threshold", [](auto& c, auto k, auto v) { c.srp_threshold = to_double(k, v); }},
        {"record_timing", [](auto& c, auto k, auto v) { c.record_timing = to_bool(k, v); }},
        {"lambda_scale", [](auto& c, auto k, auto v) { c.lambda_scale = to_double(k, v); }},
        {"rho", [](auto& c, auto k, auto v) { c.rho = to_double(k, v); }},
        {"admm_max_iter", [](auto& c, auto k, auto v) { c.admm_max_iter = to_integer<int>(k, v); }},
        {"admm_tol", [](auto& c, auto k, auto v) { c.admm_tol = to_double(k, v); }},
        {"enable_atomic_stub", [](auto& c, auto k, auto v) { c.enable_atomic_stub = to_bool(k, v); }},
    };
    return table;
}

}  // namespace

std::string estimator_name(Estimator e)
{
    switch (e) {
    case Estimator::two_stage_somp: return "two_stage_somp";
    case Estimator::one_stage_omp: return "one_stage_omp";
    case Estimator::two_stage_superres: return "two_stage_superres";
    case Estimator::one_stage_atomic_stub: return "one_stage_atomic_stub";
    case Estimator::oracle: return "oracle";
    }
    return "unknown";
}

Estimator parse_estimator(std::string_view name)
{
    for (Estimator e : {Estimator::two_stage_somp, Estimator::one_stage_omp,
                        Estimator::two_stage_superres, Estimator::one_stage_atomic_stub,
                        Estimator::oracle})
        if (estimator_name(e) == name)
            return e;
    throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

int ExperimentConfig::bt2() const
{
    return channel_uses - bt1 * geometry.num_rx_antennas / geometry.num_rf_chains;
}

int ExperimentConfig::one_stage_rsb() const
{
    return one_stage_br > 0 ? one_stage_br : geometry.num_rx_antennas;
}

int ExperimentConfig::one_stage_tsb() const
{
    return channel_uses * geometry.num_rf_chains / one_stage_rsb();
}

void ExperimentConfig::validate() const
{
    try {
        geometry.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    const int nr = geometry.num_rx_antennas, nt = geometry.num_tx_antennas;
    if (num_paths < 1 || num_paths > std::min(nr, nt))
        throw ConfigError("num_paths must lie in [1, min(nr, nt)]");
    if (num_paths > geometry.num_rf_chains)
        throw ConfigError("stage-2 receive beams (L) exceed the RF chains");
    if (!(oversampling >= 1.0))
        throw ConfigError("oversampling must be >= 1");
    if (bt1 < 1 || (bt1 * nr) % geometry.num_rf_chains != 0)
        throw ConfigError("bt1 * nr must be a positive multiple of rf_chains");
    if (bt2() < 1 || bt2() > nt)
        throw ConfigError("channel_uses leaves B_t2 = " + std::to_string(bt2()) + " outside [1, nt]");
    if (snr_db.empty())
        throw ConfigError("snr_db must not be empty");
    for (double s : snr_db)
        if (std::isnan(s) || s == -std::numeric_limits<double>::infinity())
            throw ConfigError("snr_db entries must be finite or inf");
    if (num_trials < 1)
        throw ConfigError("num_trials must be >= 1");
    if (threads < 1)
        throw ConfigError("threads must be >= 1");
    if (estimators.empty())
        throw ConfigError("no estimators selected");
    if (!(eta1 > 0.0 && eta1 < 1.0 && eta2 > 0.0 && eta2 < 1.0))
        throw ConfigError("eta1, eta2 must lie in (0,1)");
    if (!(gain_variance > 0.0))
        throw ConfigError("gain_variance must be positive");
    if (!(srp_threshold >= 0.0))
        throw ConfigError("srp_threshold must be nonnegative");
    for (Estimator e : estimators) {
        if (e == Estimator::one_stage_atomic_stub && !enable_atomic_stub)
            throw ConfigError("one_stage_atomic_stub requires enable_atomic_stub = true");
        if (e == Estimator::one_stage_omp) {
            const int br = one_stage_rsb();
            if (br < 1 || br > nr || (channel_uses * geometry.num_rf_chains) % br != 0)
                throw ConfigError("one_stage_br must divide channel_uses * rf_chains and be <= nr");
            if (one_stage_tsb() > nt)
                throw ConfigError("one-stage transmit beam count exceeds nt");
        }
        if (e == Estimator::two_stage_superres && bt2() <= num_paths)
            throw ConfigError("gridless stage 2 needs B_t2 > L");
    }
    if (allocation == AllocationMode::explicit_power && !(p1 >= 0.0 && p2 >= 0.0))
        throw ConfigError("explicit p1, p2 must be nonnegative");
    if (!(rho > 0.0) || admm_max_iter < 1 || !(admm_tol > 0.0) || !(lambda_scale > 0.0))
        throw ConfigError("bad gridless solver settings");
}

ExperimentConfig parse_config(std::string_view text)
{
    ExperimentConfig c;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" +
                              std::string(key) + "'");
        it->second(c, key, value);
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string to_config_text(const ExperimentConfig& c)
{
    std::ostringstream o;
    auto list = [](const auto& items, auto fmt) {
        std::string s;
        for (const auto& x : items) {
            if (!s.empty())
                s += ", ";
            s += fmt(x);
        }
        return s;
    };
    o << "nr = " << c.geometry.num_rx_antennas << '\n'
      << "nt = " << c.geometry.num_tx_antennas << '\n'
      << "rf_chains = " << c.geometry.num_rf_chains << '\n'
      << "num_paths = " << c.num_paths << '\n'
      << "oversampling = " << num(c.oversampling) << '\n'
      << "channel_uses = " << c.channel_uses << '\n'
      << "bt1 = " << c.bt1 << '\n'
      << "snr_db = " << list(c.snr_db, num) << '\n'
      << "num_trials = " << c.num_trials << '\n'
      << "angles = " << (c.continuous_angles ? "continuous" : "grid") << '\n'
      << "estimators = " << list(c.estimators, estimator_name) << '\n'
      << "allocation = " << allocation_name(c.allocation) << '\n'
      << "eta1 = " << num(c.eta1) << '\n'
      << "eta2 = " << num(c.eta2) << '\n'
      << "p1 = " << num(c.p1) << '\n'
      << "p2 = " << num(c.p2) << '\n'
      << "alloc_mu1 = " << num(c.alloc_mu1) << '\n'
      << "alloc_mu2 = " << num(c.alloc_mu2) << '\n'
      << "gain_variance = " << num(c.gain_variance) << '\n'
      << "seed = " << c.seed << '\n'
      << "threads = " << c.threads << '\n'
      << "one_stage_br = " << c.one_stage_br << '\n'
      << "one_stage_mode = "
      << (c.one_stage_mode == SoundingMode::random_phase ? "random_phase" : "partial_dft") << '\n'
      << "memory_budget = " << c.memory_budget << '\n'
      << "refit_gains = " << (c.refit_gains ? "true" : "false") << '\n'
      << "srp_threshold = " << num(c.srp_threshold) << '\n'
      << "record_timing = " << (c.record_timing ? "true" : "false") << '\n'
      << "lambda_scale = " << num(c.lambda_scale) << '\n'
      << "rho = " << num(c.rho) << '\n'
      << "admm_max_iter = " << c.admm_max_iter << '\n'
      << "admm_tol = " << num(c.admm_tol) << '\n'
      << "enable_atomic_stub = " << (c.enable_atomic_stub ? "true" : "false") << '\n';
    return o.str();
}

}  // namespace mmwcs
