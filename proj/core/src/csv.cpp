#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mmwcs/errors.hpp"
#include "mmwcs/harness.hpp"

namespace mmwcs {

namespace {

constexpr const char* kTrialsHeader =
    "seed,snr_db,estimator,eps,aoa_support_exact,aod_support_exact,nmse,wall_ms,mults";
constexpr const char* kCurvesHeader = "estimator,snr_db,srp,srp_err,mse,nmse,trials";

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_field(const std::string& s)
{
    if (s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw Error("curves csv: bad number '" + s + "'");
    return v;
}

}  // namespace

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, r.ptr);
}

std::string trials_csv(const std::vector<TrialRecord>& records)
{
    std::string out = kTrialsHeader;
    out += '\n';
    for (const auto& r : records) {
        out += std::to_string(r.seed) + ',' + format_number(r.snr_db) + ',' +
               estimator_name(r.estimator) + ',' + format_number(r.eps) + ',' +
               (r.aoa_support_exact ? "1" : "0") + ',' + (r.aod_support_exact ? "1" : "0") + ',' +
               format_number(r.nmse) + ',' + format_number(r.wall_ms) + ',' +
               std::to_string(r.mults) + '\n';
    }
    return out;
}

std::string curves_csv(const std::vector<Aggregate>& curves)
{
    std::string out = kCurvesHeader;
    out += '\n';
    for (const auto& a : curves) {
        out += estimator_name(a.estimator) + ',' + format_number(a.snr_db) + ',' +
               format_number(a.srp) + ',' + format_number(a.srp_err) + ',' + format_number(a.mse) +
               ',' + format_number(a.nmse) + ',' + std::to_string(a.trials) + '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot open " + path + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out)
        throw Error("write failed: " + path);
}

void emit_csv(const std::vector<TrialRecord>& records, const std::string& path)
{
    write_text_file(path, trials_csv(records));
}

void emit_curves(const std::vector<Aggregate>& curves, const std::string& path)
{
    write_text_file(path, curves_csv(curves));
}

std::vector<Aggregate> parse_curves_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kCurvesHeader))
        throw Error("curves csv: unexpected header");
    std::vector<Aggregate> out;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r")
            continue;
        const auto f = split_csv_line(line);
        if (f.size() != 7)
            throw Error("curves csv: expected 7 fields");
        Aggregate a;
        a.estimator = parse_estimator(f[0]);
        a.snr_db = parse_field(f[1]);
        a.srp = parse_field(f[2]);
        a.srp_err = parse_field(f[3]);
        a.mse = parse_field(f[4]);
        a.nmse = parse_field(f[5]);
        a.trials = static_cast<int>(parse_field(f[6]));
        out.push_back(a);
    }
    return out;
}

}  // namespace mmwcs
