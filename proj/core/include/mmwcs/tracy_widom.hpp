#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mmwcs {

// Tabulated F2 with monotone piecewise-cubic (Fritsch-Carlson) interpolation.
class TracyWidomTable {
public:
    static TracyWidomTable parse(std::string_view text, std::string source);
    static TracyWidomTable load(const std::string& path);
    // table compiled into the library
    static const TracyWidomTable& builtin();

    const std::vector<double>& abscissae() const { return s_; }
    const std::vector<double>& cdf_values() const { return f_; }
    const std::string& provenance() const { return provenance_; }

    double cdf(double s) const;
    // bisection on cdf() down to an interval of 1e-10
    double inverse(double q) const;

private:
    std::vector<double> s_;
    std::vector<double> f_;
    std::vector<double> slope_;
    std::string provenance_;
};

double tw_cdf(double s);
double tw_inverse(double q);

// 64-bit FNV-1a over the data lines, written into the table header
std::uint64_t table_digest(std::string_view data_lines);

}  // namespace mmwcs
