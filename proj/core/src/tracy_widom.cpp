#include "mmwcs/tracy_widom.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mmwcs/errors.hpp"

namespace mmwcs {

namespace detail {
std::string_view builtin_tracy_widom_table();
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(std::string_view tok, const std::string& source)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw TableError(source + ": bad number '" + std::string(tok) + "'");
    return v;
}

// Fritsch-Carlson slopes; keeps the interpolant monotone on monotone data
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), delta(n - 1), d(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0)
            continue;
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0)
            s = 0.0;
        else if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3.0 * d0))
            s = 3.0 * d0;
        return s;
    };
    if (n == 2) {
        d[0] = d[1] = delta[0];
    } else {
        d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }
    return d;
}

}  // namespace

std::uint64_t table_digest(std::string_view data_lines)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data_lines) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

TracyWidomTable TracyWidomTable::parse(std::string_view text, std::string source)
{
    TracyWidomTable t;
    std::string data;
    std::string digest_field;
    std::string header;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        const std::string_view raw = text.substr(pos, nl - pos);
        pos = nl + 1;
        const std::string_view line = trim(raw);
        if (line.empty())
            continue;
        if (line.front() == '#') {
            header.append(line.substr(1)).push_back('\n');
            const auto key = line.find("fnv1a64:");
            if (key != std::string_view::npos)
                digest_field = std::string(trim(line.substr(key + 8)));
            continue;
        }
        const auto sp = line.find_first_of(" \t");
        if (sp == std::string_view::npos)
            throw TableError(source + ": expected two columns");
        t.s_.push_back(parse_double(trim(line.substr(0, sp)), source));
        t.f_.push_back(parse_double(trim(line.substr(sp + 1)), source));
        data.append(line).push_back('\n');
    }
    if (t.s_.size() < 4)
        throw TableError(source + ": too few rows");
    if (!digest_field.empty()) {
        std::uint64_t want = 0;
        const auto [ptr, ec] =
            std::from_chars(digest_field.data(), digest_field.data() + digest_field.size(), want, 16);
        if (ec != std::errc() || table_digest(data) != want)
            throw TableError(source + ": digest mismatch");
    }
    for (std::size_t i = 0; i < t.s_.size(); ++i) {
        if (!(t.f_[i] >= 0.0 && t.f_[i] <= 1.0))
            throw TableError(source + ": value outside [0,1]");
        if (i > 0 && !(t.s_[i] > t.s_[i - 1] && t.f_[i] > t.f_[i - 1]))
            throw TableError(source + ": table not strictly increasing");
    }
    if (t.f_.front() > 1e-6 || t.f_.back() < 1.0 - 1e-6)
        throw TableError(source + ": table does not cover the distribution");
    t.slope_ = pchip_slopes(t.s_, t.f_);
    t.provenance_ = source + "\n" + header;
    return t;
}

TracyWidomTable TracyWidomTable::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw TableError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

const TracyWidomTable& TracyWidomTable::builtin()
{
    static const TracyWidomTable table = parse(detail::builtin_tracy_widom_table(), "builtin");
    return table;
}

double TracyWidomTable::cdf(double s) const
{
    if (std::isnan(s))
        throw DomainError("tw_cdf: NaN argument");
    if (s <= s_.front())
        return s < s_.front() ? 0.0 : f_.front();
    if (s >= s_.back())
        return s > s_.back() ? 1.0 : f_.back();
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - s_.begin()) - 1;
    const double h = s_[i + 1] - s_[i];
    const double t = (s - s_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    const double v = h00 * f_[i] + h10 * h * slope_[i] + h01 * f_[i + 1] + h11 * h * slope_[i + 1];
    return std::clamp(v, 0.0, 1.0);
}

double TracyWidomTable::inverse(double q) const
{
    if (!(q > 0.0 && q < 1.0))
        throw DomainError("tw_inverse: q must lie in (0,1)");
    double lo = s_.front(), hi = s_.back();
    if (q <= f_.front())
        return lo;
    if (q >= f_.back())
        return hi;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < q)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double tw_cdf(double s) { return TracyWidomTable::builtin().cdf(s); }

double tw_inverse(double q) { return TracyWidomTable::builtin().inverse(q); }

}  // namespace mmwcs
