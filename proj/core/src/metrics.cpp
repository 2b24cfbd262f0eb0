#include "mmwcs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmwcs/errors.hpp"

namespace mmwcs {

double circular_distance(double a, double b)
{
    double d = std::abs((a - std::floor(a)) - (b - std::floor(b)));
    return std::min(d, 1.0 - d);
}

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost)
{
    const int n = static_cast<int>(cost.rows());
    if (cost.cols() != n)
        throw DimensionError("min_cost_assignment: cost matrix must be square");
    if (n == 0)
        return {};
    // shortest augmenting path with row/column potentials, 1-based scratch arrays
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> pu(n + 1, 0.0), pv(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j])
                    continue;
                const double cur = cost(i0 - 1, j - 1) - pu[i0] - pv[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    pu[match[j]] += delta;
                    pv[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> result(n, -1);
    for (int j = 1; j <= n; ++j)
        result[match[j] - 1] = j - 1;
    return result;
}

AngleError angle_error(const std::vector<AnglePair>& truth, const std::vector<AnglePair>& estimate)
{
    const std::size_t l = truth.size();
    if (l == 0)
        throw DimensionError("angle_error: empty truth");
    // padded entries cost the largest possible pair error
    constexpr double miss = 0.5;
    const std::size_t n = std::max(l, estimate.size());
    Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(static_cast<Index>(n), static_cast<Index>(n), miss);
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < estimate.size(); ++j) {
            const double dr = circular_distance(truth[i].first, estimate[j].first);
            const double dt = circular_distance(truth[i].second, estimate[j].second);
            cost(static_cast<Index>(i), static_cast<Index>(j)) = dr * dr + dt * dt;
        }
    const std::vector<int> assign = min_cost_assignment(cost);
    AngleError out;
    for (std::size_t i = 0; i < l; ++i) {
        const int j = assign[i];
        out.sum_sq += cost(static_cast<Index>(i), j);
        out.matching.push_back(j < static_cast<int>(estimate.size()) ? j : -1);
    }
    out.eps = out.sum_sq / (2.0 * static_cast<double>(l));
    return out;
}

double nmse(const CMatrix& truth, const CMatrix& estimate)
{
    if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols())
        throw DimensionError("nmse: shape mismatch");
    const double den = truth.squaredNorm();
    if (den == 0.0)
        throw DomainError("nmse: zero reference matrix");
    return (truth - estimate).squaredNorm() / den;
}

std::vector<Index> nearest_grid_indices(const std::vector<double>& freqs, int grid_size)
{
    if (grid_size < 1)
        throw DomainError("nearest_grid_indices: grid size must be positive");
    std::vector<Index> out;
    out.reserve(freqs.size());
    for (double f : freqs) {
        const double w = f - std::floor(f);
        out.push_back(static_cast<Index>(std::llround(w * grid_size)) % grid_size);
    }
    return out;
}

bool same_support(std::vector<Index> a, std::vector<Index> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

}  // namespace mmwcs
