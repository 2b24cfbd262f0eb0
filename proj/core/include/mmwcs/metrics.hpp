#pragma once

#include <utility>
#include <vector>

#include "mmwcs/types.hpp"

namespace mmwcs {

// min(|a-b|, 1-|a-b|) after wrapping both into [0,1)
double circular_distance(double a, double b);

// Hungarian method on a square cost matrix; result[row] = column
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

using AnglePair = std::pair<double, double>;  // (AoA, AoD) spatial frequencies

struct AngleError {
    double eps = 0.0;     // (1/2L) sum of squared wrapped errors
    double sum_sq = 0.0;  // sum without the 1/2L factor (per-trial MSE term)
    std::vector<int> matching;  // truth l -> estimate index
};

AngleError angle_error(const std::vector<AnglePair>& truth, const std::vector<AnglePair>& estimate);

double nmse(const CMatrix& truth, const CMatrix& estimate);

// nearest grid index of each frequency on a grid of size G
std::vector<Index> nearest_grid_indices(const std::vector<double>& freqs, int grid_size);

// multiset equality
bool same_support(std::vector<Index> a, std::vector<Index> b);

}  // namespace mmwcs
