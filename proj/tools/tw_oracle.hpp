#pragma once

#include <string>
#include <vector>

namespace mmwcs::tools {

struct PainleveSample {
    double s = 0.0;
    double q = 0.0;    // Hastings-McLeod solution
    double cdf = 0.0;  // F2(s)
};

struct PainleveGrid {
    double s_min = -10.0;
    double s_max = 6.0;
    double spacing = 0.005;
    int substeps = 50;  // RK4 steps per grid spacing
    double s_start = 8.0;
};

// Integrates q'' = s q + 2 q^3 from s_start down to s_min in long double,
// starting on the Airy asymptote, and samples F2 on the grid.
std::vector<PainleveSample> painleve_tracy_widom(const PainleveGrid& grid = {});

// table text: comment header, then "s F2" lines with 17 significant digits
std::string format_tracy_widom_table(const std::vector<PainleveSample>& samples,
                                     const PainleveGrid& grid);

}  // namespace mmwcs::tools
