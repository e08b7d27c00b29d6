#pragma once

#include <vector>

namespace invgen {

// Dense primal simplex for: maximize c.z subject to A z <= b, z >= 0, with
// b >= 0 (the all-slack basis is feasible). Bland's rule throughout, so
// degenerate vertices cannot cycle.
struct SimplexResult {
    bool optimal = false;   // false means unbounded
    double objective = 0.0;
    std::vector<double> x;
};

SimplexResult simplex_max(const std::vector<double>& c,
                          const std::vector<std::vector<double>>& a,
                          const std::vector<double>& b);

} // namespace invgen
