#pragma once

#include <map>
#include <vector>

#include "invgen/boolfunc.hpp"

namespace invgen {

// Finite explicit distribution over assignments; the brute-force stand-in for
// the distributions D, D', U_{f^-1(1)} in tests and oracles.
class MassTable {
public:
    MassTable() = default;
    explicit MassTable(std::map<Assignment, double> support);

    static MassTable uniform_over(const std::vector<Assignment>& points);
    static MassTable point_mass(const Assignment& x);

    double mass(const Assignment& x) const {
        auto it = support_.find(x);
        return it == support_.end() ? 0.0 : it->second;
    }
    const std::map<Assignment, double>& support() const { return support_; }
    std::size_t size() const { return support_.size(); }
    bool normalized() const;

private:
    std::map<Assignment, double> support_;
};

inline constexpr double kMassTolerance = 1e-12;

// Exact total variation distance, max_S |p(S)-q(S)| = (1/2) L1. Throws on
// unnormalized input.
double tv_exact(const MassTable& p, const MassTable& q);

// Three-term closed form for d_TV(U_A, U_B) over uniform-on-set inputs.
double tv_uniform_sets(const std::vector<Assignment>& a, const std::vector<Assignment>& b);

} // namespace invgen
