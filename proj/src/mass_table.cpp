#include "invgen/mass_table.hpp"

#include <cmath>
#include <set>

namespace invgen {

MassTable::MassTable(std::map<Assignment, double> support) : support_(std::move(support)) {
    for (const auto& [x, p] : support_)
        if (p < 0.0) throw invalid_input_error("mass table has negative probability");
    if (!normalized()) throw invalid_input_error("mass table does not sum to 1");
}

MassTable MassTable::uniform_over(const std::vector<Assignment>& points) {
    if (points.empty()) throw invalid_input_error("uniform distribution over empty set");
    std::map<Assignment, double> m;
    for (const Assignment& x : points) m[x] = 0.0;
    const double p = 1.0 / static_cast<double>(m.size());
    for (auto& [x, v] : m) v = p;
    return MassTable(std::move(m));
}

MassTable MassTable::point_mass(const Assignment& x) {
    return MassTable(std::map<Assignment, double>{{x, 1.0}});
}

bool MassTable::normalized() const {
    double total = 0.0;
    for (const auto& [x, p] : support_) total += p;
    return std::fabs(total - 1.0) <= kMassTolerance;
}

double tv_exact(const MassTable& p, const MassTable& q) {
    if (!p.normalized() || !q.normalized())
        throw invalid_input_error("tv_exact requires normalized mass tables");
    double l1 = 0.0;
    for (const auto& [x, px] : p.support()) l1 += std::fabs(px - q.mass(x));
    for (const auto& [x, qx] : q.support())
        if (p.mass(x) == 0.0) l1 += qx;
    return 0.5 * l1;
}

double tv_uniform_sets(const std::vector<Assignment>& a, const std::vector<Assignment>& b) {
    if (a.empty() || b.empty())
        throw invalid_input_error("uniform-set tv needs nonempty sets");
    std::set<Assignment> sa(a.begin(), a.end());
    std::set<Assignment> sb(b.begin(), b.end());
    std::size_t inter = 0;
    for (const Assignment& x : sa)
        if (sb.count(x)) ++inter;
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    const double ni = static_cast<double>(inter);
    return 0.5 * (na - ni) / na + 0.5 * (nb - ni) / nb + 0.5 * ni * std::fabs(1.0 / na - 1.0 / nb);
}

} // namespace invgen
