#include "invgen/boolfunc.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace invgen {

namespace {

void check_dimension_cap(int n) {
    if (n < 0 || n > 64)
        throw capacity_error("assignments support at most 64 coordinates, got " +
                             std::to_string(n));
}

} // namespace

Assignment::Assignment(const std::vector<bool>& bits) {
    check_dimension_cap(static_cast<int>(bits.size()));
    n_ = static_cast<int>(bits.size());
    for (int i = 0; i < n_; ++i)
        if (bits[static_cast<std::size_t>(i)]) bits_ |= (1ULL << i);
}

Assignment Assignment::from_string(const std::string& s) {
    check_dimension_cap(static_cast<int>(s.size()));
    Assignment x;
    x.n_ = static_cast<int>(s.size());
    for (int i = 0; i < x.n_; ++i) {
        const char c = s[static_cast<std::size_t>(i)];
        if (c == '1') x.bits_ |= (1ULL << i);
        else if (c != '0')
            throw invalid_input_error("assignment string must be 0/1, got '" + s + "'");
    }
    return x;
}

Assignment Assignment::from_index(std::uint64_t index, int n) {
    check_dimension_cap(n);
    Assignment x;
    x.n_ = n;
    x.bits_ = n == 64 ? index : (index & ((1ULL << n) - 1));
    return x;
}

std::string Assignment::to_string() const {
    std::string s;
    s.reserve(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) s.push_back(bit(i) ? '1' : '0');
    return s;
}

bool Conjunction::contradictory() const {
    for (std::size_t i = 0; i < literals.size(); ++i)
        for (std::size_t j = i + 1; j < literals.size(); ++j)
            if (literals[i].var == literals[j].var && literals[i].positive != literals[j].positive)
                return true;
    return false;
}

void Conjunction::canonicalize() {
    std::sort(literals.begin(), literals.end());
    literals.erase(std::unique(literals.begin(), literals.end()), literals.end());
    for (std::size_t i = 0; i + 1 < literals.size(); ++i)
        if (literals[i].var == literals[i + 1].var)
            throw invalid_input_error("conjunction contains both polarities of variable " +
                                      std::to_string(literals[i].var));
}

std::int64_t Ltf::weight_sum_abs() const {
    std::int64_t s = 0;
    for (std::int64_t w : weights) s += std::llabs(w);
    return s;
}

BoolFunc BoolFunc::make_ltf(int n, std::vector<std::int64_t> w, std::int64_t theta,
                            std::int64_t weight_cap) {
    if (static_cast<int>(w.size()) != n)
        throw invalid_input_error("ltf weight vector length does not match n");
    for (std::int64_t wi : w)
        if (std::llabs(wi) > weight_cap)
            throw invalid_input_error("ltf weight exceeds cap " + std::to_string(weight_cap));
    return BoolFunc(n, Ltf{std::move(w), theta});
}

BoolFunc BoolFunc::make_dnf(int n, std::vector<Conjunction> terms) {
    if (terms.empty())
        throw invalid_input_error("dnf needs at least one term; use ConstFalse instead");
    for (Conjunction& t : terms) {
        for (const Literal& lit : t.literals)
            if (lit.var < 1 || lit.var > n)
                throw invalid_input_error("dnf literal variable out of range");
        std::sort(t.literals.begin(), t.literals.end());
    }
    return BoolFunc(n, Dnf{std::move(terms)});
}

BoolFunc BoolFunc::make_conjunction(int n, Conjunction c) {
    for (const Literal& lit : c.literals)
        if (lit.var < 1 || lit.var > n)
            throw invalid_input_error("conjunction literal variable out of range");
    std::sort(c.literals.begin(), c.literals.end());
    return BoolFunc(n, std::move(c));
}

BoolFunc BoolFunc::make_feature_disjunction(int n, FeatureDisjunction fd) {
    for (int idx : fd.selected)
        if (idx < 0 || idx >= static_cast<int>(fd.features.size()))
            throw invalid_input_error("feature disjunction selects out-of-range feature");
    return BoolFunc(n, std::move(fd));
}

BoolFunc BoolFunc::make_const(int n, bool value) {
    return value ? BoolFunc(n, ConstTrue{}) : BoolFunc(n, ConstFalse{});
}

bool BoolFunc::evaluate(const Assignment& x) const {
    if (x.n() != n_)
        throw invalid_input_error("assignment dimension " + std::to_string(x.n()) +
                                  " does not match function dimension " + std::to_string(n_));
    return std::visit(
        [&x](const auto& node) -> bool {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, ConstTrue>) return true;
            else if constexpr (std::is_same_v<T, ConstFalse>) return false;
            else return node.evaluate(x);
        },
        node_);
}

std::string BoolFunc::describe() const {
    std::ostringstream os;
    std::visit(
        [&os, this](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Ltf>) {
                os << "ltf(n=" << n_ << ")";
            } else if constexpr (std::is_same_v<T, Dnf>) {
                os << "dnf(n=" << n_ << ", terms=" << node.terms.size() << ")";
            } else if constexpr (std::is_same_v<T, Conjunction>) {
                os << "conj(n=" << n_ << ", width=" << node.width() << ")";
            } else if constexpr (std::is_same_v<T, FeatureDisjunction>) {
                os << "featdisj(n=" << n_ << ", features=" << node.features.size()
                   << ", selected=" << node.selected.size() << ")";
            } else if constexpr (std::is_same_v<T, ConstTrue>) {
                os << "true(n=" << n_ << ")";
            } else {
                os << "false(n=" << n_ << ")";
            }
        },
        node_);
    return os.str();
}

std::vector<Assignment> brute_force_satisfying_set(const BoolFunc& f, int n) {
    if (n > kEnumerationCap)
        throw capacity_error("enumeration over n=" + std::to_string(n) + " exceeds cap " +
                             std::to_string(kEnumerationCap));
    if (n != f.n()) throw invalid_input_error("dimension mismatch in brute force enumeration");
    std::vector<Assignment> sat;
    const std::uint64_t total = 1ULL << n;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        Assignment x = Assignment::from_index(idx, n);
        if (f.evaluate(x)) sat.push_back(std::move(x));
    }
    return sat;
}

std::uint64_t brute_force_satisfying_count(const BoolFunc& f, int n) {
    if (n > kEnumerationCap)
        throw capacity_error("enumeration over n=" + std::to_string(n) + " exceeds cap " +
                             std::to_string(kEnumerationCap));
    if (n != f.n()) throw invalid_input_error("dimension mismatch in brute force enumeration");
    std::uint64_t count = 0;
    const std::uint64_t total = 1ULL << n;
    for (std::uint64_t idx = 0; idx < total; ++idx)
        if (f.evaluate(Assignment::from_index(idx, n))) ++count;
    return count;
}

} // namespace invgen
