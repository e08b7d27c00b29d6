#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "invgen/errors.hpp"

namespace invgen {

// A point of the Boolean cube, stored as 0/1 bits packed into one word
// (dimension capped at 64, far above every enumeration cap in the library).
// LTF semantics map bit b to the +/-1 value 2b-1, so one storage type serves
// both cube conventions.
class Assignment {
public:
    Assignment() = default;
    explicit Assignment(const std::vector<bool>& bits);

    static Assignment from_string(const std::string& s);
    static Assignment from_index(std::uint64_t index, int n);

    int n() const { return n_; }
    bool bit(int i) const { return (bits_ >> i) & 1ULL; }
    void set_bit(int i, bool v) {
        bits_ = v ? (bits_ | (1ULL << i)) : (bits_ & ~(1ULL << i));
    }
    int pm1(int i) const { return bit(i) ? 1 : -1; }

    std::string to_string() const;
    // Packs the bits into an integer index (bit i is the i-th coordinate).
    std::uint64_t to_index() const { return bits_; }

    bool operator==(const Assignment& o) const { return n_ == o.n_ && bits_ == o.bits_; }
    bool operator!=(const Assignment& o) const { return !(*this == o); }
    bool operator<(const Assignment& o) const {
        return n_ != o.n_ ? n_ < o.n_ : bits_ < o.bits_;
    }

private:
    int n_ = 0;
    std::uint64_t bits_ = 0;
};

// Signed 1-based variable index: +v means x_v, -v means its negation.
struct Literal {
    int var = 0;       // in [1..n]
    bool positive = true;

    int signed_index() const { return positive ? var : -var; }
    static Literal from_signed(int sv) { return Literal{sv < 0 ? -sv : sv, sv > 0}; }
    bool holds(const Assignment& x) const { return x.bit(var - 1) == positive; }
    bool operator==(const Literal& o) const { return var == o.var && positive == o.positive; }
    bool operator<(const Literal& o) const {
        return var != o.var ? var < o.var : positive < o.positive;
    }
};

// AND of literals; the empty conjunction is constant true.
struct Conjunction {
    std::vector<Literal> literals;

    int width() const { return static_cast<int>(literals.size()); }
    bool contradictory() const;
    // Sorts by variable and rejects duplicate variables of opposite polarity.
    void canonicalize();
    bool evaluate(const Assignment& x) const {
        for (const Literal& lit : literals)
            if (!lit.holds(x)) return false;
        return true;
    }
    bool operator==(const Conjunction& o) const { return literals == o.literals; }
    bool operator<(const Conjunction& o) const { return literals < o.literals; }
};

struct Ltf {
    std::vector<std::int64_t> weights;
    std::int64_t theta = 0;

    int n() const { return static_cast<int>(weights.size()); }
    std::int64_t weight_sum_abs() const;
    // sign(0) counts as positive: true iff sum_i w_i * (2b_i - 1) >= theta.
    bool evaluate(const Assignment& x) const {
        std::int64_t dot = 0;
        for (int i = 0; i < n(); ++i) dot += weights[static_cast<std::size_t>(i)] * x.pm1(i);
        return dot >= theta;
    }
};

struct Dnf {
    std::vector<Conjunction> terms;

    bool evaluate(const Assignment& x) const {
        for (const Conjunction& t : terms)
            if (t.evaluate(x)) return true;
        return false;
    }
};

// OR over a selected subset of a fixed feature list of conjunctions.
struct FeatureDisjunction {
    std::vector<Conjunction> features;
    std::vector<int> selected;

    bool evaluate(const Assignment& x) const {
        for (int idx : selected)
            if (features[static_cast<std::size_t>(idx)].evaluate(x)) return true;
        return false;
    }
};

struct ConstTrue {};
struct ConstFalse {};

inline constexpr std::int64_t kDefaultWeightCap = 1000;

// Tagged union of every representation the library evaluates.
class BoolFunc {
public:
    using Node = std::variant<Ltf, Dnf, Conjunction, FeatureDisjunction, ConstTrue, ConstFalse>;

    BoolFunc() : n_(0), node_(ConstFalse{}) {}
    BoolFunc(int n, Node node) : n_(n), node_(std::move(node)) {}

    static BoolFunc make_ltf(int n, std::vector<std::int64_t> w, std::int64_t theta,
                             std::int64_t weight_cap = kDefaultWeightCap);
    static BoolFunc make_dnf(int n, std::vector<Conjunction> terms);
    static BoolFunc make_conjunction(int n, Conjunction c);
    static BoolFunc make_feature_disjunction(int n, FeatureDisjunction fd);
    static BoolFunc make_const(int n, bool value);

    int n() const { return n_; }
    const Node& node() const { return node_; }

    bool is_ltf() const { return std::holds_alternative<Ltf>(node_); }
    bool is_dnf() const { return std::holds_alternative<Dnf>(node_); }
    bool is_const_true() const { return std::holds_alternative<ConstTrue>(node_); }
    bool is_const_false() const { return std::holds_alternative<ConstFalse>(node_); }
    const Ltf& as_ltf() const { return std::get<Ltf>(node_); }
    const Dnf& as_dnf() const { return std::get<Dnf>(node_); }

    // Deterministic, total; throws invalid_input_error on dimension mismatch.
    bool evaluate(const Assignment& x) const;

    std::string describe() const;

private:
    int n_;
    Node node_;
};

inline constexpr int kEnumerationCap = 24;

// Exact satisfying set {x : f(x)=1} by full enumeration. n above the cap is a
// capacity error.
std::vector<Assignment> brute_force_satisfying_set(const BoolFunc& f, int n);

// Exact satisfying count by enumeration (same cap).
std::uint64_t brute_force_satisfying_count(const BoolFunc& f, int n);

} // namespace invgen
