#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "invgen/errors.hpp"
#include "invgen/rng.hpp"

namespace invgen {

// Bijection on [1..n], stored as 0-based images.
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<int> images);

    static Permutation identity(int n);

    int n() const { return static_cast<int>(images_.size()); }
    int image(int i) const { return images_[static_cast<std::size_t>(i)]; }  // 0-based

    Permutation compose(const Permutation& other) const;  // this after other
    Permutation inverse() const;
    bool is_identity() const;

    bool operator==(const Permutation& o) const { return images_ == o.images_; }
    bool operator<(const Permutation& o) const { return images_ < o.images_; }

    std::string to_string() const;  // space-separated 1-based images

private:
    std::vector<int> images_;
};

struct Graph {
    int n = 0;
    std::set<std::pair<int, int>> edges;  // 0-based, ordered pairs (u < v)

    void add_edge(int u, int v);
    bool has_edge(int u, int v) const;

    static Graph cycle(int n);
    static Graph complete(int n);
    static Graph petersen();
};

bool is_automorphism(const Graph& g, const Permutation& sigma);

inline constexpr int kAutomorphismCap = 10;

// Exact Aut(G) by filtering all n! permutations; n <= 10.
std::vector<Permutation> brute_force_automorphisms(const Graph& g);

// Symmetric generating multiset S = {identity} u {h_i, h_i^-1}.
struct CayleySet {
    std::vector<Permutation> elements;

    static CayleySet from_generators(const std::vector<Permutation>& gens);
    bool closed_under_inverse() const;
};

struct PermutationSampler {
    std::function<Permutation(Rng&)> generate;
    CayleySet cayley_set;
    std::uint64_t walk_steps = 0;
    std::uint64_t generators_drawn = 0;
};

// Inverse generation for Aut(G) from uniform automorphism samples: draws
// k = ceil(2(n ln n + ln(1/delta))) + 4 generators, forms the symmetric set,
// and samples by a lazy random walk of T = ceil(2(n ln n + ln(1/eps))) + 4
// steps from the identity (stay with probability 1/2, else right-multiply by
// a uniform element of S). Never emits bottom.
PermutationSampler build_aut_inverse_sampler(const std::function<Permutation(Rng&)>& sample_source,
                                             int n, double epsilon, double delta, Rng& rng);

// Graph file: first line n, then one "u v" edge per line, 1-based.
Graph load_graph_file(const std::string& path);
void save_graph_file(const std::string& path, const Graph& g);

} // namespace invgen
