#include "invgen/graphauto.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>

namespace invgen {

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
    std::vector<bool> seen(images_.size(), false);
    for (int v : images_) {
        if (v < 0 || v >= static_cast<int>(images_.size()) || seen[static_cast<std::size_t>(v)])
            throw invalid_input_error("permutation images must be a bijection on [0..n)");
        seen[static_cast<std::size_t>(v)] = true;
    }
}

Permutation Permutation::identity(int n) {
    std::vector<int> im(static_cast<std::size_t>(n));
    std::iota(im.begin(), im.end(), 0);
    return Permutation(std::move(im));
}

Permutation Permutation::compose(const Permutation& other) const {
    if (n() != other.n()) throw invalid_input_error("composing permutations of different degree");
    std::vector<int> im(static_cast<std::size_t>(n()));
    for (int i = 0; i < n(); ++i) im[static_cast<std::size_t>(i)] = image(other.image(i));
    return Permutation(std::move(im));
}

Permutation Permutation::inverse() const {
    std::vector<int> im(static_cast<std::size_t>(n()));
    for (int i = 0; i < n(); ++i) im[static_cast<std::size_t>(image(i))] = i;
    return Permutation(std::move(im));
}

bool Permutation::is_identity() const {
    for (int i = 0; i < n(); ++i)
        if (image(i) != i) return false;
    return true;
}

std::string Permutation::to_string() const {
    std::ostringstream os;
    for (int i = 0; i < n(); ++i) {
        if (i) os << ' ';
        os << image(i) + 1;
    }
    return os.str();
}

void Graph::add_edge(int u, int v) {
    if (u == v) throw invalid_input_error("graph has no self-loops");
    if (u < 0 || v < 0 || u >= n || v >= n) throw invalid_input_error("edge endpoint out of range");
    edges.insert({std::min(u, v), std::max(u, v)});
}

bool Graph::has_edge(int u, int v) const {
    return edges.count({std::min(u, v), std::max(u, v)}) > 0;
}

Graph Graph::cycle(int n) {
    Graph g;
    g.n = n;
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
}

Graph Graph::complete(int n) {
    Graph g;
    g.n = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
    return g;
}

Graph Graph::petersen() {
    // Kneser graph K(5,2): vertices are the 2-subsets of {0..4}, edges join
    // disjoint pairs. Aut = the induced S5 action, |Aut| = 120.
    Graph g;
    g.n = 10;
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b) pairs.push_back({a, b});
    for (int i = 0; i < 10; ++i)
        for (int j = i + 1; j < 10; ++j) {
            const auto [a, b] = pairs[static_cast<std::size_t>(i)];
            const auto [c, d] = pairs[static_cast<std::size_t>(j)];
            if (a != c && a != d && b != c && b != d) g.add_edge(i, j);
        }
    return g;
}

bool is_automorphism(const Graph& g, const Permutation& sigma) {
    if (sigma.n() != g.n) return false;
    for (const auto& [u, v] : g.edges)
        if (!g.has_edge(sigma.image(u), sigma.image(v))) return false;
    return true;
}

std::vector<Permutation> brute_force_automorphisms(const Graph& g) {
    if (g.n > kAutomorphismCap)
        throw capacity_error("automorphism enumeration limited to n <= " +
                             std::to_string(kAutomorphismCap));
    std::vector<int> im(static_cast<std::size_t>(g.n));
    std::iota(im.begin(), im.end(), 0);
    std::vector<Permutation> autos;
    do {
        Permutation sigma(im);
        if (is_automorphism(g, sigma)) autos.push_back(std::move(sigma));
    } while (std::next_permutation(im.begin(), im.end()));
    return autos;
}

CayleySet CayleySet::from_generators(const std::vector<Permutation>& gens) {
    CayleySet s;
    if (gens.empty()) throw invalid_input_error("empty generator list");
    s.elements.push_back(Permutation::identity(gens.front().n()));
    for (const Permutation& h : gens) {
        s.elements.push_back(h);
        s.elements.push_back(h.inverse());
    }
    return s;
}

bool CayleySet::closed_under_inverse() const {
    for (const Permutation& p : elements) {
        const Permutation inv = p.inverse();
        if (std::find(elements.begin(), elements.end(), inv) == elements.end()) return false;
    }
    return true;
}

PermutationSampler build_aut_inverse_sampler(const std::function<Permutation(Rng&)>& sample_source,
                                             int n, double epsilon, double delta, Rng& rng) {
    if (!sample_source) throw invalid_input_error("empty automorphism sample source");
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw invalid_input_error("needs epsilon, delta in (0,1)");
    const double nn = std::max(2.0, static_cast<double>(n));
    const std::uint64_t k = static_cast<std::uint64_t>(
                                std::ceil(2.0 * (nn * std::log(nn) + std::log(1.0 / delta)))) +
                            4;
    const std::uint64_t walk_len = static_cast<std::uint64_t>(std::ceil(
                                       2.0 * (nn * std::log(nn) + std::log(1.0 / epsilon)))) +
                                   4;
    std::vector<Permutation> gens;
    gens.reserve(k);
    for (std::uint64_t i = 0; i < k; ++i) gens.push_back(sample_source(rng));

    PermutationSampler sampler;
    sampler.cayley_set = CayleySet::from_generators(gens);
    sampler.walk_steps = walk_len;
    sampler.generators_drawn = k;
    auto set = std::make_shared<CayleySet>(sampler.cayley_set);
    const int degree = n;
    sampler.generate = [set, walk_len, degree](Rng& r) {
        Permutation current = Permutation::identity(degree);
        const std::uint64_t m = set->elements.size();
        for (std::uint64_t step = 0; step < walk_len; ++step) {
            if (r.coin()) continue;  // lazy half-step
            const Permutation& s = set->elements[static_cast<std::size_t>(r.below(m))];
            current = current.compose(s);
        }
        return current;
    };
    return sampler;
}

Graph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input_error("cannot open graph file: " + path);
    Graph g;
    if (!(in >> g.n) || g.n < 1) throw invalid_input_error("graph file must start with n >= 1");
    int u, v;
    while (in >> u >> v) {
        if (u < 1 || v < 1 || u > g.n || v > g.n)
            throw invalid_input_error("graph edge out of range");
        g.add_edge(u - 1, v - 1);
    }
    return g;
}

void save_graph_file(const std::string& path, const Graph& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input_error("cannot write graph file: " + path);
    out << g.n << "\n";
    for (const auto& [u, v] : g.edges) out << u + 1 << " " << v + 1 << "\n";
}

} // namespace invgen
