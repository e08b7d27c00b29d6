#include "invgen/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace invgen {

using nlohmann::json;

std::string function_to_json(const BoolFunc& f) {
    json j;
    j["n"] = f.n();
    std::visit(
        [&j](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Ltf>) {
                j["kind"] = "ltf";
                j["weights"] = node.weights;
                j["theta"] = node.theta;
            } else if constexpr (std::is_same_v<T, Dnf>) {
                j["kind"] = "dnf";
                json terms = json::array();
                for (const Conjunction& t : node.terms) {
                    json lits = json::array();
                    for (const Literal& lit : t.literals) lits.push_back(lit.signed_index());
                    terms.push_back(lits);
                }
                j["terms"] = terms;
            } else if constexpr (std::is_same_v<T, Conjunction>) {
                // A lone conjunction serializes as a single-term DNF.
                j["kind"] = "dnf";
                json lits = json::array();
                for (const Literal& lit : node.literals) lits.push_back(lit.signed_index());
                j["terms"] = json::array({lits});
            } else if constexpr (std::is_same_v<T, FeatureDisjunction>) {
                json terms = json::array();
                for (int idx : node.selected) {
                    json lits = json::array();
                    for (const Literal& lit : node.features[static_cast<std::size_t>(idx)].literals)
                        lits.push_back(lit.signed_index());
                    terms.push_back(lits);
                }
                if (terms.empty()) {
                    j["kind"] = "const_false";
                } else {
                    j["kind"] = "dnf";
                    j["terms"] = terms;
                }
            } else if constexpr (std::is_same_v<T, ConstTrue>) {
                j["kind"] = "const_true";
            } else {
                j["kind"] = "const_false";
            }
        },
        f.node());
    return j.dump();
}

BoolFunc function_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw invalid_input_error(std::string("function file is not valid JSON: ") + e.what());
    }
    if (!j.contains("kind") || !j.contains("n"))
        throw invalid_input_error("function file must carry 'kind' and 'n'");
    const std::string kind = j["kind"].get<std::string>();
    const int n = j["n"].get<int>();
    if (n < 1) throw invalid_input_error("function dimension must be >= 1");
    if (kind == "ltf") {
        auto weights = j["weights"].get<std::vector<std::int64_t>>();
        auto theta = j["theta"].get<std::int64_t>();
        return BoolFunc::make_ltf(n, std::move(weights), theta);
    }
    if (kind == "dnf") {
        std::vector<Conjunction> terms;
        for (const auto& jt : j["terms"]) {
            Conjunction c;
            for (const auto& jl : jt) {
                int sv = jl.get<int>();
                if (sv == 0 || std::abs(sv) > n)
                    throw invalid_input_error("dnf literal out of range");
                c.literals.push_back(Literal::from_signed(sv));
            }
            c.canonicalize();
            terms.push_back(std::move(c));
        }
        return BoolFunc::make_dnf(n, std::move(terms));
    }
    if (kind == "const_true") return BoolFunc::make_const(n, true);
    if (kind == "const_false") return BoolFunc::make_const(n, false);
    throw invalid_input_error("unknown function kind '" + kind + "'");
}

BoolFunc load_function_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input_error("cannot open function file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return function_from_json(buf.str());
}

void save_function_file(const std::string& path, const BoolFunc& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input_error("cannot write function file: " + path);
    out << function_to_json(f) << "\n";
}

std::vector<Assignment> load_sample_file(const std::string& path, int expect_n) {
    std::ifstream in(path);
    if (!in) throw invalid_input_error("cannot open sample file: " + path);
    std::vector<Assignment> samples;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Assignment x;
        try {
            x = Assignment::from_string(line);
        } catch (const invalid_input_error&) {
            throw invalid_input_error("sample file line " + std::to_string(lineno) +
                                      " is not a 0/1 string");
        }
        if (expect_n >= 0 && x.n() != expect_n)
            throw invalid_input_error("sample file line " + std::to_string(lineno) +
                                      " has length " + std::to_string(x.n()) + ", expected " +
                                      std::to_string(expect_n));
        if (!samples.empty() && samples.front().n() != x.n())
            throw invalid_input_error("sample file line " + std::to_string(lineno) +
                                      " has inconsistent length");
        samples.push_back(std::move(x));
    }
    return samples;
}

void save_sample_file(const std::string& path, const std::vector<Assignment>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input_error("cannot write sample file: " + path);
    for (const Assignment& x : samples) out << x.to_string() << "\n";
}

} // namespace invgen
