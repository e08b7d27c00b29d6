// invgen: experiment harness for inverse approximate uniform generation.
//
// Subcommands: gen, invert, eval, count, sample, graphauto.
// Exit codes: 0 success, 2 input error, 3 algorithmic failure, 4 capacity.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "invgen/graphauto.hpp"
#include "invgen/io.hpp"
#include "invgen/mass_table.hpp"
#include "invgen/pipeline.hpp"

using namespace invgen;
using nlohmann::json;

namespace {

struct Timings {
    bool enabled = false;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    json entries = json::object();

    void record(const std::string& stage) {
        if (!enabled) return;
        const auto now = std::chrono::steady_clock::now();
        entries[stage] = std::chrono::duration<double>(now - start).count();
        start = now;
    }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input_error("cannot write: " + path);
    out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Positive-sample source backed by a dataset: uniform draws with
// replacement, seeded.
BottomSampler dataset_source(std::shared_ptr<std::vector<Assignment>> data) {
    return BottomSampler(
        [data](Rng& rng) -> std::optional<Assignment> {
            return (*data)[static_cast<std::size_t>(rng.below(data->size()))];
        },
        0.0, 0.0);
}

BoolFunc plant_function(const std::string& class_tag, int n, int s, int k, int term_width,
                        Rng& rng) {
    if (class_tag == "ltf") {
        for (int attempt = 0; attempt < 200; ++attempt) {
            std::vector<std::int64_t> w(static_cast<std::size_t>(n));
            std::int64_t sum = 0;
            for (auto& wi : w) {
                wi = static_cast<std::int64_t>(rng.below(21)) - 10;
                sum += std::llabs(wi);
            }
            const std::int64_t theta =
                static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * sum + 1))) - sum;
            const BoolFunc f = BoolFunc::make_ltf(n, std::move(w), theta);
            if (ltf_count_exact(f.as_ltf()).value > 0.0) return f;
        }
        throw algorithm_failure("could not plant a satisfiable ltf");
    }
    if (class_tag == "dnf" || class_tag == "kdnf") {
        const int terms = class_tag == "dnf" ? std::max(1, s) : std::max(1, s);
        const int max_width = class_tag == "kdnf" ? k : std::min(n, term_width + 2);
        const int min_width = class_tag == "kdnf" ? 1 : term_width;
        std::vector<Conjunction> out;
        for (int t = 0; t < terms; ++t) {
            const int width = min_width +
                              static_cast<int>(rng.below(static_cast<std::uint64_t>(
                                  std::max(1, max_width - min_width + 1))));
            Conjunction c;
            std::set<int> vars;
            while (static_cast<int>(vars.size()) < std::min(width, n))
                vars.insert(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
            for (int v : vars) c.literals.push_back(Literal{v, rng.coin()});
            out.push_back(std::move(c));
        }
        return BoolFunc::make_dnf(n, std::move(out));
    }
    throw invalid_input_error("unknown class '" + class_tag + "'");
}

json sampler_transcript_json(const InverseSampler& sampler) {
    json j;
    j["schema"] = 1;
    j["kind"] = "inverse_sampler";
    j["n"] = sampler.g().n();
    j["g"] = json::parse(function_to_json(sampler.g()));
    j["h"] = json::parse(function_to_json(sampler.h()));
    j["trials"] = sampler.trials();
    j["gen_eps"] = sampler.gen_eps();
    j["gen_delta"] = sampler.gen_delta();
    j["gamma"] = sampler.gamma();
    if (sampler.certificate()) {
        j["certificate"] = {{"alpha", sampler.certificate()->alpha},
                            {"kappa", sampler.certificate()->kappa}};
    }
    return j;
}

InverseSampler sampler_from_transcript(const json& j) {
    if (!j.contains("kind") || j["kind"] != "inverse_sampler")
        throw invalid_input_error("transcript is not an inverse_sampler record");
    const BoolFunc g = function_from_json(j["g"].dump());
    const BoolFunc h = function_from_json(j["h"].dump());
    InverseSampler sampler(g, h, j["trials"].get<std::uint64_t>(), j["gen_eps"].get<double>(),
                           j["gen_delta"].get<double>(), j["gamma"].get<double>());
    if (j.contains("certificate"))
        sampler.set_certificate(CheckCertificate{j["certificate"]["alpha"].get<double>(),
                                                 j["certificate"]["kappa"].get<double>()});
    return sampler;
}

// Empirical TV between draw counts and an explicit uniform support, plus a
// DKW-style half-width at 95% confidence.
struct TvEstimate {
    double tv = 0.0;
    double half_width = 0.0;
    std::uint64_t draws = 0;
    std::uint64_t bottoms = 0;
};

TvEstimate tv_against_support(const InverseSampler& sampler, const std::vector<Assignment>& support,
                              std::uint64_t draws, Rng& rng) {
    std::map<std::uint64_t, std::uint64_t> freq;
    std::uint64_t got = 0, bottoms = 0;
    for (std::uint64_t i = 0; i < draws; ++i) {
        auto x = sampler.generate(rng);
        if (!x) {
            ++bottoms;
            continue;
        }
        freq[x->to_index()]++;
        ++got;
    }
    TvEstimate est;
    est.draws = got;
    est.bottoms = bottoms;
    if (got == 0) {
        est.tv = 1.0;
        return est;
    }
    const double u = 1.0 / static_cast<double>(support.size());
    std::set<std::uint64_t> sup;
    for (const auto& x : support) sup.insert(x.to_index());
    double l1 = 0.0;
    for (const auto& [key, c] : freq) {
        const double emp = static_cast<double>(c) / static_cast<double>(got);
        l1 += std::fabs(emp - (sup.count(key) ? u : 0.0));
    }
    for (std::uint64_t key : sup)
        if (!freq.count(key)) l1 += u;
    est.tv = 0.5 * l1;
    est.half_width = std::sqrt(std::log(2.0 / 0.05) / (2.0 * static_cast<double>(got)));
    return est;
}

int cmd_gen(const std::string& class_tag, int n, int s, int k, int term_width,
            std::uint64_t seed, std::uint64_t n_samples, const std::string& out_prefix,
            const std::string& function_path) {
    Rng rng(seed);
    Rng plant_rng = rng.child(1);
    BoolFunc f = function_path.empty()
                     ? plant_function(class_tag, n, s, k, term_width, plant_rng)
                     : load_function_file(function_path);
    const ForwardTools tools = make_forward_tools(f);  // throws infeasible on const-false
    const BottomSampler sampler = tools.make_sampler(0.0, 1e-9);
    std::vector<Assignment> samples;
    samples.reserve(n_samples);
    Rng draw_rng = rng.child(2);
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        std::optional<Assignment> x;
        for (int retry = 0; retry < 100 && !x; ++retry) x = sampler.generate(draw_rng);
        if (!x) throw algorithm_failure("sampler kept failing while generating the dataset");
        if (!f.evaluate(*x)) throw algorithm_failure("generator emitted a non-satisfying point");
        samples.push_back(*x);
    }
    save_function_file(out_prefix + ".function.json", f);
    save_sample_file(out_prefix + ".samples.txt", samples);
    std::cout << "wrote " << out_prefix << ".function.json and " << n_samples << " samples\n";
    return 0;
}

int cmd_invert(const std::string& class_tag, int s, int k, double eps, double delta,
               std::uint64_t seed, const std::string& samples_path, const std::string& out_path,
               const std::string& transcript_path, bool timings_on) {
    Timings timings;
    timings.enabled = timings_on;
    auto data = std::make_shared<std::vector<Assignment>>(load_sample_file(samples_path));
    if (data->empty()) throw invalid_input_error("samples file is empty");
    const int n = data->front().n();
    timings.record("load");

    const Instantiation inst =
        make_instantiation(class_tag, n, class_tag == "kdnf" ? k : s);
    Rng rng(seed);
    const BottomSampler pos = dataset_source(data);
    InversionOutcome out = inverse_generate(pos, eps, delta, inst, rng);
    timings.record("inversion");

    // Self-contained diagnostic: TV of the winner against the dataset's
    // empirical distribution (the oracle-grade check is `eval`).
    std::vector<Assignment> dataset_support;
    {
        std::set<Assignment> uniq(data->begin(), data->end());
        dataset_support.assign(uniq.begin(), uniq.end());
    }
    Rng tv_rng = rng.child(0xe7a1);
    const TvEstimate tv = tv_against_support(out.winner, dataset_support, 200000, tv_rng);
    timings.record("tv");

    json report;
    report["schema"] = 1;
    report["command"] = "invert";
    report["config"] = {{"class", class_tag}, {"n", n},      {"s", s},
                        {"k", k},             {"eps", eps},  {"delta", delta},
                        {"seed", seed},       {"samples", samples_path}};
    json grid = json::array();
    for (const GridEntry& e : out.grid) {
        grid.push_back({{"index", e.index},
                        {"p_hat", e.p_hat},
                        {"produced", e.produced},
                        {"certified", e.certified},
                        {"alpha", e.alpha},
                        {"kappa", e.kappa},
                        {"gamma", e.gamma},
                        {"densifier_terms", e.densifier_terms},
                        {"note", e.note}});
    }
    report["grid"] = grid;
    report["survivors"] = out.survivors;
    json comps = json::array();
    const auto& m = out.tournament.matrix;
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            const CompetitionOutcome& o = m[i][j];
            json jo = {{"i", out.survivors[i]},       {"j", out.survivors[j]},
                       {"p_region", o.p_region},      {"q_region", o.q_region},
                       {"delta_hat", o.delta_hat},    {"tau_hat", o.tau_hat}};
            if (o.winner)
                jo["winner"] = out.survivors[static_cast<std::size_t>(*o.winner)];
            else
                jo["winner"] = nullptr;
            comps.push_back(jo);
        }
    }
    report["competitions"] = comps;
    report["winner"] = {{"grid_index", out.winner_grid_index},
                        {"transcript", sampler_transcript_json(out.winner)}};
    report["tv_vs_dataset"] = {{"tv", tv.tv},
                               {"half_width", tv.half_width},
                               {"draws", tv.draws},
                               {"bottom_draws", tv.bottoms},
                               {"raw_dataset_support", dataset_support.size()}};
    if (timings_on) report["timings"] = timings.entries;

    write_text(out_path, dump(report));
    if (!transcript_path.empty())
        write_text(transcript_path, dump(sampler_transcript_json(out.winner)));
    std::cout << "winner: grid point " << out.winner_grid_index << ", report at " << out_path
              << "\n";
    return 0;
}

int cmd_eval(const std::string& transcript_path, const std::string& function_path,
             std::uint64_t draws, std::uint64_t seed, const std::string& out_path,
             bool force_empirical) {
    std::ifstream in(transcript_path);
    if (!in) throw invalid_input_error("cannot open transcript: " + transcript_path);
    json tj;
    try {
        in >> tj;
    } catch (const json::parse_error& e) {
        throw invalid_input_error(std::string("transcript is not valid JSON: ") + e.what());
    }
    const InverseSampler sampler = sampler_from_transcript(tj);
    const BoolFunc f = load_function_file(function_path);
    if (f.n() != sampler.g().n())
        throw invalid_input_error("function dimension does not match the sampler");

    const bool exact_mode = !force_empirical && f.n() <= kEnumerationCap;
    Rng rng(seed);
    json report;
    report["schema"] = 1;
    report["command"] = "eval";
    report["config"] = {{"transcript", transcript_path},
                        {"function", function_path},
                        {"draws", draws},
                        {"seed", seed},
                        {"mode", exact_mode ? "exact" : "empirical"}};

    if (exact_mode) {
        const auto fsat = brute_force_satisfying_set(f, f.n());
        if (fsat.empty()) throw algorithm_failure("function has no satisfying assignments");
        const TvEstimate tv = tv_against_support(sampler, fsat, draws, rng);
        report["tv"] = {{"tv", tv.tv},
                        {"half_width", tv.half_width},
                        {"draws", tv.draws},
                        {"bottom_draws", tv.bottoms},
                        {"support", fsat.size()}};
    } else {
        // Plug-in TV over the observed support only; flagged because unseen
        // satisfying assignments are invisible to this estimate.
        std::map<std::uint64_t, std::uint64_t> freq;
        std::uint64_t got = 0, bottoms = 0;
        for (std::uint64_t i = 0; i < draws; ++i) {
            auto x = sampler.generate(rng);
            if (!x) {
                ++bottoms;
                continue;
            }
            if (x->n() != f.n()) throw invalid_input_error("sampler dimension mismatch");
            freq[x->to_index()]++;
            ++got;
        }
        double l1 = 0.0;
        std::uint64_t in_f = 0;
        for (const auto& [key, c] : freq) {
            const Assignment x = Assignment::from_index(key, f.n());
            const double emp = static_cast<double>(c) / static_cast<double>(std::max<std::uint64_t>(1, got));
            if (f.evaluate(x)) {
                ++in_f;
                l1 += std::fabs(emp - 1.0 / static_cast<double>(freq.size()));
            } else {
                l1 += emp;
            }
        }
        report["tv"] = {{"plug_in_tv", 0.5 * l1},
                        {"draws", got},
                        {"bottom_draws", bottoms},
                        {"observed_support", freq.size()},
                        {"observed_in_function", in_f},
                        {"support_caveat", true}};
    }
    write_text(out_path, dump(report));
    std::cout << dump(report);
    return 0;
}

int cmd_count(const std::string& function_path, double eps, double delta, std::uint64_t seed) {
    const BoolFunc f = load_function_file(function_path);
    Rng rng(seed);
    const ForwardTools tools = make_forward_tools(f);
    const CountEstimate e = tools.count(eps, delta, rng);
    json j = {{"value", e.value}, {"epsilon", e.epsilon}, {"delta", e.delta}, {"exact", e.exact}};
    std::cout << dump(j);
    return 0;
}

int cmd_sample(const std::string& function_path, std::uint64_t draws, std::uint64_t seed,
               const std::string& out_path) {
    const BoolFunc f = load_function_file(function_path);
    Rng rng(seed);
    const ForwardTools tools = make_forward_tools(f);
    const BottomSampler sampler = tools.make_sampler(0.0, 1e-9);
    std::vector<Assignment> out;
    out.reserve(draws);
    for (std::uint64_t i = 0; i < draws; ++i) {
        std::optional<Assignment> x;
        for (int retry = 0; retry < 100 && !x; ++retry) x = sampler.generate(rng);
        if (!x) throw algorithm_failure("sampler kept returning bottom");
        out.push_back(*x);
    }
    save_sample_file(out_path, out);
    std::cout << "wrote " << draws << " samples to " << out_path << "\n";
    return 0;
}

int cmd_graphauto(const std::string& graph_path, double eps, double delta, std::uint64_t seed,
                  std::uint64_t draws, const std::string& out_path) {
    const Graph g = load_graph_file(graph_path);
    const auto group = brute_force_automorphisms(g);  // capacity error if n > cap
    Rng rng(seed);
    auto source = [&group](Rng& r) {
        return group[static_cast<std::size_t>(r.below(group.size()))];
    };
    const PermutationSampler sampler = build_aut_inverse_sampler(source, g.n, eps, delta, rng);

    std::map<std::string, std::uint64_t> freq;
    Rng draw_rng = rng.child(1);
    for (std::uint64_t i = 0; i < draws; ++i) freq[sampler.generate(draw_rng).to_string()]++;
    double l1 = 0.0;
    const double u = 1.0 / static_cast<double>(group.size());
    std::set<std::string> members;
    for (const auto& p : group) members.insert(p.to_string());
    std::uint64_t outside = 0;
    for (const auto& [key, c] : freq) {
        const double emp = static_cast<double>(c) / static_cast<double>(draws);
        if (members.count(key)) l1 += std::fabs(emp - u);
        else {
            l1 += emp;
            outside += c;
        }
    }
    for (const auto& key : members)
        if (!freq.count(key)) l1 += u;

    json report;
    report["schema"] = 1;
    report["command"] = "graphauto";
    report["config"] = {{"graph", graph_path}, {"eps", eps},   {"delta", delta},
                        {"seed", seed},        {"draws", draws}};
    report["aut_order"] = group.size();
    report["generators_drawn"] = sampler.generators_drawn;
    report["walk_steps"] = sampler.walk_steps;
    report["tv_to_uniform"] = 0.5 * l1;
    report["draws_outside_group"] = outside;
    if (!out_path.empty()) write_text(out_path, dump(report));
    std::cout << dump(report);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"inverse approximate uniform generation toolkit"};
    app.require_subcommand(1);

    std::string class_tag = "ltf", samples_path, out_path = "report.json", out_prefix = "instance";
    std::string function_path, transcript_path, graph_path;
    int n = 10, s = 2, k = 2, term_width = 3;
    double eps = 0.25, delta = 0.2;
    std::uint64_t seed = 1, n_samples = 100000, draws = 1000000;
    bool timings_on = false, force_empirical = false, force_exact = false;

    auto* gen = app.add_subcommand("gen", "plant a function and write a positive-sample dataset");
    gen->add_option("--class", class_tag, "ltf | dnf | kdnf");
    gen->add_option("--n", n, "dimension");
    gen->add_option("--s", s, "term count (dnf)");
    gen->add_option("--k", k, "term width bound (kdnf)");
    gen->add_option("--term-width", term_width, "minimum planted term width (dnf)");
    gen->add_option("--seed", seed, "rng seed");
    gen->add_option("--samples", n_samples, "number of positive samples to write");
    gen->add_option("--out", out_prefix, "output prefix");
    gen->add_option("--function", function_path, "use this function file instead of planting");

    auto* invert = app.add_subcommand("invert", "run the inverse generation pipeline");
    invert->add_option("--class", class_tag, "ltf | dnf | kdnf");
    invert->add_option("--s", s, "term count (dnf)");
    invert->add_option("--k", k, "term width bound (kdnf)");
    invert->add_option("--eps", eps, "accuracy");
    invert->add_option("--delta", delta, "confidence");
    invert->add_option("--seed", seed, "rng seed");
    invert->add_option("--samples", samples_path, "positive-sample dataset")->required();
    invert->add_option("--out", out_path, "report path");
    invert->add_option("--transcript", transcript_path, "winner sampler transcript path");
    invert->add_flag("--timings", timings_on, "include wall-clock timings in the report");

    auto* eval = app.add_subcommand("eval", "measure a sampler transcript against a function");
    eval->add_option("--transcript", transcript_path, "sampler transcript")->required();
    eval->add_option("--function", function_path, "function file")->required();
    eval->add_option("--draws", draws, "sample budget");
    eval->add_option("--seed", seed, "rng seed");
    eval->add_option("--out", out_path, "report path");
    eval->add_flag("--empirical", force_empirical, "force plug-in mode");
    eval->add_flag("--exact", force_exact, "force exact mode (default when n is small)");

    auto* count = app.add_subcommand("count", "approximate satisfying fraction");
    count->add_option("--function", function_path, "function file")->required();
    count->add_option("--eps", eps, "accuracy");
    count->add_option("--delta", delta, "confidence");
    count->add_option("--seed", seed, "rng seed");

    auto* sample = app.add_subcommand("sample", "draw satisfying assignments");
    sample->add_option("--function", function_path, "function file")->required();
    sample->add_option("--draws", draws, "number of draws");
    sample->add_option("--seed", seed, "rng seed");
    sample->add_option("--out", out_path, "output sample file");

    auto* gauto = app.add_subcommand("graphauto", "automorphism-group walk sampler");
    gauto->add_option("--graph", graph_path, "graph file")->required();
    gauto->add_option("--eps", eps, "accuracy");
    gauto->add_option("--delta", delta, "confidence");
    gauto->add_option("--seed", seed, "rng seed");
    gauto->add_option("--draws", draws, "walk draws for the tv report");
    gauto->add_option("--out", out_path, "report path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen(class_tag, n, s, k, term_width, seed, n_samples, out_prefix,
                           function_path);
        if (invert->parsed())
            return cmd_invert(class_tag, s, k, eps, delta, seed, samples_path, out_path,
                              transcript_path, timings_on);
        if (eval->parsed())
            return cmd_eval(transcript_path, function_path, draws, seed, out_path,
                            force_empirical && !force_exact);
        if (count->parsed()) return cmd_count(function_path, eps, delta, seed);
        if (sample->parsed()) return cmd_sample(function_path, draws, seed, out_path);
        if (gauto->parsed())
            return cmd_graphauto(graph_path, eps, delta, seed, draws, out_path);
    } catch (const capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 4;
    } catch (const invalid_input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const algorithm_failure& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
