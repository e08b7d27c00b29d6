#include "invgen/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace invgen {

std::uint64_t PipelineParams::rejection_trials(double gamma, double epsilon, double delta) {
    return static_cast<std::uint64_t>(
        std::ceil((4.0 / gamma) * std::log(1.0 / (delta * epsilon))));
}

std::uint64_t PipelineParams::grid_size(int n, double epsilon) {
    return static_cast<std::uint64_t>(
               std::ceil(static_cast<double>(n) * std::log(2.0) / std::log1p(epsilon))) +
           1;
}

double PipelineParams::grid_point(int i, int n, double epsilon) {
    return std::min(1.0, std::pow(1.0 + epsilon, i - 1) * std::ldexp(1.0, -n));
}

PipelineParams PipelineParams::derive(double epsilon, double delta, double gamma,
                                      const LearnerSpec& learner_spec,
                                      const PipelineTuning& tuning) {
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw invalid_input_error("pipeline needs epsilon, delta in (0,1)");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw invalid_input_error("gamma must be in (0,1]");
    PipelineParams p;
    p.epsilon = epsilon;
    p.delta = delta;
    p.gamma = gamma;
    p.eps1 = epsilon / 6.0;
    p.eps2 = epsilon * gamma / 7.0;
    p.eps3 = epsilon * gamma / 48000.0;
    p.tau2 = learner_spec.min_tolerance;
    p.m = std::min<std::uint64_t>(std::max<std::uint64_t>(1, learner_spec.sample_budget),
                                  tuning.sample_pool);
    p.t = rejection_trials(gamma, epsilon, delta);
    p.mu = std::max(check_accuracy(epsilon), tuning.check_mu_floor);
    p.tau_check = p.mu;
    p.beta = eval_beta(epsilon);
    return p;
}

double simulate_approx_eval(const Assignment& x, const CheckCertificate& cert, const BoolFunc& g,
                            const BoolFunc& h) {
    if (!g.evaluate(x) || !h.evaluate(x)) return 0.0;
    if (!(cert.alpha > 0.0) || !(cert.kappa > 0.0))
        throw invalid_input_error("degenerate certificate: alpha or kappa is zero");
    return 1.0 / (cert.kappa * cert.alpha);
}

std::optional<CheckCertificate> check(const BoolFunc& g, const BoolFunc& h, double delta_prime,
                                      double mu, double tau, double gamma,
                                      const ForwardTools& tools, Rng& rng) {
    if (!(delta_prime > 0.0 && delta_prime < 1.0))
        throw invalid_input_error("check needs delta' in (0,1)");
    const std::uint64_t m = static_cast<std::uint64_t>(
        std::ceil((2.0 / (gamma * mu * mu)) * std::log(2.0 / delta_prime)));
    const BottomSampler gen =
        tools.make_sampler(gamma / 4.0, delta_prime / (2.0 * static_cast<double>(m)));
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < m; ++i) {
        auto x = gen.generate(rng);
        if (!x) return std::nullopt;  // "failure" per the pseudocode
        if (h.evaluate(*x)) ++hits;
    }
    const double alpha = static_cast<double>(hits) / static_cast<double>(m);
    // A certificate only means something when h covers a noticeable slice of
    // g; honest candidates have conditional mass >= gamma/4.
    if (alpha < gamma / 8.0) return std::nullopt;
    const CountEstimate cnt = tools.count(tau, delta_prime / 2.0, rng);
    const double kappa = std::ldexp(cnt.value, g.n());
    if (!(kappa > 0.0)) return std::nullopt;
    return CheckCertificate{alpha, kappa};
}

InverseSampler::InverseSampler(BoolFunc g, BoolFunc h, std::uint64_t trials, double gen_eps,
                               double gen_delta, double gamma)
    : g_(std::move(g)), h_(std::move(h)), trials_(trials), gen_eps_(gen_eps),
      gen_delta_(gen_delta), gamma_(gamma) {
    const ForwardTools tools = make_forward_tools(g_);
    gen_ = tools.make_sampler(gen_eps_, gen_delta_);
}

std::optional<Assignment> InverseSampler::generate(Rng& rng) const {
    for (std::uint64_t i = 0; i < trials_; ++i) {
        auto x = gen_.generate(rng);
        if (!x) continue;
        if (h_.evaluate(*x)) return x;
    }
    return std::nullopt;
}

BottomSampler InverseSampler::as_bottom_sampler() const {
    // The copy keeps the returned sampler self-contained.
    auto self = std::make_shared<InverseSampler>(*this);
    return BottomSampler(
        [self](Rng& rng) -> std::optional<Assignment> { return self->generate(rng); }, gen_eps_,
        0.5);
}

Instantiation make_instantiation(const std::string& class_tag, int n, int s,
                                 const PipelineTuning& tuning) {
    Instantiation inst;
    inst.class_tag = class_tag;
    inst.n = n;
    inst.tuning = tuning;
    if (class_tag == "ltf") {
        inst.densify = [n, tuning](const BottomSampler& pos, double eps, double delta,
                                   double p_hat, Rng& rng) {
            DensifierParams params = DensifierParams::for_ltf(n, eps, delta, p_hat);
            // Desk-scale density target: the analysis gamma = delta/(16M) is
            // sound but makes every downstream budget explode; the loop
            // instead drives the hypothesis mass to within 1/density_target
            // of p_hat (see README for the tradeoff).
            params.gamma = std::max(params.gamma, tuning.density_target);
            Ltf g = densify_ltf(pos, params, n, exact_ltf_counter(), exact_ltf_sampler_factory(),
                                rng);
            Instantiation::DensifyResult res;
            res.g = BoolFunc(n, g);
            res.gamma = params.gamma;
            return res;
        };
        inst.make_learner = [n, tuning](const Instantiation::DensifyResult&) {
            return std::make_unique<HalfspaceSqLearner>(n, tuning.tolerance_floor,
                                                        tuning.halfspace_round_cap);
        };
        return inst;
    }
    if (class_tag == "dnf") {
        if (s < 1) throw invalid_input_error("dnf instantiation needs s >= 1");
        inst.densify = [n, s, tuning](const BottomSampler& pos, double eps, double delta,
                                      double p_hat, Rng& rng) {
            DensifierParams params = DensifierParams::for_dnf(n, s, eps, delta, p_hat, tuning.ell,
                                                              tuning.dnf_iteration_cap);
            std::vector<Conjunction> terms = densify_dnf(pos, params, n, s, rng);
            if (terms.empty())
                throw pipeline_stage_error("densifier", "no conjunction passed the mass filter");
            Instantiation::DensifyResult res;
            // Narrow (high-mass) terms first: cheaper DNF evaluation and the
            // min-index sampler prefers heavy witnesses.
            std::sort(terms.begin(), terms.end(), [](const Conjunction& a, const Conjunction& b) {
                return a.width() != b.width() ? a.width() < b.width() : a < b;
            });
            res.g = BoolFunc::make_dnf(n, terms);
            // Post-hoc density bound from the same counting argument as the
            // 1/(2M) analysis value, with the actual emitted size.
            res.gamma = 1.0 / (2.0 * static_cast<double>(terms.size()));
            res.features = std::move(terms);
            return res;
        };
        inst.make_learner = [n, s, tuning](const Instantiation::DensifyResult& d) {
            return std::make_unique<SparseDisjunctionLearner>(n, d.features, s, tuning.ell,
                                                              tuning.disj_tolerance_floor);
        };
        return inst;
    }
    if (class_tag == "kdnf") {
        if (s < 1) throw invalid_input_error("kdnf instantiation needs k >= 1");
        const int k = s;
        inst.densify = [n, k](const BottomSampler&, double, double, double, Rng&) {
            KdnfDensifier den = densify_kdnf(n, k);
            Instantiation::DensifyResult res;
            res.g = den.g;
            res.gamma = den.gamma;
            res.features = all_conjunctions_up_to_width(n, k);
            return res;
        };
        inst.make_learner = [n, tuning](const Instantiation::DensifyResult& d) {
            const int sparsity = static_cast<int>(d.features.size());
            return std::make_unique<SparseDisjunctionLearner>(n, d.features, sparsity, tuning.ell,
                                                              tuning.disj_tolerance_floor);
        };
        return inst;
    }
    throw invalid_input_error("unknown class tag '" + class_tag + "'");
}

namespace {

// Pool-backed sampler: replays a pre-drawn multiset, cycling.
BottomSampler pool_sampler(std::shared_ptr<std::vector<Assignment>> pool) {
    auto cursor = std::make_shared<std::size_t>(0);
    return BottomSampler(
        [pool, cursor](Rng&) -> std::optional<Assignment> {
            const Assignment& x = (*pool)[*cursor % pool->size()];
            ++*cursor;
            return x;
        },
        0.0, 0.0);
}

} // namespace

InverseSampler inv_with_bias(const BottomSampler& pos_source, double p_hat, double epsilon,
                             double delta, const Instantiation& inst, Rng& rng) {
    if (!(p_hat > 0.0 && p_hat <= 1.0)) throw invalid_input_error("p_hat must be in (0,1]");

    // Step 1: densifier at (eps/6, delta/3, p_hat).
    const double eps1 = epsilon / 6.0;
    Instantiation::DensifyResult den;
    try {
        den = inst.densify(pos_source, eps1, delta / 3.0, p_hat, rng);
    } catch (const pipeline_stage_error&) {
        throw;
    } catch (const algorithm_failure& e) {
        throw pipeline_stage_error("densifier", e.what());
    }

    ForwardTools tools;
    try {
        tools = make_forward_tools(den.g);
    } catch (const algorithm_failure& e) {
        throw pipeline_stage_error("forward-tools", e.what());
    }

    // Step 2: simulate the SQ learner over D = U_{g^-1(1)}.
    std::unique_ptr<SqLearner> learner = inst.make_learner(den);
    PipelineParams params;
    LearnerSpec lspec;
    {
        const double eps2_raw = epsilon * den.gamma / 7.0;
        lspec = learner->declared_spec(eps2_raw);
        params = PipelineParams::derive(epsilon, delta, den.gamma, lspec, inst.tuning);
    }
    const double m_real = static_cast<double>(params.m);

    auto pool_d = std::make_shared<std::vector<Assignment>>();
    auto pool_pos = std::make_shared<std::vector<Assignment>>();
    pool_d->reserve(params.m);
    pool_pos->reserve(params.m);
    {
        const BottomSampler gen =
            tools.make_sampler(params.tau2 / 8.0, delta / (12.0 * m_real));
        for (std::uint64_t i = 0; i < params.m; ++i) {
            bool got = false;
            for (int retry = 0; retry < 100 && !got; ++retry) {
                auto x = gen.generate(rng);
                if (x) {
                    pool_d->push_back(*x);
                    got = true;
                }
            }
            if (!got) throw pipeline_stage_error("generator-pool", "sampler kept failing");
        }
        for (std::uint64_t i = 0; i < params.m; ++i) {
            auto x = simulate_sample_dfplus(pos_source, den.g, den.gamma,
                                            delta / (12.0 * m_real), rng);
            if (!x) throw pipeline_stage_error("dfplus-pool", "rejection cap exhausted");
            pool_pos->push_back(*x);
        }
    }

    BiasEstimate bias;
    try {
        bias = estimate_bias(p_hat, params.tau2 / 2.0, delta / 12.0, den.g, tools, rng);
    } catch (const algorithm_failure& e) {
        throw pipeline_stage_error("estimate-bias", e.what());
    }

    const BottomSampler d_sampler = pool_sampler(pool_d);
    const BottomSampler pos_pool = pool_sampler(pool_pos);
    const std::uint64_t cap = inst.tuning.samples_per_estimate;
    StatAnswerFn answer = [&](const StatQuery& q, double delta_q, Rng& r) {
        return simulate_stat_capped(q, d_sampler, pos_pool, bias, delta_q, cap, r);
    };

    BoolFunc h;
    try {
        const double eps2 = params.eps2;
        h = run_sq_learner(*learner, lspec, answer, eps2, delta / 12.0, rng);
    } catch (const pipeline_stage_error&) {
        throw;
    } catch (const algorithm_failure& e) {
        throw pipeline_stage_error("sq-learner", e.what());
    }

    // Step 3: rejection sampler with t trials at generator accuracy eps3.
    const double gen_delta = delta * epsilon / (12.0 * static_cast<double>(params.t));
    return InverseSampler(den.g, h, params.t, params.eps3, gen_delta, den.gamma);
}

InversionOutcome inverse_generate(const BottomSampler& pos_source, double epsilon, double delta,
                                  const Instantiation& inst, Rng& rng) {
    const int n = inst.n;
    const std::uint64_t k = PipelineParams::grid_size(n, epsilon);
    InversionOutcome out;

    struct Survivor {
        InverseSampler sampler;
        CheckCertificate cert;
        int grid_index;
    };
    std::vector<Survivor> survivors;

    for (std::uint64_t i = 1; i <= k; ++i) {
        GridEntry entry;
        entry.index = static_cast<int>(i);
        entry.p_hat = PipelineParams::grid_point(static_cast<int>(i), n, epsilon);
        Rng grid_rng = rng.child(i);
        try {
            InverseSampler cand =
                inv_with_bias(pos_source, entry.p_hat, epsilon / 12.0, delta / 3.0, inst, grid_rng);
            entry.produced = true;
            entry.gamma = cand.gamma();
            if (cand.g().is_dnf())
                entry.densifier_terms = static_cast<int>(cand.g().as_dnf().terms.size());
            const ForwardTools tools = make_forward_tools(cand.g());
            const double mu = std::max(PipelineParams::check_accuracy(epsilon),
                                       inst.tuning.check_mu_floor);
            auto cert = check(cand.g(), cand.h(), delta / 3.0, mu, mu, cand.gamma(), tools,
                              grid_rng);
            if (cert) {
                entry.certified = true;
                entry.alpha = cert->alpha;
                entry.kappa = cert->kappa;
                cand.set_certificate(*cert);
                survivors.push_back(Survivor{std::move(cand), *cert, static_cast<int>(i)});
            } else {
                entry.note = "check returned failure";
            }
        } catch (const algorithm_failure& e) {
            entry.note = e.what();
        }
        out.grid.push_back(std::move(entry));
    }

    if (survivors.empty()) throw algorithm_failure("inversion failed: no certified candidate");

    std::vector<CandidateDistribution> cands;
    cands.reserve(survivors.size());
    for (std::size_t idx = 0; idx < survivors.size(); ++idx) {
        const Survivor& s = survivors[idx];
        out.survivors.push_back(s.grid_index);
        CandidateDistribution cd;
        cd.label = static_cast<int>(idx);
        cd.sampler = s.sampler.as_bottom_sampler();
        const BoolFunc g = s.sampler.g();
        const BoolFunc h = s.sampler.h();
        const CheckCertificate cert = s.cert;
        cd.eval = [g, h, cert](const Assignment& x) {
            return simulate_approx_eval(x, cert, g, h);
        };
        cands.push_back(std::move(cd));
    }

    Rng tour_rng = rng.child(0x746f7572);
    out.tournament = tournament(pos_source, cands, epsilon / 12.0, delta / 3.0, tour_rng);
    const int win = out.tournament.winner_index;
    out.winner = survivors[static_cast<std::size_t>(win)].sampler;
    out.winner_grid_index = survivors[static_cast<std::size_t>(win)].grid_index;
    return out;
}

} // namespace invgen
