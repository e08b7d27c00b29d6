#pragma once

#include <memory>
#include <optional>
#include <string>

#include "invgen/densify.hpp"
#include "invgen/hypsel.hpp"

namespace invgen {

struct pipeline_stage_error : algorithm_failure {
    pipeline_stage_error(std::string stage_name, const std::string& msg)
        : algorithm_failure("[" + stage_name + "] " + msg), stage(std::move(stage_name)) {}
    std::string stage;
};

// Desk-scale execution knobs. The stage structure and every delta split
// follow the analysis; these floors and caps keep sample counts and descent
// rounds finite enough to run, at the cost of the worst-case constants.
struct PipelineTuning {
    double density_target = 1.0 / 8.0;     // gamma the LTF densifier drives toward
    double tolerance_floor = 0.05;          // SQ tolerance floor, halfspace route
    double disj_tolerance_floor = 0.02;     // SQ tolerance floor, disjunction routes
    std::uint64_t halfspace_round_cap = 240;
    std::uint64_t sample_pool = 40000;      // per-side SQ sample pool cap
    std::uint64_t samples_per_estimate = 8000;
    double check_mu_floor = 0.05;           // floor for Check's mu = tau
    std::uint64_t dnf_iteration_cap = 4000; // DNF densifier loop cap
    EllPoly ell;
};

// Derived constants of the known-bias pipeline run.
struct PipelineParams {
    double epsilon = 0.0;
    double delta = 0.0;
    double gamma = 0.0;          // densifier density in force
    double eps1 = 0.0;           // epsilon/6
    double eps2 = 0.0;           // epsilon*gamma/7
    double eps3 = 0.0;           // epsilon*gamma/48000
    double tau2 = 0.0;           // learner min tolerance at eps2
    std::uint64_t m = 0;         // SQ sample pool size
    std::uint64_t t = 0;         // rejection trials: ceil((4/gamma) ln(1/(delta*eps)))
    double mu = 0.0;             // Check accuracy (floored)
    double tau_check = 0.0;      // Check counter accuracy (floored)
    double beta = 0.0;           // epsilon/192

    static double check_accuracy(double epsilon) { return epsilon / 40000.0; }
    static double eval_beta(double epsilon) { return epsilon / 192.0; }
    static std::uint64_t rejection_trials(double gamma, double epsilon, double delta);
    static std::uint64_t grid_size(int n, double epsilon);
    static double grid_point(int i, int n, double epsilon);  // i is 1-based

    static PipelineParams derive(double epsilon, double delta, double gamma,
                                 const LearnerSpec& learner_spec, const PipelineTuning& tuning);
};

struct CheckCertificate {
    double alpha = 0.0;  // density of h within g, in [0,1]
    double kappa = 0.0;  // |g^-1(1)| estimate, in [0, 2^{n+1}]
};

// Deterministic (1+beta)-approximate evaluation oracle for the conditional
// output distribution of the rejection sampler: 0 outside g and h, else
// 1/(kappa * alpha).
double simulate_approx_eval(const Assignment& x, const CheckCertificate& cert, const BoolFunc& g,
                            const BoolFunc& h);

// Certifier: m = ceil((2/(gamma mu^2)) ln(2/delta')) generator draws at
// accuracy gamma/4 and per-draw confidence delta'/(2m); alpha = fraction
// satisfying h; kappa = 2^n * counter(tau, delta'/2). Returns nullopt
// ("failure") if any draw comes back bottom or the measured density is too
// low for the certificate to be meaningful (below gamma/8).
std::optional<CheckCertificate> check(const BoolFunc& g, const BoolFunc& h, double delta_prime,
                                      double mu, double tau, double gamma,
                                      const ForwardTools& tools, Rng& rng);

// The sampler produced by the known-bias pipeline: up to `trials` draws from
// the g-generator, returning the first one that satisfies h, else bottom.
// Bottom surfaces to the caller so total variation is measured conditionally.
class InverseSampler {
public:
    InverseSampler() = default;
    InverseSampler(BoolFunc g, BoolFunc h, std::uint64_t trials, double gen_eps, double gen_delta,
                   double gamma);

    std::optional<Assignment> generate(Rng& rng) const;
    BottomSampler as_bottom_sampler() const;

    const BoolFunc& g() const { return g_; }
    const BoolFunc& h() const { return h_; }
    std::uint64_t trials() const { return trials_; }
    double gen_eps() const { return gen_eps_; }
    double gen_delta() const { return gen_delta_; }
    double gamma() const { return gamma_; }
    const std::optional<CheckCertificate>& certificate() const { return cert_; }
    void set_certificate(const CheckCertificate& cert) { cert_ = cert; }

private:
    BoolFunc g_, h_;
    std::uint64_t trials_ = 0;
    double gen_eps_ = 0.0;
    double gen_delta_ = 0.0;
    double gamma_ = 0.0;
    std::optional<CheckCertificate> cert_;
    BottomSampler gen_;
};

// One inverse-generation problem class, bundled: densifier, forward tools
// and SQ learner wiring.
struct Instantiation {
    struct DensifyResult {
        BoolFunc g;
        double gamma = 0.0;
        std::vector<Conjunction> features;  // learner feature space (DNF routes)
    };

    std::string class_tag;
    int n = 0;
    PipelineTuning tuning;
    std::function<DensifyResult(const BottomSampler& pos, double eps, double delta, double p_hat,
                                Rng& rng)>
        densify;
    std::function<std::unique_ptr<SqLearner>(const DensifyResult&)> make_learner;
};

// class_tag is "ltf", "dnf" (s = term count) or "kdnf" (s = width bound).
Instantiation make_instantiation(const std::string& class_tag, int n, int s,
                                 const PipelineTuning& tuning = {});

// Known-bias inverse generation: densify, simulate the SQ learner, wrap the
// rejection sampler. Throws pipeline_stage_error on stage failures.
InverseSampler inv_with_bias(const BottomSampler& pos_source, double p_hat, double epsilon,
                             double delta, const Instantiation& inst, Rng& rng);

struct GridEntry {
    int index = 0;          // 1-based grid position
    double p_hat = 0.0;
    bool produced = false;  // inv_with_bias finished
    bool certified = false; // Check issued a certificate
    std::string note;
    double gamma = 0.0;
    double alpha = 0.0;
    double kappa = 0.0;
    int densifier_terms = 0;  // DNF routes: emitted conjunction count
};

struct InversionOutcome {
    InverseSampler winner;
    int winner_grid_index = 0;  // 1-based
    std::vector<GridEntry> grid;
    std::vector<int> survivors;  // 1-based grid indices entering the tournament
    TournamentResult tournament;
};

// Full inverse approximate uniform generation: sweep the p-hat grid with
// inv_with_bias at (eps/12, delta/3), certify with Check at (delta/3, eps),
// select with the tournament at (eps/12, delta/3) using simulate_approx_eval
// oracles. Throws algorithm_failure when no candidate survives.
InversionOutcome inverse_generate(const BottomSampler& pos_source, double epsilon, double delta,
                                  const Instantiation& inst, Rng& rng);

} // namespace invgen
