#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "invgen/genct.hpp"

namespace invgen {

// A candidate in the selection tournament: a sampler plus a deterministic
// evaluation oracle with multiplicative accuracy (1+beta).
struct CandidateDistribution {
    BottomSampler sampler;
    std::function<double(const Assignment&)> eval;
    int label = 0;
};

struct CompetitionOutcome {
    std::optional<int> winner;  // nullopt = draw
    double p_region = 0.0;      // \tilde{p}^beta_{ij}
    double q_region = 0.0;      // \tilde{q}^beta_{ij}
    double delta_hat = 0.0;     // \tilde{p} - \tilde{q}
    double tau_hat = 0.0;       // target mass of the region (0 when drawn at step 2)
};

// The deterministic threshold core of the competition, exposed so the rules
// can be exercised with stubbed (exact) estimates: draw when
// p - q <= 9 eps'/2, else i wins when tau > p - 13/8 eps', j wins when
// tau < q + 13/8 eps', else draw.
CompetitionOutcome decide_competition(double p_region, double q_region, double tau_hat,
                                      double eps_prime, int label_i, int label_j);

// Estimates the mass that `draw_from` places on the robust region
// H^beta_{ij} = {x : eval_i(x) >= eval_j(x)} (ties are members), using
// m = ceil((2/gamma^2) ln(2/delta)) draws. |result - mass| <= gamma with
// probability 1-delta.
double estimate_region_mass(const CandidateDistribution& i, const CandidateDistribution& j,
                            const BottomSampler& draw_from, double gamma, double delta, Rng& rng);

// Pairwise competition: region masses to +-eps'/8 at confidence 1-delta'/4
// each, draw declared if the gap is <= 9 eps'/2, otherwise
// m' = ceil((8/eps'^2) ln(2/delta')) target draws decide via the
// 13/8-eps' thresholds. Outcome is invariant to argument order.
CompetitionOutcome choose_hypothesis(const BottomSampler& target_source,
                                     const CandidateDistribution& i,
                                     const CandidateDistribution& j, double eps_prime,
                                     double delta_prime, Rng& rng);

struct TournamentResult {
    int winner_index = -1;
    // matrix[i][j] for i < j holds the outcome of the (i, j) competition.
    std::vector<std::vector<CompetitionOutcome>> matrix;
};

// Round-robin selection: draws ceil((8/eps^2)(ln N + ln(2/delta))) shared
// samples per distribution, runs every pair at per-pair confidence
// delta/(2N), and returns the lowest-indexed candidate that never lost.
// Bottom-emitting samplers are retried ceil(20 ln(2 N m / delta)) times per
// needed draw; candidates that still cannot produce samples lose by default.
TournamentResult tournament(const BottomSampler& target_source,
                            const std::vector<CandidateDistribution>& candidates, double epsilon,
                            double delta, Rng& rng);

} // namespace invgen
